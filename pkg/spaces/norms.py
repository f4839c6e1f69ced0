"""
Norms on discrete spaces: Hilbert, weighted ℓ^p, Luxemburg and Orlicz

A SpaceModel couples a MeasureSpace with one norm structure. The Luxemburg
norm of f is the root k of Σ P(fᵢ/k)μᵢ = 1; the Orlicz norm of g is the
value of max Σ gᵢfᵢμᵢ over Σ P(fᵢ)μᵢ ≤ 1, solved through its KKT system
fᵢ = (P′)⁻¹(t·|gᵢ|)·sgn gᵢ with the scalar t fixed by the constraint.
"""
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from config.solver_config import NORM_RTOL, ROOT_RTOL
from spaces.measure_space import (
    DualFunctional,
    MeasureSpace,
    RealFunction,
    pairing,
    space_from_json,
    weighted_sum,
)
from spaces.young import (
    YoungFunction,
    check_young,
    conjugate,
    inverse_value,
    young_from_json,
)
from utils.errors import (
    DomainError,
    SolverDivergenceError,
    StructuralError,
    UnsupportedModelError,
    UnsupportedYoungError,
)
from utils.logger import setup_logger
from utils.rootfinding import bisect_scalar, bracket_increasing, solve_increasing
from utils.validators import conjugate_exponent, validate_exponent

logger = setup_logger("norms")


@dataclass(frozen=True)
class Hilbert:
    kind = "hilbert"

    def to_json(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class PLebesgue:
    p: float
    kind = "lebesgue"

    @property
    def q(self) -> float:
        return conjugate_exponent(self.p)

    def to_json(self) -> dict:
        return {"kind": self.kind, "p": self.p}


@dataclass(frozen=True)
class Orlicz:
    young: YoungFunction
    kind = "orlicz"

    def to_json(self) -> dict:
        return {"kind": self.kind, "young": self.young.to_json()}


Structure = Hilbert | PLebesgue | Orlicz


@dataclass(frozen=True, eq=False)
class SpaceModel:
    """A measure space together with the norm structure of X"""

    space: MeasureSpace
    structure: Structure

    def __post_init__(self):
        if isinstance(self.structure, PLebesgue):
            if not validate_exponent(self.structure.p):
                raise DomainError(f"pLebesgue needs 1 < p < ∞, got {self.structure.p}")
        elif isinstance(self.structure, Orlicz):
            check_young(self.structure.young, enforce=True)
        elif not isinstance(self.structure, Hilbert):
            raise StructuralError(f"unknown norm structure {self.structure!r}")

    @classmethod
    def hilbert(cls, space: MeasureSpace) -> "SpaceModel":
        return cls(space, Hilbert())

    @classmethod
    def lebesgue(cls, space: MeasureSpace, p: float) -> "SpaceModel":
        return cls(space, PLebesgue(float(p)))

    @classmethod
    def orlicz(cls, space: MeasureSpace, young: YoungFunction) -> "SpaceModel":
        return cls(space, Orlicz(young))

    @property
    def kind(self) -> str:
        return self.structure.kind

    @property
    def young(self) -> YoungFunction:
        if not isinstance(self.structure, Orlicz):
            raise UnsupportedModelError(f"{self.kind} model has no Young function")
        return self.structure.young

    def __eq__(self, other):
        if not isinstance(other, SpaceModel):
            return NotImplemented
        return self.space == other.space and self.structure == other.structure

    def __hash__(self):
        return hash((self.space, self.structure))

    def describe(self) -> str:
        if isinstance(self.structure, PLebesgue):
            return f"lebesgue(p={self.structure.p:g}, n={self.space.dimension})"
        if isinstance(self.structure, Orlicz):
            return f"orlicz({self.structure.young.label}, n={self.space.dimension})"
        return f"hilbert(n={self.space.dimension})"

    def to_json(self) -> dict:
        return {**self.space.to_json(), "structure": self.structure.to_json()}


@dataclass(frozen=True)
class NormSolution:
    """Norm value with solver diagnostics"""

    value: float
    iterations: int = 0
    bracket: tuple[float, float] = (0.0, 0.0)
    multiplier: float | None = None

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "iterations": self.iterations,
            "bracket": list(self.bracket),
            "multiplier": self.multiplier,
        }


def model_from_json(data: dict) -> SpaceModel:
    """{"weights": [...], "structure": {"kind": "hilbert" | "lebesgue" | "orlicz", ...}}"""
    space = space_from_json(data)
    structure = data.get("structure", {"kind": "hilbert"})
    if not isinstance(structure, dict):
        raise StructuralError("structure must be an object")
    kind = structure.get("kind")
    if kind == "hilbert":
        return SpaceModel.hilbert(space)
    if kind == "lebesgue":
        if "p" not in structure:
            raise DomainError('lebesgue structure needs "p"')
        try:
            p = float(structure["p"])
        except (TypeError, ValueError) as e:
            raise DomainError(f"invalid exponent {structure['p']!r}") from e
        return SpaceModel.lebesgue(space, p)
    if kind == "orlicz":
        return SpaceModel.orlicz(space, young_from_json(structure.get("young")))
    raise StructuralError(f"unknown structure kind {kind!r}")


def dual_model(model: SpaceModel) -> SpaceModel:
    """Norm structure of X′ when it is again in the supported family"""
    if isinstance(model.structure, Hilbert):
        return model
    if isinstance(model.structure, PLebesgue):
        return SpaceModel.lebesgue(model.space, model.structure.q)
    raise UnsupportedModelError("the dual of an Orlicz model carries the Orlicz norm, not a supported structure")


def _require_member(model: SpaceModel, item):
    if item.space != model.space:
        raise StructuralError(
            f"{type(item).__name__} of dimension {item.space.dimension} does not belong to {model.describe()}"
        )


def _require_orlicz(model: SpaceModel) -> YoungFunction:
    if not isinstance(model.structure, Orlicz):
        raise UnsupportedModelError(f"operation needs an Orlicz model, got {model.kind}")
    return model.structure.young


def _lp(values: np.ndarray, p: float, space: MeasureSpace) -> float:
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        return 0.0
    return peak * weighted_sum(space, np.power(np.abs(values) / peak, p)) ** (1.0 / p)


def luxemburg_solve(model: SpaceModel, f: RealFunction) -> NormSolution:
    """
    Luxemburg norm inf{k > 0 : Σ P(fᵢ/k)μᵢ ≤ 1} with diagnostics

    k ↦ Σ P(fᵢ/k)μᵢ is continuous and strictly decreasing, so the infimum is
    its root. The bracket starts at max|fᵢ| / P⁻¹(1/Σμᵢ) and is halved or
    doubled until it straddles 1.
    """
    P = _require_orlicz(model)
    _require_member(model, f)
    x = f.values
    if not np.any(x):
        return NormSolution(0.0)

    def excess(k):
        with np.errstate(over="ignore"):
            return weighted_sum(model.space, P.evaluate(x / k)) - 1.0

    start = float(np.max(np.abs(x))) / inverse_value(P, 1.0 / model.space.total_mass)
    lo, hi, expansions = bracket_increasing(lambda k: -excess(k), start)
    root, info = bisect_scalar(excess, lo, hi, NORM_RTOL)
    iterations = expansions + (info.iterations if info is not None else 0)
    logger.debug(f"luxemburg: k={root:.17g} bracket=[{lo:g}, {hi:g}] iterations={iterations}")
    return NormSolution(float(root), iterations, (lo, hi))


def luxemburg_norm(model: SpaceModel, f: RealFunction) -> float:
    return luxemburg_solve(model, f).value


def kkt_point(model: SpaceModel, g: DualFunctional):
    """
    Solve hᵢ = (P′)⁻¹(t·|gᵢ|)·sgn gᵢ with Σ P(hᵢ)μᵢ = 1

    h is the maximizer of Σ gᵢfᵢμᵢ over the P-unit ball and the point of the
    Luxemburg unit sphere where g attains its norm.

    Returns:
        (h as array, NormSolution with value Σ gᵢhᵢμᵢ and multiplier t)
    """
    P = _require_orlicz(model)
    _require_member(model, g)
    if not P.strict_derivative:
        raise UnsupportedYoungError(f"{P.label}: Orlicz norm needs strictly increasing P′")
    magnitude = np.abs(g.values)
    if not np.any(magnitude):
        return np.zeros_like(magnitude), NormSolution(0.0)

    def direction(t):
        return solve_increasing(P.derivative, t * magnitude, on_overflow=SolverDivergenceError)

    def excess(t):
        with np.errstate(over="ignore"):
            return weighted_sum(model.space, P.evaluate(direction(t))) - 1.0

    level = inverse_value(P, 1.0 / model.space.total_mass)
    start = float(P.derivative(np.asarray(level))) / float(np.max(magnitude))
    lo, hi, expansions = bracket_increasing(excess, start)
    t, info = bisect_scalar(excess, lo, hi, ROOT_RTOL)
    h = np.sign(g.values) * direction(t)
    value = weighted_sum(model.space, g.values * h)
    iterations = expansions + (info.iterations if info is not None else 0)
    logger.debug(f"kkt: t={t:.17g} value={value:.17g} iterations={iterations}")
    return h, NormSolution(float(value), iterations, (lo, hi), float(t))


def orlicz_solve(model: SpaceModel, g: DualFunctional) -> NormSolution:
    return kkt_point(model, g)[1]


def orlicz_norm(model: SpaceModel, g: DualFunctional) -> float:
    """sup{Σ gᵢfᵢμᵢ : Σ P(fᵢ)μᵢ ≤ 1}"""
    return orlicz_solve(model, g).value


def norm(model: SpaceModel, f: RealFunction) -> float:
    """Norm of f in X"""
    _require_member(model, f)
    structure = model.structure
    if isinstance(structure, Hilbert):
        return _lp(f.values, 2.0, model.space)
    if isinstance(structure, PLebesgue):
        return _lp(f.values, structure.p, model.space)
    return luxemburg_norm(model, f)


def dual_norm(model: SpaceModel, g: DualFunctional) -> float:
    """Norm of g in X′ (ℓ², ℓ^q or Orlicz norm)"""
    _require_member(model, g)
    structure = model.structure
    if isinstance(structure, Hilbert):
        return _lp(g.values, 2.0, model.space)
    if isinstance(structure, PLebesgue):
        return _lp(g.values, structure.q, model.space)
    return orlicz_norm(model, g)


def norm_rows(model: SpaceModel, rows: np.ndarray) -> np.ndarray:
    """Norms of each row of a (m, n) array"""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[1] != model.space.dimension:
        raise StructuralError(f"rows of length {rows.shape[1]} do not fit dimension {model.space.dimension}")
    structure = model.structure
    if isinstance(structure, Orlicz):
        return np.array([luxemburg_norm(model, RealFunction(row, model.space)) for row in rows])
    p = 2.0 if isinstance(structure, Hilbert) else structure.p
    peak = np.max(np.abs(rows), axis=1)
    safe = np.where(peak > 0, peak, 1.0)
    scaled = np.power(np.abs(rows) / safe[:, None], p) @ model.space.weights
    return np.where(peak > 0, peak * scaled ** (1.0 / p), 0.0)


def holder_check(model: SpaceModel, f: RealFunction, g: DualFunctional) -> float:
    """‖f‖_Lux·‖g‖_Orl − Σ|fᵢgᵢ|μᵢ; nonnegative up to solver noise"""
    _require_orlicz(model)
    _require_member(model, f)
    _require_member(model, g)
    product = weighted_sum(model.space, np.abs(f.values * g.values))
    return luxemburg_norm(model, f) * orlicz_norm(model, g) - product


def amemiya_norm(model: SpaceModel, g: DualFunctional) -> float:
    """
    Cross-check for the Orlicz norm: inf over k > 0 of k⁻¹(1 + Σ Q(k·gᵢ)μᵢ)

    Minimized over log k by bounded Brent search around 1/‖g‖_∞.
    """
    P = _require_orlicz(model)
    _require_member(model, g)
    if not np.any(g.values):
        return 0.0

    def objective(log_k):
        k = np.exp(log_k)
        return (1.0 + weighted_sum(model.space, conjugate(P, k * g.values))) / k

    center = -np.log(float(np.max(np.abs(g.values))))
    result = optimize.minimize_scalar(objective, bounds=(center - 25.0, center + 25.0), method="bounded",
                                      options={"xatol": 1e-10, "maxiter": 500})
    return float(result.fun)


def _project_to_unit_ball(model: SpaceModel, P: YoungFunction, w: np.ndarray) -> np.ndarray:
    # Euclidean projection onto {Σ P(zᵢ)μᵢ ≤ 1}: zᵢ + ν μᵢ P′(zᵢ) = wᵢ
    if weighted_sum(model.space, P.evaluate(w)) <= 1.0:
        return w
    magnitude = np.abs(w)
    mu = model.space.weights

    def shrink(nu):
        return solve_increasing(lambda z: z + nu * mu * P.derivative(z), magnitude)

    def excess(nu):
        return weighted_sum(model.space, P.evaluate(shrink(nu))) - 1.0

    lo, hi, _ = bracket_increasing(lambda nu: -excess(nu), 1.0)
    nu, _ = bisect_scalar(excess, lo, hi, ROOT_RTOL)
    return np.sign(w) * shrink(nu)


def orlicz_norm_by_ascent(model: SpaceModel, g: DualFunctional, rng: np.random.Generator,
                          max_iter: int = 200, tol: float = 1e-13) -> float:
    """
    Projected ascent on Σ gᵢfᵢμᵢ over the P-unit ball

    Independent of the KKT solver: every step moves along the Euclidean
    gradient gᵢμᵢ and projects back onto the ball.
    """
    P = _require_orlicz(model)
    _require_member(model, g)
    if not np.any(g.values):
        return 0.0
    gradient = g.values * model.space.weights
    step = 1e3 / float(np.max(np.abs(gradient)))
    f = _project_to_unit_ball(model, P, rng.standard_normal(model.space.dimension))
    value = weighted_sum(model.space, g.values * f)
    for _ in range(max_iter):
        f_next = _project_to_unit_ball(model, P, f + step * gradient)
        value_next = weighted_sum(model.space, g.values * f_next)
        moved = float(np.max(np.abs(f_next - f)))
        f, value = f_next, value_next
        if moved <= tol * (1.0 + float(np.max(np.abs(f)))):
            break
    return float(value)


@dataclass(frozen=True)
class UniformConvexityCheck:
    premise: bool
    slack: float


def uniform_convexity_check(model: SpaceModel, f: RealFunction, g: RealFunction,
                            eps: float, rho: float, alpha: float) -> UniformConvexityCheck:
    """
    The implication behind uniform convexity of L^P:

        ∫P(f) ≤ 1, ∫P(g) ≤ 1, ∫P((f+g)/2) ≥ 1 − ερ  ⇒  ∫P(f−g) ≤ 2αε

    Returns:
        Whether the premise holds and the slack 2αε − ∫P(f−g)
    """
    P = _require_orlicz(model)
    _require_member(model, f)
    _require_member(model, g)
    energy_f = weighted_sum(model.space, P.evaluate(f.values))
    energy_g = weighted_sum(model.space, P.evaluate(g.values))
    energy_mid = weighted_sum(model.space, P.evaluate(0.5 * (f.values + g.values)))
    premise = energy_f <= 1.0 + 1e-12 and energy_g <= 1.0 + 1e-12 and energy_mid >= 1.0 - eps * rho
    spread = weighted_sum(model.space, P.evaluate(f.values - g.values))
    return UniformConvexityCheck(premise, 2.0 * alpha * eps - spread)


def operator_value(model: SpaceModel, g: DualFunctional, f: RealFunction) -> float:
    """pairing(g, f) / ‖f‖"""
    return pairing(model.space, g, f) / norm(model, f)
