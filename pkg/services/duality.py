"""
The norm gradient N′, the duality map M and the representations built on them

N′ maps the unit sphere S of X onto the unit sphere S′ of X′ and M is its
inverse: M(y) is the unique unit vector where y attains its norm. Every
operation accepts non-unit inputs, normalizes internally and reports the
scale it removed.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from spaces.measure_space import (
    DualFunctional,
    RealFunction,
    pairing,
    to_function,
    to_functional,
    weighted_sum,
)
from spaces.norms import (
    Hilbert,
    Orlicz,
    PLebesgue,
    SpaceModel,
    dual_model,
    dual_norm,
    kkt_point,
    norm,
)
from utils.errors import (
    DomainError,
    GradientUndefinedError,
    SolverDivergenceError,
    StructuralError,
    UndefinedDirectionError,
    UnsupportedYoungError,
)
from utils.logger import setup_logger
from utils.validators import conjugate_exponent, validate_exponent

logger = setup_logger("duality")

RIESZ_TOLERANCE = 1e-8
ORACLE_GRADIENT_TOL = 1e-10
ORACLE_MAX_ITER = 5000
ORACLE_STEP_CAP = 1e6


@dataclass(frozen=True)
class DualityResult:
    """M(y) on the unit sphere together with N′(M(y))"""

    point: RealFunction
    functional: DualFunctional
    multiplier: float
    residual: float
    scale: float

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "functional": self.functional.to_json(),
            "multiplier": self.multiplier,
            "residual": self.residual,
            "scale": self.scale,
        }


@dataclass(frozen=True)
class GateauxProfile:
    """r(t) = |N(x+tu) − N(x) − t·N′(x)u| over a grid of steps"""

    steps: list[float]
    residuals: list[float]
    ratios: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"steps": self.steps, "residuals": self.residuals, "ratios": self.ratios}


def _require_supported(model: SpaceModel):
    if isinstance(model.structure, Orlicz) and not model.structure.young.delta2:
        raise UnsupportedYoungError(f"{model.structure.young.label} violates Δ2; duality operations need it")


def _signed_power(values: np.ndarray, exponent: float) -> np.ndarray:
    return np.power(np.abs(values), exponent) * np.sign(values)


def mazur_map(p: float, h: RealFunction) -> RealFunction:
    """F(h) = |h|^{p/q} sgn h, a homeomorphism from ℓ^p onto ℓ^q"""
    if not validate_exponent(p):
        raise DomainError(f"mazur_map needs 1 < p < ∞, got {p}")
    q = conjugate_exponent(p)
    return RealFunction(_signed_power(h.values, p / q), h.space)


def mazur_inverse(p: float, g: RealFunction) -> RealFunction:
    """F⁻¹(g) = |g|^{q/p} sgn g"""
    if not validate_exponent(p):
        raise DomainError(f"mazur_inverse needs 1 < p < ∞, got {p}")
    q = conjugate_exponent(p)
    return RealFunction(_signed_power(g.values, q / p), g.space)


def norm_gradient(model: SpaceModel, x: RealFunction) -> DualFunctional:
    """
    N′(x/‖x‖), the derivative of the norm at the normalized point

    Hilbert: x̂ itself. ℓ^p: |x̂ᵢ|^{p−1} sgn x̂ᵢ. Orlicz with Luxemburg norm:
    P′(ĥᵢ) / Σⱼ P′(ĥⱼ)ĥⱼμⱼ with ĥ = x/‖x‖.

    Raises:
        GradientUndefinedError: x = 0
    """
    _require_supported(model)
    if x.space != model.space:
        raise StructuralError("x does not belong to the model's space")
    if x.is_zero():
        raise GradientUndefinedError("the norm is not differentiable at 0")
    structure = model.structure
    scale = norm(model, x)
    unit = x.values / scale
    if isinstance(structure, Hilbert):
        coefficients = unit
    elif isinstance(structure, PLebesgue):
        coefficients = _signed_power(unit, structure.p - 1.0)
    else:
        P = structure.young
        slope = P.derivative(unit)
        coefficients = slope / weighted_sum(model.space, slope * unit)
    return DualFunctional(coefficients, model.space)


def duality_map(model: SpaceModel, y: DualFunctional) -> DualityResult:
    """
    M(y): the unit vector where y/‖y‖ attains the value 1

    Hilbert: ŷ itself. ℓ^p: F⁻¹(ŷ), the inverse Mazur map. Orlicz: the
    stationarity system P′(h) ∝ g on the Luxemburg sphere, with the
    proportionality constant found by scalar bisection.

    Raises:
        UndefinedDirectionError: y = 0
        SolverDivergenceError: multiplier bracket could not be found
    """
    _require_supported(model)
    if y.space != model.space:
        raise StructuralError("y does not belong to the model's space")
    if y.is_zero():
        raise UndefinedDirectionError("the zero functional attains its norm everywhere")
    structure = model.structure
    if isinstance(structure, Orlicz):
        h, solution = kkt_point(model, y)
        scale = solution.value
        multiplier = float(solution.multiplier)
        point = RealFunction(h, model.space)
    else:
        scale = dual_norm(model, y)
        multiplier = scale
        unit = y.values / scale
        if isinstance(structure, PLebesgue):
            point = mazur_inverse(structure.p, RealFunction(unit, model.space))
        else:
            point = RealFunction(unit, model.space)

    unit_functional = y / scale
    functional = norm_gradient(model, point)
    difference = functional - unit_functional
    residual = 0.0 if difference.is_zero() else dual_norm(model, difference)
    logger.debug(f"duality_map on {model.describe()}: scale={scale:.17g} residual={residual:.3e}")
    return DualityResult(point, functional, multiplier, residual, scale)


def dual_norm_gradient(model: SpaceModel, g: DualFunctional) -> RealFunction:
    """Gradient of g ↦ ‖g‖_dual in pairing coordinates, which is M(g)"""
    return duality_map(model, g).point


def riesz_represent(model: SpaceModel, y: DualFunctional, seed: int = 0, trials: int = 100) -> DualFunctional:
    """
    Representing density g with pairing(g, ·) = y, built as ‖y‖·N′(M(y))

    The representation is checked on `trials` random functions f drawn from
    a generator seeded with `seed`: |pairing(g, f) − pairing(y, f)| ≤ 1e−8·‖f‖.

    Raises:
        SolverDivergenceError: the check fails
    """
    result = duality_map(model, y)
    density = result.functional * result.scale
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        f = RealFunction(rng.standard_normal(model.space.dimension), model.space)
        defect = abs(pairing(model.space, density, f) - pairing(model.space, y, f)) / norm(model, f)
        worst = max(worst, defect)
    if worst > RIESZ_TOLERANCE:
        raise SolverDivergenceError("representation does not reproduce the functional",
                                    {"worst_defect": worst, "tolerance": RIESZ_TOLERANCE, "seed": seed})
    return density


def reflexivity_witness(model: SpaceModel, phi: DualFunctional) -> RealFunction:
    """
    x ∈ X with Φ(ỹ) = ỹ(x) for every ỹ ∈ X′

    Φ acts on X′ through the same pairing. The unit functional y with
    Φ(y) = ‖Φ‖ is the duality map of Φ inside the dual model, and x is
    ‖Φ‖·M(y).

    Raises:
        UnsupportedModelError: Orlicz models (no supported dual structure)
    """
    dual = dual_model(model)
    if phi.space != model.space:
        raise StructuralError("Φ does not belong to the model's space")
    if phi.is_zero():
        raise UndefinedDirectionError("Φ = 0 has no norming functional")
    in_dual = duality_map(dual, phi)
    norming = to_functional(in_dual.point)
    in_space = duality_map(model, norming)
    return in_space.point * in_dual.scale


def second_dual_action(phi: DualFunctional, y: DualFunctional) -> float:
    """Φ(ỹ) = Σ Φᵢỹᵢμᵢ"""
    return pairing(phi.space, phi, to_function(y))


def gateaux_fd_check(model: SpaceModel, x: RealFunction, u: RealFunction, t_grid) -> GateauxProfile:
    """r(t) = |N(x+tu) − N(x) − t·pairing(N′(x), u)| for each t"""
    gradient = norm_gradient(model, x)
    base = norm(model, x)
    slope = pairing(model.space, gradient, u)
    steps, residuals, ratios = [], [], []
    for t in t_grid:
        t = float(t)
        if t == 0.0:
            residual = 0.0
        else:
            residual = abs(norm(model, x + u * t) - base - t * slope)
        steps.append(t)
        residuals.append(residual)
        ratios.append(residual / abs(t) if t != 0.0 else 0.0)
    return GateauxProfile(steps, residuals, ratios)


def central_difference(model: SpaceModel, x: RealFunction, u: RealFunction, step: float = 1e-5) -> float:
    """(N(x+hu) − N(x−hu)) / 2h"""
    return (norm(model, x + u * step) - norm(model, x - u * step)) / (2.0 * step)


def projected_descent(gradient_of, start: np.ndarray, normal: np.ndarray | None = None,
                      tolerance: float = ORACLE_GRADIENT_TOL, max_iter: int = ORACLE_MAX_ITER):
    """
    Minimize a smooth convex function from its gradient alone, optionally on {v : normal·v = 1}

    Gradient descent with Barzilai–Borwein step lengths; with a normal the
    gradient is projected onto the hyperplane first. A step that passes the
    minimum along the search line is pulled back to it by a root search on
    the directional derivative, so the iteration never compares function
    values and is not limited by their rounding.

    Args:
        gradient_of: v ↦ Euclidean gradient at v
        start: Starting point (projected onto the hyperplane when there is one)
        normal: Normal vector of the hyperplane, None for no constraint
        tolerance: Stop once the (projected) gradient is this small
        max_iter: Iteration cap

    Returns:
        (point with the smallest gradient seen, that gradient's length, iterations)
    """
    if normal is None:
        def on_plane(v):
            return v

        def descent(v):
            return np.asarray(gradient_of(v), dtype=float)
    else:
        normal = np.asarray(normal, dtype=float)
        normal_sq = float(normal @ normal)

        def on_plane(v):
            return v - ((float(normal @ v) - 1.0) / normal_sq) * normal

        def descent(v):
            slope = np.asarray(gradient_of(v), dtype=float)
            return slope - (float(normal @ slope) / normal_sq) * normal

    v = on_plane(np.asarray(start, dtype=float))
    span = max(float(np.linalg.norm(v)), np.finfo(float).tiny)
    gradient = descent(v)
    best, best_size = v, np.inf
    step, iteration = None, 0
    for iteration in range(max_iter):
        size = float(np.linalg.norm(gradient))
        if size < best_size:
            best, best_size = v, size
        if size <= tolerance:
            break
        reach = ORACLE_STEP_CAP * max(float(np.linalg.norm(v)), span) / size
        trial_step = reach / ORACLE_STEP_CAP if step is None else min(step, reach)
        direction = -gradient

        def slope_along(alpha):
            return float(descent(on_plane(v + alpha * direction)) @ direction)

        moved = on_plane(v + trial_step * direction)
        moved_gradient = descent(moved)
        if float(moved_gradient @ direction) > 0.0:
            alpha = optimize.brentq(slope_along, 0.0, trial_step, xtol=1e-15 * trial_step, maxiter=200)
            moved = on_plane(v + alpha * direction)
            moved_gradient = descent(moved)
        s, t = moved - v, moved_gradient - gradient
        curvature = float(s @ t)
        if not np.any(s):
            break
        step = float(s @ s) / curvature if curvature > 0.0 else 2.0 * trial_step
        v, gradient = moved, moved_gradient
    else:
        size = float(np.linalg.norm(gradient))
        if size < best_size:
            best, best_size = v, size
    return best, best_size, iteration + 1


def hyperplane_oracle(model: SpaceModel, y: DualFunctional, tolerance: float = ORACLE_GRADIENT_TOL,
                      max_iter: int = ORACLE_MAX_ITER) -> RealFunction:
    """
    Point of minimal norm on H = {z : y(z) = 1}, normalized

    Projected gradient descent on H (projected_descent) with the
    Euclidean gradient μ·N′(z) taken from norm_gradient. It shares nothing
    with the stationarity solve in duality_map. Meant for n ≤ 8.

    Raises:
        UndefinedDirectionError: y = 0
    """
    _require_supported(model)
    if y.space != model.space:
        raise StructuralError("y does not belong to the model's space")
    if y.is_zero():
        raise UndefinedDirectionError("the zero functional defines no hyperplane")
    weights = model.space.weights
    normal = y.values * weights

    def gradient_of(values):
        return weights * norm_gradient(model, RealFunction(values, model.space)).values

    z, size, iterations = projected_descent(gradient_of, normal / float(normal @ normal), normal,
                                            tolerance, max_iter)
    logger.debug(f"hyperplane_oracle on {model.describe()}: projected gradient {size:.3e} "
                 f"after {iterations} iterations")
    point = RealFunction(z, model.space)
    return point / norm(model, point)


def strict_maximality_margin(model: SpaceModel, y: DualFunctional, trials: int,
                             rng: np.random.Generator) -> float:
    """min over random unit z of pairing(ŷ, M(y)) − pairing(ŷ, z)"""
    result = duality_map(model, y)
    unit_functional = y / result.scale
    peak = pairing(model.space, unit_functional, result.point)
    margin = np.inf
    for _ in range(trials):
        f = RealFunction(rng.standard_normal(model.space.dimension), model.space)
        z = f / norm(model, f)
        margin = min(margin, peak - pairing(model.space, unit_functional, z))
    return float(margin)


def operator_norm_estimate(model: SpaceModel, g: DualFunctional, rng: np.random.Generator,
                           restarts: int = 4) -> float:
    """sup of pairing(g, f)/‖f‖ by BFGS from random starts"""
    if g.is_zero():
        return 0.0

    def objective(values):
        f = RealFunction(values, model.space)
        size = norm(model, f)
        if size == 0.0:
            return 0.0
        return -pairing(model.space, g, f) / size

    best = 0.0
    starts = [g.values] + [rng.standard_normal(model.space.dimension) for _ in range(restarts - 1)]
    for start in starts:
        result = optimize.minimize(objective, np.asarray(start, dtype=float), method="BFGS",
                                   options={"gtol": 1e-10, "maxiter": 2000})
        best = max(best, -float(result.fun))
    return best

