"""
Norm-preserving extension of functionals from a subspace

A functional y₁ on X₁ = span(basis) attains its norm at a unique unit
x₁ ∈ X₁; the extension is ‖y₁‖·N′(x₁). The annihilator of X₁ parametrizes
every other extension, and the probe checks that none of them is as short.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from config.solver_config import ASCENT_MAX_ITER, GRAM_THRESHOLD, RESTARTS
from spaces.measure_space import DualFunctional, RealFunction, pairing
from spaces.norms import SpaceModel, dual_norm, norm
from services.duality import dual_norm_gradient, norm_gradient, projected_descent
from utils.errors import DomainError, SolverDivergenceError, StructuralError, UndefinedDirectionError
from utils.logger import setup_logger

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    try:
        from scipy.optimize import scalar_search_armijo
    except ImportError:
        try:
            from scipy.optimize.linesearch import scalar_search_armijo
        except ImportError:
            from scipy.optimize._linesearch import scalar_search_armijo

logger = setup_logger("extension")

STAGNATION_TOL = 1e-7
ASCENT_GRADIENT_TOL = 1e-6
ARMIJO_MIN_FRACTION = 1e-14
STALL_GAIN = 1e-12
POLISH_GRADIENT_TOL = 1e-11
UNIQUENESS_NORM_SLACK = 1e-9
UNIQUENESS_DISTANCE = 1e-5


@dataclass(frozen=True, eq=False)
class Subspace:
    """X₁ = span of linearly independent basis functions"""

    basis: np.ndarray
    model: SpaceModel = field(repr=False)

    def __post_init__(self):
        basis = np.atleast_2d(np.asarray(self.basis, dtype=float))
        size, dimension = basis.shape
        if dimension != self.model.space.dimension:
            raise StructuralError(f"basis vectors have length {dimension}, space has {self.model.space.dimension}")
        if not 1 <= size <= dimension:
            raise StructuralError(f"basis size must lie in [1, {dimension}], got {size}")
        lengths = np.linalg.norm(basis, axis=1)
        if np.any(lengths == 0):
            raise StructuralError("basis contains the zero vector")
        unit = basis / lengths[:, None]
        gram = float(np.linalg.det(unit @ unit.T))
        if gram < GRAM_THRESHOLD:
            raise StructuralError(f"basis is numerically dependent (Gram determinant {gram:.3e})")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def size(self) -> int:
        return int(self.basis.shape[0])

    def vectors(self) -> list[RealFunction]:
        return [RealFunction(row, self.model.space) for row in self.basis]

    def combine(self, coordinates: np.ndarray) -> RealFunction:
        return RealFunction(self.basis.T @ coordinates, self.model.space)

    def annihilator(self) -> np.ndarray:
        """Columns span {w : pairing(w, bⱼ) = 0 for all j}"""
        return linalg.null_space(self.basis * self.model.space.weights)

    def to_json(self) -> dict:
        return {"basis": [[float(v) for v in row] for row in self.basis]}


@dataclass(frozen=True)
class SubFunctional:
    """Values of y₁ on the basis vectors"""

    action: np.ndarray

    def __post_init__(self):
        action = np.asarray(self.action, dtype=float).reshape(-1)
        if not np.all(np.isfinite(action)):
            raise StructuralError("sub-functional action must be finite")
        action.setflags(write=False)
        object.__setattr__(self, "action", action)

    def to_json(self) -> dict:
        return {"action": [float(v) for v in self.action]}


@dataclass(frozen=True)
class ExtensionResult:
    functional: DualFunctional
    point: RealFunction
    subspace_norm: float
    stationarity: float
    iterations: int
    restarts: int

    def to_json(self) -> dict:
        return {
            "functional": self.functional.to_json(),
            "point": self.point.to_json(),
            "subspace_norm": self.subspace_norm,
            "stationarity": self.stationarity,
            "iterations": self.iterations,
            "restarts": self.restarts,
        }


@dataclass(frozen=True)
class UniquenessReport:
    reference_norm: float
    best_norm: float
    best_distance: float
    worst_distance: float
    violations: int
    trials: int

    def to_json(self) -> dict:
        return dict(vars(self))


def _check_action(sub: Subspace, y1: SubFunctional):
    if y1.action.size != sub.size:
        raise StructuralError(f"action has {y1.action.size} values for a basis of size {sub.size}")


def restrict(model: SpaceModel, sub: Subspace, y: DualFunctional) -> SubFunctional:
    """action[j] = pairing(y, basis[j])"""
    if y.space != model.space or sub.model.space != model.space:
        raise StructuralError("functional and subspace live on different spaces")
    return SubFunctional(np.array([pairing(model.space, y, b) for b in sub.vectors()]))


def _sphere_gradient(model: SpaceModel, sub: Subspace, action: np.ndarray, coordinates: np.ndarray):
    # derivative of a·c / N(Bᵀc) at a point with N(Bᵀc) = 1
    x = sub.combine(coordinates)
    slopes = restrict(model, sub, norm_gradient(model, x)).action
    return action - float(action @ coordinates) * slopes


def _finite_point(model: SpaceModel, sub: Subspace, coordinates: np.ndarray) -> RealFunction | None:
    if not np.all(np.isfinite(coordinates)):
        return None
    values = sub.basis.T @ coordinates
    if not np.all(np.isfinite(values)) or not np.any(values):
        return None
    return RealFunction(values, model.space)


def _normalize(model: SpaceModel, sub: Subspace, coordinates: np.ndarray) -> np.ndarray | None:
    """Coordinates rescaled onto the unit sphere; None for zero or non-finite input"""
    point = _finite_point(model, sub, coordinates)
    if point is None:
        return None
    length = norm(model, point)
    if not np.isfinite(length) or length <= 0.0:
        return None
    scaled = coordinates / length
    return scaled if np.all(np.isfinite(scaled)) else None


def _ascend(model: SpaceModel, sub: Subspace, action: np.ndarray, start: np.ndarray):
    c = _normalize(model, sub, start)
    if c is None:
        return None, 0
    scale = float(np.max(np.abs(action)))
    step = None
    for iteration in range(ASCENT_MAX_ITER):
        gradient = _sphere_gradient(model, sub, action, c)
        size = float(gradient @ gradient)
        if not np.isfinite(size) or np.sqrt(size) <= ASCENT_GRADIENT_TOL * scale:
            return c, iteration
        value = float(action @ c)
        # past |c|/|g| the normalized trial only turns toward the gradient
        reach = float(np.linalg.norm(c)) / np.sqrt(size)

        def phi(alpha):
            trial = _normalize(model, sub, c + alpha * gradient)
            return np.inf if trial is None else -float(action @ trial)

        try:
            alpha, _ = scalar_search_armijo(phi, -value, -size, c1=1e-4,
                                            alpha0=reach if step is None else min(step, reach),
                                            amin=ARMIJO_MIN_FRACTION * reach)
        except (ZeroDivisionError, FloatingPointError):
            alpha = None
        if alpha is None or not np.isfinite(alpha) or alpha <= 0:
            return c, iteration
        moved = _normalize(model, sub, c + alpha * gradient)
        if moved is None:
            return c, iteration
        gain = float(action @ moved) - value
        if gain < 0.0:
            return c, iteration
        c, step = moved, 2.0 * alpha
        if gain <= STALL_GAIN * abs(value):
            return c, iteration + 1
    return c, ASCENT_MAX_ITER


def _polish(model: SpaceModel, sub: Subspace, action: np.ndarray, c: np.ndarray) -> np.ndarray:
    # minimize N(Bᵀc) on the hyperplane a·c = 1
    value = float(action @ c)
    if sub.size == 1 or not value > 0.0:
        return c

    def gradient_of(coordinates):
        point = _finite_point(model, sub, coordinates)
        if point is None:
            raise SolverDivergenceError("polish left the finite range", {"coordinates": coordinates.tolist()})
        return restrict(model, sub, norm_gradient(model, point)).action

    start = c / value
    polished, size, iterations = projected_descent(gradient_of, start, action, POLISH_GRADIENT_TOL,
                                                   ASCENT_MAX_ITER)
    logger.debug(f"polish: projected gradient {size:.3e} after {iterations} iterations")
    before = norm(model, sub.combine(start))
    point = _finite_point(model, sub, polished)
    if point is None or norm(model, point) > before * (1.0 + 1e-12):
        return c
    polished = _normalize(model, sub, polished)
    return c if polished is None else polished


def extend_with_diagnostics(model: SpaceModel, sub: Subspace, y1: SubFunctional, seed: int = 0,
                            restarts: int = RESTARTS) -> ExtensionResult:
    """
    Unique norm-preserving extension of y₁, with the maximizer x₁ and solver data

    The subspace norm of y₁ is the maximum of Σ aⱼcⱼ over N(Σ cⱼbⱼ) = 1,
    found by projected-gradient ascent with Armijo backtracking from
    seeded restarts and then polished by gradient descent on the
    hyperplane Σ aⱼcⱼ = 1.

    Raises:
        UndefinedDirectionError: y₁ = 0
        SolverDivergenceError: restrict(y) misses y₁ by more than 1e−7
    """
    _check_action(sub, y1)
    action = y1.action
    if not np.any(action):
        raise UndefinedDirectionError("the zero functional has no norming point")
    if restarts < 1:
        raise DomainError("extension needs at least one restart")
    rng = np.random.default_rng(seed)
    starts = [action.copy()] + [rng.standard_normal(sub.size) for _ in range(restarts - 1)]

    best, best_value, total = None, -np.inf, 0
    for start in starts:
        c, iterations = _ascend(model, sub, action, start)
        total += iterations
        if c is None:
            continue
        value = float(action @ c)
        if value > best_value:
            best, best_value = c, value
    if best is None or not best_value > 0.0:
        raise SolverDivergenceError("no restart reached a point where y₁ is positive", {
            "restarts": len(starts), "iterations": total, "best_value": best_value,
        })
    best = _polish(model, sub, action, best)
    subspace_norm = float(action @ best)

    point = sub.combine(best)
    point = point / norm(model, point)
    functional = norm_gradient(model, point) * subspace_norm
    stationarity = float(np.max(np.abs(restrict(model, sub, functional).action - action)))
    scale = max(1.0, float(np.max(np.abs(action))))
    logger.debug(f"extension on {model.describe()}: norm={subspace_norm:.17g} stationarity={stationarity:.3e}")
    if stationarity > STAGNATION_TOL * scale:
        raise SolverDivergenceError("subspace ascent stagnated before the extension matched y₁", {
            "stationarity": stationarity, "iterations": total, "restarts": len(starts),
            "subspace_norm": subspace_norm,
        })
    return ExtensionResult(functional, point, subspace_norm, stationarity, total, len(starts))


def extend_functional(model: SpaceModel, sub: Subspace, y1: SubFunctional, seed: int = 0) -> DualFunctional:
    """y ∈ X′ with restrict(y) = y₁ and ‖y‖ = ‖y₁‖"""
    return extend_with_diagnostics(model, sub, y1, seed).functional


def uniqueness_probe(model: SpaceModel, sub: Subspace, y1: SubFunctional, y: DualFunctional,
                     trials: int, seed: int) -> UniquenessReport:
    """
    Search the extension family y + annihilator(X₁) for a second shortest member

    Each trial starts from a random annihilator offset and minimizes the dual
    norm by gradient descent (projected_descent); the dual-norm gradient is
    the duality map of the candidate. Optimized candidates as short as y but farther than 1e−5
    count as violations.
    """
    _check_action(sub, y1)
    reference = dual_norm(model, y)
    annihilator = sub.annihilator()
    if annihilator.shape[1] == 0:
        return UniquenessReport(reference, reference, 0.0, 0.0, 0, trials)

    weights = model.space.weights

    def candidate(z):
        return y + DualFunctional(annihilator @ z, model.space)

    def gradient(z):
        return annihilator.T @ (weights * dual_norm_gradient(model, candidate(z)).values)

    rng = np.random.default_rng(seed)
    best_norm, best_distance, worst_distance, violations = np.inf, np.inf, 0.0, 0
    for _ in range(trials):
        start = reference * rng.standard_normal(annihilator.shape[1])
        z, _, _ = projected_descent(gradient, start, max_iter=ASCENT_MAX_ITER)
        found = candidate(z)
        length = dual_norm(model, found)
        offset = found - y
        distance = 0.0 if offset.is_zero() else dual_norm(model, offset)
        if length < best_norm:
            best_norm, best_distance = length, distance
        worst_distance = max(worst_distance, distance)
        if length <= reference + UNIQUENESS_NORM_SLACK and distance > UNIQUENESS_DISTANCE:
            violations += 1
    if violations:
        logger.warning(f"uniqueness probe found {violations} distinct extensions of equal norm")
    return UniquenessReport(reference, float(best_norm), float(best_distance), float(worst_distance),
                            violations, trials)
