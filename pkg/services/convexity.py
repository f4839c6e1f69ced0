"""
Quantitative uniform convexity

δ(ε) = inf{1 − ‖(x+y)/2‖ : ‖x‖ = ‖y‖ = 1, ‖x−y‖ ≥ ε} is estimated from
above by sampling unit pairs, moving each pair onto the boundary
‖x−y‖ = ε and refining the best few with SLSQP. The maximizing-sequence and
continuity experiments measure how near-maximizers of a functional collapse
onto M(y).
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from spaces.measure_space import DualFunctional, RealFunction
from spaces.norms import SpaceModel, dual_norm, norm, norm_rows
from services.duality import duality_map, norm_gradient
from utils.errors import DomainError, GradientUndefinedError, InfeasibleError, StructuralError
from utils.logger import setup_logger

logger = setup_logger("convexity")

BOUNDARY_BISECTIONS = 60
REFINE_CANDIDATES = 4
ORACLE_ANGLES = 720


@dataclass(frozen=True)
class ConvexityModulus:
    epsilon: float
    delta_estimate: float
    witness_x: RealFunction
    witness_y: RealFunction
    status: str

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "delta_estimate": self.delta_estimate,
            "witness_x": self.witness_x.to_json(),
            "witness_y": self.witness_y.to_json(),
            "status": self.status,
        }


@dataclass(frozen=True)
class MaximizingSequence:
    tail_diameters: list[float]
    pairings: list[float]
    limit_distance: float
    midpoint_violations: int
    pool_size: int
    monotone: bool

    def to_json(self) -> dict:
        return dict(vars(self))


@dataclass(frozen=True)
class ContinuityRow:
    size: float
    displacement: float
    bound: float | None = None

    def to_json(self) -> dict:
        return {"size": self.size, "displacement": self.displacement, "bound": self.bound}


@dataclass
class ContinuityTable:
    rows: list[ContinuityRow] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"rows": [row.to_json() for row in self.rows]}


def hilbert_modulus(eps: float) -> float:
    """1 − √(1 − ε²/4), the modulus of every inner-product space"""
    if not 0.0 <= eps <= 2.0:
        raise DomainError(f"ε must lie in [0, 2], got {eps}")
    return 1.0 - float(np.sqrt(1.0 - eps * eps / 4.0))


def _check_epsilon(eps: float):
    if not np.isfinite(eps) or eps <= 0.0:
        raise DomainError(f"ε must be positive, got {eps}")
    if eps > 2.0:
        raise InfeasibleError(f"no unit pair is more than 2 apart (ε = {eps})")


def _normalize_rows(model: SpaceModel, rows: np.ndarray) -> np.ndarray:
    return rows / norm_rows(model, rows)[:, None]


def _to_boundary(model: SpaceModel, X: np.ndarray, Y: np.ndarray, eps: float) -> np.ndarray:
    """
    Move each y along the arc towards x (or −x) until ‖x − y‖ = ε

    Bisection keeps the endpoint with ‖x − y‖ ≥ ε, so the returned rows are
    always feasible.
    """
    distance = norm_rows(model, X - Y)
    far = distance >= eps
    target = np.where(far[:, None], X, -X)
    feasible = np.where(far, 0.0, 1.0)
    infeasible = 1.0 - feasible

    def arc(t):
        return _normalize_rows(model, (1.0 - t)[:, None] * Y + t[:, None] * target)

    for _ in range(BOUNDARY_BISECTIONS):
        middle = 0.5 * (feasible + infeasible)
        inside = norm_rows(model, X - arc(middle)) >= eps
        feasible = np.where(inside, middle, feasible)
        infeasible = np.where(inside, infeasible, middle)
    return arc(feasible)


def _gradient(model: SpaceModel, values: np.ndarray) -> np.ndarray:
    # Euclidean gradient of N, zero where N is not differentiable
    try:
        g = norm_gradient(model, RealFunction(values, model.space))
    except GradientUndefinedError:
        return np.zeros_like(values)
    return g.values * model.space.weights


def _refine(model: SpaceModel, x: np.ndarray, y: np.ndarray, eps: float):
    n = x.size

    def split(z):
        u, v = z[:n], z[n:]
        nu = norm(model, RealFunction(u, model.space))
        nv = norm(model, RealFunction(v, model.space))
        return u, v, nu, nv, u / nu, v / nv

    def pullback(w, grad_at, unit, scale):
        return (w - grad_at * float(unit @ w)) / scale

    def objective(z):
        _, _, _, _, a, b = split(z)
        return -norm(model, RealFunction(0.5 * (a + b), model.space))

    def objective_jac(z):
        u, v, nu, nv, a, b = split(z)
        gm = -0.5 * _gradient(model, 0.5 * (a + b))
        return np.concatenate([pullback(gm, _gradient(model, u), a, nu),
                               pullback(gm, _gradient(model, v), b, nv)])

    def gap(z):
        _, _, _, _, a, b = split(z)
        return norm(model, RealFunction(a - b, model.space)) - eps

    def gap_jac(z):
        u, v, nu, nv, a, b = split(z)
        gd = _gradient(model, a - b)
        return np.concatenate([pullback(gd, _gradient(model, u), a, nu),
                               pullback(-gd, _gradient(model, v), b, nv)])

    result = optimize.minimize(objective, np.concatenate([x, y]), jac=objective_jac, method="SLSQP",
                               constraints=[{"type": "ineq", "fun": gap, "jac": gap_jac}],
                               options={"maxiter": 200, "ftol": 1e-14})
    _, _, _, _, a, b = split(result.x)
    return a, b


def _delta(model: SpaceModel, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return 1.0 - norm_rows(model, 0.5 * (X + Y))


def modulus_estimate(model: SpaceModel, eps: float, samples: int, seed: int) -> ConvexityModulus:
    """
    Upper estimate of the modulus of convexity δ(ε)

    Args:
        model: Space model
        eps: Separation, 0 < ε ≤ 2
        samples: Number of random unit pairs
        seed: Generator seed

    Returns:
        ConvexityModulus whose witnesses realize the estimate exactly
    """
    _check_epsilon(eps)
    if samples < 1:
        raise DomainError("modulus_estimate needs at least one sample")
    space = model.space
    rng = np.random.default_rng(seed)
    X = _normalize_rows(model, rng.standard_normal((samples, space.dimension)))
    if eps >= 2.0:
        witness = RealFunction(X[0], space)
        return ConvexityModulus(float(eps), 1.0, witness, -witness, "antipodal")

    Y = _normalize_rows(model, rng.standard_normal((samples, space.dimension)))
    usable = (norm_rows(model, X - Y) > 1e-8) & (norm_rows(model, X + Y) > 1e-8)
    X, Y = X[usable], Y[usable]
    if X.shape[0] == 0:
        raise DomainError("every sampled pair was degenerate")
    Y = _to_boundary(model, X, Y, eps)
    deltas = _delta(model, X, Y)

    order = np.argsort(deltas, kind="stable")
    best = int(order[0])
    bx, by, best_delta = X[best], Y[best], float(deltas[best])
    status = "sampled"
    for index in order[:REFINE_CANDIDATES]:
        a, b = _refine(model, X[index], Y[index], eps)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            continue
        b = _to_boundary(model, a[None, :], b[None, :], eps)[0]
        value = float(_delta(model, a[None, :], b[None, :])[0])
        if value < best_delta - 1e-12:
            bx, by, best_delta, status = a, b, value, "refined"

    if best_delta <= 0.0:
        logger.warning(f"modulus estimate for {model.describe()} at ε={eps} is not positive: {best_delta:.3e}")
        status = "degenerate"
    logger.debug(f"modulus_estimate {model.describe()} ε={eps}: δ≈{best_delta:.17g} ({status})")
    return ConvexityModulus(float(eps), best_delta, RealFunction(bx, space), RealFunction(by, space), status)


def modulus_sweep(model: SpaceModel, eps_grid, samples: int, seed: int) -> list[ConvexityModulus]:
    """
    modulus_estimate over a grid, made nondecreasing in ε

    δ is nondecreasing, so an estimate at ε′ ≥ ε also bounds δ(ε) from
    above; each entry keeps the smallest such bound and its witnesses.
    """
    grid = sorted(float(e) for e in eps_grid)
    logger.info(f"modulus sweep on {model.describe()}: {len(grid)} values of ε, {samples} samples each")
    estimates = [modulus_estimate(model, eps, samples, seed) for eps in grid]
    swept = list(estimates)
    for i in range(len(grid) - 2, -1, -1):
        later = swept[i + 1]
        if later.delta_estimate < swept[i].delta_estimate:
            swept[i] = ConvexityModulus(grid[i], later.delta_estimate, later.witness_x, later.witness_y,
                                        later.status)
    return swept


def modulus_grid_oracle(model: SpaceModel, eps: float, angles: int = ORACLE_ANGLES) -> ConvexityModulus:
    """
    δ(ε) for two-dimensional models by angular search

    For each x on the unit circle the partner y is found by root-finding
    ‖x − y(φ)‖ = ε along the half circle ahead of x; the best grid angle is
    then polished by bounded scalar search.
    """
    if model.space.dimension != 2:
        raise StructuralError("the angular oracle only handles two-dimensional models")
    _check_epsilon(eps)
    space = model.space

    def unit(theta):
        point = np.array([np.cos(theta), np.sin(theta)])
        return point / norm(model, RealFunction(point, space))

    def partner(theta):
        x = unit(theta)
        if eps >= 2.0:
            return x, -x
        phi = optimize.brentq(lambda p: norm(model, RealFunction(x - unit(p), space)) - eps,
                              theta, theta + np.pi, xtol=1e-14)
        return x, unit(phi)

    def delta_at(theta):
        x, y = partner(theta)
        return 1.0 - norm(model, RealFunction(0.5 * (x + y), space))

    thetas = np.linspace(0.0, 2.0 * np.pi, angles, endpoint=False)
    values = np.array([delta_at(t) for t in thetas])
    i = int(np.argmin(values))
    step = thetas[1] - thetas[0]
    polished = optimize.minimize_scalar(delta_at, bounds=(thetas[i] - step, thetas[i] + step), method="bounded",
                                        options={"xatol": 1e-12})
    theta = float(polished.x) if polished.fun < values[i] else float(thetas[i])
    x, y = partner(theta)
    value = 1.0 - norm(model, RealFunction(0.5 * (x + y), space))
    return ConvexityModulus(float(eps), float(value), RealFunction(x, space), RealFunction(y, space), "oracle")


def _perturbed_maximizer(model: SpaceModel, target: np.ndarray, unit_y: DualFunctional, level: float,
                         size: float, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    direction = rng.standard_normal(target.size)
    direction /= norm(model, RealFunction(direction, model.space))
    weights = model.space.weights
    while True:
        candidate = target + size * direction
        candidate /= norm(model, RealFunction(candidate, model.space))
        value = float(np.sum(unit_y.values * candidate * weights))
        if value >= level or size < 1e-300:
            return candidate, value
        size /= 2.0


def maximizing_sequence_experiment(model: SpaceModel, y: DualFunctional, steps: int,
                                   seed: int) -> MaximizingSequence:
    """
    Unit xₙ with pairing(ŷ, xₙ) ≥ 1 − 1/n and the diameters of their tails

    The sequence perturbs M(y) by at most 2^{−n/2} before renormalizing.
    Random unit vectors near M(y) that pass the level 1 − 1/2 join the tails
    whose level they reach. Every pair inside a tail is also checked for
    ‖(a+b)/2‖ ≥ pairing(ŷ, (a+b)/2) > 1 − 1/n.
    """
    if steps < 1:
        raise DomainError("the experiment needs at least one step")
    result = duality_map(model, y)
    target = result.point.values
    unit_y = y / result.scale
    weights = model.space.weights
    rng = np.random.default_rng(seed)

    points, levels, pairings = [], [], []
    for n in range(1, steps + 1):
        point, value = _perturbed_maximizer(model, target, unit_y, 1.0 - 1.0 / n, 2.0 ** (-n / 2.0), rng)
        points.append(point)
        levels.append(n)
        pairings.append(value)

    pool = 0
    if steps >= 2:
        radii = np.exp(rng.uniform(np.log(1e-6), np.log(10.0), size=4 * steps))
        for radius in radii:
            direction = rng.standard_normal(target.size)
            candidate = target + radius * direction / norm(model, RealFunction(direction, model.space))
            candidate /= norm(model, RealFunction(candidate, model.space))
            value = float(np.sum(unit_y.values * candidate * weights))
            if value < 0.5:
                continue
            reached = min(steps, int(np.floor(1.0 / max(1.0 - value, 1e-300))))
            points.append(candidate)
            levels.append(max(2, reached))
            pool += 1
    points = np.array(points)
    levels = np.array(levels)
    count = points.shape[0]

    first, second = np.triu_indices(count, k=1)
    distances = norm_rows(model, points[first] - points[second]) if first.size else np.zeros(0)
    midpoints = 0.5 * (points[first] + points[second])
    mid_norms = norm_rows(model, midpoints) if first.size else np.zeros(0)
    mid_pairings = midpoints @ (unit_y.values * weights)
    shared = np.minimum(levels[first], levels[second])
    violations = int(np.sum((mid_norms < mid_pairings - 1e-12) | (mid_pairings <= 1.0 - 1.0 / shared)))

    tails = []
    for n in range(1, steps + 1):
        members = shared >= n
        tails.append(float(np.max(distances[members])) if np.any(members) else 0.0)
    monotone = all(later <= earlier + 1e-9 for earlier, later in zip(tails, tails[1:]))
    limit = float(norm(model, RealFunction(points[steps - 1] - target, model.space)))
    if violations:
        logger.warning(f"{violations} midpoint violations in the maximizing sequence on {model.describe()}")
    return MaximizingSequence(tails, pairings, limit, violations, pool, monotone)


def m_continuity_probe(model: SpaceModel, y: DualFunctional, sizes, seed: int,
                       directions: int = 8) -> ContinuityTable:
    """
    ‖M(y + δy) − M(y)‖ for dual perturbations of each size

    Each row reports the largest displacement over random directions with
    ‖δy‖_dual = size. Hilbert rows also carry the bound 2·size/‖y‖.
    """
    base = duality_map(model, y)
    rng = np.random.default_rng(seed)
    table = ContinuityTable()
    for size in sizes:
        size = float(size)
        if size < 0:
            raise DomainError(f"perturbation sizes must be nonnegative, got {size}")
        worst = 0.0
        if size > 0:
            for _ in range(directions):
                direction = DualFunctional(rng.standard_normal(model.space.dimension), model.space)
                shifted = y + direction * (size / dual_norm(model, direction))
                moved = duality_map(model, shifted).point - base.point
                worst = max(worst, 0.0 if moved.is_zero() else norm(model, moved))
        bound = 2.0 * size / base.scale if model.kind == "hilbert" else None
        table.rows.append(ContinuityRow(size, worst, bound))
    return table
