"""
Young functions P, their convex conjugates Q and the convexity constants α, ρ(ε)

A Young function here is even, convex, differentiable, with P(0) = 0,
P(u)/u → 0 at 0 and P(u)/u → ∞ at ∞. Conjugation and (P′)⁻¹ are computed
by monotone bisection, so P′ must be strictly increasing on [0, ∞).
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from config.solver_config import (
    GRID_POINTS,
    GRID_UMAX,
    GRID_UMIN,
    RHO_LEVELS,
    RHO_POINTS,
    ROOT_RTOL,
)
from utils.errors import (
    DegenerateYoungError,
    DomainError,
    InfeasibleError,
    UnboundedConjugateError,
    UnsupportedYoungError,
)
from utils.logger import setup_logger
from utils.rootfinding import solve_increasing
from utils.validators import conjugate_exponent, validate_epsilon, validate_exponent

logger = setup_logger("young")


@dataclass(frozen=True)
class YoungFunction:
    """P with its derivative; exponent is set for the power family"""

    label: str
    evaluate: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    derivative: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    family: str = "custom"
    exponent: float | None = None
    normalized: bool = True
    delta2: bool = True
    strict_derivative: bool = True
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, u):
        return _out(self.evaluate(np.asarray(u, dtype=float)), u)

    def prime(self, u):
        return _out(self.derivative(np.asarray(u, dtype=float)), u)

    @property
    def conjugate_exponent(self) -> float | None:
        if self.exponent is None:
            return None
        return conjugate_exponent(self.exponent)

    def to_json(self) -> dict:
        return {"family": self.family, **self.params}


@dataclass(frozen=True)
class YoungCheck:
    """Sampled admissibility of a Young function"""

    even: bool
    vanishes_at_zero: bool
    convex: bool
    sublinear_at_zero: bool
    superlinear_at_infinity: bool
    derivative_odd: bool
    derivative_monotone: bool

    @property
    def admissible(self) -> bool:
        return all(vars(self).values())

    def failures(self) -> list[str]:
        return [name for name, ok in vars(self).items() if not ok]


def _out(values, like):
    if np.ndim(like) == 0:
        return float(values)
    return values


def power_young(p: float, normalized: bool = True) -> YoungFunction:
    """
    P(u) = |u|^p / p (normalized) or |u|^p

    Args:
        p: Exponent, 1 < p < ∞
        normalized: Divide by p

    Returns:
        The power Young function
    """
    if not validate_exponent(p):
        raise DomainError(f"power Young function needs 1 < p < ∞, got {p}")
    p = float(p)
    scale = 1.0 / p if normalized else 1.0

    def evaluate(u):
        return scale * np.power(np.abs(u), p)

    def derivative(u):
        return scale * p * np.power(np.abs(u), p - 1.0) * np.sign(u)

    label = f"|u|^{p:g}/{p:g}" if normalized else f"|u|^{p:g}"
    return YoungFunction(label, evaluate, derivative, family="power", exponent=p,
                         normalized=normalized, params={"p": p, "normalized": normalized})


def mixed_power_young(p: float, r: float) -> YoungFunction:
    """P(u) = |u|^p/p + |u|^r/r, a Δ2 Young function with no homogeneity"""
    if not (validate_exponent(p) and validate_exponent(r)):
        raise DomainError(f"mixed power Young function needs exponents above 1, got {p}, {r}")
    p, r = float(p), float(r)

    def evaluate(u):
        a = np.abs(u)
        return np.power(a, p) / p + np.power(a, r) / r

    def derivative(u):
        a = np.abs(u)
        return (np.power(a, p - 1.0) + np.power(a, r - 1.0)) * np.sign(u)

    return YoungFunction(f"|u|^{p:g}/{p:g}+|u|^{r:g}/{r:g}", evaluate, derivative,
                         family="mixed", params={"p": p, "r": r})


def exponential_young() -> YoungFunction:
    """P(u) = e^|u| − 1 − |u|; violates Δ2"""

    def evaluate(u):
        a = np.abs(u)
        with np.errstate(over="ignore"):
            return np.expm1(a) - a

    def derivative(u):
        with np.errstate(over="ignore"):
            return np.expm1(np.abs(u)) * np.sign(u)

    return YoungFunction("exp|u|-1-|u|", evaluate, derivative, family="exponential",
                         delta2=False, params={})


def young_from_json(data: dict) -> YoungFunction:
    """Build from {"family": "power", "p": 3.0, "normalized": true} and friends"""
    if not isinstance(data, dict):
        raise DomainError("Young function description must be an object")
    family = data.get("family")
    try:
        if family == "power":
            return power_young(float(data["p"]), bool(data.get("normalized", True)))
        if family == "mixed":
            return mixed_power_young(float(data["p"]), float(data["r"]))
        if family == "exponential":
            return exponential_young()
    except KeyError as e:
        raise DomainError(f"Young family {family!r} needs parameter {e.args[0]!r}") from e
    except (TypeError, ValueError) as e:
        if isinstance(e, DomainError):
            raise
        raise DomainError(f"invalid Young function parameters: {e}") from e
    raise DomainError(f"unknown Young family {family!r}")


def _require_strict(P: YoungFunction):
    if not P.strict_derivative:
        raise UnsupportedYoungError(f"{P.label}: P′ must be strictly increasing on [0, ∞)")


def inverse_derivative(P: YoungFunction, v, rtol: float = ROOT_RTOL, on_overflow=UnboundedConjugateError):
    """(P′)⁻¹, elementwise, sign carried by v"""
    _require_strict(P)
    v_arr = np.asarray(v, dtype=float)
    root = solve_increasing(P.derivative, np.abs(v_arr), rtol=rtol, on_overflow=on_overflow)
    return _out(np.sign(v_arr) * root, v)


def inverse_value(P: YoungFunction, t, rtol: float = ROOT_RTOL):
    """P⁻¹ on [0, ∞)"""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise DomainError("P⁻¹ is only defined for nonnegative values")
    return _out(solve_increasing(P.evaluate, t_arr, rtol=rtol), t)


def conjugate(P: YoungFunction, v):
    """
    Q(v) = sup_u {u|v| − P(u)}

    The supremum sits at the u* ≥ 0 with P′(u*) = |v|, found by bisection on
    the bracket [0, 1] doubled until P′(upper) ≥ |v|.

    Args:
        P: Young function with strictly increasing P′
        v: Scalar or array

    Returns:
        Q(v), same shape as v
    """
    _require_strict(P)
    a = np.abs(np.asarray(v, dtype=float))
    u_star = solve_increasing(P.derivative, a, on_overflow=UnboundedConjugateError)
    q = np.maximum(u_star * a - P.evaluate(np.asarray(u_star)), 0.0)
    return _out(q, v)


def conjugate_young(P: YoungFunction) -> YoungFunction:
    """Q packaged as a Young function, with Q′ = (P′)⁻¹"""
    _require_strict(P)
    q = P.conjugate_exponent
    return YoungFunction(
        f"conjugate({P.label})",
        lambda v: np.asarray(conjugate(P, v)),
        lambda v: np.asarray(inverse_derivative(P, v)),
        family="conjugate",
        exponent=q,
        normalized=P.normalized,
        delta2=P.family in ("power", "mixed", "exponential"),
        params={"of": P.to_json()},
    )


def fenchel_young_gap(P: YoungFunction, u, v):
    """P(u) + Q(v) − u|v|; nonnegative, zero iff P′(u) = |v|"""
    u_arr = np.asarray(u, dtype=float)
    v_arr = np.asarray(v, dtype=float)
    gap = P.evaluate(u_arr) + np.asarray(conjugate(P, v_arr)) - u_arr * np.abs(v_arr)
    if np.ndim(gap) == 0:
        return float(gap)
    return gap


def _log_grid(u_max: float, grid: int) -> np.ndarray:
    lower = min(GRID_UMIN, u_max * 1e-3)
    return np.geomspace(lower, u_max, grid)


def delta2_constant(P: YoungFunction, u_max: float = GRID_UMAX, grid: int = GRID_POINTS) -> float:
    """
    Lower estimate of α in P(2u) ≤ αP(u): the largest ratio on a log grid

    Args:
        P: Young function
        u_max: Right end of the grid
        grid: Number of log-spaced points

    Returns:
        max P(2u)/P(u) over the grid (inf when P overflows)
    """
    if not u_max > 0 or grid < 2:
        raise DomainError("delta2_constant needs u_max > 0 and grid >= 2")
    u = _log_grid(u_max, grid)
    with np.errstate(over="ignore", invalid="ignore"):
        base = P.evaluate(u)
        doubled = P.evaluate(2.0 * u)
    if np.any(base == 0):
        raise DegenerateYoungError(f"{P.label} vanishes at u = {float(u[np.argmax(base == 0)]):g}")
    ratio = np.where(np.isinf(doubled), np.inf, doubled / base)
    alpha = float(np.max(ratio))
    logger.debug(f"delta2_constant({P.label}) = {alpha:.17g} on [{u[0]:g}, {u_max:g}]")
    return alpha


def rho_estimate(P: YoungFunction, eps: float, grid: int = RHO_POINTS,
                 scale_levels: int = RHO_LEVELS) -> float:
    """
    Estimate ρ(ε), the uniform midpoint convexity gap of P: the smallest relative gap

        [(P(u)+P(v))/2 − P((u+v)/2)] / [(P(u)+P(v))/2]

    over pairs with |u−v| ≥ ε(|u|+|v|). Pairs are sampled on the compact set
    |u|+|v| = 1 and a geometric ladder of scales 2^k around 1.

    Args:
        P: Young function
        eps: ε > 0 (pairs exist only for ε ≤ 1)
        grid: Points on |u|+|v| = 1
        scale_levels: Number of scales

    Returns:
        Estimate in [0, 1] (grid minimum, so never below the true infimum)
    """
    if not (isinstance(eps, (int, float)) and eps > 0):
        raise DomainError(f"rho_estimate needs ε > 0, got {eps}")
    if grid < 2 or scale_levels < 1:
        raise DomainError("rho_estimate needs grid >= 2 and scale_levels >= 1")

    angle = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
    c, s = np.cos(angle), np.sin(angle)
    mass = np.abs(c) + np.abs(s)
    u, v = c / mass, s / mass
    feasible = np.abs(u - v) >= eps * (np.abs(u) + np.abs(v)) * (1.0 - 1e-12)
    if not feasible.any():
        raise InfeasibleError(f"no pair with |u−v| ≥ {eps:g}(|u|+|v|) on the sample grid")
    u, v = u[feasible], v[feasible]

    exponents = np.arange(scale_levels) - (scale_levels - 1) / 2.0
    best = 1.0
    for k in exponents:
        scale = 2.0 ** k
        average = 0.5 * (P.evaluate(scale * u) + P.evaluate(scale * v))
        middle = P.evaluate(0.5 * scale * (u + v))
        usable = average > 0
        if usable.any():
            ratio = (average[usable] - middle[usable]) / average[usable]
            best = min(best, float(np.min(ratio)))
    return float(np.clip(best, 0.0, 1.0))


def mcshane_check(P: YoungFunction, eps: float, rho: float, u, v):
    """
    Slack RHS − LHS of McShane's inequality

        P((u−v)/2) ≤ ε(P(u)+P(v))/2 + ρ⁻¹[(P(u)+P(v))/2 − P((u+v)/2)]

    Nonnegative whenever ρ ≤ ρ(ε).
    """
    if not (validate_epsilon(eps) and eps < 1):
        raise DomainError(f"mcshane_check needs ε in (0, 1), got {eps}")
    if not validate_epsilon(rho):
        raise DomainError(f"mcshane_check needs ρ in (0, 1], got {rho}")
    u_arr = np.asarray(u, dtype=float)
    v_arr = np.asarray(v, dtype=float)
    average = 0.5 * (P.evaluate(u_arr) + P.evaluate(v_arr))
    gap = average - P.evaluate(0.5 * (u_arr + v_arr))
    slack = eps * average + gap / rho - P.evaluate(0.5 * (u_arr - v_arr))
    if np.ndim(slack) == 0:
        return float(slack)
    return slack


def growth_bound_slack(P: YoungFunction, alpha: float, u_max: float = GRID_UMAX,
                       grid: int = GRID_POINTS) -> float:
    """
    Smallest relative slack in u·P′(u) ≤ P(2u) − P(u) ≤ α·P(u) on a log grid

    Returns:
        min over the grid and both inequalities of slack / P(2u)
    """
    u = _log_grid(u_max, grid)
    with np.errstate(over="ignore", invalid="ignore"):
        base = P.evaluate(u)
        doubled = P.evaluate(2.0 * u)
        increment = doubled - base
        lower = (increment - u * P.derivative(u)) / doubled
        upper = (alpha * base - increment) / doubled
    return float(np.min(np.minimum(lower, upper)))


def check_young(P: YoungFunction, enforce: bool = False) -> YoungCheck:
    """
    Sampled admissibility checks

    Args:
        P: Young function
        enforce: Raise DomainError when a check fails

    Returns:
        YoungCheck with one flag per property
    """
    rng = np.random.default_rng(0)
    u = np.concatenate([-np.geomspace(1e3, 1e-4, 64), [0.0], np.geomspace(1e-4, 1e3, 64)])
    with np.errstate(over="ignore", invalid="ignore"):
        values = P.evaluate(u)
        mirrored = P.evaluate(-u)
        a = rng.uniform(-50, 50, 512)
        b = rng.uniform(-50, 50, 512)
        midpoint = P.evaluate(0.5 * (a + b))
        chord = 0.5 * (P.evaluate(a) + P.evaluate(b))
        small = np.geomspace(1.0, 1e-6, 32)
        small_ratio = P.evaluate(small) / small
        big = np.geomspace(1.0, 1e6, 32)
        big_ratio = P.evaluate(big) / big
        slope = P.derivative(u)
        slope_mirrored = P.derivative(-u)

    # overflow to ±inf is allowed at the far end of the grids
    huge = np.finfo(float).max
    values, mirrored = np.nan_to_num(values, posinf=huge), np.nan_to_num(mirrored, posinf=huge)
    slope = np.nan_to_num(slope, posinf=huge, neginf=-huge)
    slope_mirrored = np.nan_to_num(slope_mirrored, posinf=huge, neginf=-huge)
    big_ratio = np.nan_to_num(big_ratio, posinf=huge)

    result = YoungCheck(
        even=bool(np.all(np.abs(values - mirrored) <= 1e-12 * (1.0 + np.abs(values)))),
        vanishes_at_zero=float(P.evaluate(np.zeros(1))[0]) == 0.0,
        convex=bool(np.all(midpoint <= chord + 1e-12 * (1.0 + np.abs(chord)))),
        sublinear_at_zero=bool(np.all(np.diff(small_ratio) <= 0) and small_ratio[-1] < small_ratio[0]),
        superlinear_at_infinity=bool(np.all(np.diff(big_ratio) >= 0) and big_ratio[-1] > 10.0 * big_ratio[0]),
        derivative_odd=bool(np.all(np.abs(slope + slope_mirrored) <= 1e-12 * (1.0 + np.abs(slope)))
                            and float(P.derivative(np.zeros(1))[0]) == 0.0),
        derivative_monotone=bool(np.all(np.diff(slope) >= 0)),
    )
    if enforce and not result.admissible:
        raise DomainError(f"{P.label} is not an admissible Young function: {', '.join(result.failures())}")
    return result
