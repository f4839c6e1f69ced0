"""
Monotone bracketing root finders

All solvers here rely on monotonicity only: any bracket that straddles the
target is correct, so brackets are grown by doubling/halving and then
refined by bisection.
"""
import numpy as np
from scipy import optimize

from config.solver_config import MAX_BISECTIONS, OVERFLOW_BOUND, ROOT_RTOL
from utils.errors import SolverDivergenceError
from utils.logger import setup_logger

logger = setup_logger("rootfinding")

_TINY = np.finfo(float).tiny
_SCIPY_MIN_RTOL = 4 * np.finfo(float).eps


def solve_increasing(fn, targets, rtol: float = ROOT_RTOL, bound: float = OVERFLOW_BOUND,
                     on_overflow=SolverDivergenceError, full_output: bool = False):
    """
    Solve fn(u) = t for u >= 0, elementwise over an array of targets

    fn must be vectorized, nondecreasing on [0, ∞), strictly increasing
    where it matters, with fn(0) = 0. The initial bracket [0, 1] is doubled
    until fn(upper) >= t, then bisected to relative width rtol.

    Args:
        fn: Vectorized increasing function
        targets: Nonnegative target values (scalar or array)
        rtol: Relative bracket width at termination
        bound: Upper limit for bracket expansion
        on_overflow: Error type raised when the bracket passes bound
        full_output: Also return the number of bisection steps

    Returns:
        Roots with the shape of targets (float for scalar input), and the
        iteration count when full_output is set
    """
    t = np.abs(np.asarray(targets, dtype=float))
    scalar = t.ndim == 0
    t = np.atleast_1d(t)

    lo = np.zeros_like(t)
    hi = np.ones_like(t)
    with np.errstate(over="ignore", invalid="ignore"):
        values = fn(hi)
    expansions = 0
    while True:
        short = ~(values >= t)
        if not short.any():
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, 2.0 * hi, hi)
        expansions += 1
        if np.any(hi > bound):
            raise on_overflow(f"bracket expansion passed {bound:g} for target {float(np.max(t[short])):g}")
        with np.errstate(over="ignore", invalid="ignore"):
            values = fn(hi)

    zero = t == 0
    hi = np.where(zero, 0.0, hi)

    iterations = 0
    while True:
        done = (hi - lo) <= rtol * hi + _TINY
        if done.all():
            break
        if iterations >= MAX_BISECTIONS:
            raise SolverDivergenceError(
                "bisection did not reach the requested width",
                {"iterations": iterations, "expansions": expansions},
            )
        mid = 0.5 * (lo + hi)
        with np.errstate(over="ignore", invalid="ignore"):
            values = fn(mid)
        upper = values >= t
        hi = np.where(upper, mid, hi)
        lo = np.where(upper, lo, mid)
        iterations += 1

    logger.debug(f"solve_increasing: {t.size} targets, {expansions} expansions, {iterations} bisections")
    roots = 0.5 * (lo + hi)
    result = float(roots[0]) if scalar else roots
    if full_output:
        return result, iterations
    return result


def bracket_increasing(fn, start: float, bound: float = OVERFLOW_BOUND):
    """
    Find 0 < lo <= hi with fn(lo) < 0 <= fn(hi) for a scalar increasing fn

    Args:
        fn: Increasing scalar function on (0, ∞)
        start: Initial guess
        bound: Expansion limit in both directions (ratio to 1)

    Returns:
        (lo, hi, expansions)
    """
    if not start > 0 or not np.isfinite(start):
        start = 1.0
    lo = hi = float(start)
    expansions = 0
    if fn(hi) < 0:
        while fn(hi) < 0:
            lo, hi = hi, 2.0 * hi
            expansions += 1
            if hi > bound:
                raise SolverDivergenceError(f"could not bracket from above starting at {start:g}",
                                            {"expansions": expansions, "upper": hi})
    else:
        while fn(lo) >= 0:
            hi, lo = lo, 0.5 * lo
            expansions += 1
            if lo < 1.0 / bound:
                raise SolverDivergenceError(f"could not bracket from below starting at {start:g}",
                                            {"expansions": expansions, "lower": lo})
    return lo, hi, expansions


def bisect_scalar(fn, lo: float, hi: float, rtol: float):
    """
    Bisection on a straddling bracket via scipy

    Returns:
        (root, scipy RootResults)
    """
    if fn(lo) == 0:
        return lo, None
    if fn(hi) == 0:
        return hi, None
    root, info = optimize.bisect(fn, lo, hi, xtol=_TINY, rtol=max(rtol, _SCIPY_MIN_RTOL),
                                 maxiter=400, full_output=True, disp=False)
    if not info.converged:
        raise SolverDivergenceError("bisection did not converge",
                                    {"iterations": info.iterations, "bracket": [lo, hi]})
    return root, info
