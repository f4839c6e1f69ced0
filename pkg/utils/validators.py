import math

import numpy as np


def validate_weights(weights) -> bool:
    """
    Validate atom weights of a finite measure space

    Args:
        weights: Sequence of atom measures

    Returns:
        True if non-empty, one-dimensional, finite and strictly positive
    """
    array = np.asarray(weights, dtype=float)
    if array.ndim != 1 or array.size == 0:
        return False
    return bool(np.all(np.isfinite(array)) and np.all(array > 0))


def format_vector(values) -> np.ndarray:
    """
    Format a sequence of reals as a read-only float vector

    Args:
        values: Sequence of reals

    Returns:
        One-dimensional float array that cannot be modified in place
    """
    array = np.array(values, dtype=float).reshape(-1)
    array.setflags(write=False)
    return array


def validate_vector(values, dimension: int) -> bool:
    """
    Validate coefficient values against a space dimension

    Args:
        values: Sequence of reals
        dimension: Expected length

    Returns:
        True if the values are finite and have the expected length
    """
    array = np.asarray(values, dtype=float)
    return array.ndim == 1 and array.size == dimension and bool(np.all(np.isfinite(array)))


def validate_exponent(p: float) -> bool:
    """
    Validate a Lebesgue exponent

    Args:
        p: Exponent

    Returns:
        True if 1 < p < ∞
    """
    return isinstance(p, (int, float)) and math.isfinite(p) and p > 1


def conjugate_exponent(p: float) -> float:
    """
    Conjugate exponent q = p / (p - 1)

    Args:
        p: Exponent with 1 < p < ∞

    Returns:
        q with 1/p + 1/q = 1
    """
    return p / (p - 1.0)


def validate_epsilon(eps: float, upper: float = 1.0) -> bool:
    """
    Validate a convexity parameter

    Args:
        eps: Parameter value
        upper: Inclusive upper bound

    Returns:
        True if 0 < eps <= upper
    """
    return isinstance(eps, (int, float)) and math.isfinite(eps) and 0 < eps <= upper
