"""
Finite weighted measure spaces and the pairing that realizes every integral

A space is a list of positive atom weights μᵢ. Functions (elements of X) and
functionals (elements of X′) are coefficient vectors over the atoms; a
functional g acts by f ↦ Σᵢ gᵢ fᵢ μᵢ.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from utils.errors import StructuralError
from utils.validators import format_vector, validate_vector, validate_weights

# Above this dimension sums are compensated (math.fsum) instead of numpy pairwise.
COMPENSATED_SUM_MIN_DIM = 1000


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    """Finite measure space with atom weights μᵢ > 0"""

    weights: np.ndarray

    def __post_init__(self):
        if not validate_weights(self.weights):
            raise StructuralError("weights must be a non-empty list of finite positive reals")
        object.__setattr__(self, "weights", format_vector(self.weights))

    @property
    def dimension(self) -> int:
        return int(self.weights.size)

    @property
    def total_mass(self) -> float:
        return _sum(self.weights)

    def __eq__(self, other):
        if not isinstance(other, MeasureSpace):
            return NotImplemented
        return self is other or np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())

    def to_json(self) -> dict:
        return {"weights": [float(w) for w in self.weights]}


@dataclass(frozen=True, eq=False)
class _Vector:
    values: np.ndarray
    space: MeasureSpace = field(repr=False)

    def __post_init__(self):
        if not validate_vector(self.values, self.space.dimension):
            raise StructuralError(
                f"{type(self).__name__} needs {self.space.dimension} finite values, "
                f"got shape {np.shape(self.values)}"
            )
        object.__setattr__(self, "values", format_vector(self.values))

    def _check(self, other):
        if type(other) is not type(self):
            raise StructuralError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.space != self.space:
            raise StructuralError("operands live on different measure spaces")

    def __add__(self, other):
        self._check(other)
        return type(self)(self.values + other.values, self.space)

    def __sub__(self, other):
        self._check(other)
        return type(self)(self.values - other.values, self.space)

    def __mul__(self, scalar: float):
        return type(self)(float(scalar) * self.values, self.space)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float):
        return type(self)(self.values / float(scalar), self.space)

    def __neg__(self):
        return type(self)(-self.values, self.space)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def to_json(self) -> dict:
        return {"values": [float(v) for v in self.values]}


class RealFunction(_Vector):
    """Element f of X: one real value per atom"""


class DualFunctional(_Vector):
    """Element g of X′ acting by f ↦ Σ gᵢ fᵢ μᵢ"""

    @property
    def coefficients(self) -> np.ndarray:
        return self.values


def _sum(terms: np.ndarray) -> float:
    if terms.size > COMPENSATED_SUM_MIN_DIM:
        return math.fsum(terms.tolist())
    return float(np.sum(terms))


def _require_space(space: MeasureSpace, *items):
    for item in items:
        if item.space != space:
            raise StructuralError(
                f"{type(item).__name__} of dimension {item.space.dimension} does not belong "
                f"to the space of dimension {space.dimension}"
            )


def integrate(space: MeasureSpace, f: RealFunction) -> float:
    """Σᵢ fᵢ μᵢ"""
    _require_space(space, f)
    return _sum(f.values * space.weights)


def pairing(space: MeasureSpace, g: DualFunctional, f: RealFunction) -> float:
    """Σᵢ gᵢ fᵢ μᵢ, bilinear in (g, f)"""
    if not isinstance(g, DualFunctional) or not isinstance(f, RealFunction):
        raise StructuralError("pairing expects (DualFunctional, RealFunction)")
    _require_space(space, g, f)
    return _sum(g.values * f.values * space.weights)


def function(space: MeasureSpace, values) -> RealFunction:
    return RealFunction(values, space)


def functional(space: MeasureSpace, coefficients) -> DualFunctional:
    return DualFunctional(coefficients, space)


def indicator(space: MeasureSpace) -> DualFunctional:
    """The all-ones functional 𝟙, with pairing(𝟙, f) = integrate(f)"""
    return DualFunctional(np.ones(space.dimension), space)


def to_functional(f: RealFunction) -> DualFunctional:
    return DualFunctional(f.values, f.space)


def to_function(g: DualFunctional) -> RealFunction:
    return RealFunction(g.values, g.space)


def random_function(space: MeasureSpace, rng: np.random.Generator, scale: float = 1.0) -> RealFunction:
    return RealFunction(scale * rng.standard_normal(space.dimension), space)


def random_functional(space: MeasureSpace, rng: np.random.Generator, scale: float = 1.0) -> DualFunctional:
    return DualFunctional(scale * rng.standard_normal(space.dimension), space)


def random_space(dimension: int, rng: np.random.Generator) -> MeasureSpace:
    """Non-uniform weights in [0.2, 2)"""
    return MeasureSpace(rng.uniform(0.2, 2.0, size=dimension))


def space_from_json(data: dict) -> MeasureSpace:
    if not isinstance(data, dict) or "weights" not in data:
        raise StructuralError('space description needs a "weights" list')
    return MeasureSpace(data["weights"])


def function_from_json(space: MeasureSpace, data: dict) -> RealFunction:
    if not isinstance(data, dict) or "values" not in data:
        raise StructuralError('function description needs a "values" list')
    return RealFunction(data["values"], space)


def functional_from_json(space: MeasureSpace, data: dict) -> DualFunctional:
    if not isinstance(data, dict) or "values" not in data:
        raise StructuralError('functional description needs a "values" list')
    return DualFunctional(data["values"], space)


def weighted_sum(space: MeasureSpace, values: np.ndarray) -> float:
    """Σᵢ vᵢ μᵢ for a raw value array (solver inner loops)"""
    return _sum(np.asarray(values, dtype=float) * space.weights)
