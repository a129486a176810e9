"""Order primitives on the nonnegative orthant.

Dominance ratios ``M(x/y)`` and ``m(x/y)``, the Thompson and Hilbert
metrics, order-unit norms and slice normalization. Infinite values are
returned as ``math.inf``; serializers turn them into the string ``"inf"``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ConeError(ValueError):
    """Raised for inputs outside the cone or with inconsistent dimensions."""


def as_point(x, name="x") -> np.ndarray:
    """Return ``x`` as a 1-D float array after checking cone membership."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ConeError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise ConeError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ConeError(f"{name} has non-finite entries")
    if np.any(arr < 0):
        raise ConeError(f"{name} has negative coordinates: {arr}")
    return arr


def _pair(x, y):
    x = as_point(x, "x")
    y = as_point(y, "y")
    if x.shape != y.shape:
        raise ConeError(f"dimension mismatch: {x.size} vs {y.size}")
    return x, y


def is_interior(x) -> bool:
    """True when every coordinate is strictly positive."""
    return bool(np.all(as_point(x) > 0))


@dataclass(frozen=True)
class ConeContext:
    """Ambient data for the orthant ``R^n_+``.

    Parameters
    ----------
    dim : int
        Dimension ``n``.
    psi_weights : array_like, optional
        Strictly positive weights of the linear functional ``psi``.
        Defaults to all ones.
    unit_u : array_like, optional
        Interior order unit. Defaults to all ones.
    normality_delta : float
        Normality constant; 1 for the orthant with a monotone norm.
    """

    dim: int
    psi_weights: np.ndarray = field(default=None)
    unit_u: np.ndarray = field(default=None)
    normality_delta: float = 1.0

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ConeError("dim must be positive")
        w = np.ones(self.dim) if self.psi_weights is None else np.asarray(self.psi_weights, float)
        u = np.ones(self.dim) if self.unit_u is None else np.asarray(self.unit_u, float)
        if w.shape != (self.dim,) or u.shape != (self.dim,):
            raise ConeError("psi_weights and unit_u must have length dim")
        if np.any(w <= 0):
            raise ConeError("psi_weights must be strictly positive")
        if np.any(u <= 0):
            raise ConeError("unit_u must be interior")
        w.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "psi_weights", w)
        object.__setattr__(self, "unit_u", u)

    def psi(self, x) -> float:
        return float(self.psi_weights @ as_point(x))


def dominance_upper(x, y) -> float:
    """Smallest ``beta`` with ``x <= beta * y``.

    Coordinates with ``y_i = 0`` and ``x_i > 0`` give ``inf``; ``0/0``
    coordinates are skipped; ``x = 0`` gives 0.

    Examples
    --------
    >>> dominance_upper([1, 2], [2, 1])
    2.0
    """
    x, y = _pair(x, y)
    if np.any((y == 0) & (x > 0)):
        return math.inf
    mask = y > 0
    if not np.any(mask & (x > 0)):
        return 0.0
    return float(np.max(x[mask] / y[mask]))


def dominance_lower(x, y) -> float:
    """Largest ``alpha`` with ``alpha * y <= x``; ``inf`` when ``y = 0``."""
    x, y = _pair(x, y)
    mask = y > 0
    if not np.any(mask):
        return math.inf
    return float(np.min(x[mask] / y[mask]))


def _log(v: float) -> float:
    if v == math.inf:
        return math.inf
    if v <= 0:
        return -math.inf
    return math.log(v)


def same_support(x, y) -> bool:
    x, y = _pair(x, y)
    return bool(np.array_equal(x > 0, y > 0))


def thompson_distance(x, y) -> float:
    """Thompson metric ``log max(M(x/y), M(y/x))``.

    Vectors with different supports are at distance ``inf``; two zero
    vectors are at distance 0.
    """
    x, y = _pair(x, y)
    if not same_support(x, y):
        return math.inf
    if not np.any(x > 0):
        return 0.0
    return max(0.0, _log(max(dominance_upper(x, y), dominance_upper(y, x))))


def hilbert_distance(x, y) -> float:
    """Hilbert projective metric ``log(M(x/y) / m(x/y))``."""
    x, y = _pair(x, y)
    if not same_support(x, y):
        return math.inf
    s = x > 0
    if not np.any(s):
        return 0.0
    r = x[s] / y[s]
    return max(0.0, math.log(float(np.max(r)) / float(np.min(r))))


def order_unit_norm(y, base) -> float:
    """Order-unit norm ``M(y/base)`` for an interior ``base``."""
    y, base = _pair(y, base)
    if np.any(base <= 0):
        raise ConeError("order-unit base must be interior")
    return dominance_upper(y, base)


def slice_normalize(x, c: float = 1.0, ctx: ConeContext | None = None) -> np.ndarray:
    """Scale ``x`` onto the slice ``{psi = c}``."""
    x = as_point(x)
    if c <= 0:
        raise ConeError("slice level c must be positive")
    ctx = ctx or ConeContext(x.size)
    p = ctx.psi(x)
    if p <= 0:
        raise ConeError("cannot normalize the zero vector")
    return c * x / p
