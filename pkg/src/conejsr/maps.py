"""Expression trees for order-preserving maps on the orthant.

Every node is an immutable callable. Words follow one convention
throughout the package: ``[i1, ..., ik]`` is ``f_i1 o ... o f_ik``, so
``f_ik`` is applied first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cone import as_point


class MapError(ValueError):
    """Malformed map expression or incompatible dimensions."""


class NoClosedFormError(MapError):
    """The asymptotic map of this expression has no supported closed form."""


class _Divergent:
    """Marker for an asymptotic map that is identically ``+inf``."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "DIVERGENT"


DIVERGENT = _Divergent()

_DEG_TOL = 1e-12


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# -- activation catalog ------------------------------------------------------

@dataclass(frozen=True)
class ActivationSpec:
    """Pointwise activation with the data needed for asymptotic maps.

    ``d0`` is the right derivative at 0 and ``dinf`` the asymptotic slope.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    phi0: float
    d0: float
    dinf: float


def _softplus(t):
    return np.logaddexp(0.0, t)


def _sigmoid(t):
    return 0.5 * (1.0 + np.tanh(0.5 * t))


ACTIVATIONS = {
    "relu": ActivationSpec("relu", lambda t: np.maximum(t, 0.0), 0.0, 1.0, 1.0),
    "tanh": ActivationSpec("tanh", np.tanh, 0.0, 1.0, 0.0),
    "sigmoid": ActivationSpec("sigmoid", _sigmoid, 0.5, 0.25, 0.0),
    "softplus": ActivationSpec("softplus", _softplus, math.log(2.0), 0.5, 1.0),
    "identity": ActivationSpec("identity", lambda t: np.asarray(t, float), 0.0, 1.0, 1.0),
    # t/(1+t): the one-dimensional saturating map used for eigencurves
    "saturating": ActivationSpec("saturating", lambda t: t / (1.0 + t), 0.0, 1.0, 0.0),
}


def check_activation(spec: ActivationSpec, grid=None) -> list[str]:
    """Numerically check monotonicity, nonnegativity and subhomogeneity.

    Returns a list of failed property names (empty when all pass).
    """
    t = np.geomspace(1e-6, 1e6, 400) if grid is None else np.asarray(grid, float)
    t = np.concatenate([[0.0], t])
    v = spec.fn(t)
    bad = []
    if np.any(np.diff(v) < -1e-12 * np.maximum(1.0, np.abs(v[1:]))):
        bad.append("monotone")
    if np.any(v < 0):
        bad.append("nonnegative")
    for lam in (1.5, 2.0, 10.0):
        if np.any(spec.fn(lam * t) > lam * v * (1 + 1e-12) + 1e-15):
            bad.append("subhomogeneous")
            break
    return bad


# -- nodes -------------------------------------------------------------------

class MapExpr:
    """Base class. Subclasses implement ``_eval`` and structural queries."""

    def __call__(self, x) -> np.ndarray:
        return self._eval(np.asarray(x, dtype=float))

    def _eval(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def degree(self) -> float | None:
        """Structural homogeneity degree, or None when not homogeneous."""
        raise NotImplementedError  # pragma: no cover

    def in_dim(self) -> int | None:
        """Input dimension if fixed by the expression."""
        return None

    def out_dim(self, n: int) -> int:
        return n

    def is_homogeneous(self) -> bool:
        d = self.degree()
        return d is not None and abs(d - 1.0) < _DEG_TOL

    # small conveniences for building trees
    def __add__(self, other: "MapExpr") -> "Sum":
        return Sum((self, other))

    def __matmul__(self, other: "MapExpr") -> "Compose":
        return Compose(self, other)

    def __rmul__(self, c: float) -> "Scale":
        return Scale(float(c), self)


@dataclass(frozen=True, eq=False)
class Identity(MapExpr):
    def _eval(self, x):
        return x.copy()

    def degree(self):
        return 1.0


@dataclass(frozen=True, eq=False)
class Linear(MapExpr):
    """``x -> A x``. ``strict=False`` admits negative entries (for tests)."""

    matrix: np.ndarray
    strict: bool = True

    def __post_init__(self):
        a = _readonly(self.matrix)
        if a.ndim != 2:
            raise MapError("Linear needs a 2-D matrix")
        if self.strict and np.any(a < 0):
            raise MapError("Linear matrix has negative entries")
        object.__setattr__(self, "matrix", a)

    def _eval(self, x):
        if x.shape[0] != self.matrix.shape[1]:
            raise MapError(f"Linear expects dim {self.matrix.shape[1]}, got {x.shape[0]}")
        return self.matrix @ x

    def degree(self):
        return 1.0

    def in_dim(self):
        return self.matrix.shape[1]

    def out_dim(self, n):
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class EntrywisePower(MapExpr):
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise MapError("power exponent must be positive")

    def _eval(self, x):
        return np.power(x, self.alpha)

    def degree(self):
        return float(self.alpha)


@dataclass(frozen=True, eq=False)
class Activation(MapExpr):
    name: str

    def __post_init__(self):
        if self.name not in ACTIVATIONS:
            raise MapError(f"unknown activation {self.name!r}; known: {sorted(ACTIVATIONS)}")

    @property
    def spec(self) -> ActivationSpec:
        return ACTIVATIONS[self.name]

    def _eval(self, x):
        return self.spec.fn(x)

    def degree(self):
        return 1.0 if self.name in ("relu", "identity") else None


@dataclass(frozen=True, eq=False)
class ConstShift(MapExpr):
    """Constant map ``x -> b``; summed with other terms it acts as a bias."""

    b: np.ndarray

    def __post_init__(self):
        b = _readonly(self.b)
        if b.ndim != 1 or np.any(b < 0):
            raise MapError("ConstShift needs a nonnegative vector")
        object.__setattr__(self, "b", b)

    def _eval(self, x):
        return self.b.copy()

    def is_zero(self) -> bool:
        return not np.any(self.b)

    def degree(self):
        return 1.0 if self.is_zero() else None

    def out_dim(self, n):
        return self.b.size


@dataclass(frozen=True, eq=False)
class Sum(MapExpr):
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise MapError("Sum needs at least one term")
        object.__setattr__(self, "terms", terms)

    def _eval(self, x):
        out = self.terms[0]._eval(x)
        for t in self.terms[1:]:
            v = t._eval(x)
            if v.shape != out.shape:
                raise MapError("Sum terms have different output dimensions")
            out = out + v
        return out

    def degree(self):
        degs = [t.degree() for t in self.terms
                if not (isinstance(t, ConstShift) and t.is_zero())]
        if not degs:
            return 1.0
        if any(d is None for d in degs):
            return None
        if max(degs) - min(degs) > _DEG_TOL:
            return None
        return degs[0]

    def in_dim(self):
        for t in self.terms:
            d = t.in_dim()
            if d is not None:
                return d
        return None

    def out_dim(self, n):
        return self.terms[0].out_dim(n)


@dataclass(frozen=True, eq=False)
class Scale(MapExpr):
    c: float
    inner: MapExpr

    def __post_init__(self):
        if not self.c >= 0:
            raise MapError("Scale factor must be nonnegative")

    def _eval(self, x):
        return self.c * self.inner._eval(x)

    def degree(self):
        return self.inner.degree()

    def in_dim(self):
        return self.inner.in_dim()

    def out_dim(self, n):
        return self.inner.out_dim(n)


@dataclass(frozen=True, eq=False)
class Compose(MapExpr):
    """``x -> outer(inner(x))``."""

    outer: MapExpr
    inner: MapExpr

    def _eval(self, x):
        return self.outer._eval(self.inner._eval(x))

    def degree(self):
        a, b = self.outer.degree(), self.inner.degree()
        if a is None or b is None:
            return None
        return a * b

    def in_dim(self):
        d = self.inner.in_dim()
        if d is not None:
            return d
        return None

    def out_dim(self, n):
        return self.outer.out_dim(self.inner.out_dim(n))


@dataclass(frozen=True, eq=False)
class MinAugment(MapExpr):
    """Append ``min(x[subset])`` as an extra coordinate."""

    subset: tuple = None

    def __post_init__(self):
        if self.subset is not None:
            object.__setattr__(self, "subset", tuple(int(i) for i in self.subset))

    def _eval(self, x):
        idx = slice(None) if self.subset is None else list(self.subset)
        return np.append(x, np.min(x[idx]))

    def degree(self):
        return 1.0

    def out_dim(self, n):
        return n + 1


@dataclass(frozen=True, eq=False)
class HarmonicMean(MapExpr):
    """``(1/x_i + 1/x_j)^-1`` as a single coordinate, 0 on the boundary."""

    pair: tuple = (0, 1)

    def _eval(self, x):
        a, b = x[self.pair[0]], x[self.pair[1]]
        if a > 0 and b > 0:
            return np.array([a * b / (a + b)])
        return np.zeros(1)

    def degree(self):
        return 1.0

    def out_dim(self, n):
        return 1


@dataclass(frozen=True, eq=False)
class CoordSelect(MapExpr):
    indices: tuple

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    def _eval(self, x):
        return x[list(self.indices)]

    def degree(self):
        return 1.0

    def out_dim(self, n):
        return len(self.indices)


# -- builders ----------------------------------------------------------------

def ann(A, B, b=None, activation="tanh") -> MapExpr:
    """One layer ``x -> A x + phi(B x) + b``."""
    A = np.asarray(A, float)
    terms = [Linear(A), Compose(Activation(activation), Linear(B))]
    if b is not None:
        terms.append(ConstShift(b))
    return Sum(tuple(terms))


def power_mean_layer(A, B, alpha) -> MapExpr:
    """``x -> (A (B x)^alpha)^(1/alpha)``, homogeneous of degree one."""
    return Compose(EntrywisePower(1.0 / alpha),
                   Compose(Linear(A), Compose(EntrywisePower(alpha), Linear(B))))


def harmonic_mean_map() -> MapExpr:
    """``x -> (x1 + M_{-1}(x1, x2), x2)`` on the plane."""
    return Sum((Identity(), Compose(Linear([[1.0], [0.0]]), HarmonicMean((0, 1)))))


def mixing_min_map(n: int, t: float = 0.5) -> MapExpr:
    """``g_n(x)_i = (t^(1/n) x_i^(1/n) + (1 - t^(1/n)) min(x)^(1/n))^n`` on the plane."""
    s = t ** (1.0 / n)
    G = np.array([[s, 0.0, 1.0 - s], [0.0, s, 1.0 - s]])
    return Compose(EntrywisePower(float(n)),
                   Compose(Linear(G), Compose(EntrywisePower(1.0 / n), MinAugment((0, 1)))))


def walk(f: MapExpr):
    """Yield every node of the tree, parents first."""
    yield f
    for child in _children(f):
        yield from walk(child)


def _children(f):
    if isinstance(f, Sum):
        return f.terms
    if isinstance(f, Scale):
        return (f.inner,)
    if isinstance(f, Compose):
        return (f.outer, f.inner)
    return ()


# -- families and words ------------------------------------------------------

@dataclass(frozen=True)
class Family:
    """Finite family of self-maps of ``R^dim_+``."""

    maps: tuple
    dim: int
    labels: tuple = field(default=None)

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise MapError("a family needs at least one map")
        object.__setattr__(self, "maps", maps)
        labels = self.labels or tuple(f"f{i + 1}" for i in range(len(maps)))
        if len(labels) != len(maps):
            raise MapError("labels and maps differ in length")
        object.__setattr__(self, "labels", tuple(labels))
        for f in maps:
            d = f.in_dim() if isinstance(f, MapExpr) else None
            if d is not None and d != self.dim:
                raise MapError(f"map input dim {d} does not match family dim {self.dim}")

    def __len__(self):
        return len(self.maps)

    def __getitem__(self, i):
        return self.maps[i]

    def degrees(self) -> list:
        return [f.degree() if isinstance(f, MapExpr) else None for f in self.maps]

    def is_homogeneous(self) -> bool:
        return all(isinstance(f, MapExpr) and f.is_homogeneous() for f in self.maps)

    def scaled(self, lam: float) -> "Family":
        return Family(tuple(Scale(float(lam), f) for f in self.maps), self.dim, self.labels)

    def word_map(self, word: Sequence[int]) -> Callable:
        check_word(self, word)
        w = tuple(word)
        return lambda x: evaluate_word(self, w, x)


def check_word(F: Family, word: Sequence[int]) -> None:
    if len(word) == 0:
        raise MapError("empty word")
    for i in word:
        if not 0 <= int(i) < len(F):
            raise MapError(f"word index {i} out of range for a family of {len(F)}")


def evaluate(f: MapExpr, x) -> np.ndarray:
    """Evaluate ``f`` at a cone point."""
    return f(as_point(x))


def evaluate_word(F: Family, word: Sequence[int], x) -> np.ndarray:
    """Apply ``word`` right to left: the last index acts first."""
    y = np.asarray(x, dtype=float)
    for i in reversed(word):
        y = F.maps[i](y)
    return y


# -- asymptotic maps ---------------------------------------------------------

def as_matrix(f: MapExpr, n: int) -> np.ndarray | None:
    """Matrix of ``f`` on ``R^n`` if the tree is linear, else None."""
    if isinstance(f, Linear):
        return np.array(f.matrix)
    if isinstance(f, Identity) or (isinstance(f, Activation) and f.name == "identity"):
        return np.eye(n)
    if isinstance(f, CoordSelect):
        return np.eye(n)[list(f.indices)]
    if isinstance(f, ConstShift) and f.is_zero():
        return np.zeros((f.b.size, n))
    if isinstance(f, Scale):
        m = as_matrix(f.inner, n)
        return None if m is None else f.c * m
    if isinstance(f, Sum):
        mats = [as_matrix(t, n) for t in f.terms]
        if any(m is None for m in mats) or len({m.shape for m in mats}) != 1:
            return None
        return sum(mats)
    if isinstance(f, Compose):
        inner = as_matrix(f.inner, n)
        if inner is None:
            return None
        outer = as_matrix(f.outer, inner.shape[0])
        return None if outer is None else outer @ inner
    return None


def simplify(f: MapExpr, n: int | None = None) -> MapExpr:
    """Fold linear subtrees into a single ``Linear`` node when possible."""
    n = n if n is not None else f.in_dim()
    if n is None:
        return f
    m = as_matrix(f, n)
    if m is not None:
        return Linear(m, strict=bool(np.all(m >= 0)))
    return f


def _limit(f: MapExpr, at_zero: bool):
    if f.is_homogeneous():
        return f
    if isinstance(f, Sum):
        parts = [_limit(t, at_zero) for t in f.terms]
        if any(p is DIVERGENT for p in parts):
            return DIVERGENT
        return Sum(tuple(parts))
    if isinstance(f, Scale):
        p = _limit(f.inner, at_zero)
        if p is DIVERGENT:
            return Scale(0.0, f.inner) if f.c == 0 else DIVERGENT
        return Scale(f.c, p)
    if isinstance(f, ConstShift):
        return DIVERGENT if at_zero else ConstShift(np.zeros_like(f.b))
    if isinstance(f, Activation):
        s = f.spec
        if at_zero:
            if s.phi0 > 0:
                return DIVERGENT
            return Scale(s.d0, Identity())
        return Scale(s.dinf, Identity())
    if isinstance(f, EntrywisePower):
        # (c x)^a / c = c^(a-1) x^a
        if (f.alpha < 1) == at_zero:
            return DIVERGENT
        return Scale(0.0, Identity())
    if isinstance(f, Compose):
        for part in (f.outer, f.inner):
            d = part.degree()
            if d is not None and abs(d - 1.0) >= _DEG_TOL:
                raise NoClosedFormError(
                    f"composition with a degree-{d} factor has no supported asymptotic form")
        inner = _limit(f.inner, at_zero)
        if inner is DIVERGENT:
            return DIVERGENT
        outer = _limit(f.outer, at_zero)
        if outer is DIVERGENT:
            return DIVERGENT
        return Compose(outer, inner)
    raise NoClosedFormError(f"no closed-form asymptotic map for {type(f).__name__}")


def asymptotic_zero(f: MapExpr, dim: int | None = None):
    """Symbolic ``f_0(x) = lim_{c->0} f(c x)/c``, or ``DIVERGENT``."""
    g = _limit(f, at_zero=True)
    return g if g is DIVERGENT else simplify(g, dim if dim is not None else f.in_dim())


def asymptotic_infinity(f: MapExpr, dim: int | None = None):
    """Symbolic ``f_inf(x) = lim_{c->inf} f(c x)/c``."""
    g = _limit(f, at_zero=False)
    if g is DIVERGENT:  # pragma: no cover - catalog has no superlinear node
        raise NoClosedFormError("map grows superlinearly")
    return simplify(g, dim if dim is not None else f.in_dim())


def asymptotic_family(F: Family, at_zero: bool):
    """Family of asymptotic maps, or ``DIVERGENT`` if any member diverges."""
    fn = asymptotic_zero if at_zero else asymptotic_infinity
    maps = [fn(f, F.dim) for f in F.maps]
    if any(g is DIVERGENT for g in maps):
        return DIVERGENT
    return Family(tuple(maps), F.dim, F.labels)


# -- randomized property checks ----------------------------------------------

@dataclass
class PropertyReport:
    """Outcome of randomized property checks.

    ``violations`` holds dicts with keys ``kind``, ``excess`` and the
    witness vectors.
    """

    samples: int
    checked: tuple
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def count(self, kind: str) -> int:
        return sum(v["kind"] == kind for v in self.violations)


def log_uniform_point(rng: np.random.Generator, n: int, lo=1e-3, hi=1e3) -> np.ndarray:
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=n))


def _excess(lhs: np.ndarray, rhs: np.ndarray, rel: float) -> float:
    """Largest relative amount by which ``lhs <= rhs`` fails (<= 0 if it holds)."""
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    scale = np.where(scale > 0, scale, 1.0)
    return float(np.max((lhs - rhs) / scale)) - rel


def check_properties(f: MapExpr, samples: int = 256, seed=0, dim: int | None = None,
                     rel: float = 1e-10) -> PropertyReport:
    """Randomized check of order preservation, subhomogeneity and homogeneity.

    Parameters
    ----------
    f : MapExpr
    samples : int
        Number of random ``(x, y, lambda)`` tuples.
    seed : int or Generator
    dim : int, optional
        Input dimension; inferred from the tree when omitted.
    rel : float
        Relative slack for every comparison.
    """
    n = dim if dim is not None else f.in_dim()
    if n is None:
        raise MapError("cannot infer input dimension; pass dim")
    rng = np.random.default_rng(seed)
    homog = f.is_homogeneous()
    kinds = ("order", "subhomogeneous") + (("homogeneous",) if homog else ())
    rep = PropertyReport(samples, kinds)
    for _ in range(samples):
        x = log_uniform_point(rng, n)
        if rng.random() < 0.2:
            x[rng.integers(n)] = 0.0
        y = x + log_uniform_point(rng, n) * (rng.random(n) < 0.7)
        lam = float(np.exp(rng.uniform(0, np.log(1e3))))
        fx, fy, flx = f(x), f(y), f(lam * x)
        e = _excess(fx, fy, rel)
        if e > 0:
            rep.violations.append({"kind": "order", "excess": e, "x": x, "y": y})
        e = _excess(flx, lam * fx, rel)
        if e > 0:
            rep.violations.append({"kind": "subhomogeneous", "excess": e, "x": x, "lam": lam})
        if homog:
            e = max(_excess(flx, lam * fx, rel), _excess(lam * fx, flx, rel))
            if e > 0:
                rep.violations.append({"kind": "homogeneous", "excess": e, "x": x, "lam": lam})
    return rep
