"""Joint spectral radius brackets over products of bounded length.

``U_k = max_w M(f_w(u)/u)^(1/k)`` over words of length ``k`` bounds the JSR
from above at every depth, and ``L_k = max_w rho(f_w)^(1/k)`` bounds it
from below (and is also a partial value of the generalized JSR).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cone import ConeContext, as_point, dominance_upper, thompson_distance
from .maps import (DIVERGENT, Family, MapError, MapExpr, PropertyReport, as_matrix,
                   asymptotic_family, evaluate_word)
from .spectral import (CollapsedOrbitError, PowerConfig, power_iterate,
                       slice_spectral_radius)


class NotHomogeneousError(MapError):
    """A homogeneous family was required."""


def worker_count() -> int:
    """Worker cap from ``CONEJSR_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("CONEJSR_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    n = worker_count()
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def canonical_rotation(word) -> tuple:
    """Lexicographically smallest cyclic shift of ``word``."""
    w = tuple(word)
    return min(w[i:] + w[:i] for i in range(len(w)))


@dataclass
class JsrBracket:
    """Lower and upper JSR bounds with per-depth rows.

    ``rows`` holds ``(k, L_k, U_k, best_word)``. ``complete`` is False when
    the word budget stopped enumeration before ``k_max``.
    """

    lower: float
    upper: float
    depth: int
    witness_word: tuple
    rows: list = field(default_factory=list)
    complete: bool = True

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def _word_rho(F, word, cfg, n, mats=None):
    if mats is not None:
        P = np.eye(n)
        for i in word:
            P = P @ mats[i]
        return float(np.max(np.abs(np.linalg.eigvals(P))))
    f = F.word_map(word)
    try:
        return power_iterate(f, np.ones(n), cfg).lower
    except CollapsedOrbitError:
        return 0.0


def _require_homogeneous(F: Family):
    if not F.is_homogeneous():
        bad = [lab for lab, d in zip(F.labels, F.degrees()) if d is None or abs(d - 1) > 1e-12]
        raise NotHomogeneousError(f"maps {bad} are not 1-homogeneous")


def jsr_bracket(F: Family, k_max: int, ctx: ConeContext | None = None,
                cfg: PowerConfig | None = None, base_point=None,
                max_words: int = 2 ** 20, lower_bounds: bool = True,
                check_homogeneous: bool = True) -> JsrBracket:
    """Bracket the JSR of a homogeneous family by exhaustive enumeration.

    Parameters
    ----------
    F : Family
        Homogeneous order-preserving maps.
    k_max : int
        Largest word length.
    base_point : array_like, optional
        Interior point ``u`` for the upper bounds; defaults to ``ctx.unit_u``.
    max_words : int
        Budget on the number of words per depth. When exceeded the bracket
        is returned with ``complete=False``.
    lower_bounds : bool
        Compute ``L_k`` by power iteration on each word (cyclic duplicates
        are skipped).

    Notes
    -----
    Depth ``k`` images are built from depth ``k-1`` images by applying one
    more map on the left, so each word costs a single map evaluation.
    Lower bounds use the certified Collatz-Wielandt lower ratio, capped at
    500 iterations per word beyond depth 3. When every member is linear the
    product matrix is formed and its spectral radius computed directly.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if check_homogeneous:
        _require_homogeneous(F)
    n = F.dim
    ctx = ctx or ConeContext(n)
    u = as_point(ctx.unit_u if base_point is None else base_point, "base_point")
    if np.any(u <= 0):
        raise ValueError("base point must be interior")
    cfg = cfg or PowerConfig()
    short = PowerConfig(max_iters=min(500, cfg.max_iters), hilbert_tol=cfg.hilbert_tol)
    m = len(F)
    # linear families: the spectral radius of a product is read off a dense eigensolver
    mats = [as_matrix(f, n) if isinstance(f, MapExpr) else None for f in F.maps]
    mats = mats if all(a is not None for a in mats) else None
    images = {(): u}
    rows = []
    lower, upper = 0.0, math.inf
    witness = (0,)
    complete = True
    depth = 0
    for k in range(1, k_max + 1):
        if m ** k > max_words:
            complete = False
            break
        new = {}
        for w, y in images.items():
            for i in range(m):
                new[(i,) + w] = np.asarray(F.maps[i](y), float)
        images = new
        words = sorted(images)
        uk = max(dominance_upper(images[w], u) for w in words) ** (1.0 / k)
        lk, best = 0.0, words[0]
        if lower_bounds:
            todo = sorted({canonical_rotation(w) for w in words})
            c = cfg if k <= 3 else short
            vals = _pmap(lambda w: _word_rho(F, w, c, n, mats), todo)
            for w, v in zip(todo, vals):
                r = max(v, 0.0) ** (1.0 / k)
                if r > lk * (1 + 1e-12):
                    lk, best = r, w
        rows.append((k, lk, uk, best))
        upper = min(upper, uk)
        # prefer the shortest word among numerically equal values
        if lk > lower * (1 + 1e-12):
            lower, witness = lk, best
        depth = k
    if depth == 0:
        raise ValueError("word budget too small for depth 1")
    return JsrBracket(lower=lower, upper=upper, depth=depth, witness_word=witness,
                      rows=rows, complete=complete)


def generalized_jsr_partial(F: Family, k_max: int, cfg: PowerConfig | None = None,
                            max_words: int = 2 ** 20):
    """``sup rho(f_w)^(1/|w|)`` over words up to ``k_max``.

    Returns
    -------
    value : float
    witness : tuple
    """
    b = jsr_bracket(F, k_max, cfg=cfg, max_words=max_words, check_homogeneous=False)
    return b.lower, b.witness_word


@dataclass
class SandwichReport:
    """Bounds ``rho(F_inf) <= rho(F) <= rho(F_0)``.

    ``upper`` is ``inf`` when some member has a divergent ``f_0``.
    """

    lower: float
    upper: float
    inf_bracket: JsrBracket
    zero_bracket: JsrBracket | None


def subhomogeneous_sandwich(F: Family, k_max: int, ctx: ConeContext | None = None,
                            cfg: PowerConfig | None = None) -> SandwichReport:
    """Bracket a subhomogeneous family through its asymptotic families."""
    Finf = asymptotic_family(F, at_zero=False)
    binf = jsr_bracket(Finf, k_max, ctx, cfg)
    F0 = asymptotic_family(F, at_zero=True)
    if F0 is DIVERGENT:
        return SandwichReport(binf.lower, math.inf, binf, None)
    b0 = jsr_bracket(F0, k_max, ctx, cfg)
    return SandwichReport(binf.lower, b0.upper, binf, b0)


def slice_jsr_lower(F: Family, c: float, k_max: int, cfg: PowerConfig | None = None,
                    ctx: ConeContext | None = None):
    """``max_w rho^c(f_w)^(1/|w|)`` over words up to ``k_max``.

    Returns the value and the maximizing word.
    """
    best, arg = 0.0, (0,)
    for k in range(1, k_max + 1):
        words = sorted({canonical_rotation(w) for w in np.ndindex(*([len(F)] * k))})
        for w in words:
            ep = slice_spectral_radius(F.word_map(w), c, cfg, ctx, F.dim)
            r = max(ep.value, 0.0) ** (1.0 / k)
            if r > best:
                best, arg = r, w
    return best, arg


@dataclass
class TrajectoryReport(PropertyReport):
    """Property report plus fitted growth diagnostics.

    ``fitted_C`` is the largest observed ratio
    ``|f_w(x) - f_w(y)| / ((rate + eps)^k |x - y|)``; ``onset_K0`` is the
    first step after which ``psi(f_w(x)) <= psi(x) (rate + 1e-9)^k`` held
    on every trial (None if never).
    """

    fitted_C: float = 0.0
    rate: float = 1.0
    onset_K0: int | None = None
    max_distance_ratio: float = 0.0


def trajectory_divergence_check(F: Family, x, radius: float, horizon: int, trials: int = 20,
                                seed=0, rate: float | None = None, eps: float = 1e-3,
                                ctx: ConeContext | None = None, rel: float = 1e-10,
                                switching=None) -> TrajectoryReport:
    """Check Thompson nonexpansiveness along random switching trajectories.

    Samples ``y`` in the sup-norm ball of ``radius`` around ``x`` and random
    switching sequences of length ``horizon``. Any step with
    ``d_T(x_k, y_k) > d_T(x, y)`` is recorded as a violation.

    Parameters
    ----------
    switching : sequence of int, optional
        Fixed switching sequence (applied left to right in time) instead of
        random ones.
    rate : float, optional
        Growth rate used for the fitted constants; defaults to the
        generalized JSR partial value at depth 2 for homogeneous families
        and 1 otherwise.
    """
    x = as_point(x)
    if not radius > 0 or radius >= np.min(x):
        raise ValueError("the ball of the given radius must lie in the interior")
    ctx = ctx or ConeContext(F.dim)
    rng = np.random.default_rng(seed)
    if rate is None:
        rate = generalized_jsr_partial(F, 2)[0] if F.is_homogeneous() else 1.0
    rep = TrajectoryReport(samples=trials, checked=("thompson_nonexpansive",), rate=rate)
    last_bad = 0
    for _ in range(trials):
        y = x + rng.uniform(-radius, radius, x.size)
        d0 = thompson_distance(x, y)
        n0 = float(np.max(np.abs(x - y)))
        seq = list(switching) if switching is not None else rng.integers(len(F), size=horizon)
        xk, yk = x, y
        for k, i in enumerate(seq, start=1):
            xk = np.asarray(F.maps[i](xk), float)
            yk = np.asarray(F.maps[i](yk), float)
            dk = thompson_distance(xk, yk)
            if dk > d0 * (1 + rel) + 1e-14:
                rep.violations.append({"kind": "thompson_nonexpansive", "excess": dk - d0,
                                       "x": x, "y": y, "k": k})
            if d0 > 0:
                rep.max_distance_ratio = max(rep.max_distance_ratio, dk / d0)
            if n0 > 0:
                ratio = float(np.max(np.abs(xk - yk))) / ((rate + eps) ** k * n0)
                rep.fitted_C = max(rep.fitted_C, ratio)
            if ctx.psi(xk) > ctx.psi(x) * (rate + 1e-9) ** k:
                last_bad = max(last_bad, k)
    rep.onset_K0 = last_bad + 1 if last_bad < horizon else None
    return rep


def enumerate_words(m: int, k: int):
    """All words of length ``k`` over ``m`` letters in lexicographic order."""
    return [tuple(w) for w in np.ndindex(*([m] * k))]


def word_images(F: Family, k: int, x):
    """Map ``word -> f_w(x)`` over all words of length ``k``."""
    return {w: evaluate_word(F, w, x) for w in enumerate_words(len(F), k)}
