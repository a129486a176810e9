"""Nonlinear Perron-Frobenius computations.

Power iteration for homogeneous maps, Collatz-Wielandt brackets, the
interior perturbation ``f + eps * psi(x) u`` and slice eigenvalues
``rho^c`` of subhomogeneous maps together with their eigencurve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cone import (ConeContext, as_point, dominance_lower, dominance_upper,
                   hilbert_distance, thompson_distance)
from .maps import Linear, MapExpr, Scale, Sum


class CollapsedOrbitError(ArithmeticError):
    """The iteration reached the zero vector."""


@dataclass(frozen=True)
class PowerConfig:
    max_iters: int = 10000
    hilbert_tol: float = 1e-13
    epsilon_perturb: float = 0.0
    slice_c: float = 1.0
    restarts: int = 8
    seed: int = 0
    boundary_threshold: float = 1e-9

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not (self.hilbert_tol > 0 and self.slice_c > 0):
            raise ValueError("tolerances and slice level must be positive")
        if self.epsilon_perturb < 0:
            raise ValueError("epsilon_perturb must be nonnegative")


@dataclass
class EigenPair:
    """Approximate cone eigenpair.

    Attributes
    ----------
    vector : ndarray
        Eigenvector estimate on the slice ``psi = c``.
    value : float
        Eigenvalue estimate.
    residual : float
        Hilbert (homogeneous case) or Thompson (slice case) residual.
    bracket : tuple of float
        ``(m(f(x)/x), M(f(x)/x))`` at the returned vector.
    lower : float
        Best certified lower bound ``sup m(f(x)/x)`` seen along the run.
    boundary : bool
        True when the vector has a coordinate below the boundary threshold.
    """

    vector: np.ndarray
    value: float
    residual: float
    bracket: tuple
    lower: float
    boundary: bool = False
    converged: bool = False
    iterations: int = 0
    c: float = 1.0


def _ctx(ctx, n):
    return ctx if ctx is not None else ConeContext(n)


def _snap(x, thr):
    xs = x.copy()
    xs[xs < thr * np.max(xs)] = 0.0
    return xs


def collatz_wielandt_bracket(f: Callable, x) -> tuple:
    """``(m(f(x)/x), M(f(x)/x))``.

    The lower value bounds ``rho(f)`` from below for any nonzero ``x``; the
    upper one is only meaningful for interior ``x`` and is ``inf`` otherwise.
    """
    x = as_point(x)
    fx = np.asarray(f(x), float)
    lo = dominance_lower(fx, x)
    hi = dominance_upper(fx, x) if np.all(x > 0) else math.inf
    return lo, hi


def power_iterate(f: Callable, x0=None, cfg: PowerConfig | None = None,
                  ctx: ConeContext | None = None, dim: int | None = None) -> EigenPair:
    """Normalized power iteration for a homogeneous order-preserving map.

    Iterates ``x <- f(x)/psi(f(x))`` until the Hilbert distance between
    ``f(x)`` and ``x`` drops below ``cfg.hilbert_tol``. If the residual stops
    shrinking (periodic spectra) the shifted map ``f + s*Id`` is used, which
    has the same eigenvectors. Orbits drifting to the boundary are snapped
    and their eigenvalue is read from the support-restricted lower ratio.

    Raises
    ------
    CollapsedOrbitError
        If some iterate is mapped to zero.
    """
    cfg = cfg or PowerConfig()
    if x0 is None:
        n = dim if dim is not None else (ctx.dim if ctx else getattr(f, "in_dim", lambda: None)())
        if n is None:
            raise ValueError("pass x0 or dim")
        ctx = _ctx(ctx, n)
        x0 = ctx.unit_u
    x = as_point(x0, "x0")
    ctx = _ctx(ctx, x.size)
    if not np.all(x > 0):
        raise ValueError("power iteration needs an interior starting point")
    if cfg.epsilon_perturb > 0:
        f = perturb_interior(f, cfg.epsilon_perturb, ctx)
    psi = ctx.psi
    c = cfg.slice_c
    x = c * x / psi(x)
    shift = 0.0
    lower = 0.0
    history = []
    res = math.inf
    converged = False
    it = 0
    fx = None
    for it in range(1, cfg.max_iters + 1):
        fx = np.asarray(f(x), float)
        p = psi(fx)
        if p <= 0:
            raise CollapsedOrbitError(f"f(x) = 0 at iteration {it}")
        lower = max(lower, dominance_lower(fx, x))
        res = hilbert_distance(fx, x)
        if res < cfg.hilbert_tol:
            converged = True
            break
        history.append(res)
        g = fx + shift * x
        x = c * g / psi(g)
        if np.min(x) < cfg.boundary_threshold * np.max(x):
            xs = _snap(x, cfg.boundary_threshold)
            fs = np.asarray(f(xs), float)
            lower = max(lower, dominance_lower(fs, xs))
            if hilbert_distance(fs, xs) < cfg.hilbert_tol:
                x = c * xs / psi(xs)
                fx = np.asarray(f(x), float)
                res = hilbert_distance(fx, x)
                converged = True
                break
        if shift == 0.0 and it >= 100 and it % 50 == 0:
            if not res < 0.5 * history[-50]:
                shift = max(psi(fx) / psi(x), 1e-300)
    if fx is None or not converged:
        fx = np.asarray(f(x), float)
    boundary = bool(np.min(x) < cfg.boundary_threshold * np.max(x))
    if boundary:
        xb = c * _snap(x, cfg.boundary_threshold)
        xb = c * xb / psi(xb)
        fb = np.asarray(f(xb), float)
        lower = max(lower, dominance_lower(fb, xb))
        on = xb > 0
        value = float(ctx.psi_weights[on] @ fb[on]) / float(ctx.psi_weights[on] @ xb[on])
        value = max(value, lower)
        bracket = (dominance_lower(fb, xb), math.inf)
        x, fx = xb, fb
    else:
        value = psi(fx) / psi(x)
        bracket = (dominance_lower(fx, x), dominance_upper(fx, x))
        # the ratio of psi-values always sits inside the CW bracket
        value = min(max(value, bracket[0]), bracket[1])
    if converged:
        res = hilbert_distance(fx, x)
    return EigenPair(vector=x, value=float(value), residual=float(res), bracket=bracket,
                     lower=float(lower), boundary=boundary, converged=converged,
                     iterations=it, c=c)


def perturb_interior(f: Callable, eps: float, ctx: ConeContext) -> MapExpr:
    """``f_eps(x) = f(x) + eps * psi(x) * u``, mapping the cone into its interior."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    rank_one = Linear(np.outer(ctx.unit_u, ctx.psi_weights))
    base = f if isinstance(f, MapExpr) else _Wrapped(f)
    return Sum((base, Scale(float(eps), rank_one)))


@dataclass(frozen=True, eq=False)
class _Wrapped(MapExpr):
    fn: Callable

    def _eval(self, x):
        return np.asarray(self.fn(x), float)

    def degree(self):
        return None


def _slice_run(f, x, c, ctx, cfg):
    psi = ctx.psi
    lower = 0.0
    damp = False
    prev = math.inf
    res = math.inf
    it = 0
    for it in range(1, cfg.max_iters + 1):
        fx = np.asarray(f(x), float)
        p = psi(fx)
        if p <= 0:
            return x, 0.0, 0.0, 0.0, True, it
        lower = max(lower, dominance_lower(fx, x))
        g = c * fx / p
        step = thompson_distance(g, x)
        if step < cfg.hilbert_tol:
            x = g
            break
        if not damp and it % 100 == 0:
            if not step < 0.5 * prev:
                damp = True
            prev = step
        x = 0.5 * (x + g) if damp else g
    fx = np.asarray(f(x), float)
    lam = psi(fx) / c
    lower = max(lower, dominance_lower(fx, x))
    res = thompson_distance(fx, lam * x) if lam > 0 else math.inf
    return x, lam, lower, res, res < 1e-8, it


def slice_spectral_radius(f: Callable, c: float, cfg: PowerConfig | None = None,
                          ctx: ConeContext | None = None, dim: int | None = None) -> EigenPair:
    """Maximal eigenvalue ``rho^c(f)`` with eigenvector on the slice ``psi = c``.

    Runs the normalized fixed-point iteration ``x <- c f(x)/psi(f(x))`` from
    the scaled order unit and from ``cfg.restarts`` seeded interior points,
    and keeps the largest eigenvalue found.
    """
    cfg = cfg or PowerConfig()
    if not c > 0:
        raise ValueError("slice level must be positive")
    n = dim if dim is not None else (ctx.dim if ctx else getattr(f, "in_dim", lambda: None)())
    if n is None:
        raise ValueError("pass dim or ctx")
    ctx = _ctx(ctx, n)
    if cfg.epsilon_perturb > 0:
        f = perturb_interior(f, cfg.epsilon_perturb, ctx)
    rng = np.random.default_rng(cfg.seed)
    starts = [ctx.unit_u] + [rng.uniform(0.1, 1.0, n) for _ in range(cfg.restarts if n > 1 else 0)]
    best = None
    for s in starts:
        x0 = c * s / ctx.psi(s)
        x, lam, lower, res, ok, it = _slice_run(f, x0, c, ctx, cfg)
        fx = np.asarray(f(x), float)
        hi = dominance_upper(fx, x) if np.all(x > 0) else math.inf
        pair = EigenPair(vector=x, value=float(lam), residual=float(res),
                         bracket=(dominance_lower(fx, x), hi), lower=float(lower),
                         boundary=bool(np.min(x) < cfg.boundary_threshold * np.max(x)),
                         converged=bool(ok), iterations=it, c=float(c))
        if best is None or pair.value > best.value + 1e-12:
            best = pair
    return best


@dataclass
class CurveReport:
    """Eigencurve table with monotonicity diagnostics.

    ``monotone_ok[i]`` refers to the pair ``(c[i], c[i+1])``; the last row
    is always True. ``rho_zero_ref`` and ``rho_inf_ref`` hold the spectral
    radii of the asymptotic maps when closed forms exist.
    """

    c: list
    rho: list
    residual: list
    monotone_ok: list
    order_ok: list
    converged: list
    rho_zero_est: float
    rho_inf_est: float
    rho_zero_ref: float | None = None
    rho_inf_ref: float | None = None

    @property
    def ok(self) -> bool:
        return all(self.monotone_ok) and all(self.order_ok) and all(self.converged)

    def rows(self):
        return [(c, r, e, ok) for c, r, e, ok in zip(self.c, self.rho, self.residual, self.monotone_ok)]


def _homog_rho(g, n, cfg):
    from .maps import DIVERGENT
    if g is DIVERGENT:
        return math.inf
    mat = getattr(g, "matrix", None)
    if mat is not None:
        return float(np.max(np.abs(np.linalg.eigvals(mat))))
    return power_iterate(g, np.ones(n), cfg).value


def eigencurve(f: Callable, c_grid, cfg: PowerConfig | None = None,
               ctx: ConeContext | None = None, dim: int | None = None,
               rel: float = 1e-9):
    """Slice eigenvalues over an increasing grid of levels.

    Returns
    -------
    pairs : list of EigenPair
    report : CurveReport
    """
    from .maps import NoClosedFormError, asymptotic_infinity, asymptotic_zero
    grid = [float(c) for c in c_grid]
    if len(grid) == 0 or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] <= 0:
        raise ValueError("c_grid must be positive and strictly increasing")
    cfg = cfg or PowerConfig()
    n = dim if dim is not None else (ctx.dim if ctx else getattr(f, "in_dim", lambda: None)())
    if n is None:
        raise ValueError("pass dim or ctx")
    pairs = [slice_spectral_radius(f, c, cfg, ctx, n) for c in grid]
    rho = [p.value for p in pairs]
    mono, order = [], []
    for i in range(len(grid)):
        if i + 1 == len(grid):
            mono.append(True)
            order.append(True)
            continue
        r1, r2 = rho[i], rho[i + 1]
        ratio = grid[i + 1] / grid[i]
        mono.append(bool(r2 <= r1 * (1 + rel) + 1e-15 and r1 <= ratio * r2 * (1 + rel) + 1e-15))
        x1, x2 = pairs[i].vector, pairs[i + 1].vector
        order.append(bool(np.all(x1 <= x2 * (1 + rel) + 1e-15)))
    if len(grid) >= 2:
        (c1, r1), (c2, r2) = (grid[0], rho[0]), (grid[1], rho[1])
        zero_est = r1 - c1 * (r2 - r1) / (c2 - c1)
        (t1, s1), (t2, s2) = (1 / grid[-1], rho[-1]), (1 / grid[-2], rho[-2])
        inf_est = s1 - t1 * (s2 - s1) / (t2 - t1)
    else:
        zero_est = inf_est = rho[0]
    zref = iref = None
    if isinstance(f, MapExpr):
        try:
            zref = _homog_rho(asymptotic_zero(f, n), n, cfg)
        except NoClosedFormError:
            pass
        try:
            iref = _homog_rho(asymptotic_infinity(f, n), n, cfg)
        except NoClosedFormError:
            pass
    rep = CurveReport(c=grid, rho=rho, residual=[p.residual for p in pairs], monotone_ok=mono,
                      order_ok=order, converged=[p.converged for p in pairs],
                      rho_zero_est=float(zero_est), rho_inf_est=float(inf_est),
                      rho_zero_ref=zref, rho_inf_ref=iref)
    return pairs, rep
