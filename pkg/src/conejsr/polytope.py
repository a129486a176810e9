"""Polytopal certification of the joint spectral radius.

Starting from the leading eigenvector ``x*`` of a candidate spectrum
maximizing product ``f*`` of length ``k``, the normalized family
``F' = F / rho(f*)^(1/k)`` is applied to a frontier of vertices. Images
not dominated by an existing vertex become new vertices. When the
frontier empties, the vertices generate a monotone prenorm
``Theta(x) = min_j M(x/z_j)`` with ``Theta(f_i(x)) <= alpha Theta(x)``,
which certifies ``rho(F) = alpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cone import ConeContext, as_point, dominance_lower, dominance_upper
from .maps import Family, MapError, check_word, log_uniform_point
from .spectral import PowerConfig, power_iterate

CERTIFIED = "Certified"
BUDGET_EXCEEDED = "BudgetExceeded"
SMP_UPDATED = "SmpUpdated"
RESTART_CYCLE = "RestartCycle"


class BoundaryEigenvectorError(ValueError):
    """The candidate's leading eigenvector lies on the cone boundary."""


@dataclass(frozen=True)
class AlgoConfig:
    dom_tol: float = 1e-9
    strict_witness_tol: float = 1e-9
    max_vertices: int = 10000
    max_restarts: int = 50
    extended_smp_update: bool = False
    prune: bool = True

    def __post_init__(self):
        if not (self.dom_tol > 0 and self.strict_witness_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass
class FinitePrenorm:
    """Vertices ``z_j`` with the words generating them from ``x*`` in ``F'``."""

    vertices: list
    generator_words: list

    def __post_init__(self):
        self.vertices = [as_point(z, "vertex") for z in self.vertices]
        if not self.vertices:
            raise ValueError("a prenorm needs at least one vertex")
        if len(self.generator_words) != len(self.vertices):
            raise ValueError("one generator word per vertex")

    def __len__(self):
        return len(self.vertices)


def prenorm_value(P: FinitePrenorm, x) -> float:
    """``Theta(x) = min_j M(x/z_j)``."""
    return min(dominance_upper(x, z) for z in P.vertices)


def prenorm_operator_value(P: FinitePrenorm, f) -> float:
    """``max_j Theta(f(z_j))``, the induced value of an order-preserving map."""
    return max(prenorm_value(P, np.asarray(f(z), float)) for z in P.vertices)


@dataclass
class Certificate:
    """Result of :func:`run_polytope`.

    Attributes
    ----------
    smp_word : tuple
        Final candidate product.
    alpha : float
        ``rho(f*)^(1/k)``.
    prenorm : FinitePrenorm
    status : str
        One of ``Certified``, ``BudgetExceeded``, ``SmpUpdated``,
        ``RestartCycle``.
    rounds : int
        Frontier rounds of the final run.
    round_members : list of list of int
        Vertex indices added in each round (round 0 is ``x*``).
    restarts : list of tuple
        ``(old_word, new_word)`` for every SMP update.
    """

    smp_word: tuple
    alpha: float
    prenorm: FinitePrenorm
    dom_tol: float
    strict_witness_tol: float
    status: str
    rounds: int = 0
    round_members: list = field(default_factory=list)
    restarts: list = field(default_factory=list)
    eigen_residual: float = math.nan
    x_star: np.ndarray = None

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    @property
    def vertices(self):
        return self.prenorm.vertices


def _eig_residual(F, word, alpha, z):
    fz = F.word_map(word)(z)
    k = len(word)
    return float(np.max(np.abs(fz - alpha ** k * z)) / (alpha ** k * np.max(np.abs(z))))


def _single_run(F: Family, word, cfg: AlgoConfig, pcfg: PowerConfig, ctx: ConeContext):
    k = len(word)
    ep = power_iterate(F.word_map(word), ctx.unit_u, pcfg, ctx)
    if ep.boundary or np.min(ep.vector) <= 0:
        raise BoundaryEigenvectorError(
            f"leading eigenvector of word {list(word)} is on the boundary; "
            "perturb the family with perturb_interior or choose interior-mapping maps")
    alpha = ep.value ** (1.0 / k)
    xs = ep.vector
    V = [xs]
    gens = [()]
    active = [True]
    members = [[0]]
    frontier = [0]
    rounds = 0
    while frontier:
        rounds += 1
        new = []
        for j in frontier:
            if not active[j]:
                continue
            xi = V[j]
            for i, f in enumerate(F.maps):
                y = np.asarray(f(xi), float) / alpha
                if dominance_lower(y, xi) > 1 + cfg.strict_witness_tol:
                    return ("witness", (i,), alpha, xs, V, gens, active, members, rounds)
                if cfg.extended_smp_update and gens[j]:
                    cand = (i,) + gens[j]
                    if dominance_lower(y, xs) > 1 + cfg.strict_witness_tol:
                        return ("witness", cand, alpha, xs, V, gens, active, members, rounds)
                live = [h for h in range(len(V)) if active[h]]
                if min(dominance_upper(y, V[h]) for h in live) > 1 + cfg.dom_tol:
                    if cfg.prune:
                        for h in live:
                            if h != 0 and dominance_upper(V[h], y) <= 1.0:
                                active[h] = False
                    V.append(y)
                    gens.append((i,) + gens[j])
                    active.append(True)
                    new.append(len(V) - 1)
                    if len(V) > cfg.max_vertices:
                        return ("budget", None, alpha, xs, V, gens, active, members, rounds)
        members.append(new)
        frontier = new
    return ("done", None, alpha, xs, V, gens, active, members, rounds)


def run_polytope(F: Family, initial_smp, ctx: ConeContext | None = None,
                 cfg: AlgoConfig | None = None, power_cfg: PowerConfig | None = None) -> Certificate:
    """Grow a finite extremal prenorm for a homogeneous family.

    Parameters
    ----------
    F : Family
        Homogeneous order-preserving maps.
    initial_smp : sequence of int
        Candidate spectrum maximizing product (0-based indices).
    ctx, cfg, power_cfg
        Cone data, algorithm tolerances and eigen-solver settings.

    Returns
    -------
    Certificate

    Raises
    ------
    BoundaryEigenvectorError
        When the candidate's eigenvector has a zero coordinate.
    """
    cfg = cfg or AlgoConfig()
    pcfg = power_cfg or PowerConfig()
    ctx = ctx or ConeContext(F.dim)
    if not F.is_homogeneous():
        raise MapError("the polytope algorithm needs 1-homogeneous maps")
    word = tuple(int(i) for i in initial_smp)
    check_word(F, word)
    tried = {word}
    restarts = []
    while True:
        kind, cand, alpha, xs, V, gens, active, members, rounds = _single_run(F, word, cfg, pcfg, ctx)
        if kind != "witness":
            break
        restarts.append((word, cand))
        if cand in tried:
            kind = "cycle"
            break
        if len(restarts) > cfg.max_restarts:
            kind = "restarts"
            break
        tried.add(cand)
        word = cand
    keep = [h for h in range(len(V)) if active[h]]
    remap = {h: r for r, h in enumerate(keep)}
    prenorm = FinitePrenorm([V[h] for h in keep], [gens[h] for h in keep])
    status = {"done": CERTIFIED, "budget": BUDGET_EXCEEDED,
              "cycle": RESTART_CYCLE, "restarts": SMP_UPDATED}[kind]
    rm = [[remap[h] for h in grp if h in remap] for grp in members]
    return Certificate(smp_word=word, alpha=float(alpha), prenorm=prenorm,
                       dom_tol=cfg.dom_tol, strict_witness_tol=cfg.strict_witness_tol,
                       status=status, rounds=rounds, round_members=rm, restarts=restarts,
                       eigen_residual=_eig_residual(F, word, alpha, xs), x_star=xs)


@dataclass
class VerificationReport:
    ok: bool
    condition1_max: float
    condition2_min_residual: float
    sampled_max_ratio: float
    failed: str | None = None


def verify_certificate(F: Family, cert: Certificate, n_random_checks: int = 1000,
                       seed=0, tol: float | None = None):
    """Independently re-check the two certification conditions.

    1. ``min_h M(f_i(z_j)/z_h) <= alpha (1 + tol)`` for all ``i, j``.
    2. Some vertex satisfies ``f*(z) = alpha^k z`` up to relative ``tol``.

    Random interior points are then checked for
    ``Theta(f_i(x)) <= alpha (1 + tol) Theta(x)``.

    Returns
    -------
    ok : bool
    report : VerificationReport
    """
    tol = cert.dom_tol if tol is None else tol
    slack = 1e-12
    alpha = cert.alpha
    Z = cert.prenorm.vertices
    c1 = 0.0
    for f in F.maps:
        for z in Z:
            fz = np.asarray(f(z), float)
            c1 = max(c1, min(dominance_upper(fz, zh) for zh in Z) / alpha)
    c2 = min(_eig_residual(F, cert.smp_word, alpha, z) for z in Z)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_random_checks):
        x = log_uniform_point(rng, F.dim)
        tx = prenorm_value(cert.prenorm, x)
        for f in F.maps:
            worst = max(worst, prenorm_value(cert.prenorm, np.asarray(f(x), float)) / (alpha * tx))
    failed = None
    if c1 > 1 + tol + slack:
        failed = "condition (1): some image is not covered by the vertex set"
    elif c2 > tol:
        failed = "condition (2): no vertex is an eigenvector of the SMP at alpha"
    elif worst > 1 + tol + slack:
        failed = "sampled extremality: Theta(f_i(x)) exceeds alpha Theta(x)"
    rep = VerificationReport(ok=failed is None, condition1_max=c1,
                             condition2_min_residual=c2, sampled_max_ratio=worst, failed=failed)
    return rep.ok, rep
