"""Ready-made families used in tests, demos and the CLI examples."""
from __future__ import annotations

import numpy as np

from .maps import (Activation, Compose, Family, Linear, ann, harmonic_mean_map,
                   mixing_min_map, power_mean_layer)

LINEAR_PAIR = (np.array([[1.0, 1.0], [0.0, 1.0]]),
               np.array([[0.9, 0.0], [0.9, 0.9]]))

POWER_MEAN_A = (np.array([[0.8, 0.1], [0.1, 0.8]]),
                np.array([[0.8, 0.0], [0.1, 0.8]]))
POWER_MEAN_B = (np.array([[0.8, 0.2], [0.0, 0.8]]),
                np.array([[0.9, 0.0], [0.8, 0.7]]))
POWER_MEAN_EXPONENTS = (0.3, 0.5)


def linear_pair() -> Family:
    """``A1 = [[1,1],[0,1]]``, ``A2 = [[.9,0],[.9,.9]]``; SMP ``A1 A2``."""
    return Family(tuple(Linear(A) for A in LINEAR_PAIR), 2)


def power_mean_pair(inner_b: bool = True) -> Family:
    """Two power-mean maps ``f_i(x) = (P_i (Q_i x)^a_i)^(1/a_i)``.

    With ``inner_b=True`` (default) ``Q_i = B_i`` acts first and ``P_i = A_i``
    second; this is the arrangement under which ``f1 o f2`` is certified in
    four rounds. ``inner_b=False`` swaps the roles.
    """
    maps = []
    for A, B, a in zip(POWER_MEAN_A, POWER_MEAN_B, POWER_MEAN_EXPONENTS):
        outer, inner = (A, B) if inner_b else (B, A)
        maps.append(power_mean_layer(outer, inner, a))
    return Family(tuple(maps), 2)


def harmonic_family() -> Family:
    """Single map ``x -> (x1 + M_{-1}(x), x2)``."""
    return Family((harmonic_mean_map(),), 2)


def mixing_family(n_max: int = 5, t: float = 0.5) -> Family:
    """``f_n = g_n o A`` for ``n = 1..n_max`` with ``A = [[1/2,0],[1/2,1]]``."""
    A = Linear([[0.5, 0.0], [0.5, 1.0]])
    maps = tuple(Compose(mixing_min_map(n, t), A) for n in range(1, n_max + 1))
    return Family(maps, 2, tuple(f"f_{n}" for n in range(1, n_max + 1)))


def saturating_map():
    """One-dimensional ``x -> x/(1+x)``."""
    return Activation("saturating")


def random_irreducible(rng, n: int, density: float = 0.5) -> np.ndarray:
    """Random nonnegative irreducible matrix (a Hamiltonian cycle is forced)."""
    A = rng.random((n, n)) * (rng.random((n, n)) < density)
    perm = rng.permutation(n)
    for i in range(n):
        A[perm[i], perm[(i + 1) % n]] = max(A[perm[i], perm[(i + 1) % n]], 0.1 + rng.random())
    return A


def random_ann_family(rng, n: int = 3, m: int = 2, activation: str = "tanh",
                      bias: bool = False, scale: float = 0.5) -> Family:
    """``m`` random layers ``x -> A x + phi(B x) (+ b)`` on ``R^n_+``."""
    maps = []
    for _ in range(m):
        A = scale * rng.random((n, n))
        B = scale * rng.random((n, n))
        b = rng.random(n) if bias else None
        maps.append(ann(A, B, b, activation))
    return Family(tuple(maps), n)
