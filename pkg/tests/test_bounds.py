import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conejsr import families as fam
from conejsr.bounds import (NotHomogeneousError, canonical_rotation, generalized_jsr_partial,
                            jsr_bracket, slice_jsr_lower, subhomogeneous_sandwich,
                            trajectory_divergence_check)
from conejsr.maps import Family, Identity, Linear, Scale, ann
from conejsr.spectral import PowerConfig, slice_spectral_radius


def perron(A):
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def brute_force_gjsr(mats, k_max):
    best, arg = 0.0, None
    for k in range(1, k_max + 1):
        for w in itertools.product(range(len(mats)), repeat=k):
            P = np.eye(mats[0].shape[0])
            for i in w:
                P = P @ mats[i]
            r = perron(P) ** (1 / k)
            if r > best * (1 + 1e-12):
                best, arg = r, w
    return best, arg


def test_scaled_identity():
    b = jsr_bracket(Family((Scale(0.7, Identity()),), 2), 1)
    assert b.lower == pytest.approx(0.7) and b.upper == pytest.approx(0.7)


def test_linear_pair_bracket():
    A1, A2 = fam.LINEAR_PAIR
    b = jsr_bracket(fam.linear_pair(), 6)
    alpha = np.sqrt(perron(A1 @ A2))
    assert abs(b.lower - alpha) < 1e-6
    assert b.upper >= b.lower
    assert len(b.rows) == 6 and b.complete
    assert canonical_rotation(b.witness_word) == (0, 1)


def test_single_map_collapses():
    A = np.array([[0.5, 0.4], [0.1, 0.6]])
    F = Family((Linear(A),), 2)
    b = jsr_bracket(F, 12)
    assert b.lower == pytest.approx(perron(A), rel=1e-10)
    gaps = [uk - perron(A) for _, _, uk, _ in b.rows]
    assert gaps[-1] < gaps[0] and gaps[-1] < 0.02


def test_generalized_partial_examples():
    A = np.array([[0.2, 0.7], [0.4, 0.1]])
    v, w = generalized_jsr_partial(Family((Linear(A),), 2), 1)
    assert v == pytest.approx(perron(A)) and w == (0,)
    v, w = generalized_jsr_partial(fam.linear_pair(), 4)
    bv, bw = brute_force_gjsr(fam.LINEAR_PAIR, 4)
    assert v == pytest.approx(bv, rel=1e-10)
    assert canonical_rotation(w) == canonical_rotation(bw) == (0, 1)


def test_mixing_counterexample_truncated():
    F = fam.mixing_family(5)
    v, _ = generalized_jsr_partial(F, 2, cfg=PowerConfig(max_iters=2000))
    assert v <= 0.5 + 1e-6
    # each member has spectral radius exactly 1/2 with eigenvector (0, 1)
    for f in F.maps:
        np.testing.assert_allclose(f(np.array([0.0, 1.0])), [0.0, 0.5])


def test_sandwich_homogeneous_family():
    F = fam.linear_pair()
    rep = subhomogeneous_sandwich(F, 4)
    b = jsr_bracket(F, 4)
    assert rep.lower == pytest.approx(b.lower) and rep.upper == pytest.approx(b.upper)


def test_sandwich_bias_flags_infinite_upper():
    f = ann([[0.2, 0.1], [0.1, 0.2]], [[0.3, 0.1], [0.2, 0.2]], [0.1, 0.1], "tanh")
    rep = subhomogeneous_sandwich(Family((f,), 2), 3)
    assert rep.upper == np.inf and rep.zero_bracket is None
    assert rep.lower == pytest.approx(perron(np.array([[0.2, 0.1], [0.1, 0.2]])))


def test_sandwich_single_tanh_map(rng):
    A, B = 0.5 * rng.random((3, 3)), 0.5 * rng.random((3, 3))
    F = Family((ann(A, B, None, "tanh"),), 3)
    rep = subhomogeneous_sandwich(F, 3)
    assert rep.lower == pytest.approx(perron(A), rel=1e-9)
    for c in (1e-2, 1, 1e2):
        v = slice_spectral_radius(F[0], c, dim=3).value
        assert perron(A) - 1e-9 <= v <= perron(A + B) + 1e-9
        assert rep.lower - 1e-9 <= v <= rep.upper + 1e-9


def test_slice_jsr_lower_homogeneous_equals_gjsr(rng):
    F = Family(tuple(Linear(rng.random((2, 2)) + 0.1) for _ in range(2)), 2)
    v, w = slice_jsr_lower(F, 1.0, 2)
    assert v == pytest.approx(generalized_jsr_partial(F, 2)[0], rel=1e-9)


def test_not_homogeneous_rejected():
    F = Family((ann(np.eye(2), np.eye(2), None, "tanh"),), 2)
    with pytest.raises(NotHomogeneousError):
        jsr_bracket(F, 2)


def test_budget_flag():
    b = jsr_bracket(fam.linear_pair(), 6, max_words=16)
    assert not b.complete and b.depth == 4


def test_threads_deterministic(monkeypatch):
    a = jsr_bracket(fam.power_mean_pair(), 5)
    monkeypatch.setenv("CONEJSR_THREADS", "4")
    b = jsr_bracket(fam.power_mean_pair(), 5)
    assert a.rows == b.rows


def test_trajectory_examples():
    F = Family((Identity(),), 2)
    rep = trajectory_divergence_check(F, np.ones(2), 0.1, 10, trials=5)
    assert rep.ok and rep.max_distance_ratio == pytest.approx(1.0)
    G = Family((Scale(0.9, Identity()), Scale(0.9, Linear([[0, 1], [1, 0]]))), 2)
    rep = trajectory_divergence_check(G, np.ones(2), 0.1, 30, trials=5, rate=0.9, eps=0.0)
    assert rep.ok and rep.fitted_C <= 1 + 1e-9
    assert rep.onset_K0 == 1


def random_families():
    seeds = st.integers(0, 10 ** 6)
    kinds = st.sampled_from(["linear", "power_mean", "relu"])

    def build(args):
        seed, kind = args
        rng = np.random.default_rng(seed)
        if kind == "linear":
            return Family(tuple(Linear(fam.random_irreducible(rng, 3)) for _ in range(2)), 3)
        if kind == "relu":
            return fam.random_ann_family(rng, 3, 2, "relu")
        from conejsr.maps import power_mean_layer
        return Family(tuple(power_mean_layer(rng.random((2, 2)) + 0.05, rng.random((2, 2)) + 0.05,
                                             float(rng.uniform(0.2, 2))) for _ in range(2)), 2)
    return st.tuples(seeds, kinds).map(build)


@settings(max_examples=40)
@given(random_families(), st.integers(0, 10 ** 6))
def test_bracket_consistency_and_fekete(F, seed):
    rng = np.random.default_rng(seed)
    b1 = jsr_bracket(F, 5)
    b2 = jsr_bracket(F, 5, base_point=rng.uniform(0.2, 2.0, F.dim))
    for rows in (b1.rows, b2.rows):
        for (_, lk, _, _), (_, _, uj, _) in itertools.product(b1.rows + b2.rows, rows):
            assert lk <= uj * (1 + 1e-9)
        logs = {k: k * np.log(uk) for k, _, uk, _ in rows}
        for k, j in itertools.product(logs, logs):
            if k + j in logs:
                assert logs[k + j] <= logs[k] + logs[j] + 1e-9
    assert max(b1.lower, b2.lower) <= min(b1.upper, b2.upper) * (1 + 1e-9)


def test_asymptotic_stability_link():
    F = fam.linear_pair()
    b = jsr_bracket(F, 6)
    G = F.scaled(0.95 / b.upper)
    bg = jsr_bracket(G, 6)
    assert bg.upper < 1
    rep = trajectory_divergence_check(G, np.ones(2), 0.1, 60, trials=10, rate=bg.upper)
    assert rep.ok and rep.onset_K0 is not None
