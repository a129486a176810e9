import numpy as np
import pytest
from hypothesis import given, strategies as st

from conejsr import families as fam
from conejsr.cone import ConeContext, hilbert_distance
from conejsr.maps import Compose, Identity, Linear, Scale, ann
from conejsr.spectral import (CollapsedOrbitError, PowerConfig, collatz_wielandt_bracket,
                              eigencurve, perturb_interior, power_iterate,
                              slice_spectral_radius)


def perron(A):
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def test_identity_and_periodic_examples():
    ep = power_iterate(Identity(), np.array([0.3, 0.9]))
    assert ep.value == pytest.approx(1.0, abs=1e-14)
    ep = power_iterate(Linear([[0, 2], [0.5, 0]]), np.ones(2))
    assert ep.value == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(ep.vector / ep.vector[1], [2, 1], rtol=1e-10)


def test_linear_pair_product_oracle():
    A1, A2 = fam.LINEAR_PAIR
    ep = power_iterate(Linear(A1 @ A2), np.ones(2))
    assert ep.value == pytest.approx(perron(np.array([[1.8, 0.9], [0.9, 0.9]])), rel=1e-12)
    lo, hi = ep.bracket
    assert lo <= ep.value <= hi and hi - lo < 1e-12


def test_boundary_eigenvector_detected():
    ep = power_iterate(Linear(np.diag([4.0, 0.25])), np.ones(2))
    assert ep.boundary and ep.value == pytest.approx(4.0)
    assert ep.lower == pytest.approx(4.0)


def test_collapsed_orbit():
    with pytest.raises(CollapsedOrbitError):
        power_iterate(Linear([[0, 1], [0, 0]]), np.ones(2))


def test_cw_bracket_examples():
    assert collatz_wielandt_bracket(Scale(3.0, Identity()), [1, 2]) == (3.0, 3.0)
    assert collatz_wielandt_bracket(Linear([[0, 2], [0.5, 0]]), [1, 1]) == (0.5, 2.0)
    lo, hi = collatz_wielandt_bracket(Linear([[0, 2], [0.5, 0]]), [2, 1])
    assert lo == pytest.approx(1) and hi == pytest.approx(1)
    lo, hi = collatz_wielandt_bracket(Linear(np.diag([4.0, 0.25])), [1, 0])
    assert lo == 4 and hi == np.inf


def test_perturbation_examples():
    ctx = ConeContext(3)
    zero = Linear(np.zeros((3, 3)))
    fe = perturb_interior(zero, 1.0, ctx)
    assert power_iterate(fe, np.ones(3)).value == pytest.approx(3.0)
    f = Linear(np.diag([4.0, 0.25]))
    vals = [power_iterate(perturb_interior(f, e, ConeContext(2)), np.ones(2)).value
            for e in (1e-2, 1e-4, 1e-6)]
    assert vals[0] >= vals[1] >= vals[2] >= 4.0
    assert vals[2] == pytest.approx(4.0, abs=1e-5)
    x = np.array([0.2, 0.0])
    assert np.all(perturb_interior(f, 1e-3, ConeContext(2))(x) >= f(x))
    assert np.all(perturb_interior(f, 1e-3, ConeContext(2))(x) > 0)


def test_slice_homogeneous_matches_power():
    f = fam.power_mean_pair()[0]
    rho = power_iterate(f, np.ones(2)).value
    for c in (1e-3, 1.0, 1e3):
        ep = slice_spectral_radius(f, c, dim=2)
        assert ep.value == pytest.approx(rho, rel=1e-10)
        assert sum(ep.vector) == pytest.approx(c)


def test_slice_saturating_closed_form():
    f = fam.saturating_map()
    for c in (0.1, 1.0, 10.0):
        assert slice_spectral_radius(f, c, dim=1).value == pytest.approx(1 / (1 + c), rel=1e-12)


def test_slice_ann_between_limits(rng):
    A = 0.4 * rng.random((3, 3))
    B = 0.4 * rng.random((3, 3))
    f = ann(A, B, None, "tanh")
    for c in (1e-3, 0.5, 1.0, 10.0, 1e3):
        v = slice_spectral_radius(f, c, dim=3).value
        assert perron(A) - 1e-9 <= v <= perron(A + B) + 1e-9


def test_eigencurve_examples():
    f = fam.saturating_map()
    pairs, rep = eigencurve(f, [0.1, 1, 10], dim=1)
    np.testing.assert_allclose(rep.rho, [1 / 1.1, 0.5, 1 / 11], rtol=1e-12)
    assert rep.ok
    assert rep.rho_zero_ref == pytest.approx(1.0) and rep.rho_inf_ref == pytest.approx(0.0)
    pairs, rep = eigencurve(fam.power_mean_pair()[1], [0.1, 1, 10], dim=2)
    assert max(rep.rho) - min(rep.rho) < 1e-10
    with pytest.raises(ValueError):
        eigencurve(f, [1, 0.5], dim=1)


def random_irreducible(seed, n):
    return fam.random_irreducible(np.random.default_rng(seed), n)


@given(st.integers(0, 10 ** 6), st.integers(2, 6))
def test_bracket_contains_value_and_shrinks(seed, n):
    A = random_irreducible(seed, n)
    f = Linear(A)
    x = np.ones(n) / n
    widths = []
    for _ in range(30):
        lo, hi = collatz_wielandt_bracket(f, x)
        widths.append(hi - lo)
        assert lo <= perron(A) * (1 + 1e-12) and hi >= perron(A) * (1 - 1e-12)
        y = f(x) + x  # shifted map keeps the bracket shrinking for periodic A
        x = y / y.sum()
    ep = power_iterate(f, np.ones(n))
    assert ep.bracket[0] - 1e-12 <= ep.value <= ep.bracket[1] + 1e-12


@given(st.integers(0, 10 ** 6), st.integers(2, 5), st.integers(2, 4))
def test_power_of_map(seed, n, k):
    A = random_irreducible(seed, n) + 0.05
    rho = power_iterate(Linear(A), np.ones(n)).value
    fk = Linear(np.linalg.matrix_power(A, k))
    assert power_iterate(fk, np.ones(n)).value == pytest.approx(rho ** k, rel=1e-8)


@given(st.integers(0, 10 ** 6))
def test_cyclic_invariance(seed):
    F = fam.random_ann_family(np.random.default_rng(seed), 3, 2, "relu")
    f, g = F.maps
    a = power_iterate(Compose(f, g), np.ones(3)).value
    b = power_iterate(Compose(g, f), np.ones(3)).value
    assert a == pytest.approx(b, rel=1e-8)


@given(st.integers(0, 10 ** 6))
def test_iterates_nonexpansive_in_hilbert(seed):
    f = fam.power_mean_pair()[seed % 2]
    rng = np.random.default_rng(seed)
    x = rng.random(2) + 0.01
    prev = np.inf
    for _ in range(30):
        y = f(x)
        d = hilbert_distance(y, x)
        assert d <= prev + 1e-12
        prev = d
        x = y / y.sum()


def test_epsilon_continuity_boundary_case():
    # eigenvector (0, 1) for the eigenvalue 1 sits on the boundary
    f = Linear([[0.5, 0.0], [0.5, 1.0]])
    vals = [power_iterate(perturb_interior(f, e, ConeContext(2)), np.ones(2)).value
            for e in (1e-2, 1e-4, 1e-6)]
    assert vals[0] > vals[1] > vals[2] > 1.0
    assert vals[2] - 1.0 < 1e-5


def test_power_config_validation():
    with pytest.raises(ValueError):
        PowerConfig(max_iters=0)
    with pytest.raises(ValueError):
        power_iterate(Identity(), np.array([1.0, 0.0]))
