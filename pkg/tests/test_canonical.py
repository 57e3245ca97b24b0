"""Fiber-scaled submersion curvature: plane formulas, assembly, thresholds."""

import numpy as np
import pytest

from curvlab import (PreconditionError, SubmersionPointData, cv_scal,
                     cv_sectional, positivity_threshold)


def product_data(base_scal=0.0, fiber_scal=2.0, base_dim=2, fiber_dim=2):
    """Riemannian-product data: base and total HH curvatures agree, no mixing."""
    K = np.zeros((base_dim, base_dim))
    if base_scal:
        K[:] = base_scal / (base_dim * (base_dim - 1))
        np.fill_diagonal(K, 0.0)
    return SubmersionPointData(base_dim=base_dim, fiber_dim=fiber_dim,
                               K_base=K, K_tot_hh=K.copy(),
                               K_mixed=np.zeros((base_dim, fiber_dim)),
                               fiber_scal=fiber_scal)


def generic_data(rng, base_dim=3, fiber_dim=2):
    K_base = rng.normal(size=(base_dim, base_dim))
    K_base = 0.5 * (K_base + K_base.T)
    np.fill_diagonal(K_base, 0.0)
    K_tot = K_base - np.abs(rng.normal(size=1)) * (np.ones((base_dim, base_dim)) - np.eye(base_dim))
    K_mixed = rng.normal(size=(base_dim, fiber_dim))
    return SubmersionPointData(base_dim=base_dim, fiber_dim=fiber_dim, K_base=K_base,
                               K_tot_hh=K_tot, K_mixed=K_mixed, fiber_scal=2.0)


def test_sectional_undeformed_at_one():
    rng = np.random.default_rng(137)
    d = generic_data(rng)
    for i in range(3):
        for j in range(3):
            if i != j:
                assert cv_sectional(d, 1.0, "hh", i, j) == pytest.approx(d.K_tot_hh[i, j])
    for i in range(3):
        for j in range(2):
            assert cv_sectional(d, 1.0, "hv", i, j) == pytest.approx(d.K_mixed[i, j])
    assert cv_sectional(d, 1.0, "vv", fiber_k=0.7) == pytest.approx(0.7)


def test_sectional_product_mixed_planes_flat():
    d = product_data(base_scal=-4.0)
    for s in (0.1, 0.5, 2.0):
        assert cv_sectional(d, s, "hv", 0, 1) == 0.0


def test_sectional_hh_substitution():
    d = SubmersionPointData(base_dim=2, fiber_dim=1,
                            K_base=np.array([[0.0, 1.0], [1.0, 0.0]]),
                            K_tot_hh=np.array([[0.0, 1.0], [1.0, 0.0]]),
                            K_mixed=np.zeros((2, 1)), fiber_scal=1.0)
    assert cv_sectional(d, 0.5, "hh", 0, 1) == pytest.approx(1.0)


def test_scal_product_flat_base():
    d = product_data(base_scal=0.0, fiber_scal=2.0)
    assert cv_scal(d, 0.5) == pytest.approx(4.0)
    for s in (0.1, 1.0, 3.0):
        assert cv_scal(d, s) == pytest.approx(2.0 / s)


def test_scal_negative_base_substitution():
    d = product_data(base_scal=-4.0, fiber_scal=2.0)
    assert cv_scal(d, 1.0) == pytest.approx(-2.0)
    for s in (0.2, 0.7, 1.5):
        assert cv_scal(d, s) == pytest.approx(-4.0 + 2.0 / s)


def test_scal_consistency_at_one_with_basis_double_sum():
    rng = np.random.default_rng(139)
    for _ in range(5):
        d = generic_data(rng)
        k = d.fiber_dim
        fiber_pairs = d.fiber_scal  # vertical block of the double sum
        double_sum = float(np.sum(d.K_tot_hh)) + 2.0 * float(np.sum(d.K_mixed)) + fiber_pairs
        assert cv_scal(d, 1.0) == pytest.approx(double_sum, abs=1e-12)


def test_scal_affine_in_table_entries():
    rng = np.random.default_rng(149)
    d = generic_data(rng)
    s = 0.37
    base = cv_scal(d, s)
    bump = np.zeros((3, 3))
    bump[0, 1] = bump[1, 0] = 1.0
    d2 = SubmersionPointData(base_dim=3, fiber_dim=2, K_base=d.K_base + bump,
                             K_tot_hh=d.K_tot_hh, K_mixed=d.K_mixed, fiber_scal=d.fiber_scal)
    d3 = SubmersionPointData(base_dim=3, fiber_dim=2, K_base=d.K_base + 2 * bump,
                             K_tot_hh=d.K_tot_hh, K_mixed=d.K_mixed, fiber_scal=d.fiber_scal)
    first = cv_scal(d2, s) - base
    second = cv_scal(d3, s) - cv_scal(d2, s)
    assert first == pytest.approx(second, rel=1e-12)


def test_scal_diverges_for_positive_fiber():
    rng = np.random.default_rng(151)
    d = generic_data(rng)
    assert cv_scal(d, 1e-6) > 1e5 * d.fiber_scal / 2.0


def test_threshold_unbounded_for_flat_base():
    d = product_data(base_scal=0.0, fiber_scal=2.0)
    assert positivity_threshold(d) == float("inf")


def test_threshold_analytic_root():
    d = product_data(base_scal=-4.0, fiber_scal=2.0)
    assert positivity_threshold(d) == pytest.approx(0.5, abs=1e-9)


def test_threshold_rejects_nonpositive_fiber():
    d = product_data(base_scal=-4.0, fiber_scal=0.0)
    with pytest.raises(PreconditionError):
        positivity_threshold(d)


def test_threshold_brackets_positive_region():
    d = product_data(base_scal=-4.0, fiber_scal=2.0)
    s_star = positivity_threshold(d)
    for s in np.linspace(1e-4, s_star * 0.999, 40):
        assert cv_scal(d, float(s)) > 0


def test_rejects_nonpositive_scale():
    d = product_data()
    with pytest.raises(ValueError):
        cv_scal(d, 0.0)
    with pytest.raises(ValueError):
        cv_sectional(d, -1.0, "hh", 0, 1)
