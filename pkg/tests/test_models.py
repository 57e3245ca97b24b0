"""Warped-product and left-invariant curvature against independent oracles."""

import numpy as np
import pytest

from curvlab import (LeftInvariantMetric, WarpedProductMetric, YamabeConstants,
                     abelian_metric, get_preset, ricci_warped,
                     scal_left_invariant, scal_warped, sectional_left_invariant,
                     su2_metric, su2_structure)

from oracles import curvature_tensor_scal


def bumpy(amplitude=0.1, n=64):
    return WarpedProductMetric.from_profile(
        n, 2 * np.pi, 3, 6.0, lambda r: 1.0 + amplitude * np.sin(r))


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


def test_yamabe_constants_are_the_rational_functions():
    for n in (3, 4, 7):
        c = YamabeConstants.for_dimension(n)
        assert c.b_n == (n - 1) / (n - 2)
        assert c.gamma_n == (n + 2) / (n - 2)
        assert c.two_star == 2 * n / (n - 2)


def test_dimension_three_required():
    with pytest.raises(ValueError):
        YamabeConstants.for_dimension(2)


# ---------------------------------------------------------------------------
# warped products
# ---------------------------------------------------------------------------


def test_round_fiber_product_scal_six():
    metric = get_preset("round-fiber")
    assert np.allclose(scal_warped(metric), 6.0, atol=1e-12)


def test_flat_torus_scal_zero():
    metric = get_preset("flat-torus")
    assert np.allclose(scal_warped(metric), 0.0, atol=1e-12)


def test_warped_scal_matches_analytic_derivative_oracle():
    # closed form evaluated with exact derivatives of f = 1 + 0.1 sin r
    errs = []
    for n in (64, 128, 256):
        metric = bumpy(n=n)
        r = metric.mesh.nodes
        f = 1.0 + 0.1 * np.sin(r)
        df = 0.1 * np.cos(r)
        d2f = -0.1 * np.sin(r)
        exact = 6.0 / f**2 - 6.0 * d2f / f - 6.0 * (df / f) ** 2
        errs.append(np.max(np.abs(scal_warped(metric) - exact)))
    assert errs[0] / errs[1] == pytest.approx(4.0, abs=0.5)
    assert errs[1] / errs[2] == pytest.approx(4.0, abs=0.5)


def test_ricci_round_product_values():
    metric = get_preset("round-fiber")
    ric_rr, ric_fiber = ricci_warped(metric)
    assert np.allclose(ric_rr, 0.0, atol=1e-12)
    assert np.allclose(ric_fiber, 2.0, atol=1e-12)


def test_ricci_flat_model_vanishes():
    metric = get_preset("flat-torus")
    ric_rr, ric_fiber = ricci_warped(metric)
    assert np.allclose(ric_rr, 0.0, atol=1e-12)
    assert np.allclose(ric_fiber, 0.0, atol=1e-12)


def test_ricci_trace_identity_random_warping():
    rng = np.random.default_rng(23)
    coef = rng.normal(scale=0.05, size=3)
    metric = WarpedProductMetric.from_profile(
        96, 2 * np.pi, 3, 6.0,
        lambda r: 1.0 + coef[0] * np.sin(r) + coef[1] * np.cos(2 * r) + coef[2] * np.sin(3 * r))
    ric_rr, ric_fiber = ricci_warped(metric)
    assert np.max(np.abs(ric_rr + 3 * ric_fiber - scal_warped(metric))) < 1e-8


def test_scal_invariant_under_reflection():
    metric = bumpy(amplitude=0.2)
    n = metric.mesh.node_count
    reflected_profile = metric.warping[(-np.arange(n)) % n]
    reflected = WarpedProductMetric.from_profile(n, 2 * np.pi, 3, 6.0, reflected_profile)
    assert np.allclose(scal_warped(reflected),
                       scal_warped(metric)[(-np.arange(n)) % n], atol=1e-11)


def test_scal_scaling_law():
    metric = bumpy(amplitude=0.15)
    for c in (0.5, 4.0):
        scaled = metric.scaled(c)
        assert np.allclose(scal_warped(scaled), scal_warped(metric) / c, rtol=1e-10, atol=1e-12)


def test_warping_must_be_positive():
    with pytest.raises(ValueError):
        WarpedProductMetric.from_profile(64, 2 * np.pi, 3, 6.0, lambda r: np.sin(r))


def test_mesh_weight_consistency_enforced():
    metric = bumpy()
    assert np.allclose(metric.mesh.weights, metric.warping**3)


# ---------------------------------------------------------------------------
# left-invariant metrics
# ---------------------------------------------------------------------------


def test_su2_biinvariant_scal():
    assert scal_left_invariant(su2_metric()) == pytest.approx(1.5, rel=1e-14)


def test_abelian_scal_zero():
    rng = np.random.default_rng(29)
    A = rng.normal(size=(4, 4))
    P = A @ A.T + 4 * np.eye(4)
    assert scal_left_invariant(abelian_metric(4, P)) == 0.0


def test_su2_diagonal_matches_curvature_tensor_oracle():
    for lam in (0.5, 2.0):
        m = su2_metric(np.diag([lam, 1.0, 1.0]))
        assert scal_left_invariant(m) == pytest.approx(curvature_tensor_scal(m), abs=1e-10)


def test_su2_berger_closed_form():
    # diag(lam, 1, 1) has scal = 2 - lam/2 in these conventions
    for lam in (0.5, 1.0, 2.0, 3.5):
        m = su2_metric(np.diag([lam, 1.0, 1.0]))
        assert scal_left_invariant(m) == pytest.approx(2.0 - lam / 2.0, rel=1e-12)


def test_sectional_degenerate_plane_is_zero():
    m = su2_metric(np.diag([0.7, 1.3, 2.0]))
    X = np.array([1.0, 2.0, -0.5])
    assert sectional_left_invariant(m, X, 3.0 * X) == pytest.approx(0.0, abs=1e-14)


def test_sectional_biinvariant_quarter_bracket_norm():
    m = su2_metric()
    rng = np.random.default_rng(31)
    for _ in range(20):
        X = rng.normal(size=3)
        Y = rng.normal(size=3)
        expected = 0.25 * np.dot(m.bracket(X, Y), m.bracket(X, Y))
        assert sectional_left_invariant(m, X, Y) == pytest.approx(expected, rel=1e-11, abs=1e-12)


def test_sectional_orthonormal_sum_reproduces_scal():
    rng = np.random.default_rng(37)
    for _ in range(5):
        lam = rng.uniform(0.5, 2.0, 3)
        B = rng.normal(size=(3, 3))
        O = np.linalg.qr(B)[0]
        P = O @ np.diag(lam) @ O.T
        m = su2_metric(P)
        lam_e, O_e = np.linalg.eigh(P)
        total = 0.0
        for i in range(3):
            for j in range(3):
                if i != j:
                    bi = O_e[:, i] / np.sqrt(lam_e[i])
                    bj = O_e[:, j] / np.sqrt(lam_e[j])
                    total += sectional_left_invariant(m, bi, bj)
        assert total == pytest.approx(scal_left_invariant(m), abs=1e-10)


def test_biinvariant_nonnegative_abelian_zero():
    assert scal_left_invariant(su2_metric()) > 0
    so3_plus_line = np.zeros((4, 4, 4))
    so3_plus_line[:3, :3, :3] = su2_structure()
    m = LeftInvariantMetric(so3_plus_line, np.eye(4))
    assert scal_left_invariant(m) > 0
    assert scal_left_invariant(abelian_metric(3)) == 0.0


def test_structure_constant_validation():
    bad = np.zeros((3, 3, 3))
    bad[0, 1, 2] = 1.0  # not antisymmetric
    with pytest.raises(ValueError):
        LeftInvariantMetric(bad, np.eye(3))
    with pytest.raises(ValueError):
        LeftInvariantMetric(su2_structure(), np.diag([1.0, -1.0, 1.0]))


# ---------------------------------------------------------------------------
# catalogue
# ---------------------------------------------------------------------------


def test_preset_catalogue():
    assert isinstance(get_preset("round-fiber"), WarpedProductMetric)
    assert isinstance(get_preset("flat-torus"), WarpedProductMetric)
    assert np.allclose(scal_warped(get_preset("hyperbolic-fiber")), -2.0, atol=1e-12)
    berger = get_preset("su2-berger(0.5)")
    assert isinstance(berger, LeftInvariantMetric)
    assert berger.tensor[0, 0] == 0.5
    assert isinstance(get_preset("su2-biinvariant"), LeftInvariantMetric)
    with pytest.raises(KeyError):
        get_preset("nonexistent")
