"""Weighted quotient calculus: quadrature, derivatives, divergence-form Laplacian."""

import numpy as np
import pytest

from curvlab import CIRCLE, INTERVAL, build_mesh, circle_mesh
from curvlab.models import YamabeConstants


def test_build_circle_constant_weight():
    mesh = build_mesh(CIRCLE, 64, 2 * np.pi, lambda r: np.ones_like(r))
    assert mesh.h == pytest.approx(2 * np.pi / 64)
    assert mesh.node_count == 64
    assert np.all(mesh.weights == 1.0)
    # duplicate endpoint omitted
    assert mesh.nodes[-1] < 2 * np.pi


def test_build_interval_sine_weight_vanishes_at_endpoints():
    mesh = build_mesh(INTERVAL, 33, np.pi, np.sin)
    assert mesh.weights[0] == 0.0
    assert mesh.weights[-1] == 0.0
    assert np.all(mesh.weights[1:-1] > 0)


def test_build_rejects_negative_weight():
    with pytest.raises(ValueError):
        build_mesh(CIRCLE, 64, 2 * np.pi, lambda r: -np.ones_like(r))


def test_build_rejects_small_meshes():
    with pytest.raises(ValueError):
        build_mesh(CIRCLE, 8, 2 * np.pi, lambda r: np.ones_like(r))


def test_integrate_total_measure():
    mesh = circle_mesh(64, 2 * np.pi)
    assert mesh.integrate(np.ones(64)) == pytest.approx(2 * np.pi, rel=1e-14)


def test_integrate_odd_function_cancels():
    mesh = circle_mesh(64, 2 * np.pi)
    assert abs(mesh.integrate(np.sin(mesh.nodes))) < 1e-12


def test_integrate_interval_sine_weight_converges_to_two():
    errs = []
    for n in (65, 129, 257):
        mesh = build_mesh(INTERVAL, n, np.pi, np.sin)
        errs.append(abs(mesh.integrate(np.ones(n)) - 2.0))
    assert errs[0] / errs[1] == pytest.approx(4.0, abs=0.7)
    assert errs[1] / errs[2] == pytest.approx(4.0, abs=0.7)


def test_integrate_length_mismatch():
    mesh = circle_mesh(64, 2 * np.pi)
    with pytest.raises(ValueError):
        mesh.integrate(np.ones(63))


def test_lp_norm_constant():
    mesh = circle_mesh(64, 2 * np.pi)
    assert mesh.lp_norm(np.ones(64), 2) == pytest.approx(np.sqrt(2 * np.pi), rel=1e-14)


def test_lp_norm_homogeneity():
    mesh = circle_mesh(64, 2 * np.pi, lambda r: 1.0 + 0.3 * np.cos(r))
    vol = mesh.total_volume()
    for c in (-2.5, 0.7):
        got = mesh.lp_norm(np.full(64, c), 3)
        assert got == pytest.approx(abs(c) * vol ** (1 / 3), rel=1e-13)


def test_lp_norm_rejects_p_below_one():
    mesh = circle_mesh(64, 2 * np.pi)
    with pytest.raises(ValueError):
        mesh.lp_norm(np.ones(64), 0.5)


def test_lp_norm_triangle_inequality():
    rng = np.random.default_rng(3)
    mesh = circle_mesh(64, 2 * np.pi, lambda r: 1.0 + 0.5 * np.sin(r) ** 2)
    for _ in range(50):
        u = rng.normal(size=64)
        v = rng.normal(size=64)
        for p in (1.0, 2.0, 4.0):
            assert mesh.lp_norm(u + v, p) <= mesh.lp_norm(u, p) + mesh.lp_norm(v, p) + 1e-12


def test_holder_inequality_volume_factor():
    # ||u||_2 <= vol^(1/2 - 1/2*) ||u||_{2*}; never violated on random samples
    consts = YamabeConstants.for_dimension(4)
    rng = np.random.default_rng(11)
    mesh = circle_mesh(64, 2 * np.pi, lambda r: 1.0 + 0.4 * np.cos(2 * r) ** 2)
    vol = mesh.total_volume()
    factor = vol ** (0.5 - 1.0 / consts.two_star)
    for _ in range(1000):
        u = rng.normal(size=64)
        assert mesh.lp_norm(u, 2) <= factor * mesh.lp_norm(u, consts.two_star) * (1 + 1e-12)


def test_derivative_constant_and_linear():
    mesh = circle_mesh(64, 2 * np.pi)
    assert np.max(np.abs(mesh.derivative(np.full(64, 3.7)))) == 0.0
    interval = build_mesh(INTERVAL, 33, 1.0, lambda r: np.ones_like(r))
    d = interval.derivative(interval.nodes)
    assert np.max(np.abs(d - 1.0)) < 1e-12


def test_derivative_second_order_on_sine():
    errs = []
    for n in (64, 128, 256):
        mesh = circle_mesh(n, 2 * np.pi)
        errs.append(np.max(np.abs(mesh.derivative(np.sin(mesh.nodes)) - np.cos(mesh.nodes))))
    assert errs[0] / errs[1] == pytest.approx(4.0, abs=0.5)
    assert errs[1] / errs[2] == pytest.approx(4.0, abs=0.5)


def test_laplacian_kills_constants_exactly():
    mesh = circle_mesh(64, 2 * np.pi, lambda r: 1.0 + 0.5 * np.sin(r) ** 2)
    assert np.max(np.abs(mesh.laplacian(np.full(64, 2.2)))) < 1e-14
    interval = build_mesh(INTERVAL, 33, np.pi, np.sin)
    assert np.max(np.abs(interval.laplacian(np.full(33, -1.3)))) < 1e-13


def test_laplacian_is_periodic_second_difference_for_unit_weight():
    mesh = circle_mesh(32, 2 * np.pi)
    rng = np.random.default_rng(5)
    u = rng.normal(size=32)
    expected = (np.roll(u, -1) - 2 * u + np.roll(u, 1)) / mesh.h**2
    assert np.allclose(mesh.laplacian(u), expected, atol=1e-12)


def test_laplacian_second_order_on_sine():
    errs = []
    for n in (64, 128, 256):
        mesh = circle_mesh(n, 2 * np.pi)
        errs.append(np.max(np.abs(mesh.laplacian(np.sin(mesh.nodes)) + np.sin(mesh.nodes))))
    assert errs[0] / errs[1] == pytest.approx(4.0, abs=0.5)
    assert errs[1] / errs[2] == pytest.approx(4.0, abs=0.5)


def test_divergence_theorem_on_circle():
    rng = np.random.default_rng(7)
    mesh = circle_mesh(64, 2 * np.pi, lambda r: 1.2 + 0.5 * np.sin(r))
    for _ in range(20):
        u = rng.normal(size=64)
        assert abs(mesh.integrate(mesh.laplacian(u))) < 1e-10


def test_summation_by_parts_second_order():
    # |<lap u, v>_w + <u', v'>_w| = O(h^2) for trigonometric samples
    rng = np.random.default_rng(13)
    gaps = []
    for n in (64, 128, 256):
        mesh = circle_mesh(n, 2 * np.pi, lambda r: 1.0 + 0.3 * np.cos(r))
        r = mesh.nodes
        u = np.sin(2 * r) + 0.5 * np.cos(3 * r)
        v = np.cos(r) - 0.2 * np.sin(2 * r)
        gap = abs(mesh.inner(mesh.laplacian(u), v) + mesh.inner(mesh.derivative(u), mesh.derivative(v)))
        gaps.append(gap)
    assert gaps[0] / gaps[1] == pytest.approx(4.0, abs=1.5)
    assert gaps[2] < gaps[0]


def test_stiffness_matches_laplacian_exactly():
    mesh = circle_mesh(48, 2 * np.pi, lambda r: 1.0 + 0.4 * np.sin(r) ** 2)
    rng = np.random.default_rng(17)
    u = rng.normal(size=48)
    v = rng.normal(size=48)
    lhs = mesh.inner(mesh.laplacian(u), v)
    rhs = -mesh.dirichlet_form(u, v)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
    S = mesh.stiffness_matrix()
    assert v @ S @ u == pytest.approx(mesh.dirichlet_form(u, v), rel=1e-12)


def test_integrate_linear_and_monotone():
    mesh = circle_mesh(64, 2 * np.pi, lambda r: 1.0 + 0.2 * np.sin(r))
    rng = np.random.default_rng(19)
    u = rng.normal(size=64)
    v = rng.normal(size=64)
    assert mesh.integrate(2.0 * u + 3.0 * v) == pytest.approx(
        2.0 * mesh.integrate(u) + 3.0 * mesh.integrate(v), rel=1e-12, abs=1e-12)
    assert mesh.integrate(np.abs(u)) >= mesh.integrate(-np.abs(u))


def test_interval_laplacian_with_singular_weight_spherical_harmonic():
    # weight sin(r) on [0, pi] is the orbit volume of a 2-sphere quotient;
    # the first harmonic cos(r) satisfies (1/w)(w u')' = -2 u including at
    # the vanishing-weight endpoints under the zero-flux closure
    errs = []
    for n in (33, 65, 129):
        mesh = build_mesh(INTERVAL, n, np.pi, np.sin)
        u = np.cos(mesh.nodes)
        errs.append(np.max(np.abs(mesh.laplacian(u) + 2.0 * u)))
    assert errs[0] / errs[1] > 2.0
    assert errs[1] / errs[2] > 2.0
    assert errs[-1] < 5e-3
