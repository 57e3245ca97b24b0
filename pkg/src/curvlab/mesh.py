"""Weighted one-dimensional calculus on orbit spaces.

When a compact group acts isometrically with one-dimensional quotient, every
invariant computation collapses to functions of the arc-length coordinate r
on a circle or an interval, integrated against the orbit-volume weight w(r).
This module owns that calculus: the quadrature, weighted Lp norms, first and
second derivatives, and the divergence-form Laplacian (1/w)(w u')'.

Every other module integrates with the single quadrature defined here, so
that summation-by-parts and adjointness checks are statements about matrices
rather than about mismatched quadrature rules.

Meshes are uniform.  On interval topology the weight may vanish at the two
endpoint nodes only (singular orbits); the Laplacian closes the stencil there
with a zero-flux (Neumann) condition, which is the correct boundary behavior
for smooth invariant functions across a singular orbit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CIRCLE = "circle"
INTERVAL = "interval"

# Endpoint weights below this fraction of the max are snapped to exact zero,
# so that analytically vanishing orbit volumes (e.g. sin(pi)) are honored.
_ENDPOINT_SNAP = 1e-12


def _as_values(u, n: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (n,):
        raise ValueError(f"discrete function has length {u.shape}, mesh has {n} nodes")
    return u


@dataclass(frozen=True)
class QuotientMesh:
    """Uniform discretization of a 1-D orbit space with orbit-volume weights.

    Attributes
    ----------
    topology : "circle" or "interval"
    nodes    : node coordinates, arc-length units; circle meshes omit the
               duplicate endpoint
    h        : uniform spacing
    weights  : orbit volume per node; positive, except possibly zero at the
               two endpoints of an interval
    length   : total coordinate length L
    """

    topology: str
    nodes: np.ndarray
    h: float
    weights: np.ndarray
    length: float

    def __post_init__(self):
        n = self.nodes.shape[0]
        if n < 16:
            raise ValueError(f"need at least 16 nodes, got {n}")
        if self.weights.shape != (n,):
            raise ValueError("weights/nodes length mismatch")
        w = self.weights
        if self.topology == CIRCLE:
            if np.any(w <= 0):
                raise ValueError("circle meshes require strictly positive weights")
        elif self.topology == INTERVAL:
            if np.any(w[1:-1] <= 0):
                raise ValueError("interior weights must be strictly positive")
            if np.any(w < 0):
                raise ValueError("weights must be nonnegative")
        else:
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.total_volume() <= 0:
            raise ValueError("total volume must be positive")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    # -- quadrature ----------------------------------------------------

    @property
    def node_count(self) -> int:
        return self.nodes.shape[0]

    def mass_vector(self) -> np.ndarray:
        """Quadrature masses m_j with integrate(u) = sum(u*m).

        Trapezoid rule: interval endpoints carry half weight; on the circle
        the rule is the plain (exact for trigonometric polynomials) sum.
        """
        m = self.weights * self.h
        if self.topology == INTERVAL:
            m = m.copy()
            m[0] *= 0.5
            m[-1] *= 0.5
        return m

    def total_volume(self) -> float:
        return float(np.sum(self.mass_vector()))

    def integrate(self, u) -> float:
        u = _as_values(u, self.node_count)
        return float(np.dot(u, self.mass_vector()))

    def inner(self, u, v) -> float:
        """Weighted L2 pairing <u, v>_w."""
        u = _as_values(u, self.node_count)
        v = _as_values(v, self.node_count)
        return float(np.dot(u * v, self.mass_vector()))

    def lp_norm(self, u, p: float) -> float:
        if p < 1:
            raise ValueError(f"p must be >= 1, got {p}")
        u = _as_values(u, self.node_count)
        return float(self.integrate(np.abs(u) ** p) ** (1.0 / p))

    # -- differentiation -----------------------------------------------

    def derivative(self, u) -> np.ndarray:
        """Second-order first derivative; one-sided at interval endpoints."""
        u = _as_values(u, self.node_count)
        h = self.h
        if self.topology == CIRCLE:
            return (np.roll(u, -1) - np.roll(u, 1)) / (2.0 * h)
        du = np.empty_like(u)
        du[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
        du[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
        du[-1] = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)
        return du

    def second_derivative(self, u) -> np.ndarray:
        """Compact second-order second derivative; one-sided at endpoints."""
        u = _as_values(u, self.node_count)
        h2 = self.h * self.h
        if self.topology == CIRCLE:
            return (np.roll(u, -1) - 2.0 * u + np.roll(u, 1)) / h2
        d2 = np.empty_like(u)
        d2[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h2
        d2[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / h2
        d2[-1] = (2.0 * u[-1] - 5.0 * u[-2] + 4.0 * u[-3] - u[-4]) / h2
        return d2

    def _face_weights(self) -> np.ndarray:
        """Weight at face j+1/2 (between node j and j+1); circular on circles."""
        w = self.weights
        if self.topology == CIRCLE:
            return 0.5 * (w + np.roll(w, -1))
        return 0.5 * (w[:-1] + w[1:])

    def laplacian(self, u) -> np.ndarray:
        """Divergence-form Laplacian (1/w)(w u')' with zero-flux closure.

        For unit weight on a circle this is the standard periodic second
        difference.  At interval endpoints the boundary flux is zero; where
        the endpoint weight itself vanishes (a singular orbit) the half-cell
        volume uses the trapezoid face average, which reproduces the limit
        (1+k) u'' of u'' + k u'/r for linearly vanishing weight.
        """
        u = _as_values(u, self.node_count)
        h = self.h
        wf = self._face_weights()
        if self.topology == CIRCLE:
            flux = wf * (np.roll(u, -1) - u) / h
            return (flux - np.roll(flux, 1)) / (h * self.weights)
        out = np.empty_like(u)
        flux = wf * (u[1:] - u[:-1]) / h
        out[1:-1] = (flux[1:] - flux[:-1]) / (h * self.weights[1:-1])
        w0, wn = self.weights[0], self.weights[-1]
        vol0 = 0.5 * h * (w0 if w0 > 0 else 0.5 * wf[0])
        voln = 0.5 * h * (wn if wn > 0 else 0.5 * wf[-1])
        out[0] = flux[0] / vol0
        out[-1] = -flux[-1] / voln
        return out

    # -- bilinear forms and matrices -------------------------------------

    def dirichlet_form(self, u, v) -> float:
        """Stiffness pairing sum_faces w_face (du)(dv)/h.

        This is the exact quadratic form of -laplacian against the mesh
        quadrature, i.e. <-lap(u), v>_w == dirichlet_form(u, v) up to the
        degenerate endpoint masses of an interval.
        """
        u = _as_values(u, self.node_count)
        v = _as_values(v, self.node_count)
        wf = self._face_weights()
        if self.topology == CIRCLE:
            du = np.roll(u, -1) - u
            dv = np.roll(v, -1) - v
        else:
            du = u[1:] - u[:-1]
            dv = v[1:] - v[:-1]
        return float(np.sum(wf * du * dv) / self.h)

    def stiffness_matrix(self) -> np.ndarray:
        """Dense matrix S with u.S.v == dirichlet_form(u, v)."""
        n = self.node_count
        wf = self._face_weights()
        S = np.zeros((n, n))
        if self.topology == CIRCLE:
            for j in range(n):
                jp = (j + 1) % n
                S[j, j] += wf[j]
                S[jp, jp] += wf[j]
                S[j, jp] -= wf[j]
                S[jp, j] -= wf[j]
        else:
            for j in range(n - 1):
                S[j, j] += wf[j]
                S[j + 1, j + 1] += wf[j]
                S[j, j + 1] -= wf[j]
                S[j + 1, j] -= wf[j]
        return S / self.h

    def d1_matrix(self) -> np.ndarray:
        """Dense matrix of `derivative`."""
        n = self.node_count
        return np.column_stack(
            [self.derivative(np.eye(n)[:, j]) for j in range(n)]
        )

    def d2_matrix(self) -> np.ndarray:
        """Dense matrix of `second_derivative`."""
        n = self.node_count
        return np.column_stack(
            [self.second_derivative(np.eye(n)[:, j]) for j in range(n)]
        )


def build_mesh(topology: str, n: int, length: float, weight) -> QuotientMesh:
    """Build a uniform mesh with weights sampled from ``weight``.

    ``weight`` is a callable r -> w(r) (vectorized or scalar) or an array of
    per-node values.  Circle meshes omit the duplicate endpoint.  Endpoint
    weights of interval meshes that vanish analytically are snapped to exact
    zero when the sample falls below 1e-12 of the maximum.
    """
    if n < 16:
        raise ValueError(f"need at least 16 nodes, got {n}")
    if length <= 0:
        raise ValueError("length must be positive")
    if topology == CIRCLE:
        h = length / n
        nodes = h * np.arange(n)
    elif topology == INTERVAL:
        h = length / (n - 1)
        nodes = h * np.arange(n)
        nodes[-1] = length
    else:
        raise ValueError(f"unknown topology {topology!r}")

    if callable(weight):
        w = np.asarray(weight(nodes), dtype=float)
        if w.shape != nodes.shape:  # scalar-only callable
            w = np.asarray([float(weight(r)) for r in nodes])
    else:
        w = np.asarray(weight, dtype=float).copy()
        if w.shape != nodes.shape:
            raise ValueError("weight array length mismatch")

    if topology == INTERVAL:
        snap = _ENDPOINT_SNAP * float(np.max(np.abs(w)) or 1.0)
        for j in (0, -1):
            if abs(w[j]) < snap:
                w[j] = 0.0
        if np.any(w[1:-1] <= 0):
            raise ValueError("weight must be positive in the interior")
    else:
        if np.any(w <= 0):
            raise ValueError("weight must be positive on a circle")

    return QuotientMesh(topology=topology, nodes=nodes, h=h, weights=w, length=float(length))


def circle_mesh(n: int, length: float, weight=1.0) -> QuotientMesh:
    """Convenience constructor; scalar weight means a constant weight."""
    if np.isscalar(weight):
        const = float(weight)
        return build_mesh(CIRCLE, n, length, lambda r: np.full_like(r, const))
    return build_mesh(CIRCLE, n, length, weight)
