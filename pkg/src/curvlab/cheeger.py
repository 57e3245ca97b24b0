"""Pointwise curvature of metrics shrunk along group orbits.

Shrinking an invariant metric along orbit directions with an auxiliary
bi-invariant inner product produces a one-parameter family g_t whose scalar
curvature at a point decomposes into three sums over an adapted orthonormal
basis (normal directions e_i, orbit directions generated by an eigenbasis
v_i of the orbit tensor P with eigenvalues lam_i):

    scal_t = sum K(C_t^{1/2} e_a, C_t^{1/2} e_b)
           + sum twist_term(C_t^{1/2} e_a, C_t^{1/2} e_b)
           + sum lam_i lam_j t^3 / ((1+t lam_i)(1+t lam_j)) * |[v_i, v_j]|^2 / 4

where C_t is the identity on the normal space and (1 + tP)^{-1} on the orbit.
The twist term is the exact constrained maximum

    3t * max_{|Z|=1} (dw_Z(X, Y) + (t/2) <[PU, PV], Z>)^2 / (t g(Z*, Z*) + 1)

of a rank-one quadratic over an affine-in-t positive form; on the unit sphere
the denominator equals Z.(I + tS).Z with S the orbit block of P, so the max
is the generalized eigenvalue l.(I + tS)^{-1}.l of the coefficient vector l.
No search is needed; the dense-sampling route survives as a test oracle.

The exterior-derivative data dw_Z feeding the numerator:

  * orbit-orbit pairs come from the algebra,
        dw_Z(U*, V*) = <[PU, V] + [U, PV] - P[U, V], Z> / 2
    (the half is the normalization of the one-form w_Z = g(., Z*)/2 and is
    fixed by the requirement that on a group manifold the assembled scal_t
    exactly equals the scalar curvature of the deformed tensor
    P_t = (1 + tP)^{-1} P; see deformed_group_metric);
  * normal-normal pairs against orbit-algebra directions are model-supplied
    tables (zero by default);
  * normal-normal pairs against isotropy directions are the derivative of the
    isotropy representation: dw_Z(e_i, e_j) = g(e_i, rho_{e_j}(Z)), which is
    what makes singular orbits raise the large-t curvature by the isotropy
    term xi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .models import LeftInvariantMetric, sectional_left_invariant

_TABLE_TOL = 1e-10


@dataclass(frozen=True)
class TangentSplit:
    """A tangent vector split into normal part and orbit-algebra part."""

    normal: np.ndarray
    orbit: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float))
        object.__setattr__(self, "orbit", np.asarray(self.orbit, dtype=float))


@dataclass(frozen=True)
class IsotropyData:
    """Isotropy-representation derivative at a singular point.

    ``rho_maps[i]`` is the matrix of rho_{e_i}: isotropy algebra -> normal
    space, shape (normal_dim, isotropy_dim); its column b is the normal vector
    rho_{e_i}(z_b).  Genuine isotropy data is skew across the normal index:
    g(e_a, rho_{e_i}(z)) = -g(e_i, rho_{e_a}(z)); this is validated because
    the twist-term symmetry relies on it.
    """

    isotropy_dim: int
    rho_maps: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho_maps, dtype=float)
        if rho.ndim != 3 or rho.shape[2] != self.isotropy_dim or rho.shape[0] != rho.shape[1]:
            raise ValueError("rho_maps must have shape (normal_dim, normal_dim, isotropy_dim)")
        for b in range(self.isotropy_dim):
            omega = rho[:, :, b].T  # omega[a, i] = g(e_a, rho_{e_i}(z_b))
            if np.max(np.abs(omega + omega.T)) > _TABLE_TOL:
                raise ValueError("isotropy data must be skew across normal indices")
        rho.setflags(write=False)
        object.__setattr__(self, "rho_maps", rho)

    @property
    def normal_dim(self) -> int:
        return self.rho_maps.shape[0]


@dataclass(frozen=True)
class OrbitData:
    """Everything the pointwise curvature formula needs at one point.

    algebra           orbit part of the symmetry algebra with tensor P
    normal_dim        dimension of the space normal to the orbit
    normal_sectionals K(e_i, e_j) over a g-orthonormal normal basis
    mixed_sectionals  K(e_i, v_j*) against the eigenbasis of P (orbit index
                      ordered by ascending eigenvalue)
    dw_normal         dw_{v_a}(e_i, e_j) tables for orbit-algebra directions
                      v_a of the stored basis; antisymmetric in (i, j)

    Orbit-orbit sectionals are computed from the algebra itself, which is
    exact on a group manifold and is the modeling convention for synthetic
    points (where they only enter the bounded first sum).
    """

    algebra: LeftInvariantMetric
    normal_dim: int = 0
    normal_sectionals: np.ndarray | None = None
    mixed_sectionals: np.ndarray | None = None
    dw_normal: np.ndarray | None = None

    def __post_init__(self):
        k = self.algebra.dim
        m = self.normal_dim
        if m < 0:
            raise ValueError("normal_dim must be nonnegative")
        if self.normal_sectionals is not None:
            t = np.asarray(self.normal_sectionals, dtype=float)
            if t.shape != (m, m):
                raise ValueError("normal_sectionals must be (normal_dim, normal_dim)")
            if np.max(np.abs(t - t.T)) > _TABLE_TOL or np.max(np.abs(np.diag(t))) > _TABLE_TOL:
                raise ValueError("normal_sectionals must be symmetric with zero diagonal")
            t.setflags(write=False)
            object.__setattr__(self, "normal_sectionals", t)
        if self.mixed_sectionals is not None:
            t = np.asarray(self.mixed_sectionals, dtype=float)
            if t.shape != (m, k):
                raise ValueError("mixed_sectionals must be (normal_dim, algebra_dim)")
            t.setflags(write=False)
            object.__setattr__(self, "mixed_sectionals", t)
        if self.dw_normal is not None:
            t = np.asarray(self.dw_normal, dtype=float)
            if t.shape != (k, m, m):
                raise ValueError("dw_normal must be (algebra_dim, normal_dim, normal_dim)")
            if np.max(np.abs(t + np.swapaxes(t, 1, 2))) > _TABLE_TOL:
                raise ValueError("dw_normal tables must be antisymmetric in the normal pair")
            t.setflags(write=False)
            object.__setattr__(self, "dw_normal", t)

    @property
    def orbit_dim(self) -> int:
        return self.algebra.dim


def orbit_tensor_eig(orbit: OrbitData):
    """Ascending eigenvalues and orthonormal eigenbasis of the orbit tensor."""
    lam, O = np.linalg.eigh(orbit.algebra.tensor)
    if np.min(lam) <= 0:
        raise PreconditionError("orbit tensor must be positive definite",
                                condition="orbit-tensor-positivity")
    return lam, O


def shrink_map_apply(orbit: OrbitData, t: float, vec: TangentSplit) -> TangentSplit:
    """Apply C_t: identity on the normal part, (1 + tP)^{-1} on the orbit part."""
    if t < 0:
        raise ValueError("deformation time must be nonnegative")
    P = orbit.algebra.tensor
    M = np.eye(orbit.orbit_dim) + t * P
    return TangentSplit(vec.normal.copy(), np.linalg.solve(M, vec.orbit))


def _twist_vector(orbit: OrbitData, t: float, x: TangentSplit, y: TangentSplit,
                  iso: IsotropyData | None):
    """Coefficient vector l of the twist numerator and the denominator block."""
    alg = orbit.algebra
    P = alg.tensor
    k = alg.dim
    m = orbit.normal_dim
    U, V = x.orbit, y.orbit
    Xn, Yn = x.normal, y.normal

    a_orbit = 0.5 * (alg.bracket(P @ U, V) + alg.bracket(U, P @ V) - P @ alg.bracket(U, V))
    if orbit.dw_normal is not None and m:
        a_orbit = a_orbit + np.einsum('aij,i,j->a', orbit.dw_normal, Xn, Yn)
    br = alg.bracket(P @ U, P @ V)
    lvec = a_orbit + 0.5 * t * br

    if iso is not None and iso.isotropy_dim and m:
        # dw_Z(X, Y) = g(X, rho_Y(Z)) componentwise over the isotropy basis
        a_iso = np.einsum('a,jab,j->b', Xn, iso.rho_maps, Yn)
        lvec = np.concatenate([lvec, a_iso])
        d_iso = iso.isotropy_dim
    else:
        d_iso = 0
    return lvec, d_iso


def twist_term(orbit: OrbitData, t: float, x: TangentSplit, y: TangentSplit,
               iso: IsotropyData | None = None) -> float:
    """Exact constrained maximum of the deformation correction term.

    The numerator (l . Z)^2 is a rank-one quadratic form and the denominator
    equals Z.(I + tS).Z on the unit sphere, so the maximum over the sphere is
    l . (I + tS)^{-1} . l, attained at Z proportional to (I + tS)^{-1} l.
    Nonnegative for every input; exactly zero at t = 0.
    """
    if t < 0:
        raise ValueError("deformation time must be nonnegative")
    if t == 0:
        return 0.0
    lvec, d_iso = _twist_vector(orbit, t, x, y, iso)
    k = orbit.orbit_dim
    M = np.eye(k + d_iso)
    M[:k, :k] += t * orbit.algebra.tensor
    return 3.0 * t * float(lvec @ np.linalg.solve(M, lvec))


def twist_term_sampled(orbit: OrbitData, t: float, x: TangentSplit, y: TangentSplit,
                       iso: IsotropyData | None = None, samples: int = 100_000,
                       rng=None) -> float:
    """Dense-sampling lower bound for `twist_term` (diagnostic oracle)."""
    if t < 0:
        raise ValueError("deformation time must be nonnegative")
    if t == 0:
        return 0.0
    rng = np.random.default_rng(rng)
    lvec, d_iso = _twist_vector(orbit, t, x, y, iso)
    k = orbit.orbit_dim
    d = k + d_iso
    Z = rng.normal(size=(samples, d))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    num = (Z @ lvec) ** 2
    den = t * np.einsum('si,ij,sj->s', Z[:, :k], orbit.algebra.tensor, Z[:, :k]) + 1.0
    return 3.0 * t * float(np.max(num / den))


def scal_cheeger(orbit: OrbitData, iso: IsotropyData | None, t: float) -> float:
    """Exact deformed scalar curvature at the point; the undeformed value at t=0."""
    if t < 0:
        raise ValueError("deformation time must be nonnegative")
    alg = orbit.algebra
    k = alg.dim
    m = orbit.normal_dim
    if iso is not None and m and iso.normal_dim != m:
        raise ValueError("isotropy data normal dimension mismatch")
    lam, O = orbit_tensor_eig(orbit)
    ch = np.einsum('ijl,ia,jb,lc->abc', alg.structure, O, O, O)
    shrink = 1.0 + t * lam

    total = 0.0

    # normal-normal block
    if m and orbit.normal_sectionals is not None:
        total += float(np.sum(orbit.normal_sectionals))
    if m:
        zeros_k = np.zeros(k)
        eye_m = np.eye(m)
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                total += twist_term(orbit, t,
                                    TangentSplit(eye_m[i], zeros_k),
                                    TangentSplit(eye_m[j], zeros_k), iso)

    # mixed block (tables indexed against the eigenbasis of P)
    if m and orbit.mixed_sectionals is not None:
        mixed = orbit.mixed_sectionals
        total += 2.0 * float(np.sum(mixed / (lam * shrink)[None, :]))

    # orbit-orbit block
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            scale = 1.0 / (shrink[i] * shrink[j])
            sec = sectional_left_invariant(alg, O[:, i], O[:, j])
            total += sec / (lam[i] * lam[j]) * scale
            if t > 0:
                Ui = O[:, i] / np.sqrt(lam[i])
                Uj = O[:, j] / np.sqrt(lam[j])
                total += twist_term(orbit, t,
                                    TangentSplit(np.zeros(m), Ui),
                                    TangentSplit(np.zeros(m), Uj), iso) * scale
            nb2 = float(np.sum(ch[i, j, :] ** 2))
            total += lam[i] * lam[j] * t**3 * scale * 0.25 * nb2
    return total


def homogeneous_scal(orbit: OrbitData) -> float:
    """Quarter sum of squared bracket norms over the orbit algebra basis.

    This is the large-t limit of the third curvature sum divided by t, and is
    basis independent; it reads only the brackets, never the tensor P.
    """
    return 0.25 * float(np.sum(orbit.algebra.structure ** 2))


def isotropy_term(iso: IsotropyData | None, normal_dim: int | None = None) -> float:
    """Sum of |proj|^4 / |rho^{-1} proj|^2 over normal basis pairs.

    The projection is onto the image of each rho map; the restricted inverse
    is realized by the pseudo-inverse.  Pairs with vanishing projection
    contribute zero.  Regular points (no isotropy data) give zero.
    """
    if iso is None or iso.isotropy_dim == 0:
        return 0.0
    m = iso.normal_dim if normal_dim is None else normal_dim
    total = 0.0
    for i in range(m):
        rho = iso.rho_maps[i]
        if np.max(np.abs(rho)) == 0.0:
            continue
        pinv = np.linalg.pinv(rho)
        for j in range(m):
            e = np.zeros(m)
            e[j] = 1.0
            pre = pinv @ e
            h = rho @ pre
            h2 = float(h @ h)
            if h2 < 1e-26:
                continue
            total += h2**2 / float(pre @ pre)
    return total


def pinching_limit(points) -> float:
    """Large-t ratio of extremal deformed scalar curvature over the points.

    Each point is (OrbitData, IsotropyData or None); the value at a point is
    homogeneous_scal + 3 * isotropy_term.  Rejected for abelian algebras
    (the limit statement needs brackets) and when the minimum vanishes.
    """
    points = list(points)
    if not points:
        raise PreconditionError("need at least one point", condition="empty-point-set")
    values = []
    for orbit, iso in points:
        if np.max(np.abs(orbit.algebra.structure)) < 1e-14:
            raise PreconditionError("abelian symmetry algebra: large-t pinching does not apply",
                                    condition="non-abelian-algebra")
        values.append(homogeneous_scal(orbit) + 3.0 * isotropy_term(iso, orbit.normal_dim))
    lo, hi = min(values), max(values)
    if lo <= 0:
        raise PreconditionError("minimal limit value vanishes", condition="positive-limit")
    return hi / lo


def deformed_group_metric(m: LeftInvariantMetric, t: float) -> LeftInvariantMetric:
    """The orbit shrinking of a group manifold is again left-invariant.

    Same brackets, tensor P_t = (1 + tP)^{-1} P; eigenvalues map to
    lam / (1 + t lam).  Used as the independent oracle for scal_cheeger.
    """
    if t < 0:
        raise ValueError("deformation time must be nonnegative")
    P = m.tensor
    Pt = np.linalg.solve(np.eye(m.dim) + t * P, P)
    Pt = 0.5 * (Pt + Pt.T)
    return m.with_tensor(Pt)
