"""Constant scalar curvature inside a conformal class, variationally.

On the 1-D quotient the conformal change g -> u^(4/(n-2)) g turns the search
for constant scalar curvature c into the equation

    4 b_n lap(u) - scal * u + c * u^gamma_n = 0,        u > 0,

the Euler-Lagrange equation of

    J(u) = 2 b_n int |grad u|^2 + 1/2 int scal u^2 - (c / 2*) int u^{2*}

restricted to the constraint set  (c / 2*) int u^{2*} = eps,  u >= 0.

The positive regime (scal >= 0, not identically 0, c > 0) is solved by
projected gradient descent on the constraint: the Lagrange multiplier lam
recovered at convergence shifts the constant to c' = (1 + lam) c and the
residual reported is the Euler-Lagrange defect at c'.

The negative regime solves the equation with constant -c' directly by a
bordered Newton iteration in (u, c'), with a mass normalization excluding the
trivial solution.  On backgrounds whose conformal class admits no negative
constant the iteration converges to c' = 0; that state is reported as an
obstruction rather than returned.

The sign of the smallest eigenvalue of the conformal Laplacian
u -> -4 b_n lap(u) + scal u classifies the conformal class (P_G / Z_G / N_G):
which basic functions are realizable as scalar curvatures is decided by this
trichotomy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.interpolate
import scipy.linalg

from .errors import ObstructionError, PreconditionError, SolverError
from .mesh import QuotientMesh
from .models import WarpedProductMetric, YamabeConstants, scal_warped

logger = logging.getLogger(__name__)


class ConformalClass(Enum):
    POSITIVE = "P_G"
    ZERO = "Z_G"
    NEGATIVE = "N_G"


@dataclass(frozen=True)
class ConformalProblem:
    """A warped background, the target constant c, and the constraint level."""

    metric: WarpedProductMetric
    c: float
    epsilon: float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("constraint level must be positive")

    @property
    def constants(self) -> YamabeConstants:
        return YamabeConstants.for_dimension(self.metric.dim)

    @property
    def mesh(self) -> QuotientMesh:
        return self.metric.mesh


@dataclass(frozen=True)
class SolverConfig:
    step: float = 1.0
    tol_residual: float = 1e-9
    max_iter: int = 200_000
    positivity_floor: float = 1e-10
    tol_gradient: float = 1e-11

    def __post_init__(self):
        if min(self.step, self.tol_residual, self.positivity_floor, self.tol_gradient) <= 0:
            raise ValueError("solver parameters must be positive")
        if self.max_iter <= 0:
            raise ValueError("max_iter must be positive")


@dataclass(frozen=True)
class ConformalSolution:
    u: np.ndarray
    lagrange: float
    achieved_constant: float
    residual_norm: float
    iterations: int
    energy_history: tuple = ()


def conformal_energy(p: ConformalProblem, u) -> float:
    """J(u); the gradient term uses the stiffness pairing of the mesh."""
    g = p.constants
    mesh = p.mesh
    scal = scal_warped(p.metric)
    u = np.asarray(u, dtype=float)
    return (2.0 * g.b_n * mesh.dirichlet_form(u, u)
            + 0.5 * mesh.integrate(scal * u**2)
            - (p.c / g.two_star) * mesh.integrate(np.abs(u) ** g.two_star))


def coercive_energy(p: ConformalProblem, u) -> float:
    """The all-plus functional of the negative regime (grows in every direction)."""
    g = p.constants
    mesh = p.mesh
    scal = scal_warped(p.metric)
    u = np.asarray(u, dtype=float)
    return (2.0 * g.b_n * mesh.dirichlet_form(u, u)
            + 0.5 * mesh.integrate(scal * u**2)
            + (p.c / g.two_star) * mesh.integrate(np.abs(u) ** g.two_star))


def energy_gradient(p: ConformalProblem, u) -> np.ndarray:
    """Weighted-L2 gradient of J: -4 b_n lap(u) + scal u - c u^gamma."""
    g = p.constants
    scal = scal_warped(p.metric)
    u = np.asarray(u, dtype=float)
    return (-4.0 * g.b_n * p.mesh.laplacian(u) + scal * u
            - p.c * np.sign(u) * np.abs(u) ** g.gamma_n)


def project_to_constraint(p: ConformalProblem, u) -> np.ndarray:
    """Clamp to the nonnegative cone, then scale onto the constraint level."""
    if p.c <= 0:
        raise PreconditionError("constraint projection needs c > 0", condition="positive-c")
    u = np.maximum(np.asarray(u, dtype=float), 0.0)
    mass = p.mesh.integrate(u ** p.constants.two_star)
    if mass <= 0:
        raise PreconditionError("profile vanishes after clamping", condition="nontrivial-profile")
    scale = (p.epsilon * p.constants.two_star / (p.c * mass)) ** (1.0 / p.constants.two_star)
    return scale * u


def el_residual(p: ConformalProblem, u, constant: float) -> np.ndarray:
    """Pointwise defect 4 b_n lap(u) - scal u + constant u^gamma for u > 0."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise PreconditionError("conformal factor must be strictly positive",
                                condition="positive-factor")
    g = p.constants
    scal = scal_warped(p.metric)
    return 4.0 * g.b_n * p.mesh.laplacian(u) - scal * u + constant * u ** g.gamma_n


def _spectral_tail(mesh: QuotientMesh, u) -> float:
    spec = np.abs(np.fft.rfft(u))
    head = np.max(spec[: max(2, len(spec) // 4)])
    tail = np.max(spec[len(spec) // 2:]) if len(spec) > 3 else 0.0
    return float(tail / head) if head > 0 else 0.0


def _polish_critical_point(p: ConformalProblem, u, cprime, cfg: SolverConfig):
    """Bordered Newton on (u, c'): defect at c' and the constraint level.

    Warm-started from the descent iterate; keeps u positive by damping.
    Returns (u, c', converged).
    """
    mesh = p.mesh
    g = p.constants
    scal = scal_warped(p.metric)
    n = mesh.node_count
    m = mesh.mass_vector()
    lap_matrix = np.column_stack([mesh.laplacian(np.eye(n)[:, j]) for j in range(n)])

    def residual(u_, cp_):
        r = 4.0 * g.b_n * mesh.laplacian(u_) - scal * u_ + cp_ * u_**g.gamma_n
        cons = (p.c / g.two_star) * float(np.dot(u_**g.two_star, m)) - p.epsilon
        return np.concatenate([r, [cons]])

    res = residual(u, cprime)
    res_norm = np.linalg.norm(res)
    for _ in range(40):
        if (mesh.lp_norm(res[:n], 2) < 0.05 * cfg.tol_residual
                and abs(res[n]) < 1e-13 * max(1.0, p.epsilon)):
            return u, cprime, True
        J = np.zeros((n + 1, n + 1))
        J[:n, :n] = (4.0 * g.b_n * lap_matrix
                     - np.diag(scal - cprime * g.gamma_n * u**(g.gamma_n - 1)))
        J[:n, n] = u**g.gamma_n
        J[n, :n] = p.c * u**g.gamma_n * m
        try:
            delta = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError:
            return u, cprime, False
        tau = 1.0
        while tau >= 1e-8:
            u_new = u + tau * delta[:n]
            if np.min(u_new) > cfg.positivity_floor:
                cp_new = cprime + tau * delta[n]
                res_new = residual(u_new, cp_new)
                if np.linalg.norm(res_new) < res_norm or tau < 1e-6:
                    u, cprime, res, res_norm = u_new, cp_new, res_new, np.linalg.norm(res_new)
                    break
            tau *= 0.5
        else:
            return u, cprime, False
    return u, cprime, mesh.lp_norm(res[:n], 2) < cfg.tol_residual


def minimize_on_constraint(p: ConformalProblem, cfg: SolverConfig | None = None,
                           u0=None) -> ConformalSolution:
    """Projected gradient descent with backtracking on the constraint set.

    Hypotheses: scal >= 0 and not identically zero, c > 0.  The descent phase
    runs until the projected gradient is small, then a bordered Newton polish
    resolves the critical point to tolerance (the energy history records the
    descent phase, along which the energy never increases).  The reported
    residual is the Euler-Lagrange defect at the recovered constant
    c' = (1 + lam) c.
    """
    cfg = cfg or SolverConfig()
    mesh = p.mesh
    scal = scal_warped(p.metric)
    if p.c <= 0:
        raise PreconditionError("positive regime needs c > 0", condition="positive-c")
    if np.min(scal) < -1e-11 * max(1.0, float(np.max(np.abs(scal)))):
        raise PreconditionError("background scalar curvature must be nonnegative",
                                condition="nonnegative-scal-hypothesis")
    if np.max(np.abs(scal)) < 1e-12:
        raise PreconditionError("background scalar curvature vanishes identically",
                                condition="nonvanishing-scal-hypothesis")

    u = project_to_constraint(p, np.ones(mesh.node_count) if u0 is None else np.asarray(u0, float))
    energy = conformal_energy(p, u)
    history = [energy]
    step = cfg.step
    iterations = 0
    descent_budget = min(cfg.max_iter, 20_000)
    scale = max(1.0, float(np.max(np.abs(scal))))
    for iterations in range(1, cfg.max_iter + 1):
        grad = energy_gradient(p, u)
        normal = p.c * u ** p.constants.gamma_n
        nn = mesh.inner(normal, normal)
        mult = mesh.inner(grad, normal) / nn
        direction = -(grad - mult * normal)
        dnorm = np.sqrt(mesh.inner(direction, direction))
        if dnorm < max(cfg.tol_gradient, 1e-5 * scale) or iterations > descent_budget:
            break
        accepted = False
        while step >= 1e-14:
            cand = project_to_constraint(p, u + step * direction)
            cand_energy = conformal_energy(p, cand)
            if cand_energy <= energy - 1e-4 * step * dnorm**2:
                u, energy = cand, cand_energy
                history.append(energy)
                accepted = True
                step = min(step * 2.0, cfg.step)
                break
            step *= 0.5
        if not accepted:
            break

    grad = energy_gradient(p, u)
    normal = p.c * u ** p.constants.gamma_n
    lam = mesh.inner(grad, normal) / mesh.inner(normal, normal)
    u, achieved, polished = _polish_critical_point(p, u, (1.0 + lam) * p.c, cfg)
    lam = achieved / p.c - 1.0
    if np.min(u) <= cfg.positivity_floor:
        raise SolverError(f"converged profile is not strictly positive (min u = {np.min(u):.3e})")
    residual = mesh.lp_norm(el_residual(p, u, achieved), 2)
    if residual > cfg.tol_residual:
        raise SolverError(f"Euler-Lagrange residual {residual:.3e} above tolerance "
                          f"{cfg.tol_residual:.1e} after {iterations} iterations")
    logger.debug("constraint minimization: %d iterations, residual %.3e, spectral tail %.2e",
                 iterations, residual, _spectral_tail(mesh, u))
    return ConformalSolution(u=u, lagrange=lam, achieved_constant=achieved,
                             residual_norm=residual, iterations=iterations,
                             energy_history=tuple(history))


def negative_constant_bound(metric: WarpedProductMetric) -> float:
    """Smallest admissible functional constant of the negative regime."""
    g = YamabeConstants.for_dimension(metric.dim)
    scal = scal_warped(metric)
    vol = metric.mesh.total_volume()
    return max(0.0, -(g.two_star / 2.0) * float(np.min(scal)) * vol ** (1.0 - g.two_star / 2.0))


def solve_negative_constant(metric: WarpedProductMetric, cfg: SolverConfig | None = None,
                            c: float | None = None, u0=None):
    """Newton solve of 4 b_n lap(u) - scal u - c' u^gamma = 0 with mass normalization.

    Unknowns are (u, c'); the normalization <u, u>_w = <u0, u0>_w excludes the
    trivial solution.  Returns (ConformalSolution, c_used) with the multiplier
    convention c' = (1 + lam) c_used.  When the class only admits the zero
    constant the iteration converges to c' = 0 and an ObstructionError
    carrying the degenerate state is raised.
    """
    cfg = cfg or SolverConfig(tol_residual=1e-8)
    mesh = metric.mesh
    g = YamabeConstants.for_dimension(metric.dim)
    scal = scal_warped(metric)
    bound = negative_constant_bound(metric)
    if c is None:
        c = bound + 1.0
    elif c < bound:
        raise PreconditionError(
            f"functional constant {c:.6g} below the coercivity bound {bound:.6g}",
            condition="coercivity-bound")

    n = mesh.node_count
    m = mesh.mass_vector()
    u = np.ones(n) if u0 is None else np.asarray(u0, dtype=float).copy()
    if np.any(u <= 0):
        raise PreconditionError("start profile must be positive", condition="positive-start")
    mass0 = float(np.dot(u * u, m))
    cprime = float(c)

    lap_matrix = None

    def residual_vec(u_, cp_):
        r = 4.0 * g.b_n * mesh.laplacian(u_) - scal * u_ - cp_ * u_**g.gamma_n
        return np.concatenate([r, [np.dot(u_ * u_, m) - mass0]])

    res = residual_vec(u, cprime)
    res_norm = np.linalg.norm(res)
    converged = False
    newton_iterations = 0
    for newton_iterations in range(1, cfg.max_iter + 1):
        if lap_matrix is None:
            lap_matrix = np.column_stack([mesh.laplacian(np.eye(n)[:, j]) for j in range(n)])
        J = np.zeros((n + 1, n + 1))
        J[:n, :n] = 4.0 * g.b_n * lap_matrix - np.diag(scal + cprime * g.gamma_n * u**(g.gamma_n - 1))
        J[:n, n] = -(u**g.gamma_n)
        J[n, :n] = 2.0 * u * m
        try:
            delta = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular Newton system: {exc}") from exc
        tau = 1.0
        while tau >= 1e-10:
            u_new = u + tau * delta[:n]
            cp_new = cprime + tau * delta[n]
            if np.min(u_new) > cfg.positivity_floor:
                res_new = residual_vec(u_new, cp_new)
                if np.linalg.norm(res_new) <= (1.0 - 0.25 * tau) * res_norm or tau < 1e-8:
                    break
            tau *= 0.5
        else:
            raise SolverError("Newton line search stalled")
        u, cprime, res, res_norm = u_new, cp_new, res_new, np.linalg.norm(res_new)
        if np.max(np.abs(u)) < cfg.positivity_floor:
            raise SolverError("profile collapsed toward the trivial solution")
        pde_norm = mesh.lp_norm(res[:n], 2)
        if pde_norm < cfg.tol_residual and abs(res[n]) < cfg.tol_residual * max(1.0, mass0):
            converged = True
            break
    if not converged:
        raise SolverError(f"negative-constant Newton did not converge (residual {res_norm:.3e})")

    pde_norm = mesh.lp_norm(res[:n], 2)
    if cprime <= 1e-8:
        reason = ("only the zero constant is attainable" if abs(cprime) <= 1e-8
                  else "no negative constant exists")
        raise ObstructionError(
            f"{reason} in this conformal class (converged with c' = {cprime:.3e})",
            condition="negative-class-obstruction", u=u, constant=cprime, residual=pde_norm)
    lam = cprime / c - 1.0
    solution = ConformalSolution(u=u, lagrange=lam, achieved_constant=cprime,
                                 residual_norm=pde_norm, iterations=newton_iterations)
    return solution, float(c)


def conformal_scal(metric: WarpedProductMetric, u) -> np.ndarray:
    """Scalar curvature of u^(4/(n-2)) g: u^{-gamma} (-4 b_n lap u + scal u)."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise PreconditionError("conformal factor must be strictly positive",
                                condition="positive-factor")
    g = YamabeConstants.for_dimension(metric.dim)
    scal = scal_warped(metric)
    return (-4.0 * g.b_n * metric.mesh.laplacian(u) + scal * u) / u**g.gamma_n


def conformal_warped_metric(metric: WarpedProductMetric, u, n_out: int | None = None
                            ) -> WarpedProductMetric:
    """Resample u^(4/(n-2)) g as a warped product over its own arclength circle.

    With v = u^(2/(n-2)), the conformal metric is (v dr)^2 + (v f)^2 g_F; the
    new arclength is the antiderivative of v and the new warping is v f
    re-sampled on a uniform grid through periodic splines.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise PreconditionError("conformal factor must be strictly positive",
                                condition="positive-factor")
    mesh = metric.mesh
    n = metric.dim
    v = u ** (2.0 / (n - 2))
    nodes = np.append(mesh.nodes, mesh.length)
    v_ext = np.append(v, v[0])
    spline_v = scipy.interpolate.CubicSpline(nodes, v_ext, bc_type="periodic")
    phi = spline_v.antiderivative()(nodes)
    new_length = float(phi[-1])
    ftil = v * metric.warping
    spline_f = scipy.interpolate.CubicSpline(phi, np.append(ftil, ftil[0]), bc_type="periodic")
    n_out = n_out or mesh.node_count
    new_nodes = new_length / n_out * np.arange(n_out)
    return WarpedProductMetric.from_profile(
        n_out, new_length, metric.fiber_dim, metric.fiber_scal, spline_f(new_nodes))


def classify_conformal_class(metric: WarpedProductMetric, tol: float = 1e-8):
    """Sign of the first eigenvalue of u -> -4 b_n lap u + scal u.

    Returns (verdict, lambda_1).  The eigenvalue problem is the generalized
    symmetric problem (4 b_n S + M scal) x = lambda M x for the stiffness S
    and quadrature masses M, so the zero mode of a vanishing potential is
    resolved exactly.
    """
    g = YamabeConstants.for_dimension(metric.dim)
    mesh = metric.mesh
    scal = scal_warped(metric)
    m = mesh.mass_vector()
    A = 4.0 * g.b_n * mesh.stiffness_matrix() + np.diag(m * scal)
    lam1 = float(scipy.linalg.eigh(A, np.diag(m), eigvals_only=True,
                                   subset_by_index=[0, 0])[0])
    if lam1 > tol:
        verdict = ConformalClass.POSITIVE
    elif lam1 < -tol:
        verdict = ConformalClass.NEGATIVE
    else:
        verdict = ConformalClass.ZERO
    return verdict, lam1
