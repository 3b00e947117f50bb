"""Reduced objective, gradient, Hessian-vector products, and FD oracles.

The reduced objective treats the state as a function of the control via
the PDE solve:

    J(u) = sum_i w_i * [L(x_i, y_i) + (nu/2) u_i^2],   y = y(u).

With lumped quadrature throughout, the discrete gradient has the exact
pointwise representation  grad(u) = nu*u - y*phi  (phi the adjoint state),
and a Hessian-vector product costs one linearized state solve plus one
linearized adjoint solve:

    H v = nu*v - (phi*z_v + y*eta_v).

The finite-difference functions are deliberately independent oracles:
they only ever call the nonlinear state solver and the objective sum, so
they validate the gradient and Hessian routes rather than sharing code
with them.
"""

import math
from dataclasses import dataclass

import numpy as np

from .mesh import TriMesh
from .pde import DEFAULT_TOL, Discretization, LinearizedOperator
from .problem import ProblemSpec, nodal


@dataclass
class ReducedEval:
    """One full evaluation of the reduced problem at a control u."""

    u: np.ndarray
    y: np.ndarray
    phi: np.ndarray
    J: float
    grad: np.ndarray


def _objective(disc: Discretization, u: np.ndarray, y: np.ndarray) -> float:
    integrand = nodal(disc.spec.L, disc.x, y) + 0.5 * disc.spec.nu * u * u
    return float(np.sum(disc.weights * integrand))


def objective(
    spec: ProblemSpec,
    mesh: TriMesh,
    u: np.ndarray,
    y: np.ndarray,
    disc: Discretization | None = None,
) -> float:
    """J evaluated at a control u and its (already solved) state y."""
    disc = disc if disc is not None else Discretization(spec, mesh)
    return _objective(disc, u, y)


def gradient(
    spec: ProblemSpec,
    mesh: TriMesh,
    u: np.ndarray,
    y: np.ndarray,
    phi: np.ndarray,
) -> np.ndarray:
    """Pointwise gradient field nu*u - y*phi (no solve involved)."""
    if u.shape != (mesh.n_nodes,):
        raise ValueError("u must have one value per node")
    return spec.nu * u - y * phi


def hessian_vec(
    spec: ProblemSpec,
    mesh: TriMesh,
    u: np.ndarray,
    y: np.ndarray,
    phi: np.ndarray,
    v: np.ndarray,
    disc: Discretization | None = None,
    operator: LinearizedOperator | None = None,
) -> np.ndarray:
    """Apply the reduced Hessian at u to a direction v."""
    disc = disc if disc is not None else Discretization(spec, mesh)
    op = operator if operator is not None else disc.linearized_operator(u, y)
    z = disc.solve_linearized_state(u, y, v, operator=op)
    eta = disc.solve_linearized_adjoint(u, y, phi, z, v, operator=op)
    return spec.nu * v - (phi * z + y * eta)


def evaluate_reduced(
    spec: ProblemSpec,
    mesh: TriMesh,
    u: np.ndarray,
    disc: Discretization | None = None,
    tol: float = DEFAULT_TOL,
) -> ReducedEval:
    """Solve state and adjoint at u and package J with its gradient."""
    disc = disc if disc is not None else Discretization(spec, mesh)
    report = disc.solve_state(u, tol=tol)
    y = report.y
    op = disc.linearized_operator(u, y)
    phi = disc.solve_adjoint(u, y, operator=op)
    return ReducedEval(
        u=u, y=y, phi=phi, J=_objective(disc, u, y), grad=spec.nu * u - y * phi
    )


def _fresh_objective(disc: Discretization, u: np.ndarray, tol: float) -> float:
    report = disc.solve_state(u, y_init=None, tol=tol)
    return _objective(disc, u, report.y)


def fd_gradient_oracle(
    spec: ProblemSpec,
    mesh: TriMesh,
    u: np.ndarray,
    v: np.ndarray,
    t: float,
    disc: Discretization | None = None,
    tol: float = DEFAULT_TOL,
) -> float:
    """Central difference (J(u+tv) - J(u-tv)) / (2t), fresh solves each."""
    disc = disc if disc is not None else Discretization(spec, mesh)
    return (
        _fresh_objective(disc, u + t * v, tol) - _fresh_objective(disc, u - t * v, tol)
    ) / (2.0 * t)


def fd_curvature_oracle(
    spec: ProblemSpec,
    mesh: TriMesh,
    u: np.ndarray,
    v: np.ndarray,
    t: float,
    disc: Discretization | None = None,
    tol: float = DEFAULT_TOL,
) -> float:
    """Second central difference (J(u+tv) - 2J(u) + J(u-tv)) / t^2."""
    disc = disc if disc is not None else Discretization(spec, mesh)
    jp = _fresh_objective(disc, u + t * v, tol)
    j0 = _fresh_objective(disc, u, tol)
    jm = _fresh_objective(disc, u - t * v, tol)
    return (jp - 2.0 * j0 + jm) / (t * t)


def fit_decay_order(
    ts, errors, floors=None, keep_above: float = 20.0
) -> float:
    """Least-squares slope of log(error) against log(t).

    Points whose error sits at or below keep_above times its estimated
    roundoff floor are excluded from the fit: once a difference quotient
    reaches the floor of double precision its size carries no information
    about the decay order.  If fewer than two points remain the sequence
    has decayed onto the floor everywhere, which dominates any finite
    order; math.inf is returned to signal that.
    """
    ts = np.asarray(ts, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if floors is None:
        floors = np.zeros_like(ts)
    else:
        floors = np.asarray(floors, dtype=float)
    mask = errors > keep_above * floors
    if np.count_nonzero(mask) < 2:
        return math.inf
    lt = np.log(ts[mask])
    le = np.log(np.maximum(errors[mask], 1e-300))
    slope = np.polyfit(lt, le, 1)[0]
    return float(slope)
