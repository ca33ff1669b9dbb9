"""Closed-form ridge fitting of control points to sampled action sequences.

Each DoF is fitted independently. The conditioned variant pins the first
control point to a supplied value and fits the remaining ones against the
residual signal, which makes the decoded curve start exactly at that value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bspline import BSplineBasis
from .errors import ShapeError


@dataclass(frozen=True)
class FitSolver:
    """Precomputed least-squares solve matrices for one (basis, lambda) pair."""

    basis: BSplineBasis
    lam: float
    solver_matrix: np.ndarray  # (N, T): maps samples to control points
    conditioned_solver_matrix: np.ndarray  # (N-1, T): same, columns 1..N-1 of the basis

    @staticmethod
    def build(basis: BSplineBasis, lam: float) -> "FitSolver":
        if lam < 0:
            raise ValueError(f"lambda must be non-negative, got {lam}")
        if basis.num_samples < basis.basis_count:
            raise ShapeError(
                f"under-determined fit: {basis.num_samples} samples for "
                f"{basis.basis_count} basis functions"
            )
        phi = basis.matrix
        solver = _ridge_solver(phi, lam)
        cond = _ridge_solver(phi[:, 1:], lam) if basis.basis_count > 1 else np.zeros((0, basis.num_samples))
        return FitSolver(basis=basis, lam=lam, solver_matrix=solver,
                         conditioned_solver_matrix=cond)


def _ridge_solver(phi: np.ndarray, lam: float) -> np.ndarray:
    gram = phi.T @ phi + lam * np.eye(phi.shape[1])
    return np.linalg.solve(gram, phi.T)


@dataclass(frozen=True)
class ControlPointMatrix:
    """Fitted control points, one row per DoF.

    Unconditioned: values has shape (D, N). Conditioned: values has shape
    (D, N-1) and pinned_first holds the known first control point per DoF.
    """

    values: np.ndarray
    pinned_first: np.ndarray | None = None

    @property
    def dof(self) -> int:
        return self.values.shape[0]

    @property
    def conditioned(self) -> bool:
        return self.pinned_first is not None

    def full_values(self) -> np.ndarray:
        """(D, N) matrix including the pinned column when conditioned."""
        if self.pinned_first is None:
            return self.values
        return np.hstack([self.pinned_first[:, None], self.values])


def _check_actions(solver: FitSolver, actions) -> np.ndarray:
    a = np.asarray(actions, dtype=float)
    if a.ndim != 2 or a.shape[0] != solver.basis.num_samples:
        raise ShapeError(
            f"actions must be (T, D) with T={solver.basis.num_samples}, "
            f"got shape {a.shape}"
        )
    if not np.all(np.isfinite(a)):
        raise ValueError("actions contain non-finite values")
    return a


def fit(solver: FitSolver, actions) -> ControlPointMatrix:
    """Ridge fit of a (T, D) action matrix; returns (D, N) control points."""
    a = _check_actions(solver, actions)
    return ControlPointMatrix(values=(solver.solver_matrix @ a).T)


def fit_conditioned(solver: FitSolver, actions, prev_last_action) -> ControlPointMatrix:
    """Fit with the first control point pinned to prev_last_action per DoF."""
    a = _check_actions(solver, actions)
    c0 = np.asarray(prev_last_action, dtype=float)
    if c0.shape != (a.shape[1],):
        raise ShapeError(
            f"prev_last_action must have {a.shape[1]} entries, got shape {c0.shape}"
        )
    if not np.all(np.isfinite(c0)):
        raise ValueError("prev_last_action contains non-finite values")
    residual = a - np.outer(solver.basis.matrix[:, 0], c0)
    rest = (solver.conditioned_solver_matrix @ residual).T
    return ControlPointMatrix(values=rest, pinned_first=c0)


def residual_mse(solver: FitSolver, actions, control_points: ControlPointMatrix) -> float:
    """Mean squared error of the decoded curve against the actions."""
    a = _check_actions(solver, actions)
    c = control_points.full_values()
    if c.shape != (a.shape[1], solver.basis.basis_count):
        raise ShapeError(
            f"control points shape {c.shape} inconsistent with "
            f"D={a.shape[1]}, N={solver.basis.basis_count}"
        )
    return float(np.mean((solver.basis.matrix @ c.T - a) ** 2))
