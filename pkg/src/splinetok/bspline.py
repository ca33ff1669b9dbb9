"""Clamped uniform B-spline knot vectors and basis evaluation.

Basis functions follow the Cox-de Boor recursion with half-open
intervals; the single exception is the right end of the domain, where
u = 1 is assigned to the last non-degenerate interval so the clamped
endpoint evaluates to the last control point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreeError, DomainError, ShapeError


@dataclass(frozen=True)
class KnotVector:
    """Non-decreasing knots on [0, 1] for N basis functions of degree P."""

    knots: np.ndarray
    degree: int
    basis_count: int

    def __post_init__(self):
        object.__setattr__(self, "knots", np.asarray(self.knots, dtype=float))
        self.knots.flags.writeable = False


@dataclass(frozen=True)
class BSplineBasis:
    """Basis matrix of shape (T, N): entry [t, n] is basis n evaluated at grid[t]."""

    knot_vector: KnotVector
    grid: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=float))
        self.grid.flags.writeable = False
        self.matrix.flags.writeable = False

    @property
    def num_samples(self) -> int:
        return len(self.grid)

    @property
    def basis_count(self) -> int:
        return self.knot_vector.basis_count


def make_clamped_knots(basis_count: int, degree: int) -> KnotVector:
    """Clamped uniform knot vector: degree+1 repeats at each end, uniform interior."""
    n, p = basis_count, degree
    if not (0 <= p < n):
        raise DegreeError(f"degree must satisfy 0 <= P < N, got P={p}, N={n}")
    interior = np.arange(1, n - p) / (n - p)
    knots = np.concatenate([np.zeros(p + 1), interior, np.ones(p + 1)])
    return KnotVector(knots=knots, degree=p, basis_count=n)


def _interval_of(knots: np.ndarray, u: float) -> int:
    """Index j with knots[j] <= u < knots[j+1]; u at the right end joins the
    last non-degenerate interval."""
    if u >= knots[-1]:
        j = len(knots) - 2
        while j > 0 and knots[j] == knots[j + 1]:
            j -= 1
        return j
    return int(np.searchsorted(knots, u, side="right")) - 1


def eval_basis(kv: KnotVector, u: float) -> np.ndarray:
    """All N basis values at a single parameter u in [0, 1]."""
    if not (0.0 <= u <= 1.0):
        raise DomainError(f"parameter u={u} outside [0, 1]")
    knots, p, n = kv.knots, kv.degree, kv.basis_count
    nfun = n + p  # number of degree-0 pieces (one per interval)
    phi = np.zeros(nfun)
    phi[_interval_of(knots, u)] = 1.0
    for q in range(1, p + 1):
        nxt = np.zeros(nfun - q)
        for i in range(nfun - q):
            acc = 0.0
            den = knots[i + q] - knots[i]
            if den > 0.0:
                acc += (u - knots[i]) / den * phi[i]
            den = knots[i + q + 1] - knots[i + 1]
            if den > 0.0:
                acc += (knots[i + q + 1] - u) / den * phi[i + 1]
            nxt[i] = acc
        phi = nxt
    return phi


# Cache keyed by (N, P, grid bytes); basis matrices are reused across fits.
_BASIS_CACHE: dict[tuple, BSplineBasis] = {}


def build_basis_matrix(kv: KnotVector, grid) -> BSplineBasis:
    """Basis matrix over a non-decreasing grid of parameter values in [0, 1].

    Vectorized over the grid; identical values to row-by-row eval_basis.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1:
        raise ShapeError("grid must be one-dimensional")
    if len(grid) and (grid.min() < 0.0 or grid.max() > 1.0):
        raise DomainError("grid values must lie in [0, 1]")
    if np.any(np.diff(grid) < 0):
        raise DomainError("grid values must be non-decreasing")

    key = (kv.basis_count, kv.degree, grid.tobytes())
    cached = _BASIS_CACHE.get(key)
    if cached is not None:
        return cached

    knots, p, n = kv.knots, kv.degree, kv.basis_count
    nfun = n + p
    t_count = len(grid)
    u = grid[:, None]

    phi = ((knots[None, :-1] <= u) & (u < knots[None, 1:])).astype(float)
    at_end = grid >= knots[-1]
    if np.any(at_end):
        phi[at_end] = 0.0
        phi[at_end, _interval_of(knots, float(knots[-1]))] = 1.0

    for q in range(1, p + 1):
        width = nfun - q
        left_den = knots[q : q + width] - knots[:width]
        right_den = knots[q + 1 : q + 1 + width] - knots[1 : 1 + width]
        with np.errstate(divide="ignore", invalid="ignore"):
            left = np.where(left_den > 0, (u - knots[None, :width]) / left_den, 0.0)
            right = np.where(
                right_den > 0, (knots[None, q + 1 : q + 1 + width] - u) / right_den, 0.0
            )
        phi = left * phi[:, :width] + right * phi[:, 1 : width + 1]

    basis = BSplineBasis(knot_vector=kv, grid=grid, matrix=phi.reshape(t_count, n))
    _BASIS_CACHE[key] = basis
    return basis


def eval_curve(basis: BSplineBasis, control_points) -> np.ndarray:
    """Curve samples over the basis grid for a length-N control point vector."""
    c = np.asarray(control_points, dtype=float)
    if c.shape != (basis.basis_count,):
        raise ShapeError(
            f"expected {basis.basis_count} control points, got shape {c.shape}"
        )
    return basis.matrix @ c
