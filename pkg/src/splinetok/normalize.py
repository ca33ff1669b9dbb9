"""Per-dimension quantile normalization of raw action values to [-1, 1].

Statistics are computed once over a dataset (1st/99th percentile per
dimension, pooled across trajectories) and persisted; normalization is a
plain affine map and does not clip.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DofMismatchError, EmptyDatasetError, ShapeError

# Below this raw-unit spread a dimension is treated as constant.
DEGENERATE_EPS = 1e-12

QUANTILES = (0.01, 0.99)
PERCENTILE_RULE = "linear"


@dataclass(frozen=True)
class NormalizationStats:
    q_low: np.ndarray
    q_high: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.q_low, dtype=float)
        hi = np.asarray(self.q_high, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ShapeError("q_low and q_high must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("quantile bounds must be finite")
        if np.any(lo > hi):
            raise ValueError("q_low must not exceed q_high")
        object.__setattr__(self, "q_low", lo)
        object.__setattr__(self, "q_high", hi)
        lo.flags.writeable = False
        hi.flags.writeable = False

    @property
    def dof(self) -> int:
        return len(self.q_low)

    def degenerate_mask(self) -> np.ndarray:
        return (self.q_high - self.q_low) < DEGENERATE_EPS


def compute_stats(dataset) -> NormalizationStats:
    """Pool all trajectories and take per-dimension 1st/99th percentiles."""
    mats = [np.asarray(traj, dtype=float) for traj in dataset]
    mats = [m for m in mats if m.size]
    if not mats:
        raise EmptyDatasetError("dataset contains no samples")
    dof = mats[0].shape[1] if mats[0].ndim == 2 else None
    for m in mats:
        if m.ndim != 2 or m.shape[1] != dof:
            raise DofMismatchError(
                f"inconsistent trajectory dimensions: expected D={dof}, got {m.shape}"
            )
    pooled = np.concatenate(mats, axis=0)
    if pooled.shape[0] < 2:
        raise EmptyDatasetError("need at least 2 samples per dimension")
    lo, hi = np.percentile(
        pooled, [100 * QUANTILES[0], 100 * QUANTILES[1]], axis=0, method=PERCENTILE_RULE
    )
    return NormalizationStats(q_low=lo, q_high=hi)


def _check_dof(stats: NormalizationStats, x: np.ndarray) -> None:
    if x.ndim != 2 or x.shape[1] != stats.dof:
        raise DofMismatchError(
            f"expected (T, {stats.dof}) matrix, got shape {x.shape}"
        )


def normalize(stats: NormalizationStats, actions) -> np.ndarray:
    """Affine map sending [q_low, q_high] to [-1, 1]; no clipping."""
    x = np.asarray(actions, dtype=float)
    _check_dof(stats, x)
    span = stats.q_high - stats.q_low
    degenerate = stats.degenerate_mask()
    safe_span = np.where(degenerate, 1.0, span)
    out = 2.0 * (x - stats.q_low) / safe_span - 1.0
    return np.where(degenerate, 0.0, out)


def denormalize(stats: NormalizationStats, normalized) -> np.ndarray:
    """Inverse of normalize; degenerate dimensions map back to their constant."""
    x = np.asarray(normalized, dtype=float)
    _check_dof(stats, x)
    span = stats.q_high - stats.q_low
    degenerate = stats.degenerate_mask()
    out = (x + 1.0) * span / 2.0 + stats.q_low
    return np.where(degenerate, stats.q_low, out)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def stats_to_json(stats: NormalizationStats) -> str:
    """Canonical, byte-stable JSON encoding (fixed key order, 17 sig digits)."""
    lo = ", ".join(_fmt(v) for v in stats.q_low)
    hi = ", ".join(_fmt(v) for v in stats.q_high)
    return (
        '{"dof": %d, "q_low": [%s], "q_high": [%s], '
        '"percentile_rule": "%s", "quantiles": [%s, %s]}'
        % (stats.dof, lo, hi, PERCENTILE_RULE, _fmt(QUANTILES[0]), _fmt(QUANTILES[1]))
    )


def stats_from_json(text: str) -> NormalizationStats:
    obj = json.loads(text)
    stats = NormalizationStats(
        q_low=np.asarray(obj["q_low"], dtype=float),
        q_high=np.asarray(obj["q_high"], dtype=float),
    )
    if obj.get("dof") != stats.dof:
        raise DofMismatchError(
            f"stats dof field {obj.get('dof')} disagrees with bounds of length {stats.dof}"
        )
    return stats
