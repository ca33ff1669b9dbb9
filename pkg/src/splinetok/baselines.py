"""Baseline binning tokenizers, synthetic trajectory generation, and the
desk-scale comparison harness (reconstruction MSE, boundary smoothness,
token budgets).

The harness measures tokenize -> detokenize round-trip fidelity only; no
sequence model is involved, so reported errors are each tokenizer's
model-free floor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fitting, pipeline
from .bspline import build_basis_matrix, make_clamped_knots
from .errors import ShapeError
from .normalize import NormalizationStats, compute_stats, normalize
from .quantize import QuantizationScheme, dequantize, quantize, unflatten


def binning_tokenize(actions, vocab_size: int = 256) -> np.ndarray:
    """Per-sample uniform quantization over [-1, 1], timestep-major layout."""
    a = np.asarray(actions, dtype=float)
    if a.ndim != 2:
        raise ShapeError(f"expected (T, D) actions, got shape {a.shape}")
    scheme = QuantizationScheme(vocab_size=vocab_size)
    return quantize(scheme, a).ravel()


def binning_detokenize(tokens, num_steps: int, dof: int, vocab_size: int = 256) -> np.ndarray:
    """Inverse of binning_tokenize: bin centers reshaped to (T, D)."""
    t = np.asarray(tokens)
    if t.size != num_steps * dof:
        raise ShapeError(
            f"token count {t.size} does not match T={num_steps} x D={dof}"
        )
    scheme = QuantizationScheme(vocab_size=vocab_size)
    return dequantize(scheme, t.reshape(num_steps, dof))


@dataclass(frozen=True)
class SyntheticSpec:
    count: int = 2000
    duration_s: float = 1.0
    rate_hz: float = 100.0
    generator: str = "cubic_spline"  # or "sum_of_sinusoids"
    seed: int = 0
    dof: int = 1
    control_points: int = 3  # size of the ground-truth spline basis

    def __post_init__(self):
        t = self.duration_s * self.rate_hz
        if abs(t - round(t)) > 1e-9 or t <= 0:
            raise ValueError("duration_s * rate_hz must be a positive integer")
        if self.generator not in ("cubic_spline", "sum_of_sinusoids"):
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.count < 1 or self.dof < 1 or self.control_points < 2:
            raise ValueError("count, dof >= 1 and control_points >= 2 required")

    @property
    def num_steps(self) -> int:
        return round(self.duration_s * self.rate_hz)


def generate_synthetic(spec: SyntheticSpec) -> list[np.ndarray]:
    """Deterministic dataset of (T, D) trajectories with values in [-1, 1].

    cubic_spline draws K control points per DoF uniformly in [-1, 1] and
    evaluates a clamped uniform B-spline of degree min(3, K - 1) on an
    endpoint-inclusive grid. sum_of_sinusoids mixes 3 random sinusoids
    (frequency <= 5 Hz) and rescales each trajectory to peak at 1.
    """
    rng = np.random.default_rng(spec.seed)
    t_count = spec.num_steps
    out: list[np.ndarray] = []
    if spec.generator == "cubic_spline":
        k = spec.control_points
        degree = min(3, k - 1)
        kv = make_clamped_knots(k, degree)
        basis = build_basis_matrix(kv, np.linspace(0.0, 1.0, t_count))
        for _ in range(spec.count):
            c = rng.uniform(-1.0, 1.0, size=(spec.dof, k))
            out.append(basis.matrix @ c.T)
    else:
        time = np.arange(t_count) / spec.rate_hz
        for _ in range(spec.count):
            traj = np.zeros((t_count, spec.dof))
            for d in range(spec.dof):
                amp = rng.uniform(0.2, 1.0, size=3)
                freq = rng.uniform(0.2, 5.0, size=3)
                phase = rng.uniform(0.0, 2 * np.pi, size=3)
                sig = sum(a * np.sin(2 * np.pi * f * time + p)
                          for a, f, p in zip(amp, freq, phase))
                traj[:, d] = sig / np.max(np.abs(sig))
            out.append(traj)
    return out


@dataclass(frozen=True)
class TokenizerEntry:
    """One tokenizer under comparison: kind is 'bspline', 'binning', or 'binning_ac'."""

    name: str
    kind: str
    config: pipeline.TokenizerConfig

    def __post_init__(self):
        if self.kind not in ("bspline", "binning", "binning_ac"):
            raise ValueError(f"unknown tokenizer kind {self.kind!r}")


def smoothness_profile(decoded_stream, boundaries) -> dict:
    """Per-boundary jumps of a concatenated (T_total, D) stream.

    A jump is the max-over-dimension absolute step |a[b] - a[b-1]| at each
    boundary index b; mean_abs_step gives the signal's own typical step for
    baseline-relative reading.
    """
    a = np.asarray(decoded_stream, dtype=float)
    steps = np.abs(np.diff(a, axis=0))
    jumps = [float(np.max(steps[b - 1])) for b in boundaries if 0 < b < len(a)]
    mean_step = float(np.mean(steps)) if len(steps) else 0.0
    return {
        "jumps": jumps,
        "max_jump": max(jumps) if jumps else 0.0,
        "mean_abs_step": mean_step,
        "relative_jumps": [j - mean_step for j in jumps],
    }


def spline_roundtrip_stream(config: pipeline.TokenizerConfig,
                            stats: NormalizationStats,
                            chunks: list[np.ndarray]):
    """Encode and decode consecutive chunks through the stream pipeline.

    Returns (reconstruction in normalized units, per-seam jumps, clipped
    control point count, total control point count, token count). Seam jumps
    compare each chunk's decoded value at u = 0 against the previous chunk's
    decoded final sample; under the t/T grid rule that point precedes the
    chunk's first emitted sample.
    """
    solver = pipeline.solver_for(config)
    lo, hi = config.quant_range
    clamped = config.transition_mode == "clamped"
    state = None
    recon, jumps = [], []
    clipped = total_cp = token_count = 0
    prev_last = None
    for raw in chunks:
        a_norm = normalize(stats, raw)
        if state is None or not clamped:
            values = fitting.fit(solver, a_norm).values
        else:
            values = fitting.fit_conditioned(solver, a_norm, state.last_action).values
        clipped += int(np.sum((values < lo) | (values > hi)))
        total_cp += values.size
        seq, new_state = pipeline.encode_stream(config, stats, state, raw)
        token_count += len(seq)
        start = pipeline.chunk_start_norm(config, state, seq)
        if prev_last is not None:
            jumps.append(float(np.max(np.abs(start - prev_last))))
        # reconstruct directly in normalized units to keep the comparison
        # against binning free of raw-unit round-trip rounding
        rest = dequantize(config.scheme, unflatten(seq))
        c_full = rest if not seq.conditioned else np.hstack(
            [state.last_action[:, None], rest]
        )
        recon.append(solver.basis.matrix @ c_full.T)
        state = new_state
        prev_last = new_state.last_action
    return np.concatenate(recon, axis=0), jumps, clipped, total_cp, token_count


def compare_tokenizers(dataset: list[np.ndarray], entries: list[TokenizerEntry],
                       stats: NormalizationStats | None = None) -> dict:
    """Round-trip every tokenizer over the dataset and aggregate metrics.

    Trajectories are cut into consecutive chunks of each config's chunk
    length (all entries must share it) and streamed in order. MSE is
    reported in normalized units against the normalized ground truth.
    """
    if not entries:
        raise ValueError("no tokenizers to compare")
    t_chunk = entries[0].config.chunk_length
    for e in entries:
        if e.config.chunk_length != t_chunk:
            raise ShapeError("all compared tokenizers must share chunk_length")
    if stats is None:
        stats = compute_stats(dataset)

    report: dict = {
        "note": "tokenize->detokenize round-trip fidelity; no sequence model",
        "num_trajectories": len(dataset),
        "chunk_length": t_chunk,
        "tokenizers": {},
    }
    for entry in entries:
        cfg = entry.config
        per_traj_mse = []
        all_jumps = []
        clipped = total_cp = 0
        tokens_per_traj = None
        for raw in dataset:
            raw = np.asarray(raw, dtype=float)
            n_chunks = raw.shape[0] // t_chunk
            if n_chunks == 0:
                raise ShapeError(
                    f"trajectory of length {raw.shape[0]} shorter than chunk {t_chunk}"
                )
            chunks = [raw[i * t_chunk:(i + 1) * t_chunk] for i in range(n_chunks)]
            truth_norm = normalize(stats, np.concatenate(chunks, axis=0))
            if entry.kind == "bspline":
                recon, jumps, cl, cp, j_count = spline_roundtrip_stream(cfg, stats, chunks)
                clipped += cl
                total_cp += cp
            else:
                # binning and binning_ac share the per-sample codec; they
                # differ only in decode granularity, which a round-trip
                # cannot distinguish, so their reconstructions coincide.
                pieces = []
                for chunk in chunks:
                    norm = normalize(stats, chunk)
                    toks = binning_tokenize(norm, cfg.vocab_size)
                    pieces.append(
                        binning_detokenize(toks, t_chunk, norm.shape[1], cfg.vocab_size)
                    )
                recon = np.concatenate(pieces, axis=0)
                boundaries = [i * t_chunk for i in range(1, n_chunks)]
                jumps = smoothness_profile(recon, boundaries)["jumps"]
                clipped += int(np.sum(np.abs(truth_norm) > 1.0))
                total_cp += truth_norm.size
                j_count = truth_norm.size
            per_traj_mse.append(float(np.mean((recon - truth_norm) ** 2)))
            all_jumps.extend(jumps)
            tokens_per_traj = j_count
        report["tokenizers"][entry.name] = {
            "kind": entry.kind,
            "token_count": tokens_per_traj,
            "mse_mean": float(np.mean(per_traj_mse)),
            "mse_std": float(np.std(per_traj_mse)),
            "max_boundary_jump": float(max(all_jumps)) if all_jumps else 0.0,
            "clip_fraction": clipped / total_cp if total_cp else 0.0,
        }
    return report
