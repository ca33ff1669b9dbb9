"""End-to-end tokenization: normalize -> fit -> quantize -> flatten, and back.

Stream variants carry a StreamState holding the decoded final sample of the
previous chunk. In clamped transition mode that value pins the next chunk's
first control point, bypassing quantization, so consecutive decoded chunks
join with zero discontinuity in normalized space.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import fitting
from .bspline import build_basis_matrix, make_clamped_knots
from .errors import DofMismatchError, ParseError, ShapeError
from .normalize import NormalizationStats, denormalize, normalize
from .quantize import (
    QuantizationScheme,
    TokenSequence,
    dequantize,
    flatten,
    quantize,
    unflatten,
)

GRID_RULES = ("t_over_T", "inclusive")
TRANSITION_MODES = ("independent", "clamped")
TAIL_POLICIES = ("drop", "error")


@dataclass(frozen=True)
class TokenizerConfig:
    chunk_length: int = 20
    basis_count: int = 10
    degree: int = 3
    lam: float = 1e-6
    vocab_size: int = 256
    quant_range: tuple[float, float] = (-1.0, 1.0)
    grid_rule: str = "t_over_T"
    transition_mode: str = "independent"
    dof: int | None = None
    tail_policy: str = "drop"

    def __post_init__(self):
        t, n, p = self.chunk_length, self.basis_count, self.degree
        if not (0 <= p < n <= t):
            raise ValueError(
                f"require 0 <= degree < basis_count <= chunk_length, "
                f"got P={p}, N={n}, T={t}"
            )
        if self.vocab_size < 2:
            raise ValueError(f"vocab_size must be >= 2, got {self.vocab_size}")
        if self.lam < 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")
        if self.grid_rule not in GRID_RULES:
            raise ValueError(f"unknown grid_rule {self.grid_rule!r}")
        if self.transition_mode not in TRANSITION_MODES:
            raise ValueError(f"unknown transition_mode {self.transition_mode!r}")
        if self.tail_policy not in TAIL_POLICIES:
            raise ValueError(f"unknown tail_policy {self.tail_policy!r}")
        if self.grid_rule == "inclusive" and self.chunk_length < 2:
            raise ValueError("inclusive grid rule needs chunk_length >= 2")

    @property
    def scheme(self) -> QuantizationScheme:
        return QuantizationScheme(
            vocab_size=self.vocab_size,
            range_low=self.quant_range[0],
            range_high=self.quant_range[1],
        )


@dataclass(frozen=True)
class StreamState:
    """Decoded final sample of the previous chunk, in normalized units."""

    last_action: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.last_action, dtype=float)
        if a.ndim != 1 or not np.all(np.isfinite(a)):
            raise ValueError("stream state must be a finite 1-D vector")
        object.__setattr__(self, "last_action", a)
        a.flags.writeable = False


def make_grid(config: TokenizerConfig) -> np.ndarray:
    t = config.chunk_length
    if config.grid_rule == "t_over_T":
        return np.arange(1, t + 1) / t
    return np.arange(t) / (t - 1)


_SOLVER_CACHE: dict[tuple, fitting.FitSolver] = {}


def solver_for(config: TokenizerConfig) -> fitting.FitSolver:
    key = (config.chunk_length, config.basis_count, config.degree,
           config.lam, config.grid_rule)
    solver = _SOLVER_CACHE.get(key)
    if solver is None:
        kv = make_clamped_knots(config.basis_count, config.degree)
        basis = build_basis_matrix(kv, make_grid(config))
        solver = fitting.FitSolver.build(basis, config.lam)
        _SOLVER_CACHE[key] = solver
    return solver


def _check_chunk(config: TokenizerConfig, stats: NormalizationStats, raw) -> np.ndarray:
    a = np.asarray(raw, dtype=float)
    if a.ndim != 2 or a.shape[0] != config.chunk_length:
        raise ShapeError(
            f"chunk must be (T, D) with T={config.chunk_length}, got shape {a.shape}"
        )
    if config.dof is not None and config.dof != stats.dof:
        raise DofMismatchError(
            f"config dof {config.dof} disagrees with stats dof {stats.dof}"
        )
    if a.shape[1] != stats.dof:
        raise DofMismatchError(
            f"chunk has D={a.shape[1]} but stats expect D={stats.dof}"
        )
    return a


def encode(config: TokenizerConfig, stats: NormalizationStats, raw_actions) -> TokenSequence:
    """Tokenize one (T, D) chunk into D * N discrete tokens."""
    a = _check_chunk(config, stats, raw_actions)
    solver = solver_for(config)
    c = fitting.fit(solver, normalize(stats, a))
    return flatten(quantize(config.scheme, c.values), conditioned=False)


def _check_seq(config: TokenizerConfig, stats: NormalizationStats, seq: TokenSequence) -> None:
    if seq.dof != stats.dof:
        raise DofMismatchError(
            f"token sequence has D={seq.dof} but stats expect D={stats.dof}"
        )
    if seq.basis_count != config.basis_count:
        raise ShapeError(
            f"token sequence basis count {seq.basis_count} does not match "
            f"config basis_count {config.basis_count}"
        )


def _decode_norm(config: TokenizerConfig, full_control_points: np.ndarray) -> np.ndarray:
    solver = solver_for(config)
    return solver.basis.matrix @ full_control_points.T


def decode(config: TokenizerConfig, stats: NormalizationStats, seq: TokenSequence) -> np.ndarray:
    """Reconstruct a (T, D) raw-unit chunk from an unconditioned token sequence."""
    _check_seq(config, stats, seq)
    if seq.conditioned:
        raise ShapeError("conditioned sequence requires decode_stream with a state")
    c = dequantize(config.scheme, unflatten(seq))
    return denormalize(stats, _decode_norm(config, c))


def encode_stream(config: TokenizerConfig, stats: NormalizationStats,
                  state: StreamState | None, raw_actions):
    """Tokenize the next chunk of a stream; returns (sequence, new state).

    The first chunk (state None) is encoded unconditioned. In clamped mode
    later chunks pin their first control point to the state and emit
    D * (N - 1) tokens.
    """
    a = _check_chunk(config, stats, raw_actions)
    clamped = config.transition_mode == "clamped"
    if state is None or not clamped:
        seq = encode(config, stats, a)
        c = dequantize(config.scheme, unflatten(seq))
    else:
        solver = solver_for(config)
        fitted = fitting.fit_conditioned(solver, normalize(stats, a), state.last_action)
        q = quantize(config.scheme, fitted.values)
        seq = flatten(q, basis_count=config.basis_count, conditioned=True)
        c = np.hstack([state.last_action[:, None], dequantize(config.scheme, q)])
    decoded = _decode_norm(config, c)
    return seq, StreamState(last_action=decoded[-1])


def decode_stream(config: TokenizerConfig, stats: NormalizationStats,
                  state: StreamState | None, seq: TokenSequence):
    """Decode the next chunk of a stream; returns ((T, D) raw actions, new state)."""
    _check_seq(config, stats, seq)
    if seq.conditioned != (state is not None):
        raise ShapeError(
            "conditioned sequence requires a stream state and vice versa "
            f"(conditioned={seq.conditioned}, state={'present' if state else 'absent'})"
        )
    if seq.conditioned:
        rest = dequantize(config.scheme, unflatten(seq))
        c = np.hstack([state.last_action[:, None], rest])
    else:
        c = dequantize(config.scheme, unflatten(seq))
    decoded = _decode_norm(config, c)
    return denormalize(stats, decoded), StreamState(last_action=decoded[-1])


def chunk_start_norm(config: TokenizerConfig, state: StreamState | None,
                     seq: TokenSequence) -> np.ndarray:
    """Decoded chunk value at u = 0 in normalized units (equals c_0 by clamping)."""
    if seq.conditioned:
        if state is None:
            raise ShapeError("conditioned sequence requires a stream state")
        return np.asarray(state.last_action)
    return dequantize(config.scheme, unflatten(seq))[:, 0]


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def config_to_json(config: TokenizerConfig) -> str:
    """Canonical, byte-stable JSON encoding (fixed key order, 17 sig digits)."""
    dof = "null" if config.dof is None else str(config.dof)
    return (
        '{"chunk_length": %d, "basis_count": %d, "degree": %d, "lambda": %s, '
        '"vocab_size": %d, "quant_range": [%s, %s], "grid_rule": "%s", '
        '"transition_mode": "%s", "dof": %s, "tail_policy": "%s"}'
        % (
            config.chunk_length, config.basis_count, config.degree, _fmt(config.lam),
            config.vocab_size, _fmt(config.quant_range[0]), _fmt(config.quant_range[1]),
            config.grid_rule, config.transition_mode, dof, config.tail_policy,
        )
    )


def config_from_json(text: str) -> TokenizerConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid config JSON: {exc}") from exc
    known = {
        "chunk_length", "basis_count", "degree", "lambda", "vocab_size",
        "quant_range", "grid_rule", "transition_mode", "dof", "tail_policy",
    }
    unknown = set(obj) - known
    if unknown:
        raise ParseError(f"unknown config keys: {sorted(unknown)}")
    try:
        return TokenizerConfig(
            chunk_length=int(obj.get("chunk_length", 20)),
            basis_count=int(obj.get("basis_count", 10)),
            degree=int(obj.get("degree", 3)),
            lam=float(obj.get("lambda", 1e-6)),
            vocab_size=int(obj.get("vocab_size", 256)),
            quant_range=tuple(float(v) for v in obj.get("quant_range", (-1.0, 1.0))),
            grid_rule=str(obj.get("grid_rule", "t_over_T")),
            transition_mode=str(obj.get("transition_mode", "independent")),
            dof=None if obj.get("dof") is None else int(obj["dof"]),
            tail_policy=str(obj.get("tail_policy", "drop")),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"invalid config value: {exc}") from exc
