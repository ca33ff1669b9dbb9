"""Uniform quantization of control points and the flattened token layout.

Quantization is floor-based over a fixed band with a right-edge clamp;
dequantization returns bin centers. Flattening is basis-major,
dimension-minor, so values belonging to the same basis function stay
adjacent across DoFs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, VocabError


@dataclass(frozen=True)
class QuantizationScheme:
    vocab_size: int = 256
    range_low: float = -1.0
    range_high: float = 1.0

    def __post_init__(self):
        if self.vocab_size < 2:
            raise ValueError(f"vocab_size must be >= 2, got {self.vocab_size}")
        if not self.range_low < self.range_high:
            raise ValueError("range_low must be strictly below range_high")


@dataclass(frozen=True)
class TokenSequence:
    """Flattened discrete tokens plus the layout metadata needed to invert them.

    basis_count is always the curve's full N; conditioned sequences carry
    D * (N - 1) tokens because the first control point is pinned, not emitted.
    """

    tokens: np.ndarray
    dof: int
    basis_count: int
    conditioned: bool = False
    layout: str = field(default="interleaved-by-basis")

    def __post_init__(self):
        t = np.asarray(self.tokens, dtype=np.int64).ravel()
        object.__setattr__(self, "tokens", t)
        t.flags.writeable = False
        cols = self.basis_count - 1 if self.conditioned else self.basis_count
        if len(t) != self.dof * cols:
            raise ShapeError(
                f"token count {len(t)} does not match D={self.dof} x "
                f"{'N-1' if self.conditioned else 'N'}={cols}"
            )

    def __len__(self) -> int:
        return len(self.tokens)


def quantize(scheme: QuantizationScheme, values) -> np.ndarray:
    """Map values to integer bins; out-of-band values saturate at the edges."""
    x = np.asarray(values, dtype=float)
    span = scheme.range_high - scheme.range_low
    idx = np.floor((x - scheme.range_low) / span * scheme.vocab_size)
    return np.clip(idx, 0, scheme.vocab_size - 1).astype(np.int64)


def dequantize(scheme: QuantizationScheme, indices) -> np.ndarray:
    """Map integer bins back to bin-center values."""
    idx = np.asarray(indices)
    if idx.size and (idx.min() < 0 or idx.max() >= scheme.vocab_size):
        raise VocabError(
            f"token index outside [0, {scheme.vocab_size - 1}]: "
            f"min={idx.min()}, max={idx.max()}"
        )
    span = scheme.range_high - scheme.range_low
    return scheme.range_low + (idx + 0.5) * span / scheme.vocab_size


def flatten(quantized: np.ndarray, *, basis_count: int | None = None,
            conditioned: bool = False) -> TokenSequence:
    """(D, cols) integer matrix -> basis-major, dimension-minor token sequence."""
    q = np.asarray(quantized)
    if q.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {q.shape}")
    d, cols = q.shape
    n = basis_count if basis_count is not None else (cols + 1 if conditioned else cols)
    return TokenSequence(
        tokens=q.T.ravel(), dof=d, basis_count=n, conditioned=conditioned
    )


def unflatten(seq: TokenSequence) -> np.ndarray:
    """Inverse of flatten: recover the (D, cols) integer matrix."""
    cols = seq.basis_count - 1 if seq.conditioned else seq.basis_count
    return seq.tokens.reshape(cols, seq.dof).T
