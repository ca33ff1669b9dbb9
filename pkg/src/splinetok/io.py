"""File formats: trajectory CSV/JSONL and token JSONL.

A CSV file holds a single trajectory ("t,dim_0,...,dim_{D-1}" header);
a JSONL file holds one trajectory or token chunk per line. Parse errors
carry 1-based line numbers.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DofMismatchError, EmptyDatasetError, ParseError, ShapeError
from .quantize import TokenSequence


def _float_repr(v: float) -> str:
    return repr(float(v))


def read_trajectories(path) -> list[tuple[str, np.ndarray]]:
    """Load [(id, (T, D) array)] from a .csv or .jsonl file."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return [read_trajectory_csv(path)]
    if path.suffix.lower() == ".jsonl":
        return read_trajectories_jsonl(path)
    raise ParseError(f"unsupported trajectory format: {path.suffix!r}")


def read_trajectory_csv(path) -> tuple[str, np.ndarray]:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise EmptyDatasetError(f"{path}: empty file")
    header = lines[0].split(",")
    if header[0].strip() != "t" or len(header) < 2:
        raise ParseError(f"{path}:1: expected header 't,dim_0,...'")
    dof = len(header) - 1
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != dof + 1:
            raise ParseError(
                f"{path}:{i}: expected {dof + 1} columns, got {len(cells)}"
            )
        try:
            rows.append([float(c) for c in cells[1:]])
        except ValueError as exc:
            raise ParseError(f"{path}:{i}: {exc}") from exc
    if not rows:
        raise EmptyDatasetError(f"{path}: no data rows")
    arr = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{path}: non-finite values in trajectory")
    return path.stem, arr


def read_trajectories_jsonl(path) -> list[tuple[str, np.ndarray]]:
    path = Path(path)
    out = []
    dof = None
    for i, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{i}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "actions" not in obj:
            raise ParseError(f"{path}:{i}: expected an object with an 'actions' key")
        try:
            arr = np.asarray(obj["actions"], dtype=float)
        except ValueError as exc:
            raise ParseError(f"{path}:{i}: {exc}") from exc
        if arr.ndim != 2 or arr.size == 0:
            raise ParseError(f"{path}:{i}: actions must be a non-empty T x D matrix")
        if not np.all(np.isfinite(arr)):
            raise ParseError(f"{path}:{i}: non-finite values in trajectory")
        if dof is None:
            dof = arr.shape[1]
        elif arr.shape[1] != dof:
            raise ParseError(
                f"{path}:{i}: trajectory has D={arr.shape[1]}, expected D={dof}"
            )
        out.append((str(obj.get("id", f"traj_{i}")), arr))
    if not out:
        raise EmptyDatasetError(f"{path}: no trajectories")
    return out


def write_trajectory_csv(path, actions: np.ndarray) -> None:
    a = np.asarray(actions, dtype=float)
    lines = ["t," + ",".join(f"dim_{d}" for d in range(a.shape[1]))]
    for t, row in enumerate(a):
        lines.append(str(t) + "," + ",".join(_float_repr(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_trajectories_jsonl(path, trajectories) -> None:
    """trajectories: iterable of (id, (T, D) array)."""
    lines = []
    for traj_id, actions in trajectories:
        a = np.asarray(actions, dtype=float)
        body = ", ".join(
            "[" + ", ".join(_float_repr(v) for v in row) + "]" for row in a
        )
        lines.append('{"id": %s, "actions": [%s]}' % (json.dumps(str(traj_id)), body))
    Path(path).write_text("\n".join(lines) + "\n")


def write_tokens_jsonl(path, records) -> None:
    """records: iterable of (id, chunk_index, TokenSequence)."""
    lines = []
    for traj_id, chunk_index, seq in records:
        lines.append(
            '{"id": %s, "chunk_index": %d, "conditioned": %s, "dof": %d, '
            '"basis_count": %d, "tokens": [%s]}'
            % (
                json.dumps(str(traj_id)),
                chunk_index,
                "true" if seq.conditioned else "false",
                seq.dof,
                seq.basis_count,
                ", ".join(str(int(t)) for t in seq.tokens),
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_tokens_jsonl(path) -> list[tuple[str, int, TokenSequence]]:
    path = Path(path)
    out = []
    for i, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{i}: invalid JSON: {exc}") from exc
        try:
            seq = TokenSequence(
                tokens=np.asarray(obj["tokens"], dtype=np.int64),
                dof=int(obj["dof"]),
                basis_count=int(obj["basis_count"]),
                conditioned=bool(obj["conditioned"]),
            )
        except KeyError as exc:
            raise ParseError(f"{path}:{i}: missing key {exc}") from exc
        except ShapeError as exc:
            raise ShapeError(f"{path}:{i}: {exc}") from exc
        out.append((str(obj.get("id", f"traj_{i}")), int(obj.get("chunk_index", 0)), seq))
    if not out:
        raise EmptyDatasetError(f"{path}: no token chunks")
    return out
