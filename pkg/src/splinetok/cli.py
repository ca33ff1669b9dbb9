"""Command-line interface: fit-stats, tokenize, detokenize, compare, basis.

Exit codes: 2 parse error, 3 empty dataset, 4 shape/layout error,
5 config/stats dof mismatch, 6 out-of-vocabulary token. Every error path
prints a single line starting with "error:" to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import baselines, io, pipeline
from .bspline import build_basis_matrix, make_clamped_knots
from .errors import (
    DegreeError,
    DofMismatchError,
    DomainError,
    EmptyDatasetError,
    ParseError,
    ShapeError,
    SplinetokError,
    VocabError,
)
from .normalize import compute_stats, stats_from_json, stats_to_json

_EXIT_CODES = [
    (ParseError, 2),
    (EmptyDatasetError, 3),
    (DofMismatchError, 5),
    (VocabError, 6),
    (DegreeError, 4),
    (DomainError, 4),
    (ShapeError, 4),
    (SplinetokError, 4),
]


def _exit_code(exc: Exception) -> int:
    for cls, code in _EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return 1


def _load_config(path) -> pipeline.TokenizerConfig:
    try:
        return pipeline.config_from_json(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read config: {exc}") from exc


def _load_stats(path):
    try:
        return stats_from_json(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read stats: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid stats JSON: {exc}") from exc


def _chunk_trajectory(actions: np.ndarray, config: pipeline.TokenizerConfig,
                      traj_id: str, quiet: bool) -> list[np.ndarray]:
    t = config.chunk_length
    n_chunks, tail = divmod(actions.shape[0], t)
    if tail and config.tail_policy == "error":
        raise ShapeError(
            f"trajectory {traj_id!r} length {actions.shape[0]} is not a "
            f"multiple of chunk_length {t}"
        )
    if tail and not quiet:
        print(
            f"warning: dropping {tail}-step tail of trajectory {traj_id!r}",
            file=sys.stderr,
        )
    return [actions[i * t:(i + 1) * t] for i in range(n_chunks)]


def cmd_fit_stats(args) -> int:
    trajectories = io.read_trajectories(args.input)
    stats = compute_stats([a for _, a in trajectories])
    Path(args.output).write_text(stats_to_json(stats) + "\n")
    if not args.quiet:
        print(f"computed stats for {stats.dof} dimensions over "
              f"{len(trajectories)} trajectories")
        for d in range(stats.dof):
            print(f"  dim_{d}: q01={stats.q_low[d]:.6g} q99={stats.q_high[d]:.6g}")
    return 0


def cmd_tokenize(args) -> int:
    config = _load_config(args.config)
    stats = _load_stats(args.stats)
    if args.stream:
        config = pipeline.TokenizerConfig(
            **{**_config_kwargs(config), "transition_mode": "clamped"}
        )
    records = []
    for traj_id, actions in io.read_trajectories(args.input):
        chunks = _chunk_trajectory(actions, config, traj_id, args.quiet)
        state = None
        for idx, chunk in enumerate(chunks):
            if args.stream:
                seq, state = pipeline.encode_stream(config, stats, state, chunk)
            else:
                seq = pipeline.encode(config, stats, chunk)
            records.append((traj_id, idx, seq))
    if not records:
        raise EmptyDatasetError("no chunks to tokenize")
    io.write_tokens_jsonl(args.output, records)
    if not args.quiet:
        print(f"wrote {len(records)} token chunks to {args.output}")
    return 0


def _config_kwargs(config: pipeline.TokenizerConfig) -> dict:
    return {
        "chunk_length": config.chunk_length,
        "basis_count": config.basis_count,
        "degree": config.degree,
        "lam": config.lam,
        "vocab_size": config.vocab_size,
        "quant_range": config.quant_range,
        "grid_rule": config.grid_rule,
        "transition_mode": config.transition_mode,
        "dof": config.dof,
        "tail_policy": config.tail_policy,
    }


def cmd_detokenize(args) -> int:
    config = _load_config(args.config)
    stats = _load_stats(args.stats)
    records = io.read_tokens_jsonl(args.input)
    trajectories: list[tuple[str, np.ndarray]] = []
    pieces: list[np.ndarray] = []
    current_id = None
    state = None

    def flush():
        if current_id is not None:
            trajectories.append((current_id, np.concatenate(pieces, axis=0)))

    for traj_id, chunk_index, seq in records:
        if traj_id != current_id:
            flush()
            current_id, state = traj_id, None
            pieces.clear()
        if seq.conditioned and state is None:
            raise ShapeError(
                f"conditioned chunk {chunk_index} of {traj_id!r} has no predecessor"
            )
        actions, state = pipeline.decode_stream(
            config, stats, state if seq.conditioned else None, seq
        )
        pieces.append(actions)
    flush()

    out = Path(args.output)
    if out.suffix.lower() == ".csv":
        if len(trajectories) != 1:
            raise ShapeError("CSV output supports exactly one trajectory")
        io.write_trajectory_csv(out, trajectories[0][1])
    else:
        io.write_trajectories_jsonl(out, trajectories)
    if not args.quiet:
        print(f"wrote {len(trajectories)} trajectories to {args.output}")
    return 0


def _parse_compare_entries(path) -> list[baselines.TokenizerEntry]:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read tokenizer configs: {exc}") from exc
    if not isinstance(raw, list):
        raise ParseError("tokenizer configs file must hold a JSON list")
    entries = []
    for item in raw:
        try:
            entries.append(
                baselines.TokenizerEntry(
                    name=str(item["name"]),
                    kind=str(item.get("kind", "bspline")),
                    config=pipeline.config_from_json(json.dumps(item.get("config", {}))),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"invalid tokenizer entry: {exc}") from exc
    return entries


def cmd_compare(args) -> int:
    try:
        spec_obj = json.loads(Path(args.spec).read_text())
        if args.seed is not None:
            spec_obj["seed"] = args.seed
        spec = baselines.SyntheticSpec(**spec_obj)
    except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
        if isinstance(exc, SplinetokError):
            raise
        raise ParseError(f"invalid synthetic spec: {exc}") from exc
    entries = _parse_compare_entries(args.configs)
    dataset = baselines.generate_synthetic(spec)
    stats = compute_stats(dataset)
    report = baselines.compare_tokenizers(dataset, entries, stats)
    report["synthetic_spec"] = {
        "count": spec.count, "duration_s": spec.duration_s, "rate_hz": spec.rate_hz,
        "generator": spec.generator, "seed": spec.seed, "dof": spec.dof,
        "control_points": spec.control_points,
    }
    out = Path(args.output)
    out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write_report_csv(out.with_name(out.stem + "_report.csv"), report)
    _write_traces_csv(out.with_name(out.stem + "_traces.csv"), dataset, entries, stats)
    if not args.quiet:
        for name, row in report["tokenizers"].items():
            print(f"{name}: J={row['token_count']} mse={row['mse_mean']:.3e}"
                  f"±{row['mse_std']:.3e} max_jump={row['max_boundary_jump']:.3e}"
                  f" clip={row['clip_fraction']:.4f}")
    return 0


def _write_report_csv(path, report) -> None:
    lines = ["name,kind,token_count,mse_mean,mse_std,max_boundary_jump,clip_fraction"]
    for name, row in report["tokenizers"].items():
        lines.append(
            f"{name},{row['kind']},{row['token_count']},{row['mse_mean']!r},"
            f"{row['mse_std']!r},{row['max_boundary_jump']!r},{row['clip_fraction']!r}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def _write_traces_csv(path, dataset, entries, stats, max_trajectories: int = 3) -> None:
    """Per-sample normalized traces of the first trajectories, plot-ready."""
    from .normalize import normalize

    header = ["trajectory", "t", "dim", "ground_truth"] + [e.name for e in entries]
    lines = [",".join(header)]
    for k, raw in enumerate(dataset[:max_trajectories]):
        raw = np.asarray(raw, dtype=float)
        t_chunk = entries[0].config.chunk_length
        n_chunks = raw.shape[0] // t_chunk
        chunks = [raw[i * t_chunk:(i + 1) * t_chunk] for i in range(n_chunks)]
        truth = normalize(stats, np.concatenate(chunks, axis=0))
        recons = []
        for e in entries:
            if e.kind == "bspline":
                recon, _, _, _, _ = baselines.spline_roundtrip_stream(e.config, stats, chunks)
            else:
                recon = np.concatenate([
                    baselines.binning_detokenize(
                        baselines.binning_tokenize(normalize(stats, c), e.config.vocab_size),
                        t_chunk, raw.shape[1], e.config.vocab_size)
                    for c in chunks
                ], axis=0)
            recons.append(recon)
        for t in range(truth.shape[0]):
            for d in range(truth.shape[1]):
                row = [str(k), str(t), str(d), repr(float(truth[t, d]))]
                row += [repr(float(r[t, d])) for r in recons]
                lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def cmd_basis(args) -> int:
    kv = make_clamped_knots(args.n, args.p)
    grid = np.linspace(0.0, 1.0, args.grid)
    basis = build_basis_matrix(kv, grid)
    lines = ["u," + ",".join(f"phi_{n}" for n in range(args.n))]
    for u, row in zip(grid, basis.matrix):
        lines.append(repr(float(u)) + "," + ",".join(repr(float(v)) for v in row))
    Path(args.output).write_text("\n".join(lines) + "\n")
    if not args.quiet:
        print(f"wrote {args.grid}x{args.n} basis matrix to {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splinetok",
        description="B-spline tokenization of continuous action sequences",
    )
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker thread budget (currently single-threaded)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override random seed where applicable")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-stats", help="compute normalization stats from a dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_fit_stats)

    p = sub.add_parser("tokenize", help="encode trajectories into token chunks")
    p.add_argument("--config", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--stream", action="store_true",
                   help="clamped transitions across a trajectory's chunks")
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("detokenize", help="decode token chunks back to trajectories")
    p.add_argument("--config", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_detokenize)

    p = sub.add_parser("compare", help="run the synthetic tokenizer comparison")
    p.add_argument("--spec", required=True)
    p.add_argument("--configs", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("basis", help="dump a basis matrix as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_basis)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except SplinetokError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
