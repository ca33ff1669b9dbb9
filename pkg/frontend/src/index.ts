/**
 * TypeScript bindings for the `splinetok` command-line tokenizer.
 *
 * The bindings talk to the tokenizer exclusively through its public CLI
 * (subcommands `fit-stats`, `tokenize`, `detokenize`, `compare`, `basis`)
 * and its documented file formats (trajectory JSONL/CSV, token JSONL,
 * config/stats JSON). No Python internals are touched, so any interpreter
 * with the package installed works.
 */
import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface Trajectory {
  id: string;
  /** Row-major (T x D) action samples. */
  actions: number[][];
}

export interface TokenChunk {
  id: string;
  chunk_index: number;
  conditioned: boolean;
  dof: number;
  basis_count: number;
  tokens: number[];
}

export interface TokenizerOptions {
  /** Path to a tokenizer config JSON file. */
  configPath: string;
  /** Path to a normalization stats JSON file (from fitStats). */
  statsPath: string;
  /** Executable to invoke; defaults to `splinetok` on PATH. */
  command?: string[];
}

const EXIT_MESSAGES: Record<number, string> = {
  2: "parse or config error",
  3: "empty dataset",
  4: "shape or layout error",
  5: "degree-of-freedom mismatch",
  6: "token out of vocabulary",
};

export class CliError extends Error {
  constructor(
    readonly exitCode: number,
    readonly stderr: string,
  ) {
    const kind = EXIT_MESSAGES[exitCode] ?? "unknown failure";
    super(`splinetok exited with code ${exitCode} (${kind}): ${stderr.trim()}`);
    this.name = "CliError";
  }
}

function defaultCommand(): string[] {
  const env = process.env.SPLINETOK_BIN;
  return env ? env.split(" ") : ["splinetok"];
}

function runCli(command: string[], args: string[]): void {
  const [exe, ...prefix] = command;
  const result = spawnSync(exe, [...prefix, "--quiet", ...args], {
    encoding: "utf8",
  });
  if (result.error) {
    throw result.error;
  }
  if (result.status !== 0) {
    throw new CliError(result.status ?? -1, result.stderr ?? "");
  }
}

export function writeTrajectoriesJsonl(path: string, trajectories: Trajectory[]): void {
  const lines = trajectories.map((t) =>
    JSON.stringify({ id: t.id, actions: t.actions }),
  );
  writeFileSync(path, lines.join("\n") + "\n");
}

export function readTrajectoriesJsonl(path: string): Trajectory[] {
  return readFileSync(path, "utf8")
    .split("\n")
    .filter((line) => line.length > 0)
    .map((line) => JSON.parse(line) as Trajectory);
}

export function readTokensJsonl(path: string): TokenChunk[] {
  return readFileSync(path, "utf8")
    .split("\n")
    .filter((line) => line.length > 0)
    .map((line) => JSON.parse(line) as TokenChunk);
}

export function writeTokensJsonl(path: string, chunks: TokenChunk[]): void {
  const lines = chunks.map((c) =>
    JSON.stringify({
      id: c.id,
      chunk_index: c.chunk_index,
      conditioned: c.conditioned,
      dof: c.dof,
      basis_count: c.basis_count,
      tokens: c.tokens,
    }),
  );
  writeFileSync(path, lines.join("\n") + "\n");
}

/** Estimate normalization stats from a trajectory JSONL/CSV file. */
export function fitStats(
  inputPath: string,
  outputPath: string,
  command: string[] = defaultCommand(),
): void {
  runCli(command, ["fit-stats", "--input", inputPath, "--output", outputPath]);
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "splinetok-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

export class Tokenizer {
  private readonly configPath: string;
  private readonly statsPath: string;
  private readonly command: string[];

  constructor(options: TokenizerOptions) {
    this.configPath = options.configPath;
    this.statsPath = options.statsPath;
    this.command = options.command ?? defaultCommand();
  }

  /** Tokenize a trajectory file in place; returns nothing, writes outputPath. */
  encodeFile(inputPath: string, outputPath: string, stream = false): void {
    const args = [
      "tokenize",
      "--config", this.configPath,
      "--stats", this.statsPath,
      "--input", inputPath,
      "--output", outputPath,
    ];
    if (stream) args.push("--stream");
    runCli(this.command, args);
  }

  /** Reconstruct a token file in place; writes outputPath. */
  decodeFile(inputPath: string, outputPath: string): void {
    runCli(this.command, [
      "detokenize",
      "--config", this.configPath,
      "--stats", this.statsPath,
      "--input", inputPath,
      "--output", outputPath,
    ]);
  }

  /** Tokenize a batch of in-memory trajectories. */
  encodeBatch(trajectories: Trajectory[], stream = false): TokenChunk[] {
    return withTempDir((dir) => {
      const input = join(dir, "input.jsonl");
      const output = join(dir, "tokens.jsonl");
      writeTrajectoriesJsonl(input, trajectories);
      this.encodeFile(input, output, stream);
      return readTokensJsonl(output);
    });
  }

  /** Reconstruct trajectories from in-memory token chunks. */
  decodeBatch(chunks: TokenChunk[]): Trajectory[] {
    return withTempDir((dir) => {
      const input = join(dir, "tokens.jsonl");
      const output = join(dir, "recon.jsonl");
      writeTokensJsonl(input, chunks);
      this.decodeFile(input, output);
      return readTrajectoriesJsonl(output);
    });
  }

  /** Tokenize a single (T x D) trajectory; returns its token chunks. */
  encode(actions: number[][], stream = false): TokenChunk[] {
    return this.encodeBatch([{ id: "traj", actions }], stream);
  }

  /** Reconstruct a single trajectory from its token chunks. */
  decode(chunks: TokenChunk[]): number[][] {
    const out = this.decodeBatch(chunks);
    if (out.length !== 1) {
      throw new Error(`expected a single trajectory, got ${out.length}`);
    }
    return out[0].actions;
  }
}
