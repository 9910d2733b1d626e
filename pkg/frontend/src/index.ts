/**
 * Client for the timeseg reward engine. All scoring goes through the
 * engine's CLI (`timeseg score` / `timeseg --version`), so results are
 * identical to what the engine produces on its own, record for record.
 */

import { execFile } from 'node:child_process';
import { mkdtemp, rm, writeFile } from 'node:fs/promises';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { promisify } from 'node:util';

const execFileAsync = promisify(execFile);

/** Closed [start, end] interval in seconds. */
export type SegmentPair = [number, number];

export interface BatchItem {
  /** Ground-truth segments for this sample. */
  gt: SegmentPair[];
  /** Raw model output text to score. */
  rawOutput: string;
}

export interface RewardConfigOverrides {
  alpha?: number;
  beta?: number;
  strategy?: 'sequential' | 'maximum' | 'global';
  phaseSwitchStep?: number;
  timestampTolerance?: number;
}

export interface BatchRewardRequest {
  items: BatchItem[];
  /** Training step used for phase selection (default 1). */
  step?: number;
  config?: RewardConfigOverrides;
}

/** Field names match the engine's wire format exactly. */
export interface RewardBreakdown {
  r_global: number;
  r_local: number | null;
  r_match: number;
  r_timestamp: number;
  r_format: number;
  total: number;
  phase: number;
}

/** A request item the engine could not score; index points into items. */
export class BatchItemError extends Error {
  readonly index: number;

  constructor(index: number, message: string) {
    super(`item ${index}: ${message}`);
    this.name = 'BatchItemError';
    this.index = index;
  }
}

function cliCommand(): string {
  return process.env.TIMESEG_CLI ?? 'timeseg';
}

function configArgs(config?: RewardConfigOverrides): string[] {
  if (!config) return [];
  const args: string[] = [];
  if (config.alpha !== undefined) args.push('--alpha', String(config.alpha));
  if (config.beta !== undefined) args.push('--beta', String(config.beta));
  if (config.strategy !== undefined) args.push('--strategy', config.strategy);
  if (config.phaseSwitchStep !== undefined) args.push('--phase-switch', String(config.phaseSwitchStep));
  if (config.timestampTolerance !== undefined) args.push('--tolerance', String(config.timestampTolerance));
  return args;
}

function validateRequest(req: BatchRewardRequest): void {
  if (!Array.isArray(req.items) || req.items.length === 0) {
    throw new Error('batch request needs a non-empty items list');
  }
  req.items.forEach((item, index) => {
    if (typeof item.rawOutput !== 'string') {
      throw new BatchItemError(index, 'rawOutput must be a string');
    }
    if (!Array.isArray(item.gt)) {
      throw new BatchItemError(index, 'gt must be a list of [start, end] pairs');
    }
    for (const pair of item.gt) {
      if (
        !Array.isArray(pair) ||
        pair.length !== 2 ||
        !pair.every((v) => typeof v === 'number' && Number.isFinite(v) && v >= 0)
      ) {
        throw new BatchItemError(index, `invalid segment ${JSON.stringify(pair)}`);
      }
      if (pair[0] > pair[1]) {
        throw new BatchItemError(index, `segment end precedes start: ${JSON.stringify(pair)}`);
      }
    }
  });
}

interface ScoredLine extends RewardBreakdown {
  id?: string;
  line?: number;
  error?: string;
  summary?: unknown;
}

function parseScoreOutput(stdout: string, expected: number): RewardBreakdown[] {
  const byIndex = new Map<number, RewardBreakdown>();
  for (const line of stdout.split('\n')) {
    if (!line.trim()) continue;
    const parsed = JSON.parse(line) as ScoredLine;
    if (parsed.summary !== undefined) continue;
    if (parsed.error !== undefined) {
      const index = parsed.line !== undefined ? parsed.line - 1 : -1;
      throw new BatchItemError(index, parsed.error);
    }
    const { id, ...breakdown } = parsed;
    byIndex.set(Number(id), breakdown as RewardBreakdown);
  }
  if (byIndex.size !== expected) {
    throw new Error(`engine returned ${byIndex.size} records, expected ${expected}`);
  }
  return Array.from({ length: expected }, (_, i) => {
    const breakdown = byIndex.get(i);
    if (!breakdown) throw new Error(`engine output is missing record ${i}`);
    return breakdown;
  });
}

async function runCli(args: string[]): Promise<string> {
  try {
    const { stdout } = await execFileAsync(cliCommand(), args, { maxBuffer: 64 * 1024 * 1024 });
    return stdout;
  } catch (error) {
    // Nonzero exit still carries the per-record stream; surface record errors
    // as BatchItemError instead of a bare process failure.
    const stdout = (error as { stdout?: string }).stdout;
    if (typeof stdout === 'string' && stdout.length > 0) {
      return stdout;
    }
    throw error;
  }
}

/**
 * Score a batch of (ground truth, raw output) pairs at one training step.
 * Element i of the result is exactly what the engine reports for pair i.
 */
export async function batchComputeRewards(req: BatchRewardRequest): Promise<RewardBreakdown[]> {
  validateRequest(req);
  const dir = await mkdtemp(join(tmpdir(), 'timeseg-client-'));
  try {
    const inputPath = join(dir, 'batch.jsonl');
    const lines = req.items.map((item, index) =>
      JSON.stringify({ id: String(index), gt: item.gt, raw_output: item.rawOutput }),
    );
    await writeFile(inputPath, lines.join('\n') + '\n', 'utf8');
    const args = ['score', inputPath, '--step', String(req.step ?? 1), ...configArgs(req.config)];
    const stdout = await runCli(args);
    return parseScoreOutput(stdout, req.items.length);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

/** Version of the underlying engine, as reported by its CLI. */
export async function versionInfo(): Promise<string> {
  const stdout = await runCli(['--version']);
  const text = stdout.trim();
  return text.startsWith('timeseg ') ? text.slice('timeseg '.length) : text;
}
