import { execFile } from 'node:child_process';
import { promisify } from 'node:util';
import { describe, expect, it } from 'vitest';

import { BatchItemError, batchComputeRewards, versionInfo } from '../src/index.js';

const execFileAsync = promisify(execFile);

const PERFECT = '<think>from 2.00 to 4.00</think><answer>2.00-4.00</answer>';

describe('batchComputeRewards', () => {
  it('scores a perfect pair at both phases', async () => {
    const [phase1] = await batchComputeRewards({
      items: [{ gt: [[2, 4]], rawOutput: PERFECT }],
      step: 100,
    });
    expect(phase1.total).toBeCloseTo(3.0, 9);
    expect(phase1.phase).toBe(1);

    const [phase2] = await batchComputeRewards({
      items: [{ gt: [[2, 4]], rawOutput: PERFECT }],
      step: 500,
    });
    expect(phase2.total).toBeCloseTo(3.0, 9);
    expect(phase2.phase).toBe(2);
  }, 30_000);

  it('honors config overrides', async () => {
    const [scored] = await batchComputeRewards({
      items: [{ gt: [[2, 4]], rawOutput: PERFECT }],
      step: 100,
      config: { alpha: 0, strategy: 'global' },
    });
    expect(scored.total).toBeCloseTo(1.0, 9);
    expect(scored.r_local).toBeNull();
  }, 30_000);

  it('rejects an empty batch', async () => {
    await expect(batchComputeRewards({ items: [], step: 1 })).rejects.toThrow('non-empty');
  });

  it('names the offending item index on schema violations', async () => {
    const bad = {
      items: [
        { gt: [[0, 1]] as [number, number][], rawOutput: PERFECT },
        { gt: [[3, 1]] as [number, number][], rawOutput: PERFECT },
      ],
      step: 1,
    };
    const error = await batchComputeRewards(bad).catch((e: unknown) => e);
    expect(error).toBeInstanceOf(BatchItemError);
    expect((error as BatchItemError).index).toBe(1);
  });

  it('keeps malformed raw output as a scored record, not an error', async () => {
    const [scored] = await batchComputeRewards({
      items: [{ gt: [[0, 5]], rawOutput: 'not even tagged' }],
      step: 1,
    });
    expect(scored.r_format).toBe(0);
    expect(scored.total).toBe(0);
  }, 30_000);
});

describe('versionInfo', () => {
  it('reports the engine version exactly as the CLI does', async () => {
    const version = await versionInfo();
    expect(version).toMatch(/^\d+\.\d+\.\d+$/);
    const { stdout } = await execFileAsync(process.env.TIMESEG_CLI ?? 'timeseg', ['--version']);
    expect(`timeseg ${version}`).toBe(stdout.trim());
  }, 30_000);

  it('is stable across calls', async () => {
    expect(await versionInfo()).toBe(await versionInfo());
  }, 30_000);
});
