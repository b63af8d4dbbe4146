/**
 * Thin wrapper over the xstrat CLI for generating stratified train/test
 * partitions of multi-label data from Node/TypeScript.
 *
 * All logic lives in the core package: this module serializes labels to
 * the dataset-repository text format, invokes `xstrat split`, and parses
 * the assignment index back.  Results are therefore identical to running
 * the CLI by hand with the same data and seed.
 */

import { spawnSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

/** Sampler settings, mirroring the core's SamplerConfig field for field.
 *  Omitted fields fall back to the CLI defaults (50 epochs, threshold
 *  proportion 0.1, swap probability 0.1, decay 1.1, seed 0). */
export interface BindingConfig {
  targetTestSize: number;
  epochs?: number;
  thresholdProportion?: number;
  swapProbability?: number;
  decay?: number;
  seed?: number;
}

/** Minimal CSR form: labels of point i are indices[indptr[i]..indptr[i+1]). */
export interface SparseLabelMatrix {
  indptr: number[];
  indices: number[];
}

export type LabelInput = number[][] | SparseLabelMatrix;

/** Point indices assigned to train and to test, each ascending. */
export type SplitIndices = [number[], number[]];

function isSparse(labels: LabelInput): labels is SparseLabelMatrix {
  return !Array.isArray(labels);
}

function toLabelLists(labels: LabelInput): number[][] {
  if (!isSparse(labels)) {
    return labels;
  }
  const { indptr, indices } = labels;
  if (indptr.length === 0 || indptr[0] !== 0 ||
      indptr[indptr.length - 1] !== indices.length) {
    throw new Error('malformed sparse labels: indptr must start at 0 and end at indices.length');
  }
  const lists: number[][] = [];
  for (let i = 0; i + 1 < indptr.length; i++) {
    const start = indptr[i]!;
    const end = indptr[i + 1]!;
    if (end < start) {
      throw new Error(`malformed sparse labels: indptr decreases at row ${i}`);
    }
    lists.push(indices.slice(start, end));
  }
  return lists;
}

function serializeDataset(lists: number[][], numLabels: number): string {
  const lines = [`${lists.length} 0 ${numLabels}`];
  for (const labels of lists) {
    for (const id of labels) {
      if (!Number.isInteger(id) || id < 0 || id >= numLabels) {
        throw new Error(`label id ${id} outside [0, ${numLabels})`);
      }
    }
    lines.push(labels.join(','));
  }
  return lines.join('\n') + '\n';
}

function commandLine(): string[] {
  const override = process.env.XSTRAT_BIN;
  const parts = override ? override.split(/\s+/).filter(Boolean) : ['xstrat'];
  if (parts.length === 0) {
    throw new Error('XSTRAT_BIN is set but empty');
  }
  return parts;
}

function runCli(args: string[]): void {
  const [cmd, ...prefix] = commandLine();
  const result = spawnSync(cmd!, [...prefix, ...args], { encoding: 'utf-8' });
  if (result.error) {
    throw new Error(
      `could not run ${cmd}: ${result.error.message}; ` +
      'install the core package or point XSTRAT_BIN at the CLI');
  }
  if (result.status !== 0) {
    const detail = (result.stderr || result.stdout || '').trim();
    throw new Error(`${cmd} exited with status ${result.status}: ${detail}`);
  }
}

function parseAssignmentIndex(text: string, numPoints: number): SplitIndices {
  const flags = text.split('\n').filter((line) => line.length > 0);
  if (flags.length !== numPoints) {
    throw new Error(`assignment index holds ${flags.length} flags for ${numPoints} points`);
  }
  const train: number[] = [];
  const test: number[] = [];
  flags.forEach((flag, i) => {
    if (flag === '0') {
      train.push(i);
    } else if (flag === '1') {
      test.push(i);
    } else {
      throw new Error(`assignment index line ${i + 1}: expected 0 or 1, got ${JSON.stringify(flag)}`);
    }
  });
  return [train, test];
}

/**
 * Partition points into train and test, stratified over their labels.
 *
 * @param labels per-point label-id lists, or a CSR triple of the same
 * @param config sampler settings; only targetTestSize is required
 * @param numLabels label-space size; defaults to max id + 1
 * @returns [trainIndices, testIndices], a partition of [0, n)
 */
export function stratifiedTrainTestSplit(
  labels: LabelInput,
  config: BindingConfig,
  numLabels?: number,
): SplitIndices {
  const lists = toLabelLists(labels);
  if (lists.length === 0) {
    throw new Error('empty input: no points to split');
  }
  if (typeof config.targetTestSize !== 'number' || !Number.isFinite(config.targetTestSize)) {
    throw new Error(`targetTestSize must be a finite number, got ${config.targetTestSize}`);
  }
  const inferred = 1 + lists.reduce(
    (hi, ls) => ls.reduce((h, id) => Math.max(h, id), hi), 0);
  const labelSpace = numLabels ?? inferred;

  const workDir = fs.mkdtempSync(path.join(os.tmpdir(), 'xstrat-'));
  try {
    const dataPath = path.join(workDir, 'data.txt');
    const indexPath = path.join(workDir, 'index.txt');
    fs.writeFileSync(dataPath, serializeDataset(lists, labelSpace), 'utf-8');

    const args = [
      'split', '--input', dataPath, '--method', 'stratified',
      '--test-size', String(config.targetTestSize),
      '--out-index', indexPath,
    ];
    if (config.epochs !== undefined) args.push('--epochs', String(config.epochs));
    if (config.thresholdProportion !== undefined) {
      args.push('--threshold-proportion', String(config.thresholdProportion));
    }
    if (config.swapProbability !== undefined) {
      args.push('--swap-probability', String(config.swapProbability));
    }
    if (config.decay !== undefined) args.push('--decay', String(config.decay));
    if (config.seed !== undefined) args.push('--seed', String(config.seed));
    runCli(args);

    return parseAssignmentIndex(fs.readFileSync(indexPath, 'utf-8'), lists.length);
  } finally {
    fs.rmSync(workDir, { recursive: true, force: true });
  }
}

/** Snake-case alias for callers porting from the scripting-side API. */
export const stratified_train_test_split = stratifiedTrainTestSplit;
