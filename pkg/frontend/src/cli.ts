#!/usr/bin/env node
/**
 * mnist-extract extract --data-dir mnist/ --epochs 3 --out-all all.feats
 * mnist-extract synth --out-dir fake-mnist/ --train 200 --test 40
 *
 * `extract` trains the CNN and exports feature files; `synth` writes tiny
 * synthetic IDX files shaped like MNIST for offline dry runs.
 */

import { parseArgs } from "node:util";
import { mkdirSync } from "node:fs";
import * as path from "node:path";

import { runExtraction } from "./extract";
import { writeIdxImages, writeIdxLabels } from "./idx";

function intFlag(value: string | undefined, fallback: number, name: string): number {
  if (value === undefined) return fallback;
  const parsed = Number(value);
  if (!Number.isInteger(parsed) || parsed < 0) {
    throw new UsageError(`--${name} must be a non-negative integer, got ${value}`);
  }
  return parsed;
}

class UsageError extends Error {}

async function cmdExtract(argv: string[]): Promise<void> {
  const { values } = parseArgs({
    args: argv,
    options: {
      "data-dir": { type: "string" },
      epochs: { type: "string" },
      "batch-size": { type: "string" },
      seed: { type: "string" },
      "out-train": { type: "string" },
      "out-test": { type: "string" },
      "out-all": { type: "string" },
      "limit-train": { type: "string" },
      "limit-test": { type: "string" },
    },
  });
  if (!values["data-dir"]) {
    throw new UsageError("--data-dir is required");
  }
  if (!values["out-train"] && !values["out-test"] && !values["out-all"]) {
    throw new UsageError("need at least one of --out-train/--out-test/--out-all");
  }
  await runExtraction({
    dataDir: values["data-dir"],
    epochs: intFlag(values.epochs, 3, "epochs"),
    batchSize: Math.max(1, intFlag(values["batch-size"], 128, "batch-size")),
    seed: intFlag(values.seed, 1, "seed"),
    outTrain: values["out-train"],
    outTest: values["out-test"],
    outAll: values["out-all"],
    limitTrain: values["limit-train"] ? intFlag(values["limit-train"], 0, "limit-train") : undefined,
    limitTest: values["limit-test"] ? intFlag(values["limit-test"], 0, "limit-test") : undefined,
  });
}

/** Blobby per-digit stripes: enough structure for a dry run, no dataset. */
function synthesize(count: number, seed: number): { pixels: Uint8Array; labels: Uint8Array } {
  const pixels = new Uint8Array(count * 28 * 28);
  const labels = new Uint8Array(count);
  let state = seed >>> 0 || 1;
  const rand = () => {
    // xorshift32: deterministic and dependency-free
    state ^= state << 13; state >>>= 0;
    state ^= state >> 17;
    state ^= state << 5; state >>>= 0;
    return state / 0xffffffff;
  };
  for (let i = 0; i < count; i++) {
    const digit = i % 10;
    labels[i] = digit;
    const base = i * 784;
    for (let p = 0; p < 784; p++) {
      const row = Math.floor(p / 28);
      const col = p % 28;
      // one vertical band per class, plus a shared horizontal anchor
      const on =
        (col >= 2 + digit * 2 && col < 5 + digit * 2) ||
        (row >= 12 && row < 14 && col < 8);
      pixels[base + p] = on ? 180 + Math.floor(rand() * 75) : Math.floor(rand() * 30);
    }
  }
  return { pixels, labels };
}

async function cmdSynth(argv: string[]): Promise<void> {
  const { values } = parseArgs({
    args: argv,
    options: {
      "out-dir": { type: "string" },
      train: { type: "string" },
      test: { type: "string" },
      seed: { type: "string" },
    },
  });
  if (!values["out-dir"]) {
    throw new UsageError("--out-dir is required");
  }
  const outDir = values["out-dir"];
  const nTrain = intFlag(values.train, 200, "train");
  const nTest = intFlag(values.test, 40, "test");
  const seed = intFlag(values.seed, 7, "seed");
  mkdirSync(outDir, { recursive: true });
  const train = synthesize(nTrain, seed);
  const test = synthesize(nTest, seed + 1);
  writeIdxImages(path.join(outDir, "train-images-idx3-ubyte"), train.pixels, nTrain, 28, 28);
  writeIdxLabels(path.join(outDir, "train-labels-idx1-ubyte"), train.labels);
  writeIdxImages(path.join(outDir, "t10k-images-idx3-ubyte"), test.pixels, nTest, 28, 28);
  writeIdxLabels(path.join(outDir, "t10k-labels-idx1-ubyte"), test.labels);
  console.log(`wrote synthetic IDX files (${nTrain} train, ${nTest} test) to ${outDir}`);
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  try {
    if (command === "extract") {
      await cmdExtract(rest);
    } else if (command === "synth") {
      await cmdSynth(rest);
    } else {
      throw new UsageError(
        `unknown command ${JSON.stringify(command ?? "")} (expected extract|synth)`
      );
    }
    return 0;
  } catch (err) {
    if (err instanceof UsageError || (err as { code?: string }).code === "ERR_PARSE_ARGS_UNKNOWN_OPTION") {
      console.error(`mnist-extract: usage error: ${(err as Error).message}`);
      return 2;
    }
    console.error(`mnist-extract: error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
