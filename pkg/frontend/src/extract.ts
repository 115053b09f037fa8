/**
 * End-to-end feature extraction: read the MNIST IDX files, train the
 * stack, then stream 625-dim feature records for the train, test and
 * combined sets into #dtm-features files.
 */

import * as path from "node:path";
import { existsSync } from "node:fs";
import * as tf from "@tensorflow/tfjs";

import { readIdxImages, readIdxLabels, IdxImages } from "./idx";
import {
  ARCHITECTURE,
  ExtractorModel,
  FEATURE_DIM,
  IMAGE_SIDE,
  buildModel,
  evaluateAccuracy,
  extractFeatures,
  imagesToTensor,
  trainExtractor,
} from "./model";
import {
  FeatureFileWriter,
  FeatureRange,
  Rescale,
  planRescale,
} from "./featureFile";

export interface MnistSplit {
  images: IdxImages;
  labels: Uint8Array;
}

export interface MnistData {
  train: MnistSplit;
  test: MnistSplit;
}

const TRAIN_IMAGES = "train-images-idx3-ubyte";
const TRAIN_LABELS = "train-labels-idx1-ubyte";
const TEST_IMAGES = "t10k-images-idx3-ubyte";
const TEST_LABELS = "t10k-labels-idx1-ubyte";

function resolveIdx(dir: string, name: string): string {
  for (const candidate of [name, `${name}.gz`]) {
    const full = path.join(dir, candidate);
    if (existsSync(full)) return full;
  }
  throw new Error(`missing ${name}[.gz] under ${dir}`);
}

function loadSplit(dir: string, imagesName: string, labelsName: string,
                   limit?: number): MnistSplit {
  const images = readIdxImages(resolveIdx(dir, imagesName));
  const labels = readIdxLabels(resolveIdx(dir, labelsName));
  if (images.count !== labels.length) {
    throw new Error(
      `${imagesName}: ${images.count} images but ${labels.length} labels`
    );
  }
  if (limit !== undefined && limit < images.count) {
    const size = images.rows * images.cols;
    return {
      images: { ...images, count: limit, pixels: images.pixels.subarray(0, limit * size) },
      labels: labels.subarray(0, limit),
    };
  }
  return { images, labels };
}

export function loadMnist(dir: string, limitTrain?: number, limitTest?: number): MnistData {
  return {
    train: loadSplit(dir, TRAIN_IMAGES, TRAIN_LABELS, limitTrain),
    test: loadSplit(dir, TEST_IMAGES, TEST_LABELS, limitTest),
  };
}

export interface ExtractorConfig {
  dataDir: string;
  epochs: number;
  batchSize: number;
  seed: number;
  outTrain?: string;
  outTest?: string;
  outAll?: string;
  limitTrain?: number;
  limitTest?: number;
  log?: (message: string) => void;
}

/**
 * Feature-range scan: min/max of the feature layer over a split, in
 * batches so the full corpus never lives in tensors at once.
 */
export function observeRange(
  model: ExtractorModel,
  split: MnistSplit,
  batch = 512
): { min: number; max: number } {
  let min = Number.POSITIVE_INFINITY;
  let max = Number.NEGATIVE_INFINITY;
  for (const { features } of featureBatches(model, split, batch)) {
    for (const v of features) {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  return { min, max };
}

function* featureBatches(
  model: ExtractorModel,
  split: MnistSplit,
  batch: number
): Generator<{ features: Float32Array; offset: number; count: number }> {
  const { rows, cols } = split.images;
  const size = rows * cols;
  for (let offset = 0; offset < split.images.count; offset += batch) {
    const count = Math.min(batch, split.images.count - offset);
    const tensor = imagesToTensor(
      split.images.pixels.subarray(offset * size, (offset + count) * size),
      count, rows, cols
    );
    try {
      yield { features: extractFeatures(model, tensor), offset, count };
    } finally {
      tensor.dispose();
    }
  }
}

export async function exportSplit(
  model: ExtractorModel,
  split: MnistSplit,
  out: string,
  range: FeatureRange,
  rescale: Rescale,
  comments: string[],
  batch = 512
): Promise<void> {
  const writer = new FeatureFileWriter(out, FEATURE_DIM, range, comments);
  for (const { features, offset, count } of featureBatches(model, split, batch)) {
    for (let i = 0; i < count; i++) {
      await writer.writeRecord(
        split.labels[offset + i],
        features.subarray(i * FEATURE_DIM, (i + 1) * FEATURE_DIM),
        rescale
      );
    }
  }
  await writer.close();
}

export async function runExtraction(config: ExtractorConfig): Promise<void> {
  const log = config.log ?? ((message: string) => console.log(message));
  const data = loadMnist(config.dataDir, config.limitTrain, config.limitTest);
  if (data.train.images.rows !== IMAGE_SIDE || data.train.images.cols !== IMAGE_SIDE) {
    throw new Error(
      `expected ${IMAGE_SIDE}x${IMAGE_SIDE} images, got ` +
      `${data.train.images.rows}x${data.train.images.cols}`
    );
  }
  log(`loaded ${data.train.images.count} train / ${data.test.images.count} test images`);

  const model = buildModel(config.seed);
  const trainTensor = imagesToTensor(
    data.train.images.pixels, data.train.images.count
  );
  try {
    log(`training for ${config.epochs} epochs (batch ${config.batchSize})`);
    await trainExtractor(model, trainTensor, data.train.labels, {
      epochs: config.epochs,
      batchSize: config.batchSize,
    });
  } finally {
    trainTensor.dispose();
  }

  const testTensor = imagesToTensor(data.test.images.pixels, data.test.images.count);
  try {
    const accuracy = evaluateAccuracy(model, testTensor, data.test.labels);
    log(`held-out classification accuracy: ${(accuracy * 100).toFixed(2)}%`);
  } finally {
    testTensor.dispose();
  }

  const range: FeatureRange = { lo: 0, hi: 10 };
  const trainRange = observeRange(model, data.train);
  const testRange = observeRange(model, data.test);
  const rescale = planRescale(
    Math.min(trainRange.min, testRange.min),
    Math.max(trainRange.max, testRange.max),
    range
  );
  const comments = [
    `architecture: ${ARCHITECTURE}`,
    `seed: ${config.seed} epochs: ${config.epochs} batch: ${config.batchSize}`,
  ];
  if (rescale.applied) {
    comments.push(
      `rescale: linear [${rescale.observedMin}, ${rescale.observedMax}] -> ` +
      `[${range.lo}, ${range.hi}] (v*${rescale.scale}+${rescale.offset})`
    );
    log(comments[comments.length - 1]);
  }

  if (config.outTrain) {
    await exportSplit(model, data.train, config.outTrain, range, rescale, comments);
    log(`wrote ${data.train.images.count} records to ${config.outTrain}`);
  }
  if (config.outTest) {
    await exportSplit(model, data.test, config.outTest, range, rescale, comments);
    log(`wrote ${data.test.images.count} records to ${config.outTest}`);
  }
  if (config.outAll) {
    const all: MnistSplit = {
      images: {
        count: data.train.images.count + data.test.images.count,
        rows: IMAGE_SIDE,
        cols: IMAGE_SIDE,
        pixels: concat(data.train.images.pixels, data.test.images.pixels),
      },
      labels: concat(data.train.labels, data.test.labels),
    };
    await exportSplit(model, all, config.outAll, range, rescale, comments);
    log(`wrote ${all.images.count} records to ${config.outAll}`);
  }
}

function concat(a: Uint8Array, b: Uint8Array): Uint8Array {
  const out = new Uint8Array(a.length + b.length);
  out.set(a, 0);
  out.set(b, a.length);
  return out;
}
