/**
 * The perceptual stack: two convolutional layers followed by a 625-unit
 * fully connected stage whose activations are the exported features, plus
 * a 10-way softmax head used only to supervise training.
 */

import * as tf from "@tensorflow/tfjs";

export const FEATURE_DIM = 625;
export const NUM_CLASSES = 10;
export const IMAGE_SIDE = 28;

export const ARCHITECTURE =
  "conv5x5x8-relu-pool2-conv5x5x16-relu-pool2-dense625-relu (feature tap) -dense10-softmax";

export interface ExtractorModel {
  /** Full classifier, trained end to end. */
  classifier: tf.LayersModel;
  /** Input -> 625-unit feature layer. */
  features: tf.LayersModel;
}

export function buildModel(seed = 1): ExtractorModel {
  const init = (offset: number) =>
    tf.initializers.glorotUniform({ seed: seed + offset });

  const input = tf.input({ shape: [IMAGE_SIDE, IMAGE_SIDE, 1] });
  let x = tf.layers
    .conv2d({
      filters: 8,
      kernelSize: 5,
      activation: "relu",
      kernelInitializer: init(1),
    })
    .apply(input) as tf.SymbolicTensor;
  x = tf.layers.maxPooling2d({ poolSize: 2 }).apply(x) as tf.SymbolicTensor;
  x = tf.layers
    .conv2d({
      filters: 16,
      kernelSize: 5,
      activation: "relu",
      kernelInitializer: init(2),
    })
    .apply(x) as tf.SymbolicTensor;
  x = tf.layers.maxPooling2d({ poolSize: 2 }).apply(x) as tf.SymbolicTensor;
  x = tf.layers.flatten().apply(x) as tf.SymbolicTensor;
  const featureLayer = tf.layers
    .dense({
      units: FEATURE_DIM,
      activation: "relu",
      kernelInitializer: init(3),
      name: "feature_stage",
    })
    .apply(x) as tf.SymbolicTensor;
  const logits = tf.layers
    .dense({
      units: NUM_CLASSES,
      activation: "softmax",
      kernelInitializer: init(4),
      name: "classifier_head",
    })
    .apply(featureLayer) as tf.SymbolicTensor;

  const classifier = tf.model({ inputs: input, outputs: logits });
  const features = tf.model({ inputs: input, outputs: featureLayer });
  classifier.compile({
    optimizer: tf.train.adam(),
    loss: "sparseCategoricalCrossentropy",
    metrics: ["accuracy"],
  });
  return { classifier, features };
}

/** Pixels (uint8, row-major) to a normalized [0,1] NHWC tensor. */
export function imagesToTensor(
  pixels: Uint8Array,
  count: number,
  rows = IMAGE_SIDE,
  cols = IMAGE_SIDE
): tf.Tensor4D {
  return tf.tensor4d(pixels, [count, rows, cols, 1], "float32").div(255) as tf.Tensor4D;
}

export interface TrainOptions {
  epochs: number;
  batchSize: number;
}

/**
 * Supervised training of the whole stack. epochs=0 skips fitting (smoke
 * mode: untrained features are still exportable).
 */
export async function trainExtractor(
  model: ExtractorModel,
  images: tf.Tensor4D,
  labels: Uint8Array,
  opts: TrainOptions
): Promise<void> {
  if (opts.epochs <= 0) {
    return;
  }
  // the sparse crossentropy kernel floors its target, which requires floats
  const y = tf.tensor1d(labels, "float32");
  try {
    await model.classifier.fit(images, y, {
      epochs: opts.epochs,
      batchSize: opts.batchSize,
      verbose: 0,
    });
  } finally {
    y.dispose();
  }
}

/** Held-out classification accuracy of the trained head. */
export function evaluateAccuracy(
  model: ExtractorModel,
  images: tf.Tensor4D,
  labels: Uint8Array
): number {
  return tf.tidy(() => {
    const probs = model.classifier.predict(images) as tf.Tensor2D;
    const predicted = probs.argMax(1) as tf.Tensor1D;
    const truth = tf.tensor1d(labels, "int32");
    return predicted.equal(truth).mean().dataSync()[0];
  });
}

/**
 * Feature-layer activations for a batch of images, row-major
 * (count x FEATURE_DIM).
 */
export function extractFeatures(
  model: ExtractorModel,
  images: tf.Tensor4D
): Float32Array {
  return tf.tidy(() => {
    const out = model.features.predict(images) as tf.Tensor2D;
    return out.dataSync() as Float32Array;
  });
}
