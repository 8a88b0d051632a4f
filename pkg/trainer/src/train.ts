/**
 * Data loading and the basic training scheme: Adam on mean squared error
 * plus the L2 kernel penalty, a cyclic learning rate, one checkpoint per
 * epoch with the best-by-validation-loss network kept.
 */

import * as tf from "@tensorflow/tfjs";

import { TrainConfig } from "./config.js";
import { DatasetFile, DatasetHeader } from "./datafmt.js";
import { cyclicLr } from "./schedule.js";

export interface LoadedData {
  header: DatasetHeader;
  xs: tf.Tensor4D;
  ys: tf.Tensor1D;
}

export interface LoadOptions {
  /** take only the first `limit` groups */
  limit?: number;
  /** derange the labels against the tensors (no-signal control) */
  shuffleLabelsSeed?: number;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function loadData(path: string, opts: LoadOptions = {}): LoadedData {
  const file = new DatasetFile(path);
  try {
    const h = file.header;
    const n = Math.min(opts.limit ?? h.groupCount, h.groupCount);
    const flat = file.tensorRows(0, n);
    let labels = Float32Array.from(file.labels().subarray(0, n));
    if (opts.shuffleLabelsSeed !== undefined) {
      const rand = mulberry32(opts.shuffleLabelsSeed);
      for (let i = labels.length - 1; i > 0; i--) {
        const j = Math.floor(rand() * (i + 1));
        [labels[i], labels[j]] = [labels[j], labels[i]];
      }
    }
    const xs = tf.tensor4d(flat, [n, h.m, h.omega, h.units]);
    const ys = tf.tensor1d(labels);
    return { header: h, xs, ys };
  } finally {
    file.close();
  }
}

/** Streaming batches for datasets too large to hold as one tensor. */
export function streamingDataset(path: string, batchSize: number,
                                 shuffleBuffer = 0): {
  data: tf.data.Dataset<{ xs: tf.Tensor; ys: tf.Tensor }>;
  header: DatasetHeader;
  close: () => void;
} {
  const file = new DatasetFile(path);
  const h = file.header;
  const labels = file.labels();
  const batches = Math.ceil(h.groupCount / batchSize);
  let data = tf.data.generator(function* () {
    for (let b = 0; b < batches; b++) {
      const start = b * batchSize;
      const count = Math.min(batchSize, h.groupCount - start);
      const flat = file.tensorRows(start, count);
      yield {
        xs: tf.tensor4d(flat, [count, h.m, h.omega, h.units]),
        ys: tf.tensor1d(Float32Array.from(labels.subarray(start, start + count))),
      };
    }
  }) as tf.data.Dataset<{ xs: tf.Tensor; ys: tf.Tensor }>;
  if (shuffleBuffer > 1) data = data.shuffle(Math.ceil(shuffleBuffer / batchSize));
  return { data, header: h, close: () => file.close() };
}

export interface EpochRecord {
  epoch: number;
  lr: number;
  loss: number;
  valLoss: number;
  valAccuracy: number;
}

export interface TrainResult {
  history: EpochRecord[];
  bestEpoch: number;
  bestValLoss: number;
}

function setLearningRate(model: tf.LayersModel, lr: number): void {
  // AdamOptimizer keeps learningRate as a plain mutable field; adjusting it
  // between epochs preserves the moment estimates.
  (model.optimizer as unknown as { learningRate: number }).learningRate = lr;
}

export function epochLearningRate(cfg: TrainConfig, epoch: number): number {
  return cfg.lrConstant ?? cyclicLr(epoch, cfg.lrAlpha, cfg.lrBeta, cfg.lrPeriod);
}

export async function trainBasic(model: tf.LayersModel, train: LoadedData,
                                 val: LoadedData, cfg: TrainConfig,
                                 quiet = true): Promise<TrainResult> {
  model.compile({
    optimizer: tf.train.adam(epochLearningRate(cfg, 0)),
    loss: "meanSquaredError",
    metrics: ["binaryAccuracy"],
  });
  const history: EpochRecord[] = [];
  let bestValLoss = Infinity;
  let bestEpoch = -1;
  let bestWeights: tf.Tensor[] | null = null;

  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    const lr = epochLearningRate(cfg, epoch);
    setLearningRate(model, lr);
    const out = await model.fit(train.xs, train.ys, {
      epochs: 1,
      batchSize: cfg.batchSize,
      validationData: [val.xs, val.ys],
      verbose: 0,
      shuffle: true,
    });
    const loss = Number(out.history["loss"]?.[0] ?? NaN);
    const valLoss = Number(out.history["val_loss"]?.[0] ?? NaN);
    const valAcc = Number(out.history["val_binaryAccuracy"]?.[0] ?? NaN);
    history.push({ epoch, lr, loss, valLoss, valAccuracy: valAcc });
    if (!quiet) {
      console.log(`epoch ${epoch}: lr=${lr.toExponential(2)} loss=${loss.toFixed(5)} `
        + `val_loss=${valLoss.toFixed(5)} val_acc=${valAcc.toFixed(4)}`);
    }
    if (valLoss < bestValLoss) {
      bestValLoss = valLoss;
      bestEpoch = epoch;
      if (bestWeights) bestWeights.forEach((w) => w.dispose());
      bestWeights = model.getWeights().map((w) => w.clone());
    }
  }
  if (bestWeights) {
    model.setWeights(bestWeights);
    bestWeights.forEach((w) => w.dispose());
  }
  return { history, bestEpoch, bestValLoss };
}

/** Streaming variant for datasets that do not fit in memory. */
export async function trainBasicStreaming(model: tf.LayersModel, trainPath: string,
                                          valPath: string, cfg: TrainConfig,
                                          quiet = true): Promise<TrainResult> {
  model.compile({
    optimizer: tf.train.adam(epochLearningRate(cfg, 0)),
    loss: "meanSquaredError",
    metrics: ["binaryAccuracy"],
  });
  const history: EpochRecord[] = [];
  let bestValLoss = Infinity;
  let bestEpoch = -1;
  let bestWeights: tf.Tensor[] | null = null;
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    const lr = epochLearningRate(cfg, epoch);
    setLearningRate(model, lr);
    const train = streamingDataset(trainPath, cfg.batchSize, 32 * cfg.batchSize);
    const val = streamingDataset(valPath, cfg.batchSize);
    try {
      const out = await model.fitDataset(train.data, {
        epochs: 1,
        validationData: val.data,
        verbose: 0,
      });
      const loss = Number(out.history["loss"]?.[0] ?? NaN);
      const valLoss = Number(out.history["val_loss"]?.[0] ?? NaN);
      const valAcc = Number(out.history["val_binaryAccuracy"]?.[0] ?? NaN);
      history.push({ epoch, lr, loss, valLoss, valAccuracy: valAcc });
      if (!quiet) {
        console.log(`epoch ${epoch}: lr=${lr.toExponential(2)} loss=${loss.toFixed(5)} `
          + `val_loss=${valLoss.toFixed(5)} val_acc=${valAcc.toFixed(4)}`);
      }
      if (valLoss < bestValLoss) {
        bestValLoss = valLoss;
        bestEpoch = epoch;
        if (bestWeights) bestWeights.forEach((w) => w.dispose());
        bestWeights = model.getWeights().map((w) => w.clone());
      }
    } finally {
      train.close();
      val.close();
    }
  }
  if (bestWeights) {
    model.setWeights(bestWeights);
    bestWeights.forEach((w) => w.dispose());
  }
  return { history, bestEpoch, bestValLoss };
}

/** Trainer-side accuracy with the same tie rule as the evaluator. */
export function accuracyOf(labels: ArrayLike<number>, preds: ArrayLike<number>,
                           threshold = 0.5): number {
  let hits = 0;
  for (let i = 0; i < labels.length; i++) {
    const positive = preds[i] >= threshold ? 1 : 0;
    if (positive === labels[i]) hits++;
  }
  return hits / labels.length;
}

export function predict(model: tf.LayersModel, xs: tf.Tensor4D,
                        batchSize = 4096): Float32Array {
  const out = tf.tidy(() => {
    const p = model.predict(xs, { batchSize }) as tf.Tensor;
    return p.reshape([xs.shape[0]]).clipByValue(0, 1);
  });
  const values = out.dataSync() as Float32Array;
  out.dispose();
  return values;
}
