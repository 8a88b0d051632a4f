/** Batched prediction over a dataset file, written as an "NDP1" file. */

import * as tf from "@tensorflow/tfjs";

import { ConfigError } from "./config.js";
import { DatasetFile, writePredictions } from "./datafmt.js";

export function predictDataset(model: tf.LayersModel, dataPath: string,
                               batchSize = 4096): Float32Array {
  const file = new DatasetFile(dataPath);
  try {
    const h = file.header;
    const wanted = model.inputs[0].shape.slice(1);
    if (wanted.length === 3
        && (wanted[0] !== h.m || wanted[1] !== h.omega || wanted[2] !== h.units)) {
      throw new ConfigError(`model expects (${wanted}) but dataset groups are `
        + `(${h.m}, ${h.omega}, ${h.units})`);
    }
    const out = new Float32Array(h.groupCount);
    for (let start = 0; start < h.groupCount; start += batchSize) {
      const count = Math.min(batchSize, h.groupCount - start);
      const flat = file.tensorRows(start, count);
      const probs = tf.tidy(() => {
        const xs = tf.tensor4d(flat, [count, h.m, h.omega, h.units]);
        const p = model.predict(xs, { batchSize: count }) as tf.Tensor;
        return p.reshape([count]).clipByValue(0, 1);
      });
      out.set(probs.dataSync() as Float32Array, start);
      probs.dispose();
    }
    return out;
  } finally {
    file.close();
  }
}

export function predictToFile(model: tf.LayersModel, dataPath: string,
                              outPath: string, batchSize = 4096): Float32Array {
  const preds = predictDataset(model, dataPath, batchSize);
  writePredictions(outPath, preds);
  return preds;
}
