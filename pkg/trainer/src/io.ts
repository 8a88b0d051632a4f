/**
 * Model persistence without a native filesystem handler: a model directory
 * holds model.json (topology + weight specs), weights.bin, and config.json
 * (the network/training configuration sidecar).
 */

import * as fs from "node:fs";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

function joinBuffers(data: ArrayBuffer | ArrayBuffer[]): ArrayBuffer {
  if (!Array.isArray(data)) return data;
  const total = data.reduce((n, b) => n + b.byteLength, 0);
  const out = new Uint8Array(total);
  let at = 0;
  for (const buf of data) {
    out.set(new Uint8Array(buf), at);
    at += buf.byteLength;
  }
  return out.buffer;
}

export async function saveModel(model: tf.LayersModel, dir: string,
                                sidecar?: unknown): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  const artifacts = await new Promise<tf.io.ModelArtifacts>((resolve, reject) => {
    model.save(tf.io.withSaveHandler(async (a) => {
      resolve(a);
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: "JSON" } };
    })).catch(reject);
  });
  const weightData = joinBuffers(artifacts.weightData as ArrayBuffer | ArrayBuffer[]);
  fs.writeFileSync(path.join(dir, "weights.bin"), Buffer.from(weightData));
  fs.writeFileSync(path.join(dir, "model.json"), JSON.stringify({
    modelTopology: artifacts.modelTopology,
    weightSpecs: artifacts.weightSpecs,
  }));
  if (sidecar !== undefined) {
    fs.writeFileSync(path.join(dir, "config.json"), JSON.stringify(sidecar, null, 2));
  }
}

export async function loadModel(dir: string): Promise<tf.LayersModel> {
  const meta = JSON.parse(fs.readFileSync(path.join(dir, "model.json"), "utf8"));
  const weights = fs.readFileSync(path.join(dir, "weights.bin"));
  return tf.loadLayersModel(tf.io.fromMemory({
    modelTopology: meta.modelTopology,
    weightSpecs: meta.weightSpecs,
    weightData: weights.buffer.slice(weights.byteOffset,
                                     weights.byteOffset + weights.byteLength),
  }));
}

export function loadSidecar(dir: string): unknown {
  const file = path.join(dir, "config.json");
  return fs.existsSync(file) ? JSON.parse(fs.readFileSync(file, "utf8")) : undefined;
}
