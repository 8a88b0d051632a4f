/**
 * The distinguisher network: three parallel initial convolutions of
 * different kernel sizes concatenated on channels (width-1 for bit-sliced
 * functions, wider ones for shift/addition structure), a stack of
 * two-convolution residual blocks whose kernel grows by 2 per block, and
 * a global-average-pooled sigmoid head.
 */

import * as tf from "@tensorflow/tfjs";

import { ConfigError, NetConfig, validateNetConfig } from "./config.js";

export function buildNetwork(cfg: NetConfig): tf.LayersModel {
  validateNetConfig(cfg);
  const [m, omega, units] = cfg.inputShape;
  const reg = cfg.l2 > 0 ? tf.regularizers.l2({ l2: cfg.l2 }) : undefined;
  const input = tf.input({ shape: [m, omega, units], name: "groups" });
  let layerSeed = cfg.seed;
  const init = () => tf.initializers.glorotUniform({ seed: layerSeed++ });

  let x: tf.SymbolicTensor;
  const conv = (t: tf.SymbolicTensor, filters: number, kernel: number,
                name: string): tf.SymbolicTensor => {
    if (cfg.pairMode === "channels") {
      return tf.layers.conv1d({
        filters, kernelSize: kernel, padding: "same",
        kernelRegularizer: reg, kernelInitializer: init(), name,
      }).apply(t) as tf.SymbolicTensor;
    }
    return tf.layers.conv2d({
      filters, kernelSize: [1, kernel], padding: "same",
      kernelRegularizer: reg, kernelInitializer: init(), name,
    }).apply(t) as tf.SymbolicTensor;
  };

  if (cfg.pairMode === "channels") {
    // fold the m pairs into channels so one convolution sees all of them
    x = tf.layers.permute({ dims: [2, 1, 3], name: "pairs_last" })
      .apply(input) as tf.SymbolicTensor;
    x = tf.layers.reshape({ targetShape: [omega, m * units], name: "fold_pairs" })
      .apply(x) as tf.SymbolicTensor;
  } else {
    x = input; // (m, omega, units): per-pair towers over a (1, k) kernel
  }

  const branches = cfg.kernelTriple.map((k, i) =>
    conv(x, cfg.nf, k, `initial_k${k}_b${i}`));
  x = tf.layers.concatenate({ axis: -1, name: "initial_concat" })
    .apply(branches) as tf.SymbolicTensor;
  x = tf.layers.batchNormalization({ name: "initial_bn" }).apply(x) as tf.SymbolicTensor;
  x = tf.layers.activation({ activation: "relu", name: "initial_relu" })
    .apply(x) as tf.SymbolicTensor;

  const width = 3 * cfg.nf;
  for (let b = 0; b < cfg.depth; b++) {
    const kernel = cfg.ks + 2 * b;
    let y = conv(x, width, kernel, `block${b}_conv1`);
    y = tf.layers.batchNormalization({ name: `block${b}_bn1` })
      .apply(y) as tf.SymbolicTensor;
    y = tf.layers.activation({ activation: "relu", name: `block${b}_relu1` })
      .apply(y) as tf.SymbolicTensor;
    y = conv(y, width, kernel, `block${b}_conv2`);
    y = tf.layers.batchNormalization({ name: `block${b}_bn2` })
      .apply(y) as tf.SymbolicTensor;
    y = tf.layers.activation({ activation: "relu", name: `block${b}_relu2` })
      .apply(y) as tf.SymbolicTensor;
    x = tf.layers.add({ name: `block${b}_skip` }).apply([x, y]) as tf.SymbolicTensor;
  }

  if (cfg.pairMode === "channels") {
    x = tf.layers.globalAveragePooling1d({ name: "gap" }).apply(x) as tf.SymbolicTensor;
  } else {
    x = tf.layers.globalAveragePooling2d({ name: "gap" }).apply(x) as tf.SymbolicTensor;
  }
  if (cfg.dropoutRate > 0) {
    x = tf.layers.dropout({ rate: cfg.dropoutRate, seed: cfg.seed,
                            name: "head_dropout" })
      .apply(x) as tf.SymbolicTensor;
  }
  const out = tf.layers.dense({
    units: 1, activation: "sigmoid", kernelRegularizer: reg,
    kernelInitializer: init(), name: "probability",
  }).apply(x) as tf.SymbolicTensor;

  return tf.model({ inputs: input, outputs: out });
}

/** Kernel size of residual block b, as built. */
export function blockKernel(cfg: NetConfig, block: number): number {
  if (block < 0 || block >= cfg.depth) throw new ConfigError(`no block ${block}`);
  return cfg.ks + 2 * block;
}
