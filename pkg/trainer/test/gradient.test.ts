/**
 * Gradient sanity on a tiny network (nf=2, depth=1): tfjs's analytic
 * gradients are compared against central finite differences of an
 * independent float64 re-implementation of the forward pass.  Working in
 * float64 keeps the finite differences exact enough for a 1e-3 relative
 * comparison, which float32 loss evaluations cannot deliver; the mirror is
 * first checked to reproduce the float32 forward pass itself.
 */

import * as tf from "@tensorflow/tfjs";
import { beforeAll, describe, expect, it } from "vitest";

import { NetConfig, defaultNetConfig } from "../src/config.js";
import { buildNetwork } from "../src/network.js";

const BN_EPS = 1e-3; // tf.layers.batchNormalization default

type Mat = number[][]; // [time][channel]

function conv1dSame(x: Mat, kernel: number[][][], bias: number[]): Mat {
  const time = x.length;
  const k = kernel.length;
  const inCh = kernel[0].length;
  const outCh = kernel[0][0].length;
  const padLeft = Math.floor((k - 1) / 2);
  const out: Mat = [];
  for (let t = 0; t < time; t++) {
    const row = new Array(outCh).fill(0);
    for (let f = 0; f < outCh; f++) row[f] = bias[f];
    for (let dt = 0; dt < k; dt++) {
      const src = t + dt - padLeft;
      if (src < 0 || src >= time) continue;
      for (let c = 0; c < inCh; c++) {
        const v = x[src][c];
        if (v === 0) continue;
        for (let f = 0; f < outCh; f++) row[f] += v * kernel[dt][c][f];
      }
    }
    out.push(row);
  }
  return out;
}

function batchNormTraining(batch: Mat[], gamma: number[], beta: number[]): Mat[] {
  const ch = gamma.length;
  const count = batch.length * batch[0].length;
  const mean = new Array(ch).fill(0);
  for (const sample of batch) for (const row of sample) {
    for (let c = 0; c < ch; c++) mean[c] += row[c];
  }
  for (let c = 0; c < ch; c++) mean[c] /= count;
  const variance = new Array(ch).fill(0);
  for (const sample of batch) for (const row of sample) {
    for (let c = 0; c < ch; c++) variance[c] += (row[c] - mean[c]) ** 2;
  }
  for (let c = 0; c < ch; c++) variance[c] /= count;
  return batch.map((sample) => sample.map((row) => row.map((v, c) =>
    gamma[c] * (v - mean[c]) / Math.sqrt(variance[c] + BN_EPS) + beta[c])));
}

const relu = (m: Mat): Mat => m.map((row) => row.map((v) => Math.max(0, v)));

interface Weights { [name: string]: { shape: number[]; data: Float64Array } }

function kernel3d(w: Weights, name: string): number[][][] {
  const { shape, data } = w[name];
  const [k, inCh, outCh] = shape;
  const out: number[][][] = [];
  let i = 0;
  for (let a = 0; a < k; a++) {
    const plane: number[][] = [];
    for (let b = 0; b < inCh; b++) plane.push(Array.from(data.slice(i, i += outCh)));
    out.push(plane);
  }
  return out;
}

const vec = (w: Weights, name: string): number[] => Array.from(w[name].data);

/** Forward pass + loss of the tiny channels-mode network, in float64. */
function mirrorLoss(cfg: NetConfig, w: Weights, xs: number[][][],
                    ys: number[]): number {
  const [m, omega, units] = cfg.inputShape;
  // fold pairs into channels: (m, omega, units) -> (omega, m*units)
  let batch: Mat[] = xs.map((sample) => {
    const out: Mat = [];
    for (let t = 0; t < omega; t++) {
      const row: number[] = [];
      for (let g = 0; g < m; g++) {
        for (let u = 0; u < units; u++) row.push(sample[g][t * units + u]);
      }
      out.push(row);
    }
    return out;
  });

  const branches = cfg.kernelTriple.map((k, i) => batch.map((sample) =>
    conv1dSame(sample, kernel3d(w, `initial_k${k}_b${i}/kernel`),
               vec(w, `initial_k${k}_b${i}/bias`))));
  batch = batch.map((_, s) => branches.map((br) => br[s])
    .reduce((acc, part) => acc.map((row, t) => row.concat(part[t]))));
  batch = batchNormTraining(batch, vec(w, "initial_bn/gamma"),
                            vec(w, "initial_bn/beta")).map(relu);

  for (let b = 0; b < cfg.depth; b++) {
    let y = batch.map((sample) => conv1dSame(sample,
      kernel3d(w, `block${b}_conv1/kernel`), vec(w, `block${b}_conv1/bias`)));
    y = batchNormTraining(y, vec(w, `block${b}_bn1/gamma`),
                          vec(w, `block${b}_bn1/beta`)).map(relu);
    y = y.map((sample) => conv1dSame(sample,
      kernel3d(w, `block${b}_conv2/kernel`), vec(w, `block${b}_conv2/bias`)));
    y = batchNormTraining(y, vec(w, `block${b}_bn2/gamma`),
                          vec(w, `block${b}_bn2/beta`)).map(relu);
    batch = batch.map((sample, s) => sample.map((row, t) =>
      row.map((v, c) => v + y[s][t][c])));
  }

  const denseK = w["probability/kernel"].data;
  const denseB = w["probability/bias"].data[0];
  let mse = 0;
  for (let s = 0; s < batch.length; s++) {
    const pooled = batch[s][0].map((_, c) =>
      batch[s].reduce((acc, row) => acc + row[c], 0) / batch[s].length);
    let z = denseB;
    for (let c = 0; c < pooled.length; c++) z += pooled[c] * denseK[c];
    const p = 1 / (1 + Math.exp(-z));
    mse += (p - ys[s]) ** 2;
  }
  mse /= batch.length;

  let reg = 0;
  for (const [name, entry] of Object.entries(w)) {
    if (!name.endsWith("/kernel")) continue;
    for (const v of entry.data) reg += v * v;
  }
  return mse + cfg.l2 * reg;
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

beforeAll(async () => {
  await tf.ready();
});

describe("analytic gradients", () => {
  const cfg = defaultNetConfig("des", [1, 4, 32], 2,
                               { nf: 2, depth: 1, seed: 7, l2: 1e-4 });
  const model = buildNetwork(cfg);
  const n = 16;
  const rand = mulberry32(99);
  const xsRaw: number[][][] = Array.from({ length: n }, () =>
    [Array.from({ length: 4 * 32 }, () => (rand() < 0.5 ? 0 : 1))]);
  const ysRaw: number[] = Array.from({ length: n }, () => (rand() < 0.5 ? 0 : 1));
  const xs = tf.tensor4d(xsRaw.flat(2), [n, 1, 4, 32]);
  const ys = tf.tensor1d(ysRaw);

  const weights: Weights = {};
  for (const v of model.trainableWeights) {
    const t = v.read(); // live variable tensor, not a copy; do not dispose
    weights[v.name] = { shape: t.shape.slice(),
                        data: Float64Array.from(t.dataSync()) };
  }

  const lossFn = () => tf.tidy(() => {
    const p = (model.apply(xs, { training: true }) as tf.Tensor).reshape([n]);
    const mse = p.sub(ys).square().mean() as tf.Scalar;
    let reg = tf.scalar(0);
    for (const v of model.trainableWeights) {
      if (v.name.endsWith("/kernel")) {
        reg = reg.add(v.read().square().sum().mul(cfg.l2));
      }
    }
    return mse.add(reg) as tf.Scalar;
  });

  it("float64 mirror reproduces the float32 forward loss", () => {
    const tfLoss = lossFn().dataSync()[0];
    const mirrored = mirrorLoss(cfg, weights, xsRaw, ysRaw);
    expect(Math.abs(tfLoss - mirrored)).toBeLessThan(3e-6);
  });

  it("matches float64 central differences on 100 random parameters", () => {
    const { value, grads } = tf.variableGrads(
      lossFn, model.trainableWeights.map((w) => w.val as tf.Variable));
    value.dispose();
    const analytic: { name: string; index: number; g: number }[] = [];
    for (const [name, g] of Object.entries(grads)) {
      const data = g.dataSync();
      for (let i = 0; i < data.length; i++) {
        analytic.push({ name, index: i, g: data[i] });
      }
    }
    const gmax = Math.max(...analytic.map((e) => Math.abs(e.g)));
    const pool = analytic.filter((e) => Math.abs(e.g) >= 1e-3 * gmax);
    expect(pool.length).toBeGreaterThanOrEqual(100);
    const rand2 = mulberry32(4321);
    const picked: typeof analytic = [];
    const scratch = [...pool];
    while (picked.length < 100) {
      picked.push(scratch.splice(Math.floor(rand2() * scratch.length), 1)[0]);
    }

    let worst = 0;
    for (const { name, index, g } of picked) {
      const saved = weights[name].data[index];
      const eps = Math.max(1e-5, 1e-5 * Math.abs(saved));
      weights[name].data[index] = saved + eps;
      const up = mirrorLoss(cfg, weights, xsRaw, ysRaw);
      weights[name].data[index] = saved - eps;
      const down = mirrorLoss(cfg, weights, xsRaw, ysRaw);
      weights[name].data[index] = saved;
      const fd = (up - down) / (2 * eps);
      const rel = Math.abs(fd - g) / Math.max(Math.abs(fd), Math.abs(g), 1e-5);
      worst = Math.max(worst, rel);
    }
    expect(worst).toBeLessThanOrEqual(1e-3);
    for (const g of Object.values(grads)) g.dispose();
  });
});
