import * as tf from "@tensorflow/tfjs";
import { beforeAll, describe, expect, it } from "vitest";

import { ConfigError, defaultNetConfig } from "../src/config.js";
import { blockKernel, buildNetwork } from "../src/network.js";

beforeAll(async () => {
  await tf.ready();
});

describe("network construction", () => {
  it("concatenates the three initial branches to 3*nf channels", () => {
    const model = buildNetwork(defaultNetConfig("des", [2, 4, 32], 1, { nf: 32 }));
    const concat = model.getLayer("initial_concat");
    expect(concat.outputShape).toEqual([null, 4, 96]);
  });

  it("grows residual kernels by 2 per block starting at 3", () => {
    const cfg = defaultNetConfig("chaskey", [2, 32, 8], 1, { nf: 4, depth: 3 });
    const model = buildNetwork(cfg);
    for (let b = 0; b < 3; b++) {
      expect(blockKernel(cfg, b)).toBe(3 + 2 * b);
      for (const which of ["conv1", "conv2"]) {
        const layer = model.getLayer(`block${b}_${which}`);
        expect((layer.getConfig() as any).kernelSize).toEqual([3 + 2 * b]);
      }
    }
  });

  it("builds the des config, whose widest kernel exceeds the sequence length", () => {
    const cfg = defaultNetConfig("des", [8, 4, 32], 2);
    expect(cfg.kernelTriple).toEqual([1, 4, 6]);
    const model = buildNetwork(cfg);
    expect(model.outputs[0].shape).toEqual([null, 1]);
  });

  it("keeps the spatial length through the residual stack", () => {
    const model = buildNetwork(defaultNetConfig("present", [4, 4, 32], 2,
                                                { nf: 8, depth: 2 }));
    for (let b = 0; b < 2; b++) {
      expect(model.getLayer(`block${b}_skip`).outputShape).toEqual([null, 4, 24]);
    }
  });

  it("produces probabilities in [0, 1] on zero input", () => {
    const model = buildNetwork(defaultNetConfig("des", [2, 4, 32], 2,
                                                { nf: 4, depth: 1 }));
    const out = model.predict(tf.zeros([8, 2, 4, 32])) as tf.Tensor;
    const values = Array.from(out.dataSync());
    for (const v of values) {
      expect(Number.isFinite(v)).toBe(true);
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(1);
    }
  });

  it("includes dropout only in case 1", () => {
    const with_ = buildNetwork(defaultNetConfig("des", [2, 4, 32], 1, { nf: 2, depth: 0 }));
    const without = buildNetwork(defaultNetConfig("des", [2, 4, 32], 2, { nf: 2, depth: 0 }));
    expect(with_.layers.some((l) => l.name === "head_dropout")).toBe(true);
    expect(without.layers.some((l) => l.name === "head_dropout")).toBe(false);
  });

  it("has a deterministic parameter count", () => {
    const cfg = defaultNetConfig("chaskey", [4, 32, 8], 1);
    const a = buildNetwork(cfg).countParams();
    const b = buildNetwork(cfg).countParams();
    expect(a).toBe(b);
    expect(a).toBeGreaterThan(0);
  });

  it("supports the per-pair tower mode with the same head shape", () => {
    const cfg = defaultNetConfig("des", [4, 4, 32], 2,
                                 { nf: 4, depth: 1, pairMode: "separate" });
    const model = buildNetwork(cfg);
    expect(model.getLayer("initial_concat").outputShape).toEqual([null, 4, 4, 12]);
    const out = model.predict(tf.zeros([2, 4, 4, 32])) as tf.Tensor;
    expect(out.shape).toEqual([2, 1]);
  });

  it("rejects impossible configurations", () => {
    expect(() => buildNetwork(defaultNetConfig("des", [2, 4, 32], 1,
      { kernelTriple: [2, 4, 6] }))).toThrow(ConfigError);
    expect(() => buildNetwork(defaultNetConfig("des", [2, 4, 32], 1, { nf: 0 })))
      .toThrow(ConfigError);
    expect(() => buildNetwork(defaultNetConfig("des", [0, 4, 32], 1)))
      .toThrow(ConfigError);
    expect(() => buildNetwork(defaultNetConfig("des", [2, 4, 32], 1, { depth: -1 })))
      .toThrow(ConfigError);
  });
});
