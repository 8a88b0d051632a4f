import { describe, expect, it } from "vitest";

import { cyclicLr } from "../src/schedule.js";

const ALPHA = 1e-4;
const BETA = 2e-3;
const N = 9;

describe("cyclic learning rate", () => {
  it("starts at the high rate", () => {
    expect(cyclicLr(0, ALPHA, BETA, N)).toBeCloseTo(2e-3, 12);
  });

  it("reaches the low rate at the period end", () => {
    expect(cyclicLr(9, ALPHA, BETA, N)).toBeCloseTo(1e-4, 12);
  });

  it("restarts the cycle after the period", () => {
    // epoch 10 wraps: the non-negative modulus matters here
    expect(cyclicLr(10, ALPHA, BETA, N)).toBeCloseTo(2e-3, 12);
  });

  it("is periodic with period n+1", () => {
    for (let i = 0; i < 40; i++) {
      expect(cyclicLr(i + N + 1, ALPHA, BETA, N)).toBeCloseTo(
        cyclicLr(i, ALPHA, BETA, N), 12);
    }
  });

  it("decreases linearly inside one cycle", () => {
    const step = (BETA - ALPHA) / N;
    for (let i = 0; i < N; i++) {
      expect(cyclicLr(i, ALPHA, BETA, N) - cyclicLr(i + 1, ALPHA, BETA, N))
        .toBeCloseTo(step, 12);
    }
  });

  it("rejects a degenerate period", () => {
    expect(() => cyclicLr(0, ALPHA, BETA, 0)).toThrow();
  });
});
