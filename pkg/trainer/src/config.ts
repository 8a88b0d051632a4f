/**
 * Network and training configuration, with per-cipher defaults matching
 * the dataset generator's conventions.
 */

export class ConfigError extends Error {}

export type Cipher = "des" | "chaskey" | "present";

/** How the m pairs of a group enter the convolution stack. */
export type PairMode = "channels" | "separate";

export interface NetConfig {
  /** filters per initial-convolution branch */
  nf: number;
  /** the three initial kernel sizes; the first is always 1 */
  kernelTriple: [number, number, number];
  /** starting kernel size of the residual blocks; grows by 2 per block */
  ks: number;
  /** number of residual blocks */
  depth: number;
  /** drop rate before the sigmoid head; 0 disables the layer */
  dropoutRate: number;
  /** input tensor shape (m, omega, units) */
  inputShape: [number, number, number];
  /** L2 penalty applied to every conv/dense kernel */
  l2: number;
  pairMode: PairMode;
  /** initializer seed; runs are repeatable up to backend reduction order */
  seed: number;
}

export interface TrainConfig {
  epochs: number;
  batchSize: number;
  /** cyclic learning-rate parameters */
  lrAlpha: number;
  lrBeta: number;
  lrPeriod: number;
  /** constant LR instead of the cyclic schedule, if set */
  lrConstant?: number;
  /** 1: dropout on, fixed pair budget; 2: dropout off, fixed group budget */
  caseMode: 1 | 2;
  seed: number;
}

export const KERNEL_TRIPLES: Record<Cipher, [number, number, number]> = {
  des: [1, 4, 6],
  chaskey: [1, 5, 8],
  present: [1, 2, 4],
};

export const L2_DEFAULTS: Record<Cipher, number> = {
  des: 8e-4,
  chaskey: 1e-4,
  present: 1e-5,
};

export const DEFAULT_NF = 32;
export const DEFAULT_KS = 3;
export const DEFAULT_DEPTH = 5;
export const DEFAULT_DROPOUT = 0.8;

export function defaultNetConfig(
  cipher: Cipher,
  inputShape: [number, number, number],
  caseMode: 1 | 2 = 1,
  overrides: Partial<NetConfig> = {},
): NetConfig {
  return {
    nf: DEFAULT_NF,
    kernelTriple: KERNEL_TRIPLES[cipher],
    ks: DEFAULT_KS,
    depth: DEFAULT_DEPTH,
    dropoutRate: caseMode === 1 ? DEFAULT_DROPOUT : 0,
    inputShape,
    l2: L2_DEFAULTS[cipher],
    pairMode: "channels",
    seed: 0,
    ...overrides,
  };
}

export function defaultTrainConfig(caseMode: 1 | 2 = 1,
                                   overrides: Partial<TrainConfig> = {}): TrainConfig {
  return {
    epochs: 20,
    batchSize: 1000,
    lrAlpha: 1e-4,
    lrBeta: 2e-3,
    lrPeriod: 9,
    caseMode,
    seed: 0,
    ...overrides,
  };
}

export function validateNetConfig(cfg: NetConfig): void {
  const [m, omega, units] = cfg.inputShape;
  if (m < 1 || omega < 1 || units < 1) {
    throw new ConfigError(`bad input shape ${cfg.inputShape}`);
  }
  if (cfg.nf < 1) throw new ConfigError(`nf must be >= 1, got ${cfg.nf}`);
  if (cfg.depth < 0) throw new ConfigError(`depth must be >= 0, got ${cfg.depth}`);
  if (cfg.kernelTriple[0] !== 1) {
    throw new ConfigError(`first initial kernel must be 1, got ${cfg.kernelTriple[0]}`);
  }
  if (cfg.kernelTriple.some((k) => k < 1) || cfg.ks < 1) {
    throw new ConfigError("kernel sizes must be >= 1");
  }
  if (cfg.dropoutRate < 0 || cfg.dropoutRate >= 1) {
    throw new ConfigError(`drop rate must be in [0, 1), got ${cfg.dropoutRate}`);
  }
  if (cfg.l2 < 0) throw new ConfigError("l2 must be >= 0");
}
