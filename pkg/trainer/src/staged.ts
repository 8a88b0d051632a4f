/**
 * Staged training: start from an already-trained distinguisher, fine-tune
 * it through a sequence of datasets (typically an easier intermediate
 * difference at fewer rounds first, then the full-round task at a low
 * constant learning rate, then fresh data at a lower one still).
 */

import * as fs from "node:fs";

import * as tf from "@tensorflow/tfjs";

import { ConfigError, TrainConfig, defaultTrainConfig } from "./config.js";
import { loadModel, saveModel } from "./io.js";
import { TrainResult, loadData, trainBasic, trainBasicStreaming } from "./train.js";

export interface StageSpec {
  train: string;
  val: string;
  epochs: number;
  /** "cyclic" or a constant learning rate */
  lr: number | "cyclic";
}

export interface StagedPlan {
  base: string;
  out: string;
  stages: StageSpec[];
  batchSize?: number;
  caseMode?: 1 | 2;
  /** hold datasets in memory below this group count (default 200k) */
  inMemoryLimit?: number;
}

export function parsePlan(path: string): StagedPlan {
  let raw: unknown;
  try {
    raw = JSON.parse(fs.readFileSync(path, "utf8"));
  } catch (err) {
    throw new ConfigError(`cannot read plan ${path}: ${err}`);
  }
  const plan = raw as StagedPlan;
  if (!plan.base || !plan.out || !Array.isArray(plan.stages) || !plan.stages.length) {
    throw new ConfigError("plan needs base, out and a non-empty stages list");
  }
  for (const [i, stage] of plan.stages.entries()) {
    if (!stage.train || !stage.val) {
      throw new ConfigError(`stage ${i} needs train and val dataset paths`);
    }
    for (const file of [stage.train, stage.val]) {
      if (!fs.existsSync(file)) throw new ConfigError(`stage ${i} dataset missing: ${file}`);
    }
    if (!(stage.epochs >= 1)) throw new ConfigError(`stage ${i} needs epochs >= 1`);
    if (stage.lr !== "cyclic" && !(typeof stage.lr === "number" && stage.lr > 0)) {
      throw new ConfigError(`stage ${i} lr must be "cyclic" or a positive number`);
    }
  }
  return plan;
}

export function stageTrainConfig(plan: StagedPlan, stage: StageSpec): TrainConfig {
  return defaultTrainConfig(plan.caseMode ?? 2, {
    epochs: stage.epochs,
    batchSize: plan.batchSize ?? 1000,
    lrConstant: stage.lr === "cyclic" ? undefined : stage.lr,
  });
}

export async function runStagedPlan(plan: StagedPlan,
                                    quiet = true): Promise<{ model: tf.LayersModel;
                                                             results: TrainResult[] }> {
  const model = await loadModel(plan.base);
  const results: TrainResult[] = [];
  const inMemoryLimit = plan.inMemoryLimit ?? 200_000;
  for (const [i, stage] of plan.stages.entries()) {
    const cfg = stageTrainConfig(plan, stage);
    if (!quiet) console.log(`stage ${i}: ${stage.train} (${stage.epochs} epochs, `
      + `lr ${stage.lr === "cyclic" ? "cyclic" : stage.lr})`);
    const probe = loadData(stage.train, { limit: 1 });
    const big = probe.header.groupCount > inMemoryLimit;
    probe.xs.dispose();
    probe.ys.dispose();
    if (big) {
      results.push(await trainBasicStreaming(model, stage.train, stage.val, cfg, quiet));
    } else {
      const train = loadData(stage.train);
      const val = loadData(stage.val);
      try {
        results.push(await trainBasic(model, train, val, cfg, quiet));
      } finally {
        train.xs.dispose(); train.ys.dispose();
        val.xs.dispose(); val.ys.dispose();
      }
    }
    await saveModel(model, `${plan.out}.stage${i}`, { plan, stage: i });
  }
  await saveModel(model, plan.out, { plan });
  return { model, results };
}
