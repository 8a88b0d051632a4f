/**
 * Desk-scale replication runner: trains a distinguisher per gate on 10^6
 * freshly generated training groups, scores 10^5 test groups through the
 * evaluator, and prints pass/fail against the accuracy gates below.
 *
 * Expect ~30-60 minutes per gate on a GPU-backed tf runtime or several
 * hours each on a native CPU backend; the pure-JS backend bundled here
 * works but is roughly another order of magnitude slower, so use
 * --train-groups/--epochs to downscale when exploring.
 *
 *   node dist/scripts/replicate.js [--only des5_m2,...] [--train-groups N]
 *        [--test-groups N] [--epochs N] [--work DIR] [--threads N]
 */

import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

import { Cipher, defaultNetConfig, defaultTrainConfig } from "../src/config.js";
import { DatasetFile } from "../src/datafmt.js";
import { saveModel } from "../src/io.js";
import { buildNetwork } from "../src/network.js";
import { predictToFile } from "../src/predict.js";
import { runStagedPlan } from "../src/staged.js";
import { trainBasicStreaming } from "../src/train.js";

interface Gate {
  name: string;
  cipher: Cipher;
  rounds: number;
  m: number;
  /** minimum test accuracy */
  floor: number;
  /** additionally require the 95% CI to exclude 0.5 */
  ciAbove05?: boolean;
}

// Reduced-scale gates: full-scale reference accuracy minus a 0.05-0.07
// margin (see the staged des7 handling further down).
const GATES: Gate[] = [
  { name: "des5_m2", cipher: "des", rounds: 5, m: 2, floor: 0.65 },
  { name: "des5_m8", cipher: "des", rounds: 5, m: 8, floor: 0.88 },
  { name: "des6_m8", cipher: "des", rounds: 6, m: 8, floor: 0.60, ciAbove05: true },
  { name: "chaskey3_m2", cipher: "chaskey", rounds: 3, m: 2, floor: 0.85 },
  { name: "chaskey4_m8", cipher: "chaskey", rounds: 4, m: 8, floor: 0.80 },
  { name: "present6_m2", cipher: "present", rounds: 6, m: 2, floor: 0.68 },
  { name: "present7_m4", cipher: "present", rounds: 7, m: 4, floor: 0.55 },
];

const DES_DELTA = "0x4008000004000000";
const DES_MID_DELTA = "0x0400000040080000"; // likeliest 3-round successor

function arg(name: string, fallback?: string): string | undefined {
  const i = process.argv.indexOf(`--${name}`);
  return i >= 0 ? process.argv[i + 1] : fallback;
}

const WORK = arg("work", "replication-work")!;
const TRAIN_GROUPS = Number(arg("train-groups", "1000000"));
const TEST_GROUPS = Number(arg("test-groups", "100000"));
const EPOCHS = Number(arg("epochs", "20"));
const THREADS = arg("threads", "8")!;
const ONLY = arg("only")?.split(",");

let seedCounter = 9000;

function gen(file: string, cipher: string, rounds: number, m: number,
             groups: number, delta?: string): void {
  if (fs.existsSync(file)) return;
  const args = ["gen", "--cipher", cipher, "--rounds", String(rounds),
                "--m", String(m), "--groups", String(groups),
                "--seed", String(seedCounter++), "--out", file,
                "--threads", THREADS];
  if (delta) args.push("--delta", delta);
  execFileSync("neuraldiff", args, { stdio: ["ignore", "inherit", "inherit"] });
}

function evaluate(data: string, pred: string): { accuracy: number; ci95: [number, number] } {
  const out = execFileSync("neuraldiff", ["eval", "--data", data, "--pred", pred],
                           { encoding: "utf8" });
  return JSON.parse(out);
}

async function trainGate(gate: Gate): Promise<{ accuracy: number; ci95: [number, number] }> {
  const base = path.join(WORK, gate.name);
  const trainFile = `${base}.train.bin`;
  const valFile = `${base}.val.bin`;
  const testFile = `${base}.test.bin`;
  gen(trainFile, gate.cipher, gate.rounds, gate.m, TRAIN_GROUPS);
  gen(valFile, gate.cipher, gate.rounds, gate.m, Math.max(1, TEST_GROUPS / 10 | 0));
  gen(testFile, gate.cipher, gate.rounds, gate.m, TEST_GROUPS);

  const header = new DatasetFile(trainFile).header;
  const net = defaultNetConfig(gate.cipher, [header.m, header.omega, header.units], 2);
  const cfg = defaultTrainConfig(2, { epochs: EPOCHS, batchSize: 1000 });
  const model = buildNetwork(net);
  await trainBasicStreaming(model, trainFile, valFile, cfg, false);
  await saveModel(model, `${base}.model`, { net, cfg });
  predictToFile(model, testFile, `${base}.pred.bin`);
  return evaluate(testFile, `${base}.pred.bin`);
}

async function stagedDes7(): Promise<void> {
  // curriculum: 6-round base model (m=16), fine-tuned on 4-round data with
  // the intermediate difference, then the 7-round task at 1e-4 and 1e-5
  const m = 16;
  const base = path.join(WORK, "des7_staged");
  const sixTrain = `${base}.r6train.bin`;
  const sixVal = `${base}.r6val.bin`;
  gen(sixTrain, "des", 6, m, TRAIN_GROUPS);
  gen(sixVal, "des", 6, m, Math.max(1, TEST_GROUPS / 10 | 0));
  const header = new DatasetFile(sixTrain).header;
  const net = defaultNetConfig("des", [header.m, header.omega, header.units], 2);
  const baseModel = buildNetwork(net);
  await trainBasicStreaming(baseModel, sixTrain, sixVal,
                            defaultTrainConfig(2, { epochs: EPOCHS }), false);
  await saveModel(baseModel, `${base}.base`, { net });

  const files: Record<string, [number, string | undefined]> = {
    s1train: [4, DES_MID_DELTA], s1val: [4, DES_MID_DELTA],
    s2train: [7, undefined], s2val: [7, undefined],
    s3train: [7, undefined], s3val: [7, undefined],
  };
  for (const [tag, [rounds, delta]] of Object.entries(files)) {
    gen(`${base}.${tag}.bin`, "des", rounds, m,
        tag.endsWith("val") ? Math.max(1, TEST_GROUPS / 10 | 0) : TRAIN_GROUPS, delta);
  }
  const plan = {
    base: `${base}.base`,
    out: `${base}.final`,
    batchSize: 1000,
    caseMode: 2 as const,
    stages: [
      { train: `${base}.s1train.bin`, val: `${base}.s1val.bin`, epochs: 20,
        lr: "cyclic" as const },
      { train: `${base}.s2train.bin`, val: `${base}.s2val.bin`, epochs: 10, lr: 1e-4 },
      { train: `${base}.s3train.bin`, val: `${base}.s3val.bin`, epochs: 10, lr: 1e-5 },
    ],
  };
  const { model } = await runStagedPlan(plan, false);

  const testFile = `${base}.test.bin`;
  gen(testFile, "des", 7, m, TEST_GROUPS);
  predictToFile(model, testFile, `${base}.pred.bin`);
  const staged = evaluate(testFile, `${base}.pred.bin`);
  const stagedPass = staged.ci95[0] > 0.5;
  console.log(`${stagedPass ? "PASS" : "FAIL"} des7_staged_m16: acc=${staged.accuracy.toFixed(4)} `
    + `ci=[${staged.ci95[0].toFixed(4)}, ${staged.ci95[1].toFixed(4)}] (need CI > 0.5)`);

  // control: basic training at 7 rounds does not beat chance
  const basicModel = buildNetwork(net);
  const sevenVal = `${base}.s2val.bin`;
  await trainBasicStreaming(basicModel, `${base}.s2train.bin`, sevenVal,
                            defaultTrainConfig(2, { epochs: EPOCHS }), false);
  predictToFile(basicModel, testFile, `${base}.basicpred.bin`);
  const basic = evaluate(testFile, `${base}.basicpred.bin`);
  const sigma = 0.5 / Math.sqrt(TEST_GROUPS);
  const basicPass = basic.accuracy <= 0.5 + 4 * sigma;
  console.log(`${basicPass ? "PASS" : "FAIL"} des7_basic_control: acc=${basic.accuracy.toFixed(4)} `
    + `(must stay <= ${(0.5 + 4 * sigma).toFixed(4)})`);
}

async function main(): Promise<void> {
  await tf.ready();
  fs.mkdirSync(WORK, { recursive: true });
  console.log(`backend=${tf.getBackend()} train_groups=${TRAIN_GROUPS} `
    + `test_groups=${TEST_GROUPS} epochs=${EPOCHS}`);
  let failures = 0;
  for (const gate of GATES) {
    if (ONLY && !ONLY.includes(gate.name)) continue;
    console.log(`\n=== ${gate.name}: ${gate.cipher} r=${gate.rounds} m=${gate.m} ===`);
    const { accuracy, ci95 } = await trainGate(gate);
    const ciOk = !gate.ciAbove05 || ci95[0] > 0.5;
    const pass = accuracy >= gate.floor && ciOk;
    if (!pass) failures++;
    console.log(`${pass ? "PASS" : "FAIL"} ${gate.name}: acc=${accuracy.toFixed(4)} `
      + `ci=[${ci95[0].toFixed(4)}, ${ci95[1].toFixed(4)}] floor=${gate.floor}`
      + (gate.ciAbove05 ? " + CI above 0.5" : ""));
  }
  if (!ONLY || ONLY.includes("des7_staged")) {
    console.log("\n=== des7_staged: curriculum + basic control ===");
    await stagedDes7();
  }
  process.exitCode = failures ? 1 : 0;
}

main();
