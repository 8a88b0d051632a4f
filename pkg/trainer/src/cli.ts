/** Trainer CLI: train / stage-train / predict on "NDW1" dataset files. */

import * as fs from "node:fs";

import * as tf from "@tensorflow/tfjs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { Cipher, ConfigError, defaultNetConfig, defaultTrainConfig } from "./config.js";
import { DatasetFile } from "./datafmt.js";
import { loadModel, saveModel } from "./io.js";
import { buildNetwork } from "./network.js";
import { predictToFile } from "./predict.js";
import { parsePlan, runStagedPlan } from "./staged.js";
import { accuracyOf, loadData, trainBasic, trainBasicStreaming } from "./train.js";

function headerOf(path: string) {
  const file = new DatasetFile(path);
  const header = file.header;
  file.close();
  return header;
}

async function cmdTrain(argv: any): Promise<void> {
  const header = headerOf(argv.data);
  if (argv.cipher && argv.cipher !== header.cipher) {
    throw new ConfigError(`--cipher ${argv.cipher} but dataset is ${header.cipher}`);
  }
  if (argv.rounds !== undefined && argv.rounds !== header.rounds) {
    throw new ConfigError(`--rounds ${argv.rounds} but dataset has ${header.rounds}`);
  }
  if (argv.m !== undefined && argv.m !== header.m) {
    throw new ConfigError(`--m ${argv.m} but dataset has ${header.m}`);
  }
  const caseMode = (argv.case ?? 1) as 1 | 2;
  const net = defaultNetConfig(header.cipher as Cipher,
                               [header.m, header.omega, header.units], caseMode, {
    ...(argv.nf !== undefined ? { nf: argv.nf } : {}),
    ...(argv.depth !== undefined ? { depth: argv.depth } : {}),
    ...(argv.l2 !== undefined ? { l2: argv.l2 } : {}),
    ...(argv.pairMode !== undefined ? { pairMode: argv.pairMode } : {}),
    ...(argv.seed !== undefined ? { seed: argv.seed } : {}),
  });
  const cfg = defaultTrainConfig(caseMode, {
    ...(argv.epochs !== undefined ? { epochs: argv.epochs } : {}),
    ...(argv.batch !== undefined ? { batchSize: argv.batch } : {}),
    ...(argv.lr !== undefined ? { lrConstant: argv.lr } : {}),
    ...(argv.seed !== undefined ? { seed: argv.seed } : {}),
  });
  const model = buildNetwork(net);
  const big = header.groupCount > (argv.inMemoryLimit ?? 200_000);
  let result;
  if (big) {
    result = await trainBasicStreaming(model, argv.data, argv.val, cfg, argv.quiet);
  } else {
    const train = loadData(argv.data);
    const val = loadData(argv.val);
    result = await trainBasic(model, train, val, cfg, argv.quiet);
  }
  await saveModel(model, argv.out, { net, train: cfg, data: argv.data,
                                     val: argv.val, result });
  console.log(JSON.stringify({
    out: argv.out,
    bestEpoch: result.bestEpoch,
    bestValLoss: result.bestValLoss,
    valAccuracy: result.history[result.bestEpoch]?.valAccuracy,
  }));
}

async function cmdStageTrain(argv: any): Promise<void> {
  const plan = parsePlan(argv.plan);
  const { results } = await runStagedPlan(plan, argv.quiet);
  console.log(JSON.stringify({
    out: plan.out,
    stages: results.map((r) => ({ bestEpoch: r.bestEpoch, bestValLoss: r.bestValLoss })),
  }));
}

async function cmdPredict(argv: any): Promise<void> {
  const model = await loadModel(argv.model);
  const preds = predictToFile(model, argv.data, argv.out, argv.batch ?? 4096);
  const file = new DatasetFile(argv.data);
  const labels = file.labels();
  file.close();
  console.log(JSON.stringify({
    out: argv.out,
    count: preds.length,
    accuracy: accuracyOf(labels, preds),
  }));
}

export async function main(args: string[]): Promise<number> {
  try {
    await yargs(args)
      .command("train", "train a distinguisher on a dataset file", (y) => y
        .option("data", { type: "string", demandOption: true })
        .option("val", { type: "string", demandOption: true })
        .option("out", { type: "string", demandOption: true })
        .option("cipher", { type: "string" })
        .option("rounds", { type: "number" })
        .option("m", { type: "number" })
        .option("case", { type: "number", default: 1, choices: [1, 2] })
        .option("epochs", { type: "number" })
        .option("batch", { type: "number" })
        .option("nf", { type: "number" })
        .option("depth", { type: "number" })
        .option("l2", { type: "number" })
        .option("lr", { type: "number" })
        .option("seed", { type: "number" })
        .option("pair-mode", { type: "string", choices: ["channels", "separate"] })
        .option("in-memory-limit", { type: "number" })
        .option("quiet", { type: "boolean", default: false }),
        (argv) => cmdTrain(argv))
      .command("stage-train", "run a staged training plan", (y) => y
        .option("plan", { type: "string", demandOption: true })
        .option("quiet", { type: "boolean", default: false }),
        (argv) => cmdStageTrain(argv))
      .command("predict", "write an NDP1 prediction file for a dataset", (y) => y
        .option("model", { type: "string", demandOption: true })
        .option("data", { type: "string", demandOption: true })
        .option("out", { type: "string", demandOption: true })
        .option("batch", { type: "number" }),
        (argv) => cmdPredict(argv))
      .demandCommand(1)
      .strict()
      .fail((msg, err) => { throw err ?? new Error(msg); })
      .parseAsync();
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return err instanceof ConfigError ? 2 : 1;
  }
}

const isDirectRun = process.argv[1] && fs.existsSync(process.argv[1])
  && import.meta.url.endsWith(process.argv[1].split("/").pop() as string);
if (isDirectRun) {
  await tf.ready();
  process.exitCode = await main(hideBin(process.argv));
}
