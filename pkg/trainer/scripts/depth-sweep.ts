/**
 * Residual-depth sweep: trains the same task at several block counts and
 * prints validation accuracy per depth, to pick the default empirically.
 *
 *   node dist/scripts/depth-sweep.js --data train.bin --val val.bin \
 *        [--depths 1,3,5,7] [--epochs 5] [--nf 32]
 */

import * as tf from "@tensorflow/tfjs";

import { Cipher, defaultNetConfig, defaultTrainConfig } from "../src/config.js";
import { DatasetFile } from "../src/datafmt.js";
import { buildNetwork } from "../src/network.js";
import { accuracyOf, loadData, predict, trainBasic } from "../src/train.js";

function arg(name: string, fallback?: string): string | undefined {
  const i = process.argv.indexOf(`--${name}`);
  return i >= 0 ? process.argv[i + 1] : fallback;
}

async function main(): Promise<void> {
  await tf.ready();
  const dataPath = arg("data");
  const valPath = arg("val");
  if (!dataPath || !valPath) {
    console.error("usage: depth-sweep --data train.bin --val val.bin");
    process.exitCode = 2;
    return;
  }
  const depths = (arg("depths", "1,3,5,7")!).split(",").map(Number);
  const epochs = Number(arg("epochs", "5"));
  const nf = Number(arg("nf", "32"));

  const header = new DatasetFile(dataPath).header;
  const train = loadData(dataPath);
  const val = loadData(valPath);
  for (const depth of depths) {
    const net = defaultNetConfig(header.cipher as Cipher,
                                 [header.m, header.omega, header.units], 2,
                                 { nf, depth });
    const model = buildNetwork(net);
    const cfg = defaultTrainConfig(2, { epochs });
    const result = await trainBasic(model, train, val, cfg);
    const acc = accuracyOf(val.ys.dataSync(), predict(model, val.xs));
    console.log(`depth=${depth} params=${model.countParams()} `
      + `best_val_loss=${result.bestValLoss.toFixed(5)} val_acc=${acc.toFixed(4)}`);
  }
}

main();
