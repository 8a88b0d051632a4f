import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

/** Invoke the generator/evaluator CLI of the primary package. */
export function neuraldiff(...args: string[]): { code: number; stdout: string } {
  try {
    const stdout = execFileSync("neuraldiff", args, { encoding: "utf8" });
    return { code: 0, stdout };
  } catch (err: any) {
    if (err.status === undefined) throw err;
    return { code: err.status, stdout: String(err.stdout ?? "") };
  }
}

export function genDataset(out: string, opts: {
  cipher: string; rounds: number; m: number; groups: number; seed: number;
}): void {
  const res = neuraldiff("gen", "--cipher", opts.cipher,
    "--rounds", String(opts.rounds), "--m", String(opts.m),
    "--groups", String(opts.groups), "--seed", String(opts.seed), "--out", out);
  if (res.code !== 0) throw new Error(`gen failed: ${res.stdout}`);
}

export function tmpdir(tag: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), `ndtrainer-${tag}-`));
}
