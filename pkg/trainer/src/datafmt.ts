/**
 * Reader for "NDW1" dataset files and writer/reader for "NDP1" prediction
 * files, mirroring the byte layouts frozen in ../docs/format.md.
 */

import * as fs from "node:fs";

export class FormatError extends Error {}

export type Cipher = "des" | "chaskey" | "present";

const CIPHER_BY_WIRE: Record<number, Cipher> = { 1: "des", 2: "chaskey", 3: "present" };

export interface DatasetHeader {
  cipher: Cipher;
  rounds: number;
  m: number;
  omega: number;
  blockBits: number;
  groupCount: number;
  seed: bigint;
  deltaHex: string;
  /** byte offsets and sizes derived from the fields above */
  headerBytes: number;
  groupBytes: number;
  groupBits: number;
  units: number;
}

function u64ToNumber(value: bigint, what: string): number {
  if (value > BigInt(Number.MAX_SAFE_INTEGER)) {
    throw new FormatError(`${what} ${value} exceeds the safe integer range`);
  }
  return Number(value);
}

export function parseHeader(buf: Buffer): DatasetHeader {
  if (buf.length < 28) throw new FormatError(`header needs 28 bytes, got ${buf.length}`);
  if (buf.toString("latin1", 0, 4) !== "NDW1") {
    throw new FormatError(`bad magic ${buf.subarray(0, 4).toString("hex")}`);
  }
  const cipher = CIPHER_BY_WIRE[buf.readUInt8(4)];
  if (!cipher) throw new FormatError(`unknown cipher id ${buf.readUInt8(4)}`);
  const rounds = buf.readUInt8(5);
  const m = buf.readUInt16LE(6);
  const omega = buf.readUInt16LE(8);
  const blockBits = buf.readUInt16LE(10);
  const groupCount = u64ToNumber(buf.readBigUInt64LE(12), "group_count");
  const seed = buf.readBigUInt64LE(20);
  const deltaBytes = blockBits / 8;
  if (buf.length < 28 + deltaBytes) throw new FormatError("header truncated in delta");
  const deltaHex = buf.subarray(28, 28 + deltaBytes).toString("hex");
  if ((2 * blockBits) % omega !== 0) {
    throw new FormatError(`omega ${omega} does not divide 2L = ${2 * blockBits}`);
  }
  const groupBits = m * 2 * blockBits;
  return {
    cipher, rounds, m, omega, blockBits, groupCount, seed, deltaHex,
    headerBytes: 28 + deltaBytes,
    groupBits,
    groupBytes: Math.ceil(groupBits / 8),
    units: (2 * blockBits) / omega,
  };
}

// 256 x 8 bit-expansion table, MSB first.
const BIT_TABLE = new Float32Array(256 * 8);
for (let b = 0; b < 256; b++) {
  for (let j = 0; j < 8; j++) BIT_TABLE[b * 8 + j] = (b >> (7 - j)) & 1;
}

export function unpackBits(packed: Buffer, bitsPerRow: number, rows: number): Float32Array {
  const bytesPerRow = Math.ceil(bitsPerRow / 8);
  const out = new Float32Array(rows * bitsPerRow);
  for (let r = 0; r < rows; r++) {
    const rowBase = r * bitsPerRow;
    const byteBase = r * bytesPerRow;
    const whole = bitsPerRow >> 3;
    for (let i = 0; i < whole; i++) {
      out.set(BIT_TABLE.subarray(packed[byteBase + i] * 8, packed[byteBase + i] * 8 + 8),
              rowBase + i * 8);
    }
    for (let j = whole * 8; j < bitsPerRow; j++) {
      out[rowBase + j] = (packed[byteBase + (j >> 3)] >> (7 - (j & 7))) & 1;
    }
  }
  return out;
}

export class DatasetFile {
  readonly header: DatasetHeader;
  private readonly fd: number;

  constructor(readonly path: string) {
    this.fd = fs.openSync(path, "r");
    const probe = Buffer.alloc(44);
    fs.readSync(this.fd, probe, 0, 44, 0);
    this.header = parseHeader(probe);
    const expected = this.header.headerBytes
      + this.header.groupCount * (1 + this.header.groupBytes);
    const actual = fs.fstatSync(this.fd).size;
    if (actual !== expected) {
      throw new FormatError(`file has ${actual} bytes, header declares ${expected}`);
    }
  }

  labels(): Uint8Array {
    const buf = Buffer.alloc(this.header.groupCount);
    fs.readSync(this.fd, buf, 0, buf.length, this.header.headerBytes);
    for (let i = 0; i < buf.length; i++) {
      if (buf[i] > 1) throw new FormatError(`label ${buf[i]} at group ${i}`);
    }
    return new Uint8Array(buf);
  }

  /** Bit tensor of groups [start, start+count) as flat rows of groupBits. */
  tensorRows(start: number, count: number): Float32Array {
    const h = this.header;
    if (start < 0 || start + count > h.groupCount) {
      throw new FormatError(`group range ${start}+${count} out of bounds`);
    }
    const buf = Buffer.alloc(count * h.groupBytes);
    const offset = h.headerBytes + h.groupCount + start * h.groupBytes;
    fs.readSync(this.fd, buf, 0, buf.length, offset);
    return unpackBits(buf, h.groupBits, count);
  }

  close(): void {
    fs.closeSync(this.fd);
  }
}

export function writePredictions(path: string, values: Float32Array): void {
  for (const v of values) {
    if (!(v >= 0 && v <= 1)) throw new FormatError(`prediction ${v} outside [0, 1]`);
  }
  const buf = Buffer.alloc(12 + 4 * values.length);
  buf.write("NDP1", 0, "latin1");
  buf.writeBigUInt64LE(BigInt(values.length), 4);
  for (let i = 0; i < values.length; i++) buf.writeFloatLE(values[i], 12 + 4 * i);
  fs.writeFileSync(path, buf);
}

export function readPredictions(path: string): Float32Array {
  const buf = fs.readFileSync(path);
  if (buf.length < 12 || buf.toString("latin1", 0, 4) !== "NDP1") {
    throw new FormatError("not a prediction file");
  }
  const count = u64ToNumber(buf.readBigUInt64LE(4), "count");
  if (buf.length !== 12 + 4 * count) {
    throw new FormatError(`body has ${buf.length - 12} bytes, expected ${4 * count}`);
  }
  const out = new Float32Array(count);
  for (let i = 0; i < count; i++) out[i] = buf.readFloatLE(12 + 4 * i);
  return out;
}
