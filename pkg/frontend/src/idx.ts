/**
 * IDX file reading/writing (the MNIST container format).
 *
 * Images: magic 0x00000803, dims [count, rows, cols], uint8 pixels.
 * Labels: magic 0x00000801, dims [count], uint8 labels.
 * Files ending in .gz are transparently gunzipped.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { gunzipSync } from "node:zlib";

export const IMAGE_MAGIC = 0x00000803;
export const LABEL_MAGIC = 0x00000801;

export interface IdxImages {
  count: number;
  rows: number;
  cols: number;
  /** count * rows * cols pixels, row-major per image. */
  pixels: Uint8Array;
}

function readBytes(path: string): Buffer {
  const raw = readFileSync(path);
  return path.endsWith(".gz") ? gunzipSync(raw) : raw;
}

export function readIdxImages(path: string): IdxImages {
  const buf = readBytes(path);
  if (buf.length < 16) {
    throw new Error(`${path}: too short for an IDX image header`);
  }
  const magic = buf.readUInt32BE(0);
  if (magic !== IMAGE_MAGIC) {
    throw new Error(
      `${path}: bad image magic 0x${magic.toString(16)} (expected 0x803)`
    );
  }
  const count = buf.readUInt32BE(4);
  const rows = buf.readUInt32BE(8);
  const cols = buf.readUInt32BE(12);
  const expected = 16 + count * rows * cols;
  if (buf.length !== expected) {
    throw new Error(
      `${path}: expected ${expected} bytes for ${count} ${rows}x${cols} images, got ${buf.length}`
    );
  }
  return { count, rows, cols, pixels: new Uint8Array(buf.buffer, buf.byteOffset + 16, count * rows * cols) };
}

export function readIdxLabels(path: string): Uint8Array {
  const buf = readBytes(path);
  if (buf.length < 8) {
    throw new Error(`${path}: too short for an IDX label header`);
  }
  const magic = buf.readUInt32BE(0);
  if (magic !== LABEL_MAGIC) {
    throw new Error(
      `${path}: bad label magic 0x${magic.toString(16)} (expected 0x801)`
    );
  }
  const count = buf.readUInt32BE(4);
  if (buf.length !== 8 + count) {
    throw new Error(`${path}: expected ${8 + count} bytes, got ${buf.length}`);
  }
  return new Uint8Array(buf.buffer, buf.byteOffset + 8, count);
}

export function writeIdxImages(
  path: string,
  pixels: Uint8Array,
  count: number,
  rows: number,
  cols: number
): void {
  if (pixels.length !== count * rows * cols) {
    throw new Error(
      `pixel buffer has ${pixels.length} bytes, expected ${count * rows * cols}`
    );
  }
  const buf = Buffer.alloc(16 + pixels.length);
  buf.writeUInt32BE(IMAGE_MAGIC, 0);
  buf.writeUInt32BE(count, 4);
  buf.writeUInt32BE(rows, 8);
  buf.writeUInt32BE(cols, 12);
  buf.set(pixels, 16);
  writeFileSync(path, buf);
}

export function writeIdxLabels(path: string, labels: Uint8Array): void {
  const buf = Buffer.alloc(8 + labels.length);
  buf.writeUInt32BE(LABEL_MAGIC, 0);
  buf.writeUInt32BE(labels.length, 4);
  buf.set(labels, 8);
  writeFileSync(path, buf);
}
