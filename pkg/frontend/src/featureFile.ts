/**
 * The #dtm-features v1 text format, the only contract with the memory
 * library:
 *
 *   #dtm-features v1 n=<n> lo=<lo> hi=<hi>
 *   # optional comment lines
 *   <label>,<v1>,...,<vn>
 *
 * Values are written with JavaScript's shortest round-trip decimal
 * rendering, which any IEEE-754 double parser reads back exactly.
 */

import { WriteStream, createWriteStream } from "node:fs";
import { once } from "node:events";

export const FEATURES_MAGIC = "#dtm-features";

export interface FeatureRange {
  lo: number;
  hi: number;
}

export interface Rescale {
  /** Applied as value * scale + offset. Identity when applied=false. */
  applied: boolean;
  scale: number;
  offset: number;
  observedMin: number;
  observedMax: number;
}

/**
 * Decide how to map observed activations into the declared range. Values
 * already inside [lo, hi] are exported untouched; otherwise an affine map
 * from the observed span onto [lo, hi] is applied (and recorded in the
 * file as a comment).
 */
export function planRescale(
  observedMin: number,
  observedMax: number,
  range: FeatureRange = { lo: 0, hi: 10 }
): Rescale {
  const identity: Rescale = {
    applied: false,
    scale: 1,
    offset: 0,
    observedMin,
    observedMax,
  };
  if (observedMin >= range.lo && observedMax <= range.hi) {
    return identity;
  }
  const span = observedMax - observedMin;
  if (!(span > 0)) {
    // constant activations: shift onto lo
    return { ...identity, applied: true, offset: range.lo - observedMin };
  }
  const scale = (range.hi - range.lo) / span;
  return {
    applied: true,
    scale,
    offset: range.lo - observedMin * scale,
    observedMin,
    observedMax,
  };
}

export function headerLine(n: number, range: FeatureRange): string {
  return `${FEATURES_MAGIC} v1 n=${n} lo=${range.lo} hi=${range.hi}`;
}

export function recordLine(
  label: number | string,
  values: ArrayLike<number>,
  rescale?: Rescale
): string {
  const parts = new Array<string>(values.length + 1);
  parts[0] = String(label);
  for (let i = 0; i < values.length; i++) {
    const v = rescale?.applied ? values[i] * rescale.scale + rescale.offset : values[i];
    parts[i + 1] = String(v);
  }
  return parts.join(",");
}

export class FeatureFileWriter {
  private stream: WriteStream;

  constructor(
    path: string,
    readonly n: number,
    readonly range: FeatureRange = { lo: 0, hi: 10 },
    comments: string[] = []
  ) {
    this.stream = createWriteStream(path, { encoding: "utf-8" });
    this.stream.write(headerLine(n, range) + "\n");
    for (const comment of comments) {
      this.stream.write(`# ${comment}\n`);
    }
  }

  async writeRecord(
    label: number | string,
    values: ArrayLike<number>,
    rescale?: Rescale
  ): Promise<void> {
    if (values.length !== this.n) {
      throw new Error(`record has ${values.length} values, header says ${this.n}`);
    }
    if (!this.stream.write(recordLine(label, values, rescale) + "\n")) {
      await once(this.stream, "drain");
    }
  }

  async close(): Promise<void> {
    this.stream.end();
    await once(this.stream, "close");
  }
}

export interface ParsedFeatureFile {
  n: number;
  lo: number;
  hi: number;
  comments: string[];
  labels: string[];
  values: number[][];
}

/** Strict reader used by the tests to validate what we emit. */
export function parseFeatureFile(text: string): ParsedFeatureFile {
  const lines = text.split("\n");
  const header = lines[0] ?? "";
  const match = header.match(
    /^#dtm-features v1 n=(\d+) lo=(-?[\d.eE+-]+) hi=(-?[\d.eE+-]+)$/
  );
  if (!match) {
    throw new Error(`line 1: bad header ${JSON.stringify(header)}`);
  }
  const n = Number(match[1]);
  const lo = Number(match[2]);
  const hi = Number(match[3]);
  const comments: string[] = [];
  const labels: string[] = [];
  const values: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (!line.trim()) continue;
    if (line.startsWith("#")) {
      comments.push(line);
      continue;
    }
    const parts = line.split(",");
    if (parts.length !== n + 1) {
      throw new Error(`line ${i + 1}: expected ${n} values, got ${parts.length - 1}`);
    }
    const row = new Array<number>(n);
    for (let j = 1; j <= n; j++) {
      const v = Number(parts[j]);
      if (!Number.isFinite(v)) {
        throw new Error(`line ${i + 1}: non-numeric value ${JSON.stringify(parts[j])}`);
      }
      row[j - 1] = v;
    }
    labels.push(parts[0]);
    values.push(row);
  }
  return { n, lo, hi, comments, labels, values };
}
