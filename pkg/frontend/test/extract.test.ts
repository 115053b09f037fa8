import { describe, expect, it } from "vitest";
import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { main } from "../src/cli";
import { parseFeatureFile } from "../src/featureFile";

async function runCliAsync(argv: string[]): Promise<number> {
  return main(argv);
}

describe("synth + extract pipeline", () => {
  it("synth writes loadable IDX files", async () => {
    const dir = mkdtempSync(join(tmpdir(), "mnist-"));
    expect(await runCliAsync(["synth", "--out-dir", dir, "--train", "30",
                              "--test", "10"])).toBe(0);
    const { loadMnist } = await import("../src/extract");
    const data = loadMnist(dir);
    expect(data.train.images.count).toBe(30);
    expect(data.test.images.count).toBe(10);
    expect(data.train.images.rows).toBe(28);
  });

  it("extract in smoke mode writes valid feature files", async () => {
    const dir = mkdtempSync(join(tmpdir(), "mnist-"));
    await runCliAsync(["synth", "--out-dir", dir, "--train", "40", "--test", "20"]);
    const outTrain = join(dir, "train.feats");
    const outAll = join(dir, "all.feats");
    const code = await runCliAsync([
      "extract", "--data-dir", dir, "--epochs", "0", "--seed", "9",
      "--out-train", outTrain, "--out-all", outAll,
    ]);
    expect(code).toBe(0);

    const parsed = parseFeatureFile(readFileSync(outTrain, "utf-8"));
    expect(parsed.n).toBe(625);
    expect(parsed.labels.length).toBe(40);
    expect(parsed.comments.some((c) => c.includes("architecture"))).toBe(true);
    for (const row of parsed.values) {
      for (const v of row) {
        expect(v).toBeGreaterThanOrEqual(parsed.lo - 1e-9);
        expect(v).toBeLessThanOrEqual(parsed.hi + 1e-9);
      }
    }

    const all = parseFeatureFile(readFileSync(outAll, "utf-8"));
    expect(all.labels.length).toBe(60);
  });

  it("label distribution is preserved in the export", async () => {
    const dir = mkdtempSync(join(tmpdir(), "mnist-"));
    await runCliAsync(["synth", "--out-dir", dir, "--train", "50", "--test", "10"]);
    const out = join(dir, "train.feats");
    await runCliAsync(["extract", "--data-dir", dir, "--epochs", "0",
                       "--out-train", out]);
    const parsed = parseFeatureFile(readFileSync(out, "utf-8"));
    const counts = new Map<string, number>();
    for (const label of parsed.labels) {
      counts.set(label, (counts.get(label) ?? 0) + 1);
    }
    // synth deals digits round-robin: 50 records = 5 each of 0..9
    for (let d = 0; d < 10; d++) {
      expect(counts.get(String(d))).toBe(5);
    }
  });

  it("same seed exports identical bytes (epochs=0)", async () => {
    const dir = mkdtempSync(join(tmpdir(), "mnist-"));
    await runCliAsync(["synth", "--out-dir", dir, "--train", "20", "--test", "10"]);
    const a = join(dir, "a.feats");
    const b = join(dir, "b.feats");
    for (const out of [a, b]) {
      expect(await runCliAsync(["extract", "--data-dir", dir, "--epochs", "0",
                                "--seed", "11", "--out-train", out])).toBe(0);
    }
    expect(readFileSync(a, "utf-8")).toBe(readFileSync(b, "utf-8"));
  });

  it("usage errors exit 2, data errors exit 1", async () => {
    expect(await runCliAsync(["extract"])).toBe(2);
    expect(await runCliAsync(["bogus"])).toBe(2);
    const empty = mkdtempSync(join(tmpdir(), "mnist-"));
    expect(await runCliAsync(["extract", "--data-dir", empty,
                              "--out-all", join(empty, "x.feats")])).toBe(1);
  });

  it("exported file loads through the memory library", async () => {
    let pythonOk = true;
    try {
      execFileSync("python3", ["-c", "import gridmem"], { stdio: "ignore" });
    } catch {
      pythonOk = false;
    }
    if (!pythonOk) {
      console.warn("gridmem not importable; skipping cross-package check");
      return;
    }
    const dir = mkdtempSync(join(tmpdir(), "mnist-"));
    await runCliAsync(["synth", "--out-dir", dir, "--train", "20", "--test", "10"]);
    const out = join(dir, "train.feats");
    await runCliAsync(["extract", "--data-dir", dir, "--epochs", "0",
                       "--out-train", out]);
    const script =
      "import sys, gridmem\n" +
      "ds = gridmem.load_dataset(sys.argv[1])\n" +
      "assert ds.n_features == 625, ds.n_features\n" +
      "assert ds.n_records == 20, ds.n_records\n" +
      "print('ok', ds.n_records)\n";
    const stdout = execFileSync("python3", ["-c", script, out], { encoding: "utf-8" });
    expect(stdout).toContain("ok 20");
  });
});
