/** Plot specification: input curves, output path, axes, reference markers. */

import { readFileSync } from "fs";
import { dirname, isAbsolute, resolve } from "path";

export interface CurveSpec {
  csv: string;
  label: string;
}

export interface ReferenceLine {
  ebn0Db: number;
  label?: string;
}

export interface PlotSpec {
  curves: CurveSpec[];
  output: string;
  title?: string;
  xRangeDb?: [number, number];
  yRange?: [number, number];
  references: ReferenceLine[];
  width: number;
  height: number;
}

export class SpecError extends Error {}

function asNumber(v: unknown, ctx: string): number {
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new SpecError(`${ctx}: expected a finite number`);
  }
  return v;
}

export function parsePlotSpec(doc: unknown, baseDir: string): PlotSpec {
  if (typeof doc !== "object" || doc === null) {
    throw new SpecError("spec: expected a JSON object");
  }
  const d = doc as Record<string, unknown>;
  const rawCurves = d["curves"];
  if (!Array.isArray(rawCurves) || rawCurves.length === 0) {
    throw new SpecError("spec.curves: need a non-empty list of {csv, label}");
  }
  const curves: CurveSpec[] = rawCurves.map((c, i) => {
    const cc = c as Record<string, unknown>;
    if (typeof cc["csv"] !== "string" || typeof cc["label"] !== "string") {
      throw new SpecError(`spec.curves[${i}]: need string fields csv and label`);
    }
    const csv = cc["csv"];
    return { csv: isAbsolute(csv) ? csv : resolve(baseDir, csv), label: cc["label"] };
  });
  if (typeof d["output"] !== "string" || d["output"].length === 0) {
    throw new SpecError("spec.output: need an output path stem");
  }
  const output = isAbsolute(d["output"]) ? d["output"] : resolve(baseDir, d["output"]);
  const spec: PlotSpec = {
    curves,
    output,
    references: [],
    width: 760,
    height: 540,
  };
  if (d["title"] !== undefined) {
    if (typeof d["title"] !== "string") throw new SpecError("spec.title: expected a string");
    spec.title = d["title"];
  }
  for (const [key, field] of [
    ["x_range_db", "xRangeDb"],
    ["y_range", "yRange"],
  ] as const) {
    const v = d[key];
    if (v !== undefined) {
      if (!Array.isArray(v) || v.length !== 2) {
        throw new SpecError(`spec.${key}: expected [lo, hi]`);
      }
      const lo = asNumber(v[0], `spec.${key}[0]`);
      const hi = asNumber(v[1], `spec.${key}[1]`);
      if (lo >= hi) throw new SpecError(`spec.${key}: lo must be < hi`);
      spec[field] = [lo, hi];
    }
  }
  if (d["references"] !== undefined) {
    if (!Array.isArray(d["references"])) throw new SpecError("spec.references: expected a list");
    spec.references = d["references"].map((r, i) => {
      const rr = r as Record<string, unknown>;
      const out: ReferenceLine = { ebn0Db: asNumber(rr["ebn0_db"], `spec.references[${i}].ebn0_db`) };
      if (rr["label"] !== undefined) out.label = String(rr["label"]);
      return out;
    });
  }
  if (d["width"] !== undefined) spec.width = asNumber(d["width"], "spec.width");
  if (d["height"] !== undefined) spec.height = asNumber(d["height"], "spec.height");
  return spec;
}

export function readPlotSpec(path: string): PlotSpec {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SpecError(`${path}: cannot read (${(err as Error).message})`);
  }
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new SpecError(`${path}: invalid JSON (${(err as Error).message})`);
  }
  return parsePlotSpec(doc, dirname(resolve(path)));
}
