/** Render pipeline: spec -> CSV curves -> SVG and PNG files. */

import { writeFileSync } from "fs";

import { renderSvg, Curve } from "./chart.js";
import { readSweepCsv } from "./csv.js";
import { PlotSpec } from "./spec.js";

export interface RenderResult {
  svgPath: string;
  pngPath: string;
  svg: string;
}

export function buildCurves(spec: PlotSpec): Curve[] {
  return spec.curves.map((c) => ({ label: c.label, points: readSweepCsv(c.csv) }));
}

export async function render(spec: PlotSpec): Promise<RenderResult> {
  const curves = buildCurves(spec);
  const svg = renderSvg(curves, spec);
  const svgPath = `${spec.output}.svg`;
  const pngPath = `${spec.output}.png`;
  writeFileSync(svgPath, svg);
  const { Resvg } = await import("@resvg/resvg-js");
  const png = new Resvg(svg, { fitTo: { mode: "width", value: spec.width * 2 } }).render();
  writeFileSync(pngPath, png.asPng());
  return { svgPath, pngPath, svg };
}
