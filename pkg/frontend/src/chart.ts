/**
 * Waterfall chart builder: BER (log axis) versus Eb/N0 in dB.
 *
 * Points are drawn in the order they appear in each CSV and joined by
 * straight segments only; no smoothing, no reordering.  Zero-BER points
 * cannot be placed on a log axis and are skipped.
 */

import { SweepPoint } from "./csv.js";
import { PlotSpec } from "./spec.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARGIN = { top: 42, right: 24, bottom: 52, left: 72 };

export interface Curve {
  label: string;
  points: SweepPoint[];
}

function fmt(x: number): string {
  return Number(x.toFixed(3)).toString();
}

function niceTicks(lo: number, hi: number, maxTicks = 9): number[] {
  const span = hi - lo;
  const steps = [0.05, 0.1, 0.2, 0.25, 0.5, 1, 2, 5];
  let step = steps[steps.length - 1];
  for (const s of steps) {
    if (span / s <= maxTicks) {
      step = s;
      break;
    }
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12; v += step) {
    ticks.push(Number(v.toFixed(6)));
  }
  return ticks;
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export function renderSvg(curves: Curve[], spec: PlotSpec): string {
  const width = spec.width;
  const height = spec.height;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const drawable = curves.map((c) => ({
    label: c.label,
    points: c.points.filter((p) => p.ber > 0),
  }));
  const allPoints = drawable.flatMap((c) => c.points);

  let xLo: number, xHi: number;
  if (spec.xRangeDb) {
    [xLo, xHi] = spec.xRangeDb;
  } else {
    const xs = allPoints.map((p) => p.ebn0Db).concat(spec.references.map((r) => r.ebn0Db));
    xLo = Math.min(...xs);
    xHi = Math.max(...xs);
    if (!Number.isFinite(xLo)) [xLo, xHi] = [0, 1];
    if (xHi - xLo < 1e-9) [xLo, xHi] = [xLo - 0.5, xHi + 0.5];
    const pad = 0.04 * (xHi - xLo);
    xLo -= pad;
    xHi += pad;
  }
  let yLoExp: number, yHiExp: number;
  if (spec.yRange) {
    yLoExp = Math.floor(Math.log10(spec.yRange[0]));
    yHiExp = Math.ceil(Math.log10(spec.yRange[1]));
  } else {
    const bers = allPoints.map((p) => p.ber);
    const lo = bers.length ? Math.min(...bers) : 1e-6;
    const hi = bers.length ? Math.max(...bers) : 1;
    yLoExp = Math.floor(Math.log10(lo));
    yHiExp = Math.ceil(Math.log10(hi));
    if (yHiExp <= yLoExp) yHiExp = yLoExp + 1;
  }

  const sx = (db: number) => MARGIN.left + ((db - xLo) / (xHi - xLo)) * plotW;
  const sy = (ber: number) =>
    MARGIN.top + ((yHiExp - Math.log10(ber)) / (yHiExp - yLoExp)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (spec.title) {
    parts.push(
      `<text x="${width / 2}" y="24" text-anchor="middle" font-size="15">${escapeXml(spec.title)}</text>`,
    );
  }

  // gridlines and axes
  for (let e = yHiExp; e >= yLoExp; e--) {
    const y = sy(Math.pow(10, e));
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + plotW}" y2="${fmt(y)}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="12">1e${e}</text>`,
    );
  }
  for (const t of niceTicks(xLo, xHi)) {
    const x = sx(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${MARGIN.top + plotH}" stroke="#eeeeee" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(x)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" font-size="12">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 14}" text-anchor="middle" font-size="13">Eb/N0 [dB]</text>`,
  );
  parts.push(
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">BER</text>`,
  );

  // vertical reference markers
  for (const ref of spec.references) {
    const x = sx(ref.ebn0Db);
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${MARGIN.top + plotH}" stroke="#888888" stroke-dasharray="5,4" stroke-width="1.2"/>`,
    );
    if (ref.label) {
      parts.push(
        `<text x="${fmt(x + 4)}" y="${MARGIN.top + 14}" font-size="11" fill="#555555">${escapeXml(ref.label)}</text>`,
      );
    }
  }

  // curves: straight segments between measured points, in file order
  drawable.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    const coords = curve.points.map((p) => `${fmt(sx(p.ebn0Db))},${fmt(sy(p.ber))}`);
    if (coords.length > 1) {
      parts.push(
        `<polyline points="${coords.join(" ")}" fill="none" stroke="${color}" stroke-width="1.8" data-label="${escapeXml(curve.label)}"/>`,
      );
    }
    for (const c of coords) {
      const [x, y] = c.split(",");
      parts.push(`<circle cx="${x}" cy="${y}" r="3" fill="${color}"/>`);
    }
  });

  // legend
  drawable.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    const y = MARGIN.top + 16 + 18 * ci;
    const x = MARGIN.left + plotW - 150;
    parts.push(
      `<line x1="${x}" y1="${y - 4}" x2="${x + 26}" y2="${y - 4}" stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(`<text x="${x + 32}" y="${y}" font-size="12">${escapeXml(curve.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n");
}
