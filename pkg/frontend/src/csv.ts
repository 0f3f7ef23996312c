/**
 * Reader for the simulator's sweep CSVs.
 *
 * The harness writes a fixed header; we require its first eight columns so a
 * stray file fails loudly with the offending path in the message.
 */

import { readFileSync } from "fs";

export const REQUIRED_COLUMNS = [
  "ebn0_db",
  "frames",
  "bit_errors",
  "frame_errors",
  "ber",
  "fer",
  "seconds",
  "seed",
] as const;

export interface SweepPoint {
  ebn0Db: number;
  frames: number;
  bitErrors: number;
  frameErrors: number;
  ber: number;
  fer: number;
}

export class CsvError extends Error {}

export function parseSweepCsv(text: string, source: string): SweepPoint[] {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new CsvError(`${source}: empty CSV`);
  }
  const header = lines[0].split(",");
  REQUIRED_COLUMNS.forEach((name, i) => {
    if (header[i] !== name) {
      throw new CsvError(
        `${source}: bad header column ${i} (${JSON.stringify(header[i])}, expected ${name})`,
      );
    }
  });
  const col = (name: string) => header.indexOf(name);
  const points: SweepPoint[] = [];
  for (let r = 1; r < lines.length; r++) {
    const parts = lines[r].split(",");
    if (parts.length < REQUIRED_COLUMNS.length) {
      throw new CsvError(`${source}: row ${r} has ${parts.length} fields`);
    }
    const num = (name: string) => {
      const v = Number(parts[col(name)]);
      if (!Number.isFinite(v)) {
        throw new CsvError(`${source}: row ${r} column ${name} is not numeric`);
      }
      return v;
    };
    points.push({
      ebn0Db: num("ebn0_db"),
      frames: num("frames"),
      bitErrors: num("bit_errors"),
      frameErrors: num("frame_errors"),
      ber: num("ber"),
      fer: num("fer"),
    });
  }
  if (points.length === 0) {
    throw new CsvError(`${source}: no data rows`);
  }
  return points;
}

export function readSweepCsv(path: string): SweepPoint[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvError(`${path}: cannot read (${(err as Error).message})`);
  }
  return parseSweepCsv(text, path);
}
