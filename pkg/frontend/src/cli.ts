#!/usr/bin/env node
/**
 * render --spec plot.json
 *
 * Reads one or more sweep CSVs named in the spec and writes <output>.svg and
 * <output>.png.  Exit codes: 0 ok, 1 bad spec or unreadable/malformed input
 * (message names the file), 2 usage.
 */

import { CsvError } from "./csv.js";
import { render } from "./render.js";
import { readPlotSpec, SpecError } from "./spec.js";

function usage(): void {
  console.error("usage: render --spec <plot.json>");
}

export async function main(argv: string[]): Promise<number> {
  let specPath: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--spec") {
      specPath = argv[++i];
    } else if (argv[i] === "--help" || argv[i] === "-h") {
      usage();
      return 0;
    } else {
      console.error(`unknown argument: ${argv[i]}`);
      usage();
      return 2;
    }
  }
  if (!specPath) {
    usage();
    return 2;
  }
  try {
    const spec = readPlotSpec(specPath);
    const result = await render(spec);
    console.log(`wrote ${result.svgPath} and ${result.pngPath}`);
    return 0;
  } catch (err) {
    if (err instanceof SpecError || err instanceof CsvError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

import { pathToFileURL } from "url";

if (process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main(process.argv.slice(2)).then((code) => process.exit(code));
}
