/**
 * Thin command line: read one graphent CSV, write one SVG.
 *
 *   node dist/cli.js --figure fig1 --input fixtures/fig1.csv --output fig1.svg
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseFigureCsv, SchemaError } from "./csv.js";
import { render } from "./figures.js";

function getFlag(argv: string[], name: string): string {
  const at = argv.indexOf(`--${name}`);
  if (at < 0 || at + 1 >= argv.length) {
    throw new Error(`missing --${name}`);
  }
  return argv[at + 1];
}

export function main(argv: string[]): number {
  let figure: string, input: string, output: string;
  try {
    figure = getFlag(argv, "figure");
    input = getFlag(argv, "input");
    output = getFlag(argv, "output");
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  try {
    const svg = render(figure, parseFigureCsv(readFileSync(input, "utf-8")));
    writeFileSync(output, svg);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`refusing input: ${err.message}`);
    } else {
      console.error(`error: ${(err as Error).message}`);
    }
    return 1;
  }
  return 0;
}

const code = main(process.argv.slice(2));
if (code !== 0) {
  process.exit(code);
}
