/**
 * Reader for graphent CSV output: "# key=value" config header lines followed
 * by a regular CSV table. Each figure declares the columns it needs and the
 * figure id the header must carry.
 */

import Papa from "papaparse";

export interface FigureCsv {
  config: Record<string, string>;
  columns: string[];
  rows: Record<string, number>[];
}

export class SchemaError extends Error {}

export function parseFigureCsv(text: string): FigureCsv {
  const config: Record<string, string> = {};
  const tableLines: string[] = [];
  for (const line of text.split(/\r?\n/)) {
    if (line.startsWith("#")) {
      const body = line.replace(/^#\s*/, "");
      const eq = body.indexOf("=");
      if (eq > 0) config[body.slice(0, eq)] = body.slice(eq + 1);
    } else if (line.trim() !== "") {
      tableLines.push(line);
    }
  }
  if (tableLines.length === 0) {
    throw new SchemaError("CSV contains no table");
  }
  const parsed = Papa.parse<Record<string, string>>(tableLines.join("\n"), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse failed: ${parsed.errors[0].message}`);
  }
  const columns = parsed.meta.fields ?? [];
  const rows = parsed.data.map((raw) => {
    const row: Record<string, number> = {};
    for (const key of columns) {
      const value = Number(raw[key]);
      if (!Number.isFinite(value)) {
        throw new SchemaError(`non-numeric value in column ${key}: ${raw[key]}`);
      }
      row[key] = value;
    }
    return row;
  });
  if (rows.length === 0) {
    throw new SchemaError("CSV table has a header but no rows");
  }
  return { config, columns, rows };
}

/** Reject inputs produced for a different figure or missing columns. */
export function requireSchema(
  csv: FigureCsv,
  figureId: string,
  columns: string[],
): void {
  if (csv.config["figure"] !== figureId) {
    throw new SchemaError(
      `header figure=${csv.config["figure"] ?? "<missing>"} does not match ${figureId}`,
    );
  }
  for (const column of columns) {
    if (!csv.columns.includes(column)) {
      throw new SchemaError(`missing column ${column}`);
    }
  }
}
