/**
 * Deterministic SVG renderings of the three figures.
 *
 * fig1: chain critical temperature vs length, with horizontal reference
 *       lines at the separability and distillability constants.
 * fig2: perturbed-chain critical temperature distributions (min-max bars
 *       with a standard-deviation overlay) against the sample means.
 * fig3: critical temperature of the M x M lattice vs M.
 */

import { FigureCsv, requireSchema, SchemaError } from "./csv.js";

export const T_SEPARABLE = 1 / Math.log(Math.SQRT2);
export const T_DISTILLABLE = 1 / Math.log(1 + Math.SQRT2);

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 64, right: 24, top: 24, bottom: 48 };

interface Scale {
  (value: number): number;
  domain: [number, number];
}

function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) =>
    r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  return scale;
}

function fmt(value: number): string {
  return value.toFixed(3);
}

function ticks(lo: number, hi: number, count: number): number[] {
  const step = (hi - lo) / (count - 1);
  return Array.from({ length: count }, (_, i) => lo + i * step);
}

function frame(
  x: Scale,
  y: Scale,
  xLabel: string,
  yLabel: string,
  body: string[],
): string {
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
  ];
  for (const t of ticks(x.domain[0], x.domain[1], 5)) {
    parts.push(
      `<line x1="${fmt(x(t))}" y1="${HEIGHT - MARGIN.bottom}" x2="${fmt(x(t))}" y2="${HEIGHT - MARGIN.bottom + 6}" stroke="black"/>`,
      `<text x="${fmt(x(t))}" y="${HEIGHT - MARGIN.bottom + 20}" font-size="11" text-anchor="middle">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(y.domain[0], y.domain[1], 5)) {
    parts.push(
      `<line x1="${MARGIN.left - 6}" y1="${fmt(y(t))}" x2="${MARGIN.left}" y2="${fmt(y(t))}" stroke="black"/>`,
      `<text x="${MARGIN.left - 10}" y="${fmt(y(t) + 4)}" font-size="11" text-anchor="end">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<line x1="${MARGIN.left}" y1="${HEIGHT - MARGIN.bottom}" x2="${WIDTH - MARGIN.right}" y2="${HEIGHT - MARGIN.bottom}" stroke="black"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${HEIGHT - MARGIN.bottom}" stroke="black"/>`,
    `<text x="${fmt((MARGIN.left + WIDTH - MARGIN.right) / 2)}" y="${HEIGHT - 10}" font-size="13" text-anchor="middle">${xLabel}</text>`,
    `<text x="16" y="${fmt((MARGIN.top + HEIGHT - MARGIN.bottom) / 2)}" font-size="13" text-anchor="middle" transform="rotate(-90 16 ${fmt((MARGIN.top + HEIGHT - MARGIN.bottom) / 2)})">${yLabel}</text>`,
    ...body,
    "</svg>",
  );
  return parts.join("\n");
}

function scales(
  xDomain: [number, number],
  yDomain: [number, number],
): [Scale, Scale] {
  return [
    linearScale(xDomain, [MARGIN.left, WIDTH - MARGIN.right]),
    linearScale(yDomain, [HEIGHT - MARGIN.bottom, MARGIN.top]),
  ];
}

function pad(values: number[]): [number, number] {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const slack = 0.06 * (hi - lo || 1);
  return [lo - slack, hi + slack];
}

export function renderFig1(csv: FigureCsv): string {
  requireSchema(csv, "fig1", ["n", "s_crit", "t_over_delta"]);
  const xs = csv.rows.map((r) => r["n"]);
  const ys = csv.rows.map((r) => r["t_over_delta"]);
  const [x, y] = scales(pad(xs), pad([...ys, T_SEPARABLE, T_DISTILLABLE]));
  const body: string[] = [];
  for (const [value, label, cls] of [
    [T_SEPARABLE, "T_sep/D = 1/ln sqrt(2)", "separable-limit"],
    [T_DISTILLABLE, "T_dist/D = 1/ln(1+sqrt(2))", "distillable-limit"],
  ] as const) {
    body.push(
      `<line class="reference ${cls}" data-value="${value.toPrecision(15)}" x1="${MARGIN.left}" y1="${fmt(y(value))}" x2="${WIDTH - MARGIN.right}" y2="${fmt(y(value))}" stroke="gray" stroke-dasharray="6 3"/>`,
      `<text x="${WIDTH - MARGIN.right - 4}" y="${fmt(y(value) - 5)}" font-size="11" text-anchor="end">${label}</text>`,
    );
  }
  for (const row of csv.rows) {
    body.push(
      `<circle class="point" cx="${fmt(x(row["n"]))}" cy="${fmt(y(row["t_over_delta"]))}" r="4" fill="black"/>`,
    );
  }
  return frame(x, y, "chain length N", "critical T/D", body);
}

export function renderFig2(csv: FigureCsv): string {
  requireSchema(csv, "fig2", ["n", "mean", "std", "min", "max", "seed"]);
  const xs = csv.rows.map((r) => r["n"]);
  const [x, y] = scales(
    pad(xs),
    pad(csv.rows.flatMap((r) => [r["min"], r["max"]])),
  );
  const body: string[] = [];
  for (const row of csv.rows) {
    const cx = x(row["n"]);
    // min-max whiskers, with the std window drawn as a thicker overlay
    body.push(
      `<line class="minmax" x1="${fmt(cx)}" y1="${fmt(y(row["min"]))}" x2="${fmt(cx)}" y2="${fmt(y(row["max"]))}" stroke="black"/>`,
      `<line class="std" x1="${fmt(cx)}" y1="${fmt(y(row["mean"] - row["std"]))}" x2="${fmt(cx)}" y2="${fmt(y(row["mean"] + row["std"]))}" stroke="black" stroke-width="4" opacity="0.45"/>`,
      `<circle class="mean" cx="${fmt(cx)}" cy="${fmt(y(row["mean"]))}" r="4" fill="white" stroke="black"/>`,
    );
  }
  return frame(x, y, "chain length N", "critical T/D (100 samples)", body);
}

export function renderFig3(csv: FigureCsv): string {
  requireSchema(csv, "fig3", ["m", "n", "s_crit", "t_over_delta"]);
  const xs = csv.rows.map((r) => r["m"]);
  const ys = csv.rows.map((r) => r["t_over_delta"]);
  const [x, y] = scales(pad(xs), pad([0, ...ys]));
  const body = csv.rows.map(
    (row) =>
      `<circle class="point" cx="${fmt(x(row["m"]))}" cy="${fmt(y(row["t_over_delta"]))}" r="4" fill="black"/>`,
  );
  return frame(x, y, "lattice side M", "critical T/D (lower bounds)", body);
}

const RENDERERS: Record<string, (csv: FigureCsv) => string> = {
  fig1: renderFig1,
  fig2: renderFig2,
  fig3: renderFig3,
};

export function render(figureId: string, csv: FigureCsv): string {
  const renderer = RENDERERS[figureId];
  if (!renderer) {
    throw new SchemaError(`unknown figure id ${figureId}`);
  }
  return renderer(csv);
}
