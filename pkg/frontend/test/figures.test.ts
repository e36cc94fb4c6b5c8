import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { parseFigureCsv, SchemaError } from "../src/csv.js";
import {
  render,
  renderFig1,
  renderFig2,
  renderFig3,
  T_DISTILLABLE,
  T_SEPARABLE,
} from "../src/figures.js";

const fixtures = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

function fixture(name: string) {
  return parseFigureCsv(readFileSync(join(fixtures, name), "utf-8"));
}

describe("csv parsing", () => {
  it("reads the config header and numeric rows", () => {
    const csv = fixture("fig1.csv");
    expect(csv.config["figure"]).toBe("fig1");
    expect(csv.columns).toEqual(["n", "s_crit", "t_over_delta"]);
    expect(csv.rows[0]["n"]).toBe(2);
    expect(csv.rows[0]["t_over_delta"]).toBeCloseTo(1.13459265711, 9);
  });

  it("rejects empty input", () => {
    expect(() => parseFigureCsv("")).toThrow(SchemaError);
    expect(() => parseFigureCsv("# figure=fig1\n")).toThrow(SchemaError);
    expect(() => parseFigureCsv("# figure=fig1\nn,s_crit,t_over_delta\n")).toThrow(
      SchemaError,
    );
  });

  it("rejects non-numeric cells", () => {
    expect(() =>
      parseFigureCsv("# figure=fig1\nn,s_crit,t_over_delta\n2,oops,1.0\n"),
    ).toThrow(SchemaError);
  });
});

describe("fig1", () => {
  it("draws both reference lines at the analytic constants", () => {
    const svg = renderFig1(fixture("fig1.csv"));
    const lines = [...svg.matchAll(/class="reference [^"]*" data-value="([^"]+)"/g)];
    expect(lines).toHaveLength(2);
    const values = lines.map((m) => Number(m[1])).sort((a, b) => a - b);
    expect(values[0]).toBeCloseTo(1 / Math.log(1 + Math.SQRT2), 12);
    expect(values[1]).toBeCloseTo(1 / Math.log(Math.SQRT2), 12);
    expect(T_SEPARABLE).toBeCloseTo(2.8853900817779268, 12);
    expect(T_DISTILLABLE).toBeCloseTo(1.134592657106511, 12);
  });

  it("places every chain point between the two reference lines", () => {
    const csv = fixture("fig1.csv");
    const svg = renderFig1(csv);
    const ySep = Number(
      svg.match(/class="reference separable-limit"[^>]* y1="([-\d.]+)"/)![1],
    );
    const yDist = Number(
      svg.match(/class="reference distillable-limit"[^>]* y1="([-\d.]+)"/)![1],
    );
    const points = [...svg.matchAll(/class="point" cx="[-\d.]+" cy="([-\d.]+)"/g)];
    expect(points).toHaveLength(csv.rows.length);
    for (const m of points) {
      const cy = Number(m[1]);
      // SVG y grows downward: the distillable line sits below the points,
      // the separable limit above them; the N = 2 threshold sits exactly on
      // the distillable line (critical s is sqrt(2) - 1 there)
      expect(cy).toBeLessThanOrEqual(yDist);
      expect(cy).toBeGreaterThan(ySep);
    }
  });

  it("refuses a CSV for a different figure", () => {
    expect(() => renderFig1(fixture("fig3.csv"))).toThrow(SchemaError);
  });
});

describe("fig2", () => {
  it("draws whiskers, std overlays and mean circles per row", () => {
    const csv = fixture("fig2.csv");
    const svg = renderFig2(csv);
    expect([...svg.matchAll(/class="minmax"/g)]).toHaveLength(csv.rows.length);
    expect([...svg.matchAll(/class="std"/g)]).toHaveLength(csv.rows.length);
    expect([...svg.matchAll(/class="mean"/g)]).toHaveLength(csv.rows.length);
  });

  it("keeps the std overlay inside the min-max whisker", () => {
    const svg = renderFig2(fixture("fig2.csv"));
    const whiskers = [
      ...svg.matchAll(/class="minmax" x1="[-\d.]+" y1="([-\d.]+)" x2="[-\d.]+" y2="([-\d.]+)"/g),
    ];
    const stds = [
      ...svg.matchAll(/class="std" x1="[-\d.]+" y1="([-\d.]+)" x2="[-\d.]+" y2="([-\d.]+)"/g),
    ];
    for (let i = 0; i < whiskers.length; i++) {
      const [minY, maxY] = [Number(whiskers[i][1]), Number(whiskers[i][2])].sort(
        (a, b) => a - b,
      );
      const [stdLo, stdHi] = [Number(stds[i][1]), Number(stds[i][2])].sort(
        (a, b) => a - b,
      );
      expect(stdLo).toBeGreaterThanOrEqual(minY - 1e-9);
      expect(stdHi).toBeLessThanOrEqual(maxY + 1e-9);
    }
  });
});

describe("fig3", () => {
  it("renders one point per lattice size", () => {
    const csv = fixture("fig3.csv");
    const svg = renderFig3(csv);
    expect([...svg.matchAll(/class="point"/g)]).toHaveLength(csv.rows.length);
  });

  it("orders the points by increasing critical temperature", () => {
    const svg = renderFig3(fixture("fig3.csv"));
    const ys = [...svg.matchAll(/class="point" cx="[-\d.]+" cy="([-\d.]+)"/g)].map(
      (m) => Number(m[1]),
    );
    // lower bounds increase with M, so the SVG y coordinate must decrease
    for (let i = 1; i < ys.length; i++) {
      expect(ys[i]).toBeLessThan(ys[i - 1]);
    }
  });
});

describe("dispatcher", () => {
  it("renders all three figures from the committed fixtures", () => {
    for (const id of ["fig1", "fig2", "fig3"] as const) {
      const svg = render(id, fixture(`${id}.csv`));
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg.endsWith("</svg>")).toBe(true);
    }
  });

  it("is deterministic", () => {
    const csv = fixture("fig1.csv");
    expect(render("fig1", csv)).toBe(render("fig1", csv));
  });

  it("rejects unknown figure ids", () => {
    expect(() => render("fig9", fixture("fig1.csv"))).toThrow(SchemaError);
  });
});
