import { writeFileSync } from "node:fs";
import { join } from "node:path";

import { expectColumns, loadRun, num, RunData, SchemaError } from "./csv.js";
import { DEFAULT_FRAME, linearScale, log10Scale, PALETTE, Scale, Svg } from "./svg.js";

export const FIGURE_IDS = [
  "sign-curve",
  "coverage",
  "lengths",
  "robot-lengths",
  "robot-errors",
] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

/** Render one figure from a run directory; returns the written file path. */
export function render(runDir: string, figId: string): string {
  const data = loadRun(runDir);
  let svg: string;
  switch (figId) {
    case "sign-curve":
      svg = signCurve(data);
      break;
    case "coverage":
      svg = coverage(data);
      break;
    case "lengths":
      svg = lengths(data);
      break;
    case "robot-lengths":
      svg = robotLengths(data);
      break;
    case "robot-errors":
      svg = robotErrors(data);
      break;
    default:
      throw new SchemaError(`unknown figure id ${figId}`);
  }
  const outPath = join(runDir, `${figId}.svg`);
  writeFileSync(outPath, svg);
  return outPath;
}

function groupBy<T>(rows: T[], key: (row: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const row of rows) {
    const k = key(row);
    const bucket = out.get(k);
    if (bucket) bucket.push(row);
    else out.set(k, [row]);
  }
  return out;
}

function frameScales(
  xLo: number,
  xHi: number,
  yScale: (outLo: number, outHi: number) => Scale,
): { plot: Svg; xs: Scale; ys: Scale } {
  const plot = new Svg();
  const f = DEFAULT_FRAME;
  const xs = linearScale(xLo, xHi, f.left, f.width - f.right);
  const ys = yScale(f.height - f.bottom, f.top);
  return { plot, xs, ys };
}

/** Deviation of the above-target frequency from one half, log scale. */
function signCurve(data: RunData): string {
  expectColumns(data, ["m", "scheme", "p_gt", "p_eq", "stderr", "trials"],
                "sign-curve");
  const rows = data.rows.map((row) => ({
    m: num(row, "m"),
    scheme: row.scheme,
    dev: Math.abs(num(row, "p_gt") - 0.5),
  }));
  const positive = rows.filter((r) => r.dev > 0).map((r) => r.dev);
  const floor = positive.length ? Math.min(...positive) / 10 : 1e-6;
  const devs = rows.map((r) => Math.max(r.dev, floor));
  const { plot, xs, ys } = frameScales(
    Math.min(...rows.map((r) => r.m)),
    Math.max(...rows.map((r) => r.m)),
    (lo, hi) => log10Scale(Math.min(...devs), Math.max(...devs), lo, hi),
  );
  plot.title("Deviation of the above-target frequency from 1/2");
  plot.axes(xs, ys, "m (points = 2^m)", "|Pr - 1/2| (log)");
  const groups = groupBy(rows, (r) => r.scheme);
  const legend: Array<[string, string]> = [];
  let i = 0;
  for (const [scheme, grp] of groups) {
    const color = PALETTE[i % PALETTE.length];
    const pts = grp
      .sort((a, b) => a.m - b.m)
      .map((r) => [xs(r.m), ys(Math.max(r.dev, floor))] as [number, number]);
    plot.polyline(pts, color);
    pts.forEach(([x, y]) => plot.circle(x, y, 2.5, color));
    legend.push([scheme, color]);
    i += 1;
  }
  plot.legend(legend);
  return plot.render();
}

/** Interval hit counts with the acceptance band scaled to the trial count. */
function coverage(data: RunData): string {
  expectColumns(data, ["m", "scheme", "method", "hits", "trials", "nominal"],
                "coverage");
  const rows = data.rows.map((row) => ({
    m: num(row, "m"),
    key: `${row.scheme}/${row.method}`,
    hits: num(row, "hits"),
    trials: num(row, "trials"),
  }));
  const trials = rows[0].trials;
  // the reference band is 950..970 out of 1000 trials
  const bandLo = (950 * trials) / 1000;
  const bandHi = (970 * trials) / 1000;
  const ms = rows.map((r) => r.m);
  const hitVals = rows.map((r) => r.hits).concat([bandLo, bandHi]);
  const xLo = Math.min(...ms);
  const xHi = Math.max(...ms, xLo + 1);
  const { plot, xs, ys } = frameScales(xLo, xHi, (lo, hi) =>
    linearScale(Math.min(...hitVals) * 0.98, Math.max(...hitVals, trials), lo, hi),
  );
  plot.title(`Coverage out of ${trials} intervals`);
  plot.axes(xs, ys, "m (points = 2^m)", "intervals containing the target");
  for (const [value, cls] of [
    [bandLo, "band-lo"],
    [bandHi, "band-hi"],
  ] as Array<[number, string]>) {
    const y = ys(value);
    plot.line(xs.ticks.length ? xs(xLo) : 0, y, xs(xHi), y, "#888",
              `stroke-dasharray="6,4" class="${cls}"`);
    plot.text(xs(xHi) + 2, y + 4, String(value), 'fill="#555"');
  }
  const groups = groupBy(rows, (r) => r.key);
  const legend: Array<[string, string]> = [];
  let i = 0;
  for (const [key, grp] of groups) {
    const color = PALETTE[i % PALETTE.length];
    const pts = grp
      .sort((a, b) => a.m - b.m)
      .map((r) => [xs(r.m), ys(r.hits)] as [number, number]);
    if (pts.length > 1) plot.polyline(pts, color);
    pts.forEach(([x, y]) => plot.circle(x, y, 3, color));
    legend.push([key, color]);
    i += 1;
  }
  plot.legend(legend);
  return plot.render();
}

/** Upper-percentile interval lengths, log scale. */
function lengths(data: RunData): string {
  expectColumns(data, ["m", "scheme", "method", "p90_length"], "lengths");
  const rows = data.rows.map((row) => ({
    m: num(row, "m"),
    key: `${row.scheme}/${row.method}`,
    len: num(row, "p90_length"),
  }));
  const lens = rows.map((r) => r.len).filter((v) => v > 0);
  if (lens.length === 0) throw new SchemaError("lengths: no positive lengths");
  const { plot, xs, ys } = frameScales(
    Math.min(...rows.map((r) => r.m)),
    Math.max(...rows.map((r) => r.m)),
    (lo, hi) => log10Scale(Math.min(...lens), Math.max(...lens), lo, hi),
  );
  plot.title("90th percentile interval length");
  plot.axes(xs, ys, "m (points = 2^m)", "length (log)");
  const groups = groupBy(rows, (r) => r.key);
  const legend: Array<[string, string]> = [];
  let i = 0;
  for (const [key, grp] of groups) {
    const color = PALETTE[i % PALETTE.length];
    const pts = grp
      .sort((a, b) => a.m - b.m)
      .map((r) => [xs(r.m), ys(Math.max(r.len, Math.min(...lens)))] as [number, number]);
    plot.polyline(pts, color);
    pts.forEach(([x, y]) => plot.circle(x, y, 2.5, color));
    legend.push([key, color]);
    i += 1;
  }
  plot.legend(legend);
  return plot.render();
}

function histogram(values: number[], bins: number): { edges: number[]; counts: number[] } {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const edges = Array.from({ length: bins + 1 }, (_, i) => lo + (span * i) / bins);
  const counts = new Array(bins).fill(0);
  for (const v of values) {
    const idx = Math.min(Math.floor(((v - lo) / span) * bins), bins - 1);
    counts[idx] += 1;
  }
  return { edges, counts };
}

/** Distribution of interval lengths per method (log10 binning). */
function robotLengths(data: RunData): string {
  expectColumns(data, ["method", "trial", "length", "hit"], "robot-lengths");
  const rows = data.rows
    .map((row) => ({ method: row.method, len: num(row, "length") }))
    .filter((r) => r.len > 0);
  if (rows.length === 0) throw new SchemaError("robot-lengths: no positive lengths");
  const logs = rows.map((r) => Math.log10(r.len));
  const groups = groupBy(rows, (r) => r.method);
  const nbins = 24;
  const lo = Math.min(...logs);
  const hi = Math.max(...logs);
  const plot = new Svg();
  const f = DEFAULT_FRAME;
  const xs = linearScale(lo, hi, f.left, f.width - f.right);
  let peak = 1;
  const hists = new Map<string, { edges: number[]; counts: number[] }>();
  for (const [method, grp] of groups) {
    const h = histogramFixed(grp.map((r) => Math.log10(r.len)), lo, hi, nbins);
    hists.set(method, h);
    peak = Math.max(peak, ...h.counts);
  }
  const ys = linearScale(0, peak * 1.05, f.height - f.bottom, f.top);
  plot.title("Distribution of interval lengths");
  plot.axes(xs, ys, "log10 length", "trials");
  const legend: Array<[string, string]> = [];
  let i = 0;
  for (const [method, h] of hists) {
    const color = PALETTE[i % PALETTE.length];
    const pts: Array<[number, number]> = [];
    for (let b = 0; b < nbins; b += 1) {
      pts.push([xs(h.edges[b]), ys(h.counts[b])]);
      pts.push([xs(h.edges[b + 1]), ys(h.counts[b])]);
    }
    plot.polyline(pts, color);
    legend.push([method, color]);
    i += 1;
  }
  plot.legend(legend);
  return plot.render();
}

function histogramFixed(values: number[], lo: number, hi: number, bins: number) {
  const span = hi - lo || 1;
  const edges = Array.from({ length: bins + 1 }, (_, i) => lo + (span * i) / bins);
  const counts = new Array(bins).fill(0);
  for (const v of values) {
    const idx = Math.min(Math.max(Math.floor(((v - lo) / span) * bins), 0), bins - 1);
    counts[idx] += 1;
  }
  return { edges, counts };
}

/** Replicate error histogram with a matched normal density for reference. */
function robotErrors(data: RunData): string {
  expectColumns(data, ["m", "scheme", "trial", "rep", "error"], "robot-errors");
  const errors = data.rows.map((row) => num(row, "error"));
  const { edges, counts } = histogram(errors, 30);
  const n = errors.length;
  const mean = errors.reduce((a, b) => a + b, 0) / n;
  const sd = Math.sqrt(errors.reduce((a, b) => a + (b - mean) ** 2, 0) / (n - 1));
  const binWidth = edges[1] - edges[0];
  const plot = new Svg();
  const f = DEFAULT_FRAME;
  const xs = linearScale(edges[0], edges[edges.length - 1], f.left, f.width - f.right);
  const densityPeak = (n * binWidth) / (sd * Math.sqrt(2 * Math.PI));
  const ys = linearScale(0, Math.max(...counts, densityPeak) * 1.05,
                         f.height - f.bottom, f.top);
  plot.title("Distribution of replicate errors");
  plot.axes(xs, ys, "error", "count");
  counts.forEach((c, b) => {
    if (c > 0) {
      plot.rect(xs(edges[b]), ys(c), xs(edges[b + 1]) - xs(edges[b]),
                ys(0) - ys(c), PALETTE[0], 'opacity="0.55"');
    }
  });
  // normal curve with the sample mean and spread, scaled to counts
  const curve: Array<[number, number]> = [];
  for (let i = 0; i <= 120; i += 1) {
    const x = edges[0] + ((edges[edges.length - 1] - edges[0]) * i) / 120;
    const dens = Math.exp(-0.5 * ((x - mean) / sd) ** 2) / (sd * Math.sqrt(2 * Math.PI));
    curve.push([xs(x), ys(dens * n * binWidth)]);
  }
  plot.polyline(curve, PALETTE[1], 'class="normal-reference"');
  plot.legend([["errors", PALETTE[0]], ["normal reference", PALETTE[1]]]);
  return plot.render();
}
