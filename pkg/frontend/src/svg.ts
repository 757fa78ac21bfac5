/** Minimal SVG plotting: scales, axes, polylines, bars. No DOM, no deps. */

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_FRAME: Frame = {
  width: 640,
  height: 420,
  left: 70,
  right: 20,
  top: 30,
  bottom: 50,
};

export interface Scale {
  (v: number): number;
  ticks: number[];
  label: (v: number) => string;
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  const fn = ((v: number) => outLo + ((v - lo) / span) * (outHi - outLo)) as Scale;
  const step = niceStep(span);
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12; t += step) {
    ticks.push(Number(t.toPrecision(10)));
  }
  fn.ticks = ticks;
  fn.label = (v) => formatTick(v);
  return fn;
}

export function log10Scale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const fn = ((v: number) => outLo + ((Math.log10(v) - llo) / span) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let p = Math.ceil(llo); p <= Math.floor(lhi); p += 1) {
    ticks.push(10 ** p);
  }
  if (ticks.length === 0) {
    ticks.push(lo, hi);
  }
  fn.ticks = ticks;
  fn.label = (v) => v.toExponential(0);
  return fn;
}

function niceStep(span: number): number {
  const raw = span / 6;
  const mag = 10 ** Math.floor(Math.log10(raw));
  for (const mult of [1, 2, 5, 10]) {
    if (raw <= mult * mag) {
      return mult * mag;
    }
  }
  return 10 * mag;
}

function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 10000 || a < 0.01) return v.toExponential(1);
  return String(Number(v.toPrecision(6)));
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class Svg {
  private parts: string[] = [];

  constructor(readonly frame: Frame = DEFAULT_FRAME) {}

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       extra = ""): void {
    this.parts.push(
      `<line x1="${r(x1)}" y1="${r(y1)}" x2="${r(x2)}" y2="${r(y2)}" ` +
        `stroke="${stroke}" ${extra}/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, extra = ""): void {
    const d = pts.map(([x, y]) => `${r(x)},${r(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${d}" fill="none" stroke="${stroke}" stroke-width="1.6" ${extra}/>`,
    );
  }

  circle(x: number, y: number, radius: number, fill: string): void {
    this.parts.push(`<circle cx="${r(x)}" cy="${r(y)}" r="${radius}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, extra = ""): void {
    this.parts.push(
      `<rect x="${r(x)}" y="${r(y)}" width="${r(w)}" height="${r(h)}" fill="${fill}" ${extra}/>`,
    );
  }

  text(x: number, y: number, content: string, extra = ""): void {
    this.parts.push(
      `<text x="${r(x)}" y="${r(y)}" font-family="sans-serif" font-size="12" ${extra}>` +
        `${esc(content)}</text>`,
    );
  }

  axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string): void {
    const f = this.frame;
    const bot = f.height - f.bottom;
    this.line(f.left, f.top, f.left, bot, "#000");
    this.line(f.left, bot, f.width - f.right, bot, "#000");
    for (const t of xs.ticks) {
      const x = xs(t);
      this.line(x, bot, x, bot + 4, "#000");
      this.text(x, bot + 18, xs.label(t), 'text-anchor="middle"');
    }
    for (const t of ys.ticks) {
      const y = ys(t);
      this.line(f.left - 4, y, f.left, y, "#000");
      this.text(f.left - 7, y + 4, ys.label(t), 'text-anchor="end"');
    }
    this.text((f.left + f.width - f.right) / 2, f.height - 12, xLabel,
              'text-anchor="middle"');
    this.text(14, f.top - 10, yLabel);
  }

  legend(entries: Array<[string, string]>): void {
    const f = this.frame;
    entries.forEach(([label, color], i) => {
      const y = f.top + 14 + i * 16;
      const x = f.width - f.right - 150;
      this.line(x, y - 4, x + 18, y - 4, color, 'stroke-width="2"');
      this.text(x + 24, y, label);
    });
  }

  title(content: string): void {
    this.text(this.frame.width / 2, 16, content,
              'text-anchor="middle" font-weight="bold"');
  }

  render(): string {
    const f = this.frame;
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${f.width}" ` +
      `height="${f.height}" viewBox="0 0 ${f.width} ${f.height}">\n` +
      `<rect width="${f.width}" height="${f.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function r(v: number): string {
  return String(Math.round(v * 100) / 100);
}
