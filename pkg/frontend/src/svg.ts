/**
 * Minimal deterministic SVG scene builder.
 *
 * Every figure is 720x480 with a fixed margin box; numbers are formatted
 * with fixed precision so rendering the same data always produces the
 * same bytes.  No timestamps, no randomness.
 */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { left: 72, right: 24, top: 36, bottom: 56 };

export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`non-finite coordinate ${x}`);
  const s = x.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export interface Scale {
  (value: number): number;
  ticks: number[];
  label: (v: number) => string;
}

function niceTicks(lo: number, hi: number, count: number): number[] {
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (span / count) / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (hi <= lo) {
    hi = lo + 1;
  }
  const f = ((value: number) =>
    outLo + ((value - lo) / (hi - lo)) * (outHi - outLo)) as Scale;
  f.ticks = niceTicks(lo, hi, 6);
  f.label = (v) => String(Number(v.toPrecision(6)));
  return f;
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (lo <= 0 || hi <= lo) throw new Error(`log scale needs 0 < lo < hi, got [${lo}, ${hi}]`);
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const f = ((value: number) =>
    outLo + ((Math.log10(value) - llo) / (lhi - llo)) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo - 1e-9); e <= Math.floor(lhi + 1e-9); e += 1) {
    ticks.push(Math.pow(10, e));
  }
  f.ticks = ticks.length >= 2 ? ticks : [lo, hi];
  f.label = (v) => {
    const e = Math.log10(v);
    return Number.isInteger(e) ? `1e${e}` : String(Number(v.toPrecision(3)));
  };
  return f;
}

export class Svg {
  private parts: string[] = [];

  constructor(title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
        `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`
    );
    this.parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
    this.text(WIDTH / 2, 22, title, 15, "middle", "#111");
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash = "") {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"${d}/>`
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5, dash = "") {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`
    );
  }

  circle(x: number, y: number, r: number, fill: string) {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, opacity = 1) {
    const o = opacity === 1 ? "" : ` fill-opacity="${opacity}"`;
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"${o}/>`
    );
  }

  text(x: number, y: number, content: string, size = 11, anchor = "start", fill = "#333") {
    const esc = content
      .replace(/&/g, "&amp;")
      .replace(/</g, "&lt;")
      .replace(/>/g, "&gt;");
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}" ` +
        `fill="${fill}">${esc}</text>`
    );
  }

  errorBar(x: number, yLo: number, yHi: number, color: string, cap = 3) {
    this.line(x, yLo, x, yHi, color, 1);
    this.line(x - cap, yLo, x + cap, yLo, color, 1);
    this.line(x - cap, yHi, x + cap, yHi, color, 1);
  }

  axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string) {
    const { left, right, top, bottom } = MARGIN;
    const x0 = left;
    const x1 = WIDTH - right;
    const y0 = HEIGHT - bottom;
    const y1 = top;
    this.line(x0, y0, x1, y0, "#222", 1);
    this.line(x0, y0, x0, y1, "#222", 1);
    for (const t of xs.ticks) {
      const px = xs(t);
      if (px < x0 - 0.5 || px > x1 + 0.5) continue;
      this.line(px, y0, px, y0 + 4, "#222", 1);
      this.text(px, y0 + 18, xs.label(t), 10, "middle");
    }
    for (const t of ys.ticks) {
      const py = ys(t);
      if (py > y0 + 0.5 || py < y1 - 0.5) continue;
      this.line(x0 - 4, py, x0, py, "#222", 1);
      this.text(x0 - 7, py + 3.5, ys.label(t), 10, "end");
    }
    this.text((x0 + x1) / 2, HEIGHT - 14, xLabel, 12, "middle", "#111");
    this.parts.push(
      `<text x="18" y="${fmt((y0 + y1) / 2)}" font-size="12" text-anchor="middle" ` +
        `fill="#111" transform="rotate(-90 18 ${fmt((y0 + y1) / 2)})">${yLabel}</text>`
    );
  }

  legend(entries: Array<[string, string]>, x = MARGIN.left + 12, y = MARGIN.top + 14) {
    entries.forEach(([label, color], i) => {
      const yy = y + i * 16;
      this.line(x, yy - 4, x + 18, yy - 4, color, 2);
      this.text(x + 24, yy, label, 11);
    });
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}
