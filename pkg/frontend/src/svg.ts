/** Minimal deterministic SVG scene builder: fixed canvas, no timestamps. */

export const WIDTH = 720;
export const HEIGHT = 480;
const MARGIN = { left: 70, right: 20, top: 36, bottom: 52 };

export type Scale = (v: number) => number;

export function linScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  return (v) => outLo + ((v - lo) / span) * (outHi - outLo);
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  return (v) => outLo + ((Math.log10(v) - llo) / span) * (outHi - outLo);
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                 "#8c564b", "#17becf", "#7f7f7f"];

export function color(i: number): string {
  return PALETTE[i % PALETTE.length];
}

function fmtTick(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a < 1e-3 || a >= 1e4)) return v.toExponential(0);
  return String(Math.round(v * 1000) / 1000);
}

export class Figure {
  private parts: string[] = [];

  constructor(public title: string) {}

  get plotArea() {
    return {
      x0: MARGIN.left,
      x1: WIDTH - MARGIN.right,
      y0: HEIGHT - MARGIN.bottom,
      y1: MARGIN.top,
    };
  }

  axes(xLabel: string, yLabel: string, xTicks: Array<[number, string]>,
       yTicks: Array<[number, string]>, sx: Scale, sy: Scale): void {
    const a = this.plotArea;
    this.parts.push(
      `<rect x="${a.x0}" y="${a.y1}" width="${a.x1 - a.x0}" height="${a.y0 - a.y1}" fill="none" stroke="#333" stroke-width="1"/>`,
    );
    for (const [v, label] of xTicks) {
      const x = sx(v);
      this.parts.push(
        `<line x1="${x.toFixed(2)}" y1="${a.y0}" x2="${x.toFixed(2)}" y2="${a.y0 + 5}" stroke="#333"/>`,
        `<text x="${x.toFixed(2)}" y="${a.y0 + 18}" font-size="11" text-anchor="middle">${label}</text>`,
      );
    }
    for (const [v, label] of yTicks) {
      const y = sy(v);
      this.parts.push(
        `<line x1="${a.x0 - 5}" y1="${y.toFixed(2)}" x2="${a.x0}" y2="${y.toFixed(2)}" stroke="#333"/>`,
        `<text x="${a.x0 - 8}" y="${(y + 4).toFixed(2)}" font-size="11" text-anchor="end">${label}</text>`,
      );
    }
    this.parts.push(
      `<text x="${(a.x0 + a.x1) / 2}" y="${HEIGHT - 14}" font-size="13" text-anchor="middle">${xLabel}</text>`,
      `<text x="18" y="${(a.y0 + a.y1) / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 18 ${(a.y0 + a.y1) / 2})">${yLabel}</text>`,
      `<text x="${(a.x0 + a.x1) / 2}" y="22" font-size="14" text-anchor="middle" font-weight="bold">${this.title}</text>`,
    );
  }

  polyline(xs: number[], ys: number[], sx: Scale, sy: Scale, stroke: string,
           dashed = false): void {
    const pts = xs.map((x, i) => `${sx(x).toFixed(2)},${sy(ys[i]).toFixed(2)}`).join(" ");
    const dash = dashed ? ' stroke-dasharray="6 4"' : "";
    this.parts.push(`<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="1.6"${dash}/>`);
  }

  dots(xs: number[], ys: number[], sx: Scale, sy: Scale, fill: string): void {
    for (let i = 0; i < xs.length; i++) {
      this.parts.push(
        `<circle cx="${sx(xs[i]).toFixed(2)}" cy="${sy(ys[i]).toFixed(2)}" r="3" fill="${fill}"/>`,
      );
    }
  }

  annotation(text: string, slot = 0): void {
    const a = this.plotArea;
    this.parts.push(
      `<text x="${a.x1 - 8}" y="${a.y1 + 18 + 16 * slot}" font-size="12" text-anchor="end" fill="#222">${text}</text>`,
    );
  }

  legend(entries: Array<[string, string]>): void {
    const a = this.plotArea;
    entries.forEach(([label, col], i) => {
      const y = a.y0 - 12 - 16 * i;
      this.parts.push(
        `<line x1="${a.x0 + 10}" y1="${y}" x2="${a.x0 + 34}" y2="${y}" stroke="${col}" stroke-width="2"/>`,
        `<text x="${a.x0 + 40}" y="${y + 4}" font-size="11">${label}</text>`,
      );
    });
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      ...this.parts,
      "</svg>",
    ].join("\n");
  }
}

export function logTicks(lo: number, hi: number): Array<[number, string]> {
  const out: Array<[number, string]> = [];
  const d0 = Math.ceil(Math.log10(lo) - 1e-9);
  const d1 = Math.floor(Math.log10(hi) + 1e-9);
  for (let d = d0; d <= d1; d++) {
    out.push([10 ** d, `1e${d}`]);
  }
  if (out.length < 2) {
    out.length = 0;
    out.push([lo, fmtTick(lo)], [hi, fmtTick(hi)]);
  }
  return out;
}

export function linTicks(lo: number, hi: number, n = 6): Array<[number, string]> {
  const out: Array<[number, string]> = [];
  for (let i = 0; i < n; i++) {
    const v = lo + ((hi - lo) * i) / (n - 1);
    out.push([v, fmtTick(v)]);
  }
  return out;
}
