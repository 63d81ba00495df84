/** The four standard figures rendered from the lab's CSV artifacts. */

import { column, readCsv, SchemaError, Table } from "./csv";
import { scalingFit, slope } from "./fit";
import { color, Figure, linScale, linTicks, logScale, logTicks } from "./svg";

export interface FigureSpec {
  kind: "scaling" | "remainder" | "entropy" | "returnmap";
  input: string;
  boundExp?: number;      // remainder overlay shape h^e
  boundC?: number;        // calibrated overlay constant (defaults to the
                          // largest-h row's calibration)
  slack?: number;         // remainder overlay multiplier
}

function uniqueSorted(vals: number[]): number[] {
  return [...new Set(vals)].sort((a, b) => a - b);
}

function finitePositive(vals: number[]): number[] {
  return vals.filter((v) => Number.isFinite(v) && v > 0);
}

/** Log-log recurrence volumes against eps, one line per T, slope annotated. */
export function scalingFigure(spec: FigureSpec): string {
  const table = readCsv(spec.input, ["model", "T", "eps", "volume"]);
  const T = column(table, "T");
  const eps = column(table, "eps");
  const vol = column(table, "volume");
  const fit = scalingFit(eps, T, vol);

  const pos = vol.map((v, i) => [eps[i], T[i], v]).filter((r) => r[2] > 0);
  if (pos.length === 0) {
    throw new SchemaError("scaling figure needs at least one positive volume");
  }
  const epsPos = pos.map((r) => r[0]);
  const volPos = pos.map((r) => r[2]);
  const fig = new Figure("recurrence volume scaling");
  const a = fig.plotArea;
  const sx = logScale(Math.min(...epsPos), Math.max(...epsPos), a.x0, a.x1);
  const sy = logScale(Math.min(...volPos), Math.max(...volPos), a.y0, a.y1);
  fig.axes("eps", "volume", logTicks(Math.min(...epsPos), Math.max(...epsPos)),
           logTicks(Math.min(...volPos), Math.max(...volPos)), sx, sy);

  const legend: Array<[string, string]> = [];
  uniqueSorted(T).forEach((tVal, i) => {
    const xs: number[] = [];
    const ys: number[] = [];
    for (const [e, t, v] of pos) {
      if (t === tVal) {
        xs.push(e);
        ys.push(v);
      }
    }
    if (xs.length) {
      fig.polyline(xs, ys, sx, sy, color(i));
      fig.dots(xs, ys, sx, sy, color(i));
      legend.push([`T = ${tVal}`, color(i)]);
    }
  });
  fig.legend(legend);
  fig.annotation(`a_eps=${fit.aEps.toFixed(2)}`);
  fig.annotation(`b_T=${fit.bT.toFixed(2)}`, 1);
  return fig.render();
}

/** |R_h| against h, log-log, with an optional calibrated bound overlay. */
export function remainderFigure(spec: FigureSpec): string {
  const table = readCsv(spec.input, ["model", "h", "N", "leading", "R_h"]);
  const h = column(table, "h");
  const rh = column(table, "R_h").map(Math.abs);
  const keep = h.map((_, i) => i).filter((i) => rh[i] > 0);
  if (keep.length === 0) {
    throw new SchemaError("remainder figure needs nonzero remainders");
  }
  const hs = keep.map((i) => h[i]);
  const rs = keep.map((i) => rh[i]);
  const fig = new Figure("Weyl remainder series");
  const a = fig.plotArea;
  let yLo = Math.min(...rs);
  let yHi = Math.max(...rs);

  let overlay: { xs: number[]; ys: number[] } | null = null;
  if (spec.boundExp !== undefined) {
    const exp = spec.boundExp;
    const slack = spec.slack ?? 1.5;
    const hMax = Math.max(...hs);
    const C = (spec.boundC ?? rs[hs.indexOf(hMax)] / hMax ** exp) * slack;
    const xs = [...hs].sort((x, y) => x - y);
    const ys = xs.map((x) => C * x ** exp);
    overlay = { xs, ys };
    yLo = Math.min(yLo, ...ys);
    yHi = Math.max(yHi, ...ys);
  }

  const sx = logScale(Math.min(...hs), Math.max(...hs), a.x0, a.x1);
  const sy = logScale(yLo, yHi, a.y0, a.y1);
  fig.axes("h", "|R_h|", logTicks(Math.min(...hs), Math.max(...hs)),
           logTicks(yLo, yHi), sx, sy);
  fig.dots(hs, rs, sx, sy, color(0));
  if (overlay) {
    fig.polyline(overlay.xs, overlay.ys, sx, sy, color(1), true);
    fig.legend([["series", color(0)], [`bound h^${spec.boundExp}`, color(1)]]);
  }
  return fig.render();
}

/** ln N(T, eps) against T, one line per eps, entropy slope annotated. */
export function entropyFigure(spec: FigureSpec): string {
  const table = readCsv(spec.input, ["T", "eps", "N"]);
  const T = column(table, "T");
  const eps = column(table, "eps");
  const N = column(table, "N");
  const fig = new Figure("separated-set growth");
  const a = fig.plotArea;
  const lnN = N.map((v) => Math.log(Math.max(v, 1)));
  const sx = linScale(Math.min(...T), Math.max(...T), a.x0, a.x1);
  const sy = linScale(Math.min(...lnN), Math.max(...lnN), a.y0, a.y1);
  fig.axes("T", "ln N", linTicks(Math.min(...T), Math.max(...T)),
           linTicks(Math.min(...lnN), Math.max(...lnN)), sx, sy);

  const legend: Array<[string, string]> = [];
  const epsVals = uniqueSorted(eps).reverse();
  let hTop = NaN;
  epsVals.forEach((eVal, i) => {
    const xs: number[] = [];
    const ys: number[] = [];
    for (let k = 0; k < T.length; k++) {
      if (eps[k] === eVal) {
        xs.push(T[k]);
        ys.push(lnN[k]);
      }
    }
    fig.polyline(xs, ys, sx, sy, color(i));
    fig.dots(xs, ys, sx, sy, color(i));
    legend.push([`eps = ${eVal}`, color(i)]);
    if (i === epsVals.length - 1) {
      hTop = slope(xs, ys);
    }
  });
  fig.legend(legend);
  fig.annotation(`h_top=${hTop.toFixed(3)}`);
  return fig.render();
}

/** Return angle theta(alpha) with the return time overlaid. */
export function returnmapFigure(spec: FigureSpec): string {
  const table = readCsv(spec.input, ["alpha", "tau", "theta", "clairaut"]);
  const alpha = column(table, "alpha");
  const theta = column(table, "theta");
  const tau = column(table, "tau");
  const fig = new Figure("equatorial return map");
  const a = fig.plotArea;
  const yAll = [...theta, ...tau];
  const sx = linScale(Math.min(...alpha), Math.max(...alpha), a.x0, a.x1);
  const sy = linScale(Math.min(...yAll), Math.max(...yAll), a.y0, a.y1);
  fig.axes("alpha", "angle / time", linTicks(Math.min(...alpha), Math.max(...alpha)),
           linTicks(Math.min(...yAll), Math.max(...yAll)), sx, sy);
  fig.polyline(alpha, theta, sx, sy, color(0));
  fig.polyline(alpha, tau, sx, sy, color(1), true);
  fig.legend([["theta", color(0)], ["tau", color(1)]]);
  return fig.render();
}

export function render(spec: FigureSpec): string {
  switch (spec.kind) {
    case "scaling":
      return scalingFigure(spec);
    case "remainder":
      return remainderFigure(spec);
    case "entropy":
      return entropyFigure(spec);
    case "returnmap":
      return returnmapFigure(spec);
    default:
      throw new SchemaError(`unknown figure kind '${(spec as FigureSpec).kind}'`);
  }
}
