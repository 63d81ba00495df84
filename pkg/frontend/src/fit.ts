/** Least-squares fits matching the lab's scaling conventions. */

/** Solve the 3x3 normal equations for y = c0 + c1 x1 + c2 x2. */
function lstsq3(x1: number[], x2: number[], y: number[]): [number, number, number] {
  const n = y.length;
  const cols = [new Array(n).fill(1), x1, x2];
  const ata = [
    [0, 0, 0],
    [0, 0, 0],
    [0, 0, 0],
  ];
  const atb = [0, 0, 0];
  for (let i = 0; i < 3; i++) {
    for (let j = 0; j < 3; j++) {
      let s = 0;
      for (let k = 0; k < n; k++) s += cols[i][k] * cols[j][k];
      ata[i][j] = s;
    }
    let s = 0;
    for (let k = 0; k < n; k++) s += cols[i][k] * y[k];
    atb[i] = s;
  }
  // Gaussian elimination with partial pivoting
  const scale = Math.max(...ata.flat().map(Math.abs), 1e-300);
  const m = ata.map((row, i) => [...row, atb[i]]);
  for (let c = 0; c < 3; c++) {
    let piv = c;
    for (let r = c + 1; r < 3; r++) {
      if (Math.abs(m[r][c]) > Math.abs(m[piv][c])) piv = r;
    }
    if (Math.abs(m[piv][c]) < 1e-10 * scale) {
      throw new Error("rank-deficient design grid");
    }
    [m[c], m[piv]] = [m[piv], m[c]];
    for (let r = 0; r < 3; r++) {
      if (r === c) continue;
      const f = m[r][c] / m[c][c];
      for (let k = c; k < 4; k++) m[r][k] -= f * m[c][k];
    }
  }
  return [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]];
}

export interface ScalingFit {
  aEps: number;
  bT: number;
  logC: number;
}

/** log v = logC + aEps log(eps) + bT log(T), as in the lab's power-mode fit. */
export function scalingFit(eps: number[], T: number[], vol: number[]): ScalingFit {
  const keep: number[] = [];
  for (let i = 0; i < vol.length; i++) {
    if (vol[i] > 0) keep.push(i);
  }
  if (keep.length < 6) {
    throw new Error("need at least 6 positive-volume rows for the fit");
  }
  const le = keep.map((i) => Math.log(eps[i]));
  const lt = keep.map((i) => Math.log(T[i]));
  const lv = keep.map((i) => Math.log(vol[i]));
  const [logC, aEps, bT] = lstsq3(le, lt, lv);
  return { aEps, bT, logC };
}

/** Slope of y against x by simple least squares (entropy lines). */
export function slope(x: number[], y: number[]): number {
  const n = x.length;
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx === 0) throw new Error("degenerate abscissa for slope fit");
  return sxy / sxx;
}
