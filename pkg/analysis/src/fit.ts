/** Ordinary least squares on (x, ln y), duplicated here for figure
 * annotation; the harness fit carried in the CSV stays authoritative. */

export interface LogFit {
  slope: number;
  intercept: number;
  points: number;
}

export function logLeastSquares(xs: number[], ys: number[]): LogFit | null {
  const pts: Array<[number, number]> = [];
  for (let i = 0; i < xs.length; i++) {
    const y = ys[i]!;
    if (y > 0 && Number.isFinite(y)) pts.push([xs[i]!, Math.log(y)]);
  }
  if (pts.length < 2) return null;
  const mx = pts.reduce((s, p) => s + p[0], 0) / pts.length;
  const my = pts.reduce((s, p) => s + p[1], 0) / pts.length;
  let sxx = 0;
  let sxy = 0;
  for (const [x, y] of pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx === 0) return null;
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx, points: pts.length };
}
