/**
 * Minimal deterministic SVG chart builder: linear axes, ticks, points,
 * polylines, reference lines, annotations.  Coordinates are fixed to
 * two decimals so identical inputs produce byte-identical files.
 */

export interface Extent {
  min: number;
  max: number;
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 55 };

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function fmt(value: number): string {
  return value.toFixed(2);
}

function tickLabel(value: number): string {
  const rounded = Number(value.toPrecision(6));
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export function niceTicks(extent: Extent, count = 6): number[] {
  const span = extent.max - extent.min;
  if (span <= 0) return [extent.min];
  const rawStep = span / count;
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((c) => span / c <= count) ?? candidates[candidates.length - 1]!;
  const ticks: number[] = [];
  for (let t = Math.ceil(extent.min / step) * step; t <= extent.max + 1e-9; t += step) {
    ticks.push(Number(t.toPrecision(12)));
  }
  return ticks;
}

export class Chart {
  private readonly body: string[] = [];
  private readonly x: Extent;
  private readonly y: Extent;
  private colorIndex = 0;

  constructor(
    x: Extent,
    y: Extent,
    private readonly title: string,
    private readonly xLabel: string,
    private readonly yLabel: string,
  ) {
    const pad = (e: Extent): Extent => {
      const span = e.max - e.min;
      const slack = span > 0 ? span * 0.06 : Math.max(1, Math.abs(e.max)) * 0.5;
      return { min: e.min - slack, max: e.max + slack };
    };
    this.x = pad(x);
    this.y = pad(y);
  }

  nextColor(): string {
    const color = PALETTE[this.colorIndex % PALETTE.length]!;
    this.colorIndex += 1;
    return color;
  }

  private sx(value: number): number {
    const f = (value - this.x.min) / (this.x.max - this.x.min);
    return MARGIN.left + f * (WIDTH - MARGIN.left - MARGIN.right);
  }

  private sy(value: number): number {
    const f = (value - this.y.min) / (this.y.max - this.y.min);
    return HEIGHT - MARGIN.bottom - f * (HEIGHT - MARGIN.top - MARGIN.bottom);
  }

  points(data: Array<[number, number]>, color: string, radius = 3.5): void {
    for (const [px, py] of data) {
      this.body.push(
        `<circle cx="${fmt(this.sx(px))}" cy="${fmt(this.sy(py))}" r="${radius}" fill="${color}"/>`,
      );
    }
  }

  line(data: Array<[number, number]>, color: string, dashed = false): void {
    const pts = data.map(([px, py]) => `${fmt(this.sx(px))},${fmt(this.sy(py))}`).join(" ");
    const dash = dashed ? ' stroke-dasharray="6,4"' : "";
    this.body.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.8"${dash}/>`,
    );
  }

  hline(yValue: number, color: string, label?: string): void {
    const y = fmt(this.sy(yValue));
    this.body.push(
      `<line x1="${fmt(MARGIN.left)}" y1="${y}" x2="${fmt(WIDTH - MARGIN.right)}" y2="${y}" ` +
        `stroke="${color}" stroke-width="1" stroke-dasharray="3,3"/>`,
    );
    if (label) {
      this.body.push(
        `<text x="${fmt(WIDTH - MARGIN.right - 4)}" y="${fmt(this.sy(yValue) - 5)}" ` +
          `text-anchor="end" font-size="11" fill="${color}">${escapeXml(label)}</text>`,
      );
    }
  }

  annotate(text: string, slot = 0): void {
    this.body.push(
      `<text x="${fmt(MARGIN.left + 10)}" y="${fmt(MARGIN.top + 16 + slot * 16)}" ` +
        `font-size="12" fill="#333">${escapeXml(text)}</text>`,
    );
  }

  seriesLabel(text: string, color: string, slot: number): void {
    const y = MARGIN.top + 16 + slot * 16;
    this.body.push(
      `<rect x="${fmt(WIDTH - MARGIN.right - 150)}" y="${fmt(y - 9)}" width="10" height="10" fill="${color}"/>`,
      `<text x="${fmt(WIDTH - MARGIN.right - 135)}" y="${fmt(y)}" font-size="12" fill="#333">${escapeXml(text)}</text>`,
    );
  }

  render(): string {
    const axisColor = "#444";
    const parts: string[] = [];
    parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${fmt(WIDTH / 2)}" y="22" text-anchor="middle" font-size="15" fill="#111">${escapeXml(this.title)}</text>`,
    );
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    parts.push(
      `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="${axisColor}"/>`,
      `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="${axisColor}"/>`,
    );
    for (const t of niceTicks(this.x)) {
      const px = fmt(this.sx(t));
      parts.push(
        `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="${axisColor}"/>`,
        `<text x="${px}" y="${y0 + 18}" text-anchor="middle" font-size="11" fill="#333">${tickLabel(t)}</text>`,
      );
    }
    for (const t of niceTicks(this.y)) {
      const py = fmt(this.sy(t));
      parts.push(
        `<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="${axisColor}"/>`,
        `<text x="${x0 - 8}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="11" fill="#333">${tickLabel(t)}</text>`,
      );
    }
    parts.push(
      `<text x="${fmt((x0 + x1) / 2)}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13" fill="#111">${escapeXml(this.xLabel)}</text>`,
      `<text x="18" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" font-size="13" fill="#111" transform="rotate(-90 18 ${fmt((y0 + y1) / 2)})">${escapeXml(this.yLabel)}</text>`,
    );
    parts.push(...this.body, "</svg>");
    return parts.join("\n") + "\n";
  }
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function extentOf(values: number[]): Extent {
  if (values.length === 0) throw new Error("cannot scale an empty series");
  return { min: Math.min(...values), max: Math.max(...values) };
}
