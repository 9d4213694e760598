import type { MetricsRow } from "./types.js";

// Inline SVG chart for the two metric series; no plotting dependency needed
// for a single polyline pair.

const WIDTH = 560;
const HEIGHT = 180;
const PAD = 28;

function polyline(points: [number, number][], cls: string): string {
  const path = points.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join(" ");
  return `<polyline class="${cls}" fill="none" points="${path}"/>`;
}

function scaled(
  rows: MetricsRow[],
  pick: (row: MetricsRow) => number,
  max: number,
): [number, number][] {
  const span = Math.max(rows.length - 1, 1);
  return rows.map((row, i) => [
    PAD + ((WIDTH - 2 * PAD) * i) / span,
    HEIGHT - PAD - (HEIGHT - 2 * PAD) * (max > 0 ? pick(row) / max : 0),
  ]);
}

export function ratioChart(rows: MetricsRow[]): string {
  if (rows.length === 0) {
    return `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="chart"><text x="${WIDTH / 2}" y="${HEIGHT / 2}" text-anchor="middle" class="chart-empty">no statements yet</text></svg>`;
  }
  const ratio = polyline(scaled(rows, (r) => r.ratio, 1.0), "series-ratio");
  const top = Math.max(...rows.map((r) => r.tot_work));
  const work = polyline(scaled(rows, (r) => r.tot_work, top), "series-work");
  const opt = polyline(scaled(rows, (r) => r.opt_tot_work, top), "series-opt");
  const last = rows[rows.length - 1];
  return `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="chart" role="img">
  <line x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${HEIGHT - PAD}" class="axis"/>
  <line x1="${PAD}" y1="${PAD}" x2="${PAD}" y2="${HEIGHT - PAD}" class="axis"/>
  ${work}${opt}${ratio}
  <text x="${WIDTH - PAD}" y="${PAD}" text-anchor="end" class="chart-label">ratio ${last.ratio.toFixed(4)}</text>
</svg>`;
}
