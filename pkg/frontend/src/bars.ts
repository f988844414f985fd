/** Render the ten per-class response bars as an HTML fragment.
 *
 * Bars stay in fixed class order 0..9; the bar whose index equals the
 * service-returned label carries the `bar-best` class. Widths are scaled
 * to the score range so relative responses stay readable whatever the
 * decision-value magnitudes are.
 */
export function barsHtml(scores: number[] | null, label: number | null): string {
  const rows: string[] = [];
  for (let k = 0; k < 10; k++) {
    const score = scores ? scores[k] : null;
    const width = scores ? barWidthPercent(scores, k) : 0;
    const best = label !== null && k === label ? " bar-best" : "";
    const shown = score === null ? "" : score.toFixed(3);
    rows.push(
      `<div class="bar-row" data-class="${k}">` +
        `<span class="bar-label">${k}</span>` +
        `<span class="bar-track"><span class="bar-fill${best}" style="width:${width}%"></span></span>` +
        `<span class="bar-value">${shown}</span>` +
        `</div>`,
    );
  }
  return rows.join("\n");
}

export function barWidthPercent(scores: number[], k: number): number {
  const lo = Math.min(...scores);
  const hi = Math.max(...scores);
  if (hi === lo) return 50;
  return Math.round(((scores[k] - lo) / (hi - lo)) * 95) + 5;
}
