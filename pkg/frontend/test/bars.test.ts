import { describe, expect, it } from "vitest";
import { barWidthPercent, barsHtml } from "../src/bars.js";

const count = (haystack: string, needle: string) =>
  haystack.split(needle).length - 1;

describe("barsHtml", () => {
  it("renders exactly 10 bars in fixed class order", () => {
    const scores = [0.1, -0.4, 2.0, 0.3, -1.2, 0.0, 0.9, -0.1, 0.2, 0.5];
    const html = barsHtml(scores, 2);
    expect(count(html, "bar-row")).toBe(10);
    const order = [...html.matchAll(/data-class="(\d)"/g)].map((m) => m[1]);
    expect(order).toEqual(["0","1","2","3","4","5","6","7","8","9"]);
  });

  it("highlights exactly the bar whose index equals the label", () => {
    const scores = [0.1, -0.4, 2.0, 0.3, -1.2, 0.0, 0.9, -0.1, 0.2, 0.5];
    const html = barsHtml(scores, 2);
    expect(count(html, "bar-best")).toBe(1);
    const rows = html.split("\n");
    expect(rows[2]).toContain("bar-best");
    for (const [i, row] of rows.entries()) {
      if (i !== 2) expect(row).not.toContain("bar-best");
    }
  });

  it("renders empty placeholders before any classification", () => {
    const html = barsHtml(null, null);
    expect(count(html, "bar-row")).toBe(10);
    expect(count(html, "bar-best")).toBe(0);
    expect(count(html, "width:0%")).toBe(10);
  });

  it("scales widths to the score range", () => {
    const scores = [0, 0, 0, 0, 0, 0, 0, 0, -2, 2];
    expect(barWidthPercent(scores, 9)).toBe(100);
    expect(barWidthPercent(scores, 8)).toBe(5);
    expect(barWidthPercent(scores, 0)).toBe(53); // midpoint of the range
  });

  it("degenerate equal scores get a flat half-width", () => {
    const scores = Array(10).fill(0.25);
    for (let k = 0; k < 10; k++) expect(barWidthPercent(scores, k)).toBe(50);
  });
});
