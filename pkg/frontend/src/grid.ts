export const GRID = 32;

export type Brush = 1 | 2;

/** The 32x32 binary drawing surface backing the pad. */
export class PixelGrid {
  readonly cells: Uint8Array;
  dirty = false;

  constructor() {
    this.cells = new Uint8Array(GRID * GRID);
  }

  at(row: number, col: number): number {
    return this.cells[row * GRID + col];
  }

  /**
   * Paint every cell within the brush radius of (row, col); strokes outside
   * the grid are clipped, never an error.
   */
  stroke(row: number, col: number, brush: Brush = 1): void {
    const reach = brush - 1;
    let touched = false;
    for (let r = row - reach; r <= row + reach; r++) {
      for (let c = col - reach; c <= col + reach; c++) {
        if (r < 0 || r >= GRID || c < 0 || c >= GRID) continue;
        this.cells[r * GRID + c] = 1;
        touched = true;
      }
    }
    if (touched) this.dirty = true;
  }

  clear(): void {
    this.cells.fill(0);
    this.dirty = false;
  }

  isEmpty(): boolean {
    return this.cells.every((v) => v === 0);
  }

  /** The wire-protocol representation: 32 strings of 32 '0'/'1' characters. */
  toRows(): string[] {
    const rows: string[] = [];
    for (let r = 0; r < GRID; r++) {
      let line = "";
      for (let c = 0; c < GRID; c++) line += this.cells[r * GRID + c] ? "1" : "0";
      rows.push(line);
    }
    return rows;
  }
}
