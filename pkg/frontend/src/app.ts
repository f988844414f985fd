import { PixelGrid } from "./grid.js";

export interface ClassifyResponse {
  label: number;
  scores: number[];
}

/** Posts the grid rows to the service; rejects on HTTP or network failure. */
export type Poster = (rows: string[]) => Promise<ClassifyResponse>;

export interface ViewState {
  label: number | null;
  scores: number[] | null;
  pending: boolean;
  error: string | null;
}

type Schedule = (fn: () => void, ms: number) => unknown;
type Cancel = (handle: unknown) => void;

export const DEBOUNCE_MS = 250;

/**
 * Drawing-pad view model. Classification labels always come from the
 * service response, never from local computation; a failed request keeps
 * the previous view and raises the error banner instead.
 */
export class App {
  readonly grid = new PixelGrid();
  view: ViewState = { label: null, scores: null, pending: false, error: null };

  private poster: Poster;
  private onChange: () => void;
  private schedule: Schedule;
  private cancel: Cancel;
  private debounceHandle: unknown = null;
  private inFlight = false;
  private resubmit = false;

  constructor(
    poster: Poster,
    onChange: () => void = () => {},
    schedule: Schedule = (fn, ms) => setTimeout(fn, ms),
    cancel: Cancel = (h) => clearTimeout(h as number),
  ) {
    this.poster = poster;
    this.onChange = onChange;
    this.schedule = schedule;
    this.cancel = cancel;
  }

  strokeAt(row: number, col: number, brush: 1 | 2 = 1): void {
    this.grid.stroke(row, col, brush);
    this.onChange();
  }

  /** Stroke finished: submit after the debounce window, latest stroke wins. */
  strokeEnd(): void {
    this.cancelDebounce();
    this.debounceHandle = this.schedule(() => {
      this.debounceHandle = null;
      void this.submit();
    }, DEBOUNCE_MS);
  }

  private cancelDebounce(): void {
    if (this.debounceHandle !== null) {
      this.cancel(this.debounceHandle);
      this.debounceHandle = null;
    }
  }

  /** At most one request in flight; a submit during flight re-fires after. */
  async submit(): Promise<void> {
    if (this.inFlight) {
      this.resubmit = true;
      return;
    }
    this.inFlight = true;
    this.view = { ...this.view, pending: true };
    this.onChange();
    try {
      const resp = await this.poster(this.grid.toRows());
      this.view = {
        label: resp.label,
        scores: resp.scores,
        pending: false,
        error: null,
      };
    } catch (err) {
      // keep the previous classification on screen, surface the failure
      this.view = {
        ...this.view,
        pending: false,
        error: err instanceof Error ? err.message : String(err),
      };
    } finally {
      this.inFlight = false;
      this.onChange();
      if (this.resubmit) {
        this.resubmit = false;
        void this.submit();
      }
    }
  }

  clear(): void {
    this.cancelDebounce();
    this.grid.clear();
    this.view = { label: null, scores: null, pending: false, error: null };
    this.onChange();
  }
}
