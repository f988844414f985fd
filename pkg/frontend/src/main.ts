import { App, ClassifyResponse } from "./app.js";
import { barsHtml } from "./bars.js";
import { GRID } from "./grid.js";

const CELL = 12; // canvas pixels per grid cell

async function postClassify(rows: string[]): Promise<ClassifyResponse> {
  let resp: Response;
  try {
    resp = await fetch("/classify", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ rows }),
    });
  } catch {
    throw new Error("classify service unreachable");
  }
  const doc = await resp.json();
  if (!resp.ok) {
    throw new Error(doc.error ?? `service error (${resp.status})`);
  }
  return doc as ClassifyResponse;
}

function element<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

const canvas = element<HTMLCanvasElement>("pad");
canvas.width = GRID * CELL;
canvas.height = GRID * CELL;
const ctx = canvas.getContext("2d");
if (!ctx) throw new Error("canvas 2d context unavailable");

const barsEl = element<HTMLDivElement>("bars");
const bannerEl = element<HTMLDivElement>("banner");
const labelEl = element<HTMLDivElement>("label");
const statusEl = element<HTMLSpanElement>("status");

function redraw(): void {
  ctx!.fillStyle = "#11131a";
  ctx!.fillRect(0, 0, canvas.width, canvas.height);
  ctx!.fillStyle = "#f2f3f7";
  for (let r = 0; r < GRID; r++) {
    for (let c = 0; c < GRID; c++) {
      if (app.grid.at(r, c)) {
        ctx!.fillRect(c * CELL, r * CELL, CELL, CELL);
      }
    }
  }
  ctx!.strokeStyle = "rgba(255,255,255,0.06)";
  for (let i = 0; i <= GRID; i++) {
    ctx!.beginPath();
    ctx!.moveTo(i * CELL, 0);
    ctx!.lineTo(i * CELL, canvas.height);
    ctx!.moveTo(0, i * CELL);
    ctx!.lineTo(canvas.width, i * CELL);
    ctx!.stroke();
  }
}

function render(): void {
  redraw();
  const v = app.view;
  barsEl.innerHTML = barsHtml(v.scores, v.label);
  labelEl.textContent = v.label === null ? "–" : String(v.label);
  statusEl.textContent = v.pending ? "classifying…" : "";
  if (v.error) {
    bannerEl.textContent = v.error;
    bannerEl.classList.remove("hidden");
  } else {
    bannerEl.classList.add("hidden");
  }
}

const app = new App(postClassify, render);

let drawing = false;

function cellOf(ev: PointerEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  const col = Math.floor(((ev.clientX - rect.left) / rect.width) * GRID);
  const row = Math.floor(((ev.clientY - rect.top) / rect.height) * GRID);
  return [row, col];
}

const brushInput = element<HTMLInputElement>("brush");

canvas.addEventListener("pointerdown", (ev) => {
  drawing = true;
  canvas.setPointerCapture(ev.pointerId);
  const [r, c] = cellOf(ev);
  app.strokeAt(r, c, brushInput.checked ? 2 : 1);
});

canvas.addEventListener("pointermove", (ev) => {
  if (!drawing) return;
  const [r, c] = cellOf(ev);
  app.strokeAt(r, c, brushInput.checked ? 2 : 1);
});

function endStroke(): void {
  if (!drawing) return;
  drawing = false;
  app.strokeEnd();
}

canvas.addEventListener("pointerup", endStroke);
canvas.addEventListener("pointerleave", endStroke);

element<HTMLButtonElement>("classify").addEventListener("click", () => {
  void app.submit();
});

element<HTMLButtonElement>("clear").addEventListener("click", () => {
  app.clear();
});

render();
