"""Embedded classify service.

Wire protocol:
  POST /classify  body {"rows": [32 strings of 32 chars '0'/'1']}
                  -> 200 {"label": 0-9, "scores": [10 floats]}
                  -> 400 {"error": "..."} on malformed input
  GET  /healthz   -> 200 model metadata
  GET  /          -> UI bundle from the assets directory (404 when absent)

The model is immutable and shared read-only across request threads.
"""

from __future__ import annotations

import json
import mimetypes
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from .features import extract_moment_features
from .multiclass import OvrModel, ovr_predict
from .optdigits import BLOCK64, GRID, MOMENT18, RawBitmap, apply_scaling, downsample


def bitmap_from_rows(rows) -> RawBitmap:
    if not isinstance(rows, list) or len(rows) != GRID:
        raise ValueError(f"'rows' must be a list of exactly {GRID} strings")
    grid = []
    for i, row in enumerate(rows):
        if not isinstance(row, str) or len(row) != GRID or set(row) - {"0", "1"}:
            raise ValueError(
                f"row {i} must be {GRID} characters of '0'/'1'"
            )
        grid.append([int(ch) for ch in row])
    return RawBitmap(np.array(grid))


def features_for_model(model: OvrModel, bitmap: RawBitmap) -> np.ndarray:
    """Exactly the training-time feature path, driven by model metadata."""
    if model.feature_kind == BLOCK64:
        raw = downsample(bitmap).counts.astype(np.float64)
        return apply_scaling(raw, model.scaling)
    if model.feature_kind == MOMENT18:
        vec = extract_moment_features(bitmap.pixels).as_vector()
        return apply_scaling(vec, model.scaling)
    raise ValueError(f"unsupported feature kind {model.feature_kind!r}")


def classify_bitmap(model: OvrModel, bitmap: RawBitmap) -> tuple[int, np.ndarray]:
    return ovr_predict(model, features_for_model(model, bitmap))


def _handler_for(model: OvrModel, assets_dir: Path | None):
    assets = assets_dir.resolve() if assets_dir else None

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send_json(self, status: int, payload: dict):
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_POST(self):
            if self.path.rstrip("/") != "/classify":
                self._send_json(404, {"error": "unknown endpoint"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                doc = json.loads(self.rfile.read(length) or b"{}")
                if not isinstance(doc, dict) or "rows" not in doc:
                    raise ValueError("body must be a JSON object with a 'rows' field")
                bitmap = bitmap_from_rows(doc["rows"])
            except (ValueError, json.JSONDecodeError) as exc:
                self._send_json(400, {"error": str(exc)})
                return
            label, scores = classify_bitmap(model, bitmap)
            self._send_json(200, {"label": label, "scores": scores.tolist()})

        def do_GET(self):
            if self.path == "/healthz":
                self._send_json(200, {
                    "feature_kind": model.feature_kind,
                    "kernel": model.kernel.to_dict(),
                    "sv_count": model.n_support,
                    "scaling": model.scaling,
                })
                return
            self._serve_asset()

        def _serve_asset(self):
            if assets is None:
                self._send_json(404, {"error": "no UI assets configured"})
                return
            rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
            target = (assets / rel).resolve()
            if not str(target).startswith(str(assets)) or not target.is_file():
                self._send_json(404, {"error": f"no such asset: /{rel}"})
                return
            ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
            body = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler


def make_server(model: OvrModel, port: int,
                assets_dir: Path | None = None) -> ThreadingHTTPServer:
    """Bind the classify service; port 0 picks an ephemeral port."""
    handler = _handler_for(model, assets_dir)
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.daemon_threads = True
    return server


def serve_forever(server: ThreadingHTTPServer) -> None:
    """Run until interrupted; SIGINT shuts the listener down cleanly."""
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        server.server_close()
