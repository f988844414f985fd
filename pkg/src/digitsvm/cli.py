"""Command-line front door: prepare, train, test, grid, classify, serve.

Exit codes: 0 success, 1 usage error, 2 data or model error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import evaluation, slt
from .features import extract_moment_features
from .multiclass import (N_CLASSES, OvrModel, load_model, ovr_predict,
                         ovr_train, save_model, with_scaling)
from .optdigits import (BLOCK64, Dataset, FormatError, MOMENT18, SCALING_DIV16,
                        SCALING_NONE, apply_scaling, dataset_from_raw,
                        parse_preprocessed, parse_raw, write_preprocessed)
from .server import make_server, serve_forever
from .svm import ConvergenceError, KernelSpec, TrainParams

DEFAULT_C = 8.0
DEFAULT_GAMMA = 2.0**-5
DEFAULT_TOL = 1e-3

USAGE_ERROR = 1
DATA_ERROR = 2


class DataError(RuntimeError):
    """Wraps I/O, format, and model-compatibility failures (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _load_dataset(path: str, features: str, scaled: bool,
                  compress: bool = False) -> tuple[Dataset, dict]:
    """Sniff raw vs preprocessed layout and build the requested feature kind."""
    text = _read_text(path)
    first = next((ln for ln in text.splitlines() if ln.strip()), "")
    is_csv = "," in first
    try:
        if features == MOMENT18:
            if is_csv:
                raise DataError(
                    f"{path} looks preprocessed; moment features need the raw "
                    "32x32 bitmap layout"
                )
            records = parse_raw(text)
            x = np.stack([
                extract_moment_features(bm.pixels, compress=compress).as_vector()
                for bm, _ in records
            ])
            y = np.array([label for _, label in records])
            ds = Dataset(x, y, MOMENT18)
            scaling = {"method": "log1p"} if compress else dict(SCALING_NONE)
            return ds, scaling
        ds = parse_preprocessed(text) if is_csv else dataset_from_raw(parse_raw(text))
        if scaled:
            return Dataset(apply_scaling(ds.x, SCALING_DIV16), ds.y, BLOCK64), dict(SCALING_DIV16)
        return ds, dict(SCALING_NONE)
    except FormatError as exc:
        raise DataError(f"{path}: {exc}") from exc


def cmd_prepare(args) -> int:
    text = _read_text(args.raw_path)
    try:
        records = parse_raw(text)
    except FormatError as exc:
        raise DataError(f"{args.raw_path}: {exc}") from exc
    with open(args.out_path, "w") as out:
        n = write_preprocessed(records, out)
    print(f"wrote {n} records to {args.out_path}")
    return 0


def cmd_train(args) -> int:
    dataset, scaling = _load_dataset(args.data, args.features,
                                     scaled=not args.no_scale,
                                     compress=args.log_compress)
    spec = (KernelSpec("rbf", args.gamma) if args.kernel == "rbf"
            else KernelSpec("linear"))
    params = TrainParams(c=args.c, tol=args.tol, max_passes=args.max_passes)
    t0 = time.perf_counter()
    try:
        model = ovr_train(dataset, spec, params)
    except (ValueError, ConvergenceError) as exc:
        raise DataError(f"training failed: {exc}") from exc
    elapsed = time.perf_counter() - t0
    model = with_scaling(model, scaling)
    save_model(model, args.model_out, train_meta={
        "c": args.c, "tol": args.tol, "kernel": spec.to_dict(),
        "n_train": len(dataset),
    })
    print(f"trained {N_CLASSES} one-vs-rest models on {len(dataset)} samples")
    print(f"support vectors: {model.n_support}")
    print(f"training wall-time: {elapsed:.2f} s")
    return 0


def _load_compatible(model_path: str, data_path: str) -> tuple[OvrModel, Dataset]:
    try:
        model = load_model(model_path)
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"cannot load model {model_path}: {exc}") from exc
    dataset, _ = _load_dataset(
        data_path, model.feature_kind,
        scaled=model.scaling.get("method") == "divide",
        compress=model.scaling.get("method") == "log1p",
    )
    if dataset.feature_kind != model.feature_kind:
        raise DataError(
            f"feature kind mismatch: model is {model.feature_kind}, "
            f"data is {dataset.feature_kind}"
        )
    return model, dataset


def cmd_test(args) -> int:
    model, dataset = _load_compatible(args.model, args.data)
    report = evaluation.evaluation_report(model, dataset)
    evaluation.write_report(report, args.report_out)
    print(f"samples: {report['n_samples']}")
    print(f"accuracy: {report['accuracy'] * 100:.2f}%")
    for k, rate in enumerate(report["per_class_rates"]):
        shown = f"{rate * 100:.2f}%" if rate is not None else "n/a"
        print(f"  class {k}: {shown}")
    print(f"report written to {args.report_out}")
    return 0


def cmd_grid(args) -> int:
    dataset, _ = _load_dataset(args.data, BLOCK64, scaled=not args.no_scale)
    grid = evaluation.GridSpec(
        c_values=tuple(args.c_values),
        gamma_values=tuple(args.gamma_values),
        folds=args.folds,
        fold_seed=args.seed,
    )
    params = TrainParams(c=DEFAULT_C, tol=args.tol, max_passes=args.max_passes)
    try:
        result = evaluation.grid_search(dataset, args.kernel, grid, params)
    except ValueError as exc:
        raise DataError(f"grid search failed: {exc}") from exc
    print(f"{'C':>10} {'gamma':>12} {'cv_accuracy':>12}")
    for cell in result.table:
        acc = f"{cell.cv_accuracy * 100:.2f}%" if cell.cv_accuracy is not None else "invalid"
        print(f"{cell.c:>10.4g} {cell.gamma:>12.6g} {acc:>12}")
    print(f"best: C={result.best_c:g} gamma={result.best_gamma:g} "
          f"cv_accuracy={result.cv_accuracy * 100:.2f}%")
    if args.table_out:
        Path(args.table_out).write_text(json.dumps(result.to_dict(), indent=1))
        print(f"table written to {args.table_out}")
    return 0


def cmd_classify(args) -> int:
    try:
        model = load_model(args.model)
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"cannot load model {args.model}: {exc}") from exc
    from .server import bitmap_from_rows, classify_bitmap

    text = _read_text(args.bitmap)
    lines = [ln.rstrip("\r\n") for ln in text.splitlines() if ln.strip()]
    try:
        bitmap = bitmap_from_rows(lines)
    except ValueError as exc:
        raise DataError(f"{args.bitmap}: {exc}") from exc
    label, scores = classify_bitmap(model, bitmap)
    print(f"label: {label}")
    for k, s in enumerate(scores):
        print(f"  class {k}: {s:+.6f}")
    return 0


def cmd_serve(args) -> int:
    try:
        model = load_model(args.model)
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"cannot load model {args.model}: {exc}") from exc
    assets = Path(args.ui_assets_dir) if args.ui_assets_dir else None
    if assets is None:
        default = Path("frontend") / "dist"
        assets = default if default.is_dir() else None
    if assets is not None and not assets.is_dir():
        raise DataError(f"UI assets directory not found: {assets}")
    try:
        server = make_server(model, args.port, assets)
    except OSError as exc:
        raise DataError(f"cannot bind port {args.port}: {exc}") from exc
    host, port = server.server_address
    print(f"serving on http://{host}:{port} "
          f"(assets: {assets if assets else 'none'})")
    serve_forever(server)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="digitsvm",
                     description="Handwritten digit recognition toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="convert a raw 32x32 file to the 64-count CSV")
    p.add_argument("raw_path")
    p.add_argument("out_path")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("train", help="train a one-vs-rest SVM")
    p.add_argument("--data", required=True)
    p.add_argument("--model-out", required=True)
    p.add_argument("--kernel", choices=["linear", "rbf"], default="rbf")
    p.add_argument("--c", type=float, default=DEFAULT_C)
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-passes", type=int, default=10)
    p.add_argument("--features", choices=[BLOCK64, MOMENT18], default=BLOCK64)
    p.add_argument("--no-scale", action="store_true",
                   help="keep raw block counts instead of dividing by 16")
    p.add_argument("--log-compress", action="store_true",
                   help="sign(v)*log(1+|v|) compression for moment features")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("test", help="evaluate a model and write a report")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report-out", required=True)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("grid", help="cross-validated (C, gamma) grid search")
    p.add_argument("--data", required=True)
    p.add_argument("--kernel", choices=["linear", "rbf"], default="rbf")
    p.add_argument("--c-values", type=float, nargs="+",
                   default=[2.0**e for e in range(-1, 8)])
    p.add_argument("--gamma-values", type=float, nargs="+",
                   default=[2.0**e for e in range(-9, 2)])
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-passes", type=int, default=10)
    p.add_argument("--no-scale", action="store_true")
    p.add_argument("--table-out", default=None)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("classify", help="classify one 32x32 bitmap file")
    p.add_argument("--model", required=True)
    p.add_argument("bitmap")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("serve", help="run the classify HTTP service")
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui-assets-dir", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
