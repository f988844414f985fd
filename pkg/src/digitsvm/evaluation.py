"""Confusion matrices, accuracy, per-class rates, and (C, gamma) grid search."""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .multiclass import N_CLASSES, OvrModel, ovr_predict_batch, ovr_train
from .optdigits import Dataset
from .slt import BoundInputs, RiskReport, risk_bound, vc_dim_linear
from .svm import KernelSpec, TrainParams


def confusion(predictions: Sequence[int], truths: Sequence[int]) -> np.ndarray:
    """10x10 count matrix, rows = truth, columns = prediction."""
    preds = np.asarray(predictions, dtype=np.int64)
    ys = np.asarray(truths, dtype=np.int64)
    if preds.shape != ys.shape or preds.ndim != 1 or len(preds) == 0:
        raise ValueError("predictions and truths must be equal-length non-empty 1-D")
    if ((preds < 0) | (preds > 9) | (ys < 0) | (ys > 9)).any():
        raise ValueError("labels must lie in 0..9")
    cm = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(cm, (ys, preds), 1)
    return cm


def accuracy(cm: np.ndarray) -> float:
    """Trace over total count."""
    cm = np.asarray(cm)
    total = cm.sum()
    if total == 0:
        raise ValueError("accuracy is undefined for an empty confusion matrix")
    return float(np.trace(cm) / total)


def per_class_rates(cm: np.ndarray) -> list[float | None]:
    """Diagonal over row sums; None where a class has no evaluated samples."""
    cm = np.asarray(cm)
    rates: list[float | None] = []
    for k in range(N_CLASSES):
        row = cm[k].sum()
        rates.append(float(cm[k, k] / row) if row > 0 else None)
    return rates


@dataclass(frozen=True)
class GridSpec:
    """Hyperparameter lattice and cross-validation layout."""

    c_values: tuple
    gamma_values: tuple
    folds: int = 5
    fold_seed: int = 0

    def __post_init__(self):
        if not self.c_values or not self.gamma_values:
            raise ValueError("grids must be non-empty")
        if any(c <= 0 for c in self.c_values) or any(g <= 0 for g in self.gamma_values):
            raise ValueError("C and gamma values must be positive")
        if self.folds < 2:
            raise ValueError("need at least 2 folds")
        object.__setattr__(self, "c_values", tuple(float(c) for c in self.c_values))
        object.__setattr__(self, "gamma_values", tuple(float(g) for g in self.gamma_values))


DEFAULT_GRID = GridSpec(
    c_values=tuple(2.0**e for e in range(-1, 8)),       # 2^-1 .. 2^7
    gamma_values=tuple(2.0**e for e in range(-9, 2)),   # 2^-9 .. 2^1
)


@dataclass(frozen=True)
class GridCell:
    c: float
    gamma: float
    cv_accuracy: float | None   # None when a fold was invalid (missing class)

    def to_dict(self) -> dict:
        return {"c": self.c, "gamma": self.gamma, "cv_accuracy": self.cv_accuracy}


@dataclass(frozen=True)
class GridSearchResult:
    best_c: float
    best_gamma: float
    cv_accuracy: float
    table: tuple

    def to_dict(self) -> dict:
        return {
            "best_c": self.best_c,
            "best_gamma": self.best_gamma,
            "cv_accuracy": self.cv_accuracy,
            "table": [cell.to_dict() for cell in self.table],
        }


def stratified_folds(labels: np.ndarray, folds: int, seed: int) -> list[np.ndarray]:
    """Deterministic seeded stratified split; per-class counts differ by <= 1."""
    labels = np.asarray(labels)
    if folds > len(labels):
        raise ValueError("more folds than samples")
    rng = np.random.default_rng(seed)
    assignment = [[] for _ in range(folds)]
    for k in np.unique(labels):
        idx = np.flatnonzero(labels == k)
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            assignment[pos % folds].append(int(i))
    return [np.array(sorted(fold), dtype=np.int64) for fold in assignment]


def grid_search(dataset: Dataset, kernel_kind: str, grid: GridSpec,
                params: TrainParams) -> GridSearchResult:
    """Mean k-fold CV accuracy per (C, gamma) cell; best cell wins.

    Ties break to smaller C, then smaller gamma. A fold missing a class
    invalidates its cell (excluded from the argmax, with a warning). For a
    linear kernel the gamma axis is still iterated, so the table shape is
    stable, but gamma does not affect the kernel.
    """
    fold_idx = stratified_folds(dataset.y, grid.folds, grid.fold_seed)
    all_idx = np.arange(len(dataset))
    splits = []
    for f in fold_idx:
        mask = np.ones(len(dataset), dtype=bool)
        mask[f] = False
        splits.append((all_idx[mask], f))

    table: list[GridCell] = []
    for c in grid.c_values:
        for gamma in grid.gamma_values:
            spec = (KernelSpec("rbf", gamma) if kernel_kind == "rbf"
                    else KernelSpec("linear"))
            cell_params = TrainParams(c=c, tol=params.tol, max_passes=params.max_passes)
            accs = []
            valid = True
            for train_idx, eval_idx in splits:
                train = dataset.subset(train_idx)
                if len(np.unique(train.y)) < N_CLASSES:
                    valid = False
                    break
                model = ovr_train(train, spec, cell_params)
                preds = ovr_predict_batch(model, dataset.x[eval_idx])
                accs.append(float((preds == dataset.y[eval_idx]).mean()))
            if not valid:
                warnings.warn(
                    f"grid cell (C={c}, gamma={gamma}) skipped: a fold lacks a class",
                    stacklevel=2,
                )
                table.append(GridCell(c, gamma, None))
            else:
                table.append(GridCell(c, gamma, float(np.mean(accs))))

    valid_cells = [cell for cell in table if cell.cv_accuracy is not None]
    if not valid_cells:
        raise ValueError("every grid cell was invalid (folds missing classes)")
    best = max(valid_cells, key=lambda cell: (cell.cv_accuracy, -cell.c, -cell.gamma))
    return GridSearchResult(best_c=best.c, best_gamma=best.gamma,
                            cv_accuracy=best.cv_accuracy, table=tuple(table))


def evaluation_report(model: OvrModel, dataset: Dataset, eta: float = 0.05,
                      train_seconds: float | None = None) -> dict:
    """Machine-readable evaluation: accuracy, confusion, rates, risk bound."""
    t0 = time.perf_counter()
    preds = ovr_predict_batch(model, dataset.x)
    elapsed = time.perf_counter() - t0
    cm = confusion(preds, dataset.y)
    acc = accuracy(cm)
    h = vc_dim_linear(model.dimension)
    risk = risk_bound(1.0 - acc, BoundInputs(h=h, l=len(dataset), eta=eta))
    report = {
        "n_samples": int(len(dataset)),
        "feature_kind": dataset.feature_kind,
        "kernel": model.kernel.to_dict(),
        "accuracy": acc,
        "confusion": cm.tolist(),
        "per_class_rates": per_class_rates(cm),
        "support_vector_count": model.n_support,
        "risk": {**risk.to_dict(), "h": h, "l": int(len(dataset)), "eta": eta},
        "predict_seconds": elapsed,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if train_seconds is not None:
        report["train_seconds"] = train_seconds
    return report


def write_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=1, sort_keys=True))
