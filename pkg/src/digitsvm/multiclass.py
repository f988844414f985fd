"""One-vs-rest lifting of the binary SVM to the ten digit classes."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .optdigits import Dataset, FEATURE_DIMS, SCALING_NONE
from .svm import BinaryModel, KernelSpec, TrainParams, decision_values, smo_train

N_CLASSES = 10
MODEL_FORMAT = "digitsvm-ovr"
MODEL_VERSION = 1


@dataclass(frozen=True)
class OvrModel:
    """Ten binary models indexed by digit, plus feature provenance metadata."""

    models: tuple
    feature_kind: str
    scaling: dict

    def __post_init__(self):
        if len(self.models) != N_CLASSES:
            raise ValueError(f"expected {N_CLASSES} binary models, got {len(self.models)}")
        dims = {m.dimension for m in self.models}
        kernels = {m.kernel for m in self.models}
        if len(dims) != 1 or len(kernels) != 1:
            raise ValueError("all binary models must share kernel spec and dimension")
        object.__setattr__(self, "models", tuple(self.models))

    @property
    def dimension(self) -> int:
        return self.models[0].dimension

    @property
    def kernel(self) -> KernelSpec:
        return self.models[0].kernel

    @property
    def n_support(self) -> int:
        return sum(m.n_support for m in self.models)


def ovr_train(dataset: Dataset, spec: KernelSpec, params: TrainParams) -> OvrModel:
    """Train one binary model per digit (class k = +1, rest = -1), k = 0..9."""
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    present = set(int(v) for v in np.unique(dataset.y))
    missing = sorted(set(range(N_CLASSES)) - present)
    if missing:
        raise ValueError(f"dataset is missing classes {missing}")
    models = []
    for k in range(N_CLASSES):
        yk = np.where(dataset.y == k, 1.0, -1.0)
        models.append(smo_train(dataset.x, yk, spec, params))
    return OvrModel(models=tuple(models), feature_kind=dataset.feature_kind,
                    scaling=dict(SCALING_NONE))


def ovr_scores_batch(model: OvrModel, x: np.ndarray) -> np.ndarray:
    """(n, 10) matrix of per-class decision values for row-stacked inputs."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    scores = np.empty((len(x), N_CLASSES))
    for k, m in enumerate(model.models):
        scores[:, k] = decision_values(m, x)
    return scores


def ovr_scores(model: OvrModel, x) -> np.ndarray:
    """The 10-entry score vector for one input."""
    return ovr_scores_batch(model, np.asarray(x, dtype=np.float64).reshape(1, -1))[0]


def ovr_predict(model: OvrModel, x) -> tuple[int, np.ndarray]:
    """Argmax label and the score vector; ties break to the lowest class index."""
    scores = ovr_scores(model, x)
    return int(np.argmax(scores)), scores


def ovr_predict_batch(model: OvrModel, x: np.ndarray) -> np.ndarray:
    return np.argmax(ovr_scores_batch(model, x), axis=1)


def save_model(model: OvrModel, path, train_meta: dict | None = None) -> None:
    """Persist as JSON; floats use shortest round-trip form, so reload is exact."""
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "feature_kind": model.feature_kind,
        "scaling": model.scaling,
        "models": [
            {"digit": k, **m.to_dict()} for k, m in enumerate(model.models)
        ],
    }
    if train_meta:
        doc["training"] = train_meta
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True))


def load_model(path) -> OvrModel:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a {MODEL_FORMAT} document: {path}")
    entries = sorted(doc["models"], key=lambda m: m["digit"])
    if [e["digit"] for e in entries] != list(range(N_CLASSES)):
        raise ValueError("model document must contain digits 0..9 exactly once each")
    models = tuple(BinaryModel.from_dict(e) for e in entries)
    kind = doc["feature_kind"]
    if kind not in FEATURE_DIMS:
        raise ValueError(f"unknown feature kind {kind!r}")
    return OvrModel(models=models, feature_kind=kind, scaling=doc["scaling"])


def with_scaling(model: OvrModel, scaling: dict) -> OvrModel:
    return OvrModel(models=model.models, feature_kind=model.feature_kind,
                    scaling=dict(scaling))
