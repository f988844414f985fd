"""Binary soft-margin SVM: kernels, SMO dual training, decision function.

The solver is sequential minimal optimization on the dual

    max_a  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
    s.t.   0 <= a_i <= C,  sum(a_i y_i) = 0

using the first-order maximal-violating-pair selection rule with a fixed,
deterministic index order. Each pairwise subproblem is solved analytically
and clipped to the box, so the equality constraint is preserved exactly
from the all-zero start.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RBF_EXP_FLOOR = -700.0  # exp() underflow guard for extreme distances


@dataclass(frozen=True)
class KernelSpec:
    """Kernel selector: 'linear' (dot product) or 'rbf' exp(-gamma*||x-z||^2)."""

    kind: str
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf":
            if self.gamma is None or self.gamma <= 0:
                raise ValueError("rbf kernel requires gamma > 0")

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "rbf":
            d["gamma"] = self.gamma
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(kind=d["kind"], gamma=d.get("gamma"))


@dataclass(frozen=True)
class TrainParams:
    """Soft-margin box constraint, KKT stopping tolerance, iteration budget.

    `max_passes` is a multiplier: training may spend up to max_passes * n
    pairwise updates before giving up with a ConvergenceError.
    """

    c: float = 8.0
    tol: float = 1e-3
    max_passes: int = 10

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("C must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_passes < 1:
            raise ValueError("max_passes must be a positive integer")


@dataclass(frozen=True)
class BinaryModel:
    """Trained two-class SVM.

    `coeffs[i]` is alpha_i * y_i for the i-th stored support vector, so the
    decision function is sum_i coeffs[i] * K(sv_i, x) + bias.
    """

    support_vectors: np.ndarray
    coeffs: np.ndarray
    bias: float
    kernel: KernelSpec

    def __post_init__(self):
        sv = np.asarray(self.support_vectors, dtype=np.float64)
        co = np.asarray(self.coeffs, dtype=np.float64)
        if sv.ndim != 2 or len(sv) != len(co):
            raise ValueError("support vectors and coefficients must align")
        object.__setattr__(self, "support_vectors", sv)
        object.__setattr__(self, "coeffs", co)

    @property
    def n_support(self) -> int:
        return len(self.coeffs)

    @property
    def dimension(self) -> int:
        return self.support_vectors.shape[1]

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.to_dict(),
            "support_vectors": self.support_vectors.tolist(),
            "coeffs": self.coeffs.tolist(),
            "bias": self.bias,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BinaryModel":
        return cls(
            support_vectors=np.array(d["support_vectors"], dtype=np.float64),
            coeffs=np.array(d["coeffs"], dtype=np.float64),
            bias=float(d["bias"]),
            kernel=KernelSpec.from_dict(d["kernel"]),
        )


class ConvergenceError(RuntimeError):
    """SMO hit the iteration budget; carries the best iterate for inspection."""

    def __init__(self, message: str, model: BinaryModel, kkt_gap: float):
        super().__init__(message)
        self.model = model
        self.kkt_gap = kkt_gap


def kernel_eval(spec: KernelSpec, x, z) -> float:
    """K(x, z) for a single pair of equal-dimension vectors."""
    x = np.asarray(x, dtype=np.float64).ravel()
    z = np.asarray(z, dtype=np.float64).ravel()
    if x.shape != z.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {z.shape}")
    if spec.kind == "linear":
        return float(x @ z)
    d2 = float(((x - z) ** 2).sum())
    return float(np.exp(max(-spec.gamma * d2, RBF_EXP_FLOOR)))


def kernel_matrix(spec: KernelSpec, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """K(x_i, z_j) for row-stacked inputs; vectorized equivalent of kernel_eval."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    if x.shape[1] != z.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {z.shape[1]}")
    if spec.kind == "linear":
        return x @ z.T
    d2 = (x * x).sum(1)[:, None] + (z * z).sum(1)[None, :] - 2.0 * (x @ z.T)
    np.maximum(d2, 0.0, out=d2)
    return np.exp(np.maximum(-spec.gamma * d2, RBF_EXP_FLOOR))


class _GramColumns:
    """Kernel column provider: full matrix when small, bounded cache otherwise."""

    def __init__(self, spec: KernelSpec, x: np.ndarray, full_limit: int = 4096,
                 cache_cols: int = 1024):
        self.spec = spec
        self.x = x
        n = len(x)
        self.full = kernel_matrix(spec, x, x) if n <= full_limit else None
        self._cache: dict[int, np.ndarray] = {}
        self._cap = cache_cols

    def diag(self) -> np.ndarray:
        if self.full is not None:
            return np.diag(self.full).copy()
        if self.spec.kind == "rbf":
            return np.ones(len(self.x))
        return (self.x * self.x).sum(1)

    def col(self, i: int) -> np.ndarray:
        if self.full is not None:
            return self.full[:, i]
        c = self._cache.get(i)
        if c is None:
            c = kernel_matrix(self.spec, self.x, self.x[i : i + 1]).ravel()
            if len(self._cache) >= self._cap:
                self._cache.pop(next(iter(self._cache)))
            self._cache[i] = c
        return c


def smo_train(samples, labels, spec: KernelSpec, params: TrainParams) -> BinaryModel:
    """Train a binary soft-margin SVM; labels must be -1/+1 with both present.

    Deterministic: ties in working-pair selection break toward the lowest
    index, and no randomness is involved anywhere.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    y = np.asarray(labels, dtype=np.float64).ravel()
    if len(x) != len(y):
        raise ValueError("samples and labels must align")
    if not np.isin(y, (-1.0, 1.0)).all():
        raise ValueError("labels must be -1 or +1")
    if not ((y > 0).any() and (y < 0).any()):
        raise ValueError("need at least one sample of each label")

    n = len(y)
    c = params.c
    gram = _GramColumns(spec, x)
    kdiag = gram.diag()
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of (1/2) a'Qa - e'a with Q = yy' * K
    max_iter = params.max_passes * n

    gap = np.inf
    converged = False
    for _ in range(max_iter):
        yg = -y * grad
        up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < c))
        iu = np.flatnonzero(up)
        il = np.flatnonzero(low)
        if len(iu) == 0 or len(il) == 0:
            converged = True  # degenerate but KKT-consistent
            break
        i = iu[np.argmax(yg[iu])]
        j = il[np.argmin(yg[il])]
        gap = yg[i] - yg[j]
        if gap <= params.tol:
            converged = True
            break
        ki = gram.col(i)
        kj = gram.col(j)
        eta = kdiag[i] + kdiag[j] - 2.0 * ki[j]
        t = gap / max(eta, 1e-12)
        # largest feasible step along the pair direction (a_i += y_i t, a_j -= y_j t)
        t = min(t, (c - alpha[i]) if y[i] > 0 else alpha[i])
        t = min(t, alpha[j] if y[j] > 0 else (c - alpha[j]))
        alpha[i] = min(max(alpha[i] + y[i] * t, 0.0), c)
        alpha[j] = min(max(alpha[j] - y[j] * t, 0.0), c)
        grad += t * y * (ki - kj)

    e0 = _decision_without_bias(gram, alpha, y)
    bias = _compute_bias(alpha, y, e0, c)
    sv = alpha > 0
    model = BinaryModel(
        support_vectors=x[sv].copy(),
        coeffs=(alpha * y)[sv],
        bias=bias,
        kernel=spec,
    )
    if not converged:
        raise ConvergenceError(
            f"SMO did not satisfy the KKT tolerance {params.tol} within "
            f"{max_iter} iterations (final violating-pair gap {gap:.3e})",
            model=model,
            kkt_gap=float(gap),
        )
    return model


def _decision_without_bias(gram: _GramColumns, alpha: np.ndarray, y: np.ndarray) -> np.ndarray:
    ay = alpha * y
    if gram.full is not None:
        return gram.full @ ay
    nz = np.flatnonzero(alpha)
    k_nz = kernel_matrix(gram.spec, gram.x, gram.x[nz])
    return k_nz @ ay[nz]


def _compute_bias(alpha: np.ndarray, y: np.ndarray, e0: np.ndarray, c: float) -> float:
    # b_i = y_i - f0(x_i) puts x_i exactly on its margin. Free support vectors
    # pin b; otherwise the KKT inequalities bound it and we take the midpoint.
    free = (alpha > 0) & (alpha < c)
    b_i = y - e0
    if free.any():
        return float(b_i[free].mean())
    lower = ((alpha <= 0) & (y > 0)) | ((alpha >= c) & (y < 0))
    upper = ((alpha <= 0) & (y < 0)) | ((alpha >= c) & (y > 0))
    lo = b_i[lower].max() if lower.any() else None
    hi = b_i[upper].min() if upper.any() else None
    if lo is not None and hi is not None:
        return float((lo + hi) / 2.0)
    return float(lo if lo is not None else hi)


def decision_values(model: BinaryModel, x: np.ndarray) -> np.ndarray:
    """f(x) = sum_i coeffs[i] K(sv_i, x) + bias for row-stacked inputs."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != model.dimension:
        raise ValueError(
            f"dimension mismatch: model expects {model.dimension}, got {x.shape[1]}"
        )
    if model.n_support == 0:
        return np.full(len(x), model.bias)
    return kernel_matrix(model.kernel, x, model.support_vectors) @ model.coeffs + model.bias


def decision_value(model: BinaryModel, x) -> float:
    return float(decision_values(model, np.asarray(x, dtype=np.float64).reshape(1, -1))[0])


def predict_binary(model: BinaryModel, x) -> int:
    """Sign of the decision value; exactly 0 maps to +1."""
    return 1 if decision_value(model, x) >= 0.0 else -1


def dual_objective(model: BinaryModel) -> float:
    """W(alpha) of the trained iterate, reconstructed from the support set.

    Points with alpha = 0 contribute nothing to either term, so the stored
    support vectors determine the objective exactly.
    """
    co = model.coeffs
    if len(co) == 0:
        return 0.0
    k = kernel_matrix(model.kernel, model.support_vectors, model.support_vectors)
    return float(np.abs(co).sum() - 0.5 * co @ k @ co)
