"""Statistical-learning-theory calculators.

Implements the 0/1 loss, empirical risk, the Vapnik confidence term

    phi(h, l, eta) = sqrt((h * (ln(2l/h) + 1) - ln(eta/4)) / l)

(natural logarithms throughout), the resulting risk bound, the classical
VC dimension of linear separators, and bound-based model selection over
candidate (empirical risk, VC dimension) pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class BoundInputs:
    """VC dimension h, sample size l, and confidence parameter eta in (0, 1)."""

    h: int
    l: int
    eta: float

    def __post_init__(self):
        if int(self.h) != self.h or self.h < 1:
            raise ValueError("h must be a positive integer")
        if int(self.l) != self.l or self.l < 1:
            raise ValueError("l must be a positive integer")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie strictly between 0 and 1")


@dataclass(frozen=True)
class RiskReport:
    """bound = r_emp + phi; `clamped` marks a negative radicand forced to 0."""

    r_emp: float
    phi: float
    bound: float
    clamped: bool = False

    def to_dict(self) -> dict:
        return {"r_emp": self.r_emp, "phi": self.phi, "bound": self.bound,
                "clamped": self.clamped}


def zero_one_loss(y, y_hat) -> int:
    return 0 if y == y_hat else 1


def empirical_risk(predictions: Sequence, truths: Sequence) -> float:
    """Mean 0/1 loss; equals 1 - accuracy."""
    if len(predictions) != len(truths):
        raise ValueError("predictions and truths must have equal length")
    if len(predictions) == 0:
        raise ValueError("empirical risk is undefined on an empty sample")
    wrong = sum(zero_one_loss(t, p) for p, t in zip(predictions, truths))
    return wrong / len(predictions)


def _phi_radicand(inputs: BoundInputs) -> float:
    h, l, eta = inputs.h, inputs.l, inputs.eta
    return (h * (math.log(2.0 * l / h) + 1.0) - math.log(eta / 4.0)) / l


def vc_confidence(inputs: BoundInputs) -> float:
    """The confidence term phi; a negative radicand is clamped to 0."""
    return math.sqrt(max(_phi_radicand(inputs), 0.0))


def risk_bound(r_emp: float, inputs: BoundInputs) -> RiskReport:
    """Upper bound r_emp + phi holding with probability at least 1 - eta."""
    if not 0.0 <= r_emp <= 1.0:
        raise ValueError("empirical risk must lie in [0, 1]")
    radicand = _phi_radicand(inputs)
    phi = math.sqrt(max(radicand, 0.0))
    return RiskReport(r_emp=r_emp, phi=phi, bound=r_emp + phi, clamped=radicand < 0.0)


def vc_dim_linear(dimension: int) -> int:
    """VC dimension of linear separators with bias in R^dimension: d + 1."""
    if int(dimension) != dimension or dimension < 1:
        raise ValueError("dimension must be a positive integer")
    return int(dimension) + 1


def srm_select(candidates: Sequence[tuple[float, int]], l: int, eta: float) -> int:
    """Index of the candidate minimizing r_emp + phi(h, l, eta).

    Ties break toward smaller h, then toward the lower index.
    """
    if not candidates:
        raise ValueError("srm_select needs at least one candidate")
    best = None
    for idx, (r_emp, h) in enumerate(candidates):
        bound = r_emp + vc_confidence(BoundInputs(h=h, l=l, eta=eta))
        key = (bound, h, idx)
        if best is None or key < best[0]:
            best = (key, idx)
    return best[1]
