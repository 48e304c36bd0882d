"""False-alarm cost models and the lam = 1/gamma correspondence.

A cost model states what one model error costs. Vector and matrix forms
are collapsed to one scalar rate by weighting with class priors; the rate
``gamma`` then fixes the regularization strength ``lam = 1 / gamma``.

Cost models that cannot be put into numbers (``Unquantifiable``) or whose
numbers do not matter (``Negligible``) are explicit variants, not
infinities or zeros.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import BothZero, ConfigError, DimensionMismatch, NotQuantified


@dataclass(frozen=True)
class ScalarCost:
    gamma: float
    currency: str = ""

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ConfigError(f"scalar cost must be finite and positive, got {self.gamma}")

    def scaled(self, k):
        return ScalarCost(self.gamma * k, self.currency)


@dataclass(frozen=True)
class BinaryCost:
    """Unit costs of a false positive and a false negative."""

    gamma_fp: float
    gamma_fn: float
    currency: str = ""

    def __post_init__(self):
        if min(self.gamma_fp, self.gamma_fn) < 0:
            raise ConfigError("binary costs must be non-negative")
        if not self.gamma_fp + self.gamma_fn > 0:
            raise BothZero("at least one of gamma_fp, gamma_fn must be positive")

    def scaled(self, k):
        return BinaryCost(self.gamma_fp * k, self.gamma_fn * k, self.currency)

    def as_matrix(self):
        """Matrix form with class 0 = negative, class 1 = positive."""
        return MatrixCost(((0.0, self.gamma_fp), (self.gamma_fn, 0.0)), self.currency)


@dataclass(frozen=True)
class MatrixCost:
    """entries[i][j] is the cost of predicting class j for a true class i."""

    entries: tuple
    currency: str = ""

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ConfigError(f"cost matrix must be square with k >= 2, got shape {m.shape}")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise ConfigError("cost matrix entries must be finite and non-negative")
        if np.any(np.diag(m) != 0):
            raise ConfigError("cost matrix diagonal must be zero")
        object.__setattr__(self, "entries", tuple(tuple(float(x) for x in row) for row in m))

    @property
    def k(self):
        return len(self.entries)

    def array(self):
        return np.array(self.entries)

    def scaled(self, k):
        return MatrixCost(tuple(tuple(x * k for x in row) for row in self.entries), self.currency)


@dataclass(frozen=True)
class Unquantifiable:
    currency: str = ""

    def scaled(self, k):
        return self


@dataclass(frozen=True)
class Negligible:
    currency: str = ""

    def scaled(self, k):
        return self


CostModel = Union[ScalarCost, BinaryCost, MatrixCost, Unquantifiable, Negligible]


@dataclass(frozen=True)
class ClassPriors:
    """Class probabilities.

    For a :class:`BinaryCost` the order is (positive, negative); for a
    :class:`MatrixCost` it follows the matrix class index.
    """

    probabilities: tuple

    def __post_init__(self):
        p = tuple(float(x) for x in self.probabilities)
        if not p or any(not 0.0 <= x <= 1.0 for x in p):
            raise ConfigError("priors must lie in [0, 1]")
        if abs(sum(p) - 1.0) > 1e-10:
            raise ConfigError(f"priors must sum to 1, got {sum(p)}")
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def uniform(cls, k):
        return cls(tuple([1.0 / k] * k))

    @classmethod
    def binary(cls, positive):
        return cls((positive, 1.0 - positive))


class Regime(enum.Enum):
    USELESS_INTOLERABLE = "useless_intolerable"
    USELESS_IRRELEVANT = "useless_irrelevant"
    USEFUL_CANDIDATE = "useful_candidate"


AGGREGATION_RULES = {
    ScalarCost: "scalar pass-through",
    BinaryCost: "prior-weighted: pi_pos * gamma_fn + pi_neg * gamma_fp",
    MatrixCost: "prior-weighted row means: sum_i pi_i * mean_{j != i} gamma_ij",
}


def aggregation_rule(cm):
    return AGGREGATION_RULES.get(type(cm), "not quantified")


def _require_quantified(cm):
    if isinstance(cm, (Unquantifiable, Negligible)):
        raise NotQuantified(f"{type(cm).__name__} cost model has no numeric unit cost; "
                            "see classify_regime")


def _class_count(cm):
    if isinstance(cm, BinaryCost):
        return 2
    if isinstance(cm, MatrixCost):
        return cm.k
    return None


def expected_unit_cost(cm: CostModel, priors: ClassPriors) -> float:
    """Expected cost of one error under ``priors``.

    A missed true class costs the mean of its off-diagonal row, i.e. all
    error directions are taken as equally likely.
    """
    _require_quantified(cm)
    if isinstance(cm, ScalarCost):
        return cm.gamma
    pi = priors.probabilities
    if len(pi) != _class_count(cm):
        raise DimensionMismatch(f"{len(pi)} priors for a {_class_count(cm)}-class cost model")
    if isinstance(cm, BinaryCost):
        return pi[0] * cm.gamma_fn + pi[1] * cm.gamma_fp
    m = cm.array()
    k = cm.k
    return float(sum(pi[i] * (m[i].sum() - m[i, i]) / (k - 1) for i in range(k)))


def lambda_from_cost(cm: CostModel, priors: ClassPriors) -> float:
    gamma = expected_unit_cost(cm, priors)
    if gamma <= 0:
        raise NotQuantified("expected unit cost is zero under these priors")
    return 1.0 / gamma


def classify_regime(cm: CostModel, gamma_low, gamma_high, priors=None) -> Regime:
    """Place a cost model in one of the three usefulness regimes.

    Quantified costs are compared through their expected unit cost; binary
    and matrix models use ``priors`` (uniform when omitted).
    """
    if not gamma_low < gamma_high:
        raise ConfigError(f"need gamma_low < gamma_high, got {gamma_low}, {gamma_high}")
    if isinstance(cm, Unquantifiable):
        return Regime.USELESS_INTOLERABLE
    if isinstance(cm, Negligible):
        return Regime.USELESS_IRRELEVANT
    if priors is None and _class_count(cm):
        priors = ClassPriors.uniform(_class_count(cm))
    gamma = expected_unit_cost(cm, priors)
    if gamma < gamma_low:
        return Regime.USELESS_IRRELEVANT
    if gamma > gamma_high:
        return Regime.USELESS_INTOLERABLE
    return Regime.USEFUL_CANDIDATE


def optimal_threshold(gamma_fp, gamma_fn) -> float:
    """Probability cut-off above which predicting positive is cheaper.

    At positive-class probability q, predicting positive risks
    (1 - q) * gamma_fp and predicting negative risks q * gamma_fn.
    """
    if min(gamma_fp, gamma_fn) < 0:
        raise ConfigError("costs must be non-negative")
    if gamma_fp + gamma_fn <= 0:
        raise BothZero("gamma_fp and gamma_fn are both zero")
    return gamma_fp / (gamma_fp + gamma_fn)


def expected_total_cost(cm: CostModel, confusion_counts) -> float:
    """Sum of unit cost times count over a (true x predicted) confusion matrix.

    Binary counts are ordered (negative, positive). A scalar model charges
    the same cost for every off-diagonal cell.
    """
    _require_quantified(cm)
    counts = np.asarray(confusion_counts, dtype=float)
    if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
        raise DimensionMismatch(f"confusion counts must be square, got shape {counts.shape}")
    if isinstance(cm, ScalarCost):
        return float(cm.gamma * (counts.sum() - np.trace(counts)))
    m = (cm.as_matrix() if isinstance(cm, BinaryCost) else cm).array()
    if m.shape != counts.shape:
        raise DimensionMismatch(f"cost matrix {m.shape} vs counts {counts.shape}")
    return float((m * counts).sum())


def confusion_matrix(y_true, y_pred, k=2):
    counts = np.zeros((k, k))
    np.add.at(counts, (np.asarray(y_true, dtype=int), np.asarray(y_pred, dtype=int)), 1)
    return counts


def expected_confusion(probabilities, threshold):
    """Expected binary confusion counts for calibrated positive-class scores.

    Rows are true (negative, positive), columns predicted; a score strictly
    above ``threshold`` is predicted positive.
    """
    q = np.asarray(probabilities, dtype=float)
    pos = q > threshold
    return np.array([[np.sum(1 - q[~pos]), np.sum(1 - q[pos])],
                     [np.sum(q[~pos]), np.sum(q[pos])]])


def cost_model_from_config(block) -> CostModel:
    """Build a cost model from a config mapping such as
    ``{"form": "binary", "gamma_fp": 5, "gamma_fn": 10, "currency": "USD"}``."""
    block = dict(block)
    form = str(block.pop("form", "")).lower()
    currency = str(block.pop("currency", ""))
    block.pop("priors", None)
    try:
        if form == "scalar":
            return ScalarCost(float(block["gamma"]), currency)
        if form == "binary":
            return BinaryCost(float(block["gamma_fp"]), float(block["gamma_fn"]), currency)
        if form == "matrix":
            return MatrixCost(tuple(tuple(r) for r in block["entries"]), currency)
    except KeyError as exc:
        raise ConfigError(f"cost block of form {form!r} is missing {exc}") from None
    if form == "unquantifiable":
        return Unquantifiable(currency)
    if form == "negligible":
        return Negligible(currency)
    raise ConfigError(f"unknown cost form {form!r}")


def cost_model_to_config(cm: CostModel):
    if isinstance(cm, ScalarCost):
        out = {"form": "scalar", "gamma": cm.gamma}
    elif isinstance(cm, BinaryCost):
        out = {"form": "binary", "gamma_fp": cm.gamma_fp, "gamma_fn": cm.gamma_fn}
    elif isinstance(cm, MatrixCost):
        out = {"form": "matrix", "entries": [list(r) for r in cm.entries]}
    else:
        out = {"form": type(cm).__name__.lower()}
    out["currency"] = cm.currency
    return out
