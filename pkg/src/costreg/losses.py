"""Empirical losses with analytic gradients.

Squared error is normalized by 1/(2T), logistic and hinge by 1/T. When
``intercept`` is set the coefficient vector carries one extra trailing
entry multiplying a constant-1 column.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import BadLabels, ConfigError, DimensionMismatch


class LossKind(str, enum.Enum):
    SQUARED = "squared"
    LOGISTIC = "logistic"
    HINGE = "hinge"


@dataclass(frozen=True)
class LossSpec:
    kind: LossKind
    intercept: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", LossKind(self.kind))
        except ValueError:
            names = ", ".join(k.value for k in LossKind)
            raise ConfigError(f"unknown loss {self.kind!r}; expected one of {names}") from None

    @property
    def smooth(self):
        return self.kind is not LossKind.HINGE

    @property
    def classification(self):
        return self.kind is not LossKind.SQUARED

    def n_coef(self, p):
        return p + int(self.intercept)


def design_matrix(spec: LossSpec, X):
    X = np.asarray(X, dtype=float)
    if spec.intercept:
        return np.column_stack([X, np.ones(X.shape[0])])
    return X


def check_labels(spec: LossSpec, y):
    if spec.classification and not np.all((y == 1.0) | (y == -1.0)):
        raise BadLabels(f"{spec.kind.value} loss needs labels in {{-1, +1}}")


def value(kind, A, y, w):
    """Loss of coefficients ``w`` on design matrix ``A`` (no checks)."""
    z = A @ w
    if kind is LossKind.SQUARED:
        r = z - y
        return float(r @ r) / (2.0 * len(y))
    m = y * z
    if kind is LossKind.LOGISTIC:
        return float(np.logaddexp(0.0, -m).mean())
    return float(np.maximum(0.0, 1.0 - m).mean())


def gradient(kind, A, y, w):
    z = A @ w
    T = len(y)
    if kind is LossKind.SQUARED:
        return A.T @ (z - y) / T
    m = y * z
    if kind is LossKind.LOGISTIC:
        return -(A.T @ (y * expit(-m))) / T
    # subgradient; zero at the kink m == 1
    return -(A.T @ (y * (m < 1.0))) / T


def _prepare(spec, w, d):
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if w.shape[0] != spec.n_coef(d.p):
        raise DimensionMismatch(f"expected {spec.n_coef(d.p)} coefficients, got {w.shape[0]}")
    check_labels(spec, d.labels)
    return design_matrix(spec, d.features), w


def eval_loss(spec: LossSpec, w, d) -> float:
    A, w = _prepare(spec, w, d)
    return value(spec.kind, A, d.labels, w)


def grad_loss(spec: LossSpec, w, d):
    A, w = _prepare(spec, w, d)
    return gradient(spec.kind, A, d.labels, w)
