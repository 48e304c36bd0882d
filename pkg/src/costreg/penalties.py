"""Penalty functions g(w) and their proximal operators.

L2 is the plain sum of squares (no square root, no 1/2), so the ridge
prox is ``v / (1 + 2 theta)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DimensionMismatch


class PenaltyKind(str, enum.Enum):
    L0 = "l0"
    L1 = "l1"
    L2 = "l2"
    ELASTIC_NET = "elastic_net"
    WEIGHTED_L2 = "weighted_l2"


CONVEX_KINDS = frozenset({PenaltyKind.L1, PenaltyKind.L2,
                          PenaltyKind.ELASTIC_NET, PenaltyKind.WEIGHTED_L2})


@dataclass(frozen=True)
class PenaltySpec:
    """Which penalty is in play.

    ``mix`` is the weight on the L1 part of the elastic net and is only
    allowed for that kind; ``weights`` are the per-coefficient factors of
    the heteroskedastic (weighted) ridge.
    """

    kind: PenaltyKind
    mix: Optional[float] = None
    weights: Optional[tuple] = None

    def __post_init__(self):
        try:
            kind = PenaltyKind(self.kind)
        except ValueError:
            names = ", ".join(k.value for k in PenaltyKind)
            raise ConfigError(f"unknown penalty {self.kind!r}; expected one of {names}") from None
        object.__setattr__(self, "kind", kind)
        if (self.mix is not None) != (kind is PenaltyKind.ELASTIC_NET):
            raise ConfigError("mix is required for elastic_net and forbidden otherwise")
        if kind is PenaltyKind.ELASTIC_NET and not 0.0 <= self.mix <= 1.0:
            raise ConfigError(f"mix must lie in [0, 1], got {self.mix}")
        if (self.weights is not None) != (kind is PenaltyKind.WEIGHTED_L2):
            raise ConfigError("weights are required for weighted_l2 and forbidden otherwise")
        if self.weights is not None:
            w = tuple(float(x) for x in np.ravel(self.weights))
            if not w or min(w) <= 0:
                raise ConfigError("weighted_l2 weights must be non-empty and positive")
            object.__setattr__(self, "weights", w)

    @property
    def convex(self):
        return self.kind in CONVEX_KINDS

    def split_weights(self, p):
        """Per-coordinate (l1, l2) weights such that g(w) = sum a|w| + b w^2.

        Not meaningful for L0.
        """
        kind = self.kind
        if kind is PenaltyKind.L1:
            return np.ones(p), np.zeros(p)
        if kind is PenaltyKind.L2:
            return np.zeros(p), np.ones(p)
        if kind is PenaltyKind.ELASTIC_NET:
            return np.full(p, self.mix), np.full(p, 1.0 - self.mix)
        if kind is PenaltyKind.WEIGHTED_L2:
            if len(self.weights) != p:
                raise DimensionMismatch(f"{len(self.weights)} weights for {p} coefficients")
            return np.zeros(p), np.asarray(self.weights)
        raise ValueError("L0 has no (l1, l2) decomposition")


def l1(): return PenaltySpec(PenaltyKind.L1)
def l2(): return PenaltySpec(PenaltyKind.L2)
def l0(): return PenaltySpec(PenaltyKind.L0)
def elastic_net(mix): return PenaltySpec(PenaltyKind.ELASTIC_NET, mix=mix)
def weighted_l2(weights): return PenaltySpec(PenaltyKind.WEIGHTED_L2, weights=tuple(weights))


def _vector(spec, w):
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if spec.weights is not None and len(spec.weights) != w.shape[0]:
        raise DimensionMismatch(f"{len(spec.weights)} weights for vector of length {w.shape[0]}")
    return w


def eval_penalty(spec: PenaltySpec, w) -> float:
    w = _vector(spec, w)
    kind = spec.kind
    if kind is PenaltyKind.L0:
        return float(np.count_nonzero(w))
    if kind is PenaltyKind.L1:
        return float(np.abs(w).sum())
    if kind is PenaltyKind.L2:
        return float(w @ w)
    if kind is PenaltyKind.ELASTIC_NET:
        return float(spec.mix * np.abs(w).sum() + (1.0 - spec.mix) * (w @ w))
    return float(np.asarray(spec.weights) @ (w * w))


def soft_threshold(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def prox_penalty(spec: PenaltySpec, v, theta: float):
    """argmin_w 1/2 ||v - w||^2 + theta * g(w), coordinate-wise.

    For L0 a coordinate survives when |v_i| >= sqrt(2 theta); ties keep it.
    """
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    v = _vector(spec, v)
    kind = spec.kind
    if kind is PenaltyKind.L0:
        return np.where(np.abs(v) >= np.sqrt(2.0 * theta), v, 0.0)
    a, b = spec.split_weights(v.shape[0])
    return soft_threshold(v, theta * a) / (1.0 + 2.0 * theta * b)
