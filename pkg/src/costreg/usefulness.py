"""Campaign profitability with and without a model.

A blanket campaign contacts all N customers at unit cost B and converts a
fraction theta at price C. A model splits them into N1 predicted positives
(contacted, of which a fraction beta are wrong) and N0 predicted negatives
(not contacted, of which a fraction alpha were real buyers). The model is
worth deploying when its net profit beats the blanket campaign.

Note on alpha: alpha is the false-negative probability, yet the with-model
profit subtracts ``N0 * alpha * B``, a contact cost, for missed buyers.
That term is kept as stated rather than reinterpreted; the revenue-side
form ``N0 * B * (1 - alpha)`` follows from it algebraically.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import BadRange, ConfigError


@dataclass(frozen=True)
class CampaignScenario:
    n_negative_pred: int
    n_positive_pred: int
    alpha: float
    beta: float
    theta: float
    unit_fp_cost: float
    price: float
    n_total: Optional[int] = None

    def __post_init__(self):
        total = self.n_negative_pred + self.n_positive_pred
        if self.n_total is None:
            object.__setattr__(self, "n_total", total)
        elif self.n_total != total:
            raise ConfigError(f"n_total={self.n_total} but n0 + n1 = {total}")
        if min(self.n_negative_pred, self.n_positive_pred) < 0:
            raise ConfigError("counts must be non-negative")
        for name in ("alpha", "beta", "theta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if not 0.0 <= self.unit_fp_cost <= self.price:
            raise ConfigError(f"need 0 <= unit_fp_cost <= price, got B={self.unit_fp_cost}, "
                              f"C={self.price}")

    @property
    def opportunity_cost(self):
        """Unit cost of a false negative, price minus contact cost."""
        return self.price - self.unit_fp_cost

    def with_(self, **changes):
        return replace(self, **changes)

    @classmethod
    def from_config(cls, block):
        block = dict(block)
        try:
            return cls(n_negative_pred=int(block["n0"]), n_positive_pred=int(block["n1"]),
                       alpha=float(block["alpha"]), beta=float(block["beta"]),
                       theta=float(block["theta"]), unit_fp_cost=float(block["unit_fp_cost"]),
                       price=float(block["price"]),
                       n_total=None if block.get("n_total") is None else int(block["n_total"]))
        except KeyError as exc:
            raise ConfigError(f"scenario block is missing {exc}") from None

    def to_config(self):
        return {"n_total": self.n_total, "n0": self.n_negative_pred, "n1": self.n_positive_pred,
                "alpha": self.alpha, "beta": self.beta, "theta": self.theta,
                "unit_fp_cost": self.unit_fp_cost, "price": self.price}


@dataclass(frozen=True)
class ProfitReport:
    profit_with_ml: float
    profit_without_ml: float
    differential: float
    useful: bool
    lhs: float
    rhs: float
    forms_agree: bool


@dataclass(frozen=True)
class ProfitGrid:
    beta_axis: np.ndarray
    price_axis: np.ndarray
    values: np.ndarray


def profit_without_ml(s: CampaignScenario) -> float:
    return s.n_total * (s.price * s.theta - s.unit_fp_cost)


def profit_with_ml(s: CampaignScenario) -> float:
    B = s.unit_fp_cost
    return (s.n_positive_pred * (s.price * (1.0 - s.beta) - B)
            - s.n_negative_pred * s.alpha * B)


def is_ml_useful(s: CampaignScenario) -> ProfitReport:
    """Compare the two profits and the equivalent revenue-plus-savings form.

    Equality is not useful: the comparison is strict in both forms.
    """
    N, N0, N1 = s.n_total, s.n_negative_pred, s.n_positive_pred
    B, C = s.unit_fp_cost, s.price
    with_ml = profit_with_ml(s)
    without = profit_without_ml(s)
    lhs = N1 * C * (1.0 - s.beta) + N0 * B * (1.0 - s.alpha)
    rhs = N * C * s.theta
    useful = lhs > rhs
    return ProfitReport(profit_with_ml=with_ml, profit_without_ml=without,
                        differential=with_ml - without, useful=useful, lhs=lhs, rhs=rhs,
                        forms_agree=useful == (with_ml > without))


def precision_condition(s: CampaignScenario) -> Optional[bool]:
    """When revenue per targeted customer equals saving per skipped one,
    the model is useful exactly when its precision beats theta.

    Returns None when that balance does not hold.
    """
    C, B = s.price, s.unit_fp_cost
    if abs(C * (1.0 - s.beta) - B * (1.0 - s.alpha)) > 1e-9 * max(C, B):
        return None
    return (1.0 - s.beta) > s.theta


def break_even_price(s: CampaignScenario, beta) -> Optional[float]:
    """Price at which the model's net profit is zero for this ``beta``."""
    if not 0.0 <= beta <= 1.0:
        raise BadRange(f"beta must lie in [0, 1], got {beta}")
    N0, N1, B = s.n_negative_pred, s.n_positive_pred, s.unit_fp_cost
    denom = N1 * (1.0 - beta)
    if denom <= 0:
        return None
    return B * (N1 + N0 * s.alpha) / denom


def profit_surface(s: CampaignScenario, beta, price):
    """Vectorized profit_with_ml over broadcastable beta and price arrays."""
    beta = np.asarray(beta, dtype=float)
    price = np.asarray(price, dtype=float)
    B = s.unit_fp_cost
    return s.n_positive_pred * (price * (1.0 - beta) - B) - s.n_negative_pred * s.alpha * B


def contour_grid(s: CampaignScenario, beta_range=(0.01, 0.99), price_range=(1.0, 100.0),
                 resolution=100) -> ProfitGrid:
    """Model profit on an evenly spaced (beta, price) grid, endpoints included.

    ``values[i, j]`` is the profit at ``beta_axis[i]`` and ``price_axis[j]``.
    """
    if resolution < 2:
        raise BadRange(f"resolution must be at least 2, got {resolution}")
    b_lo, b_hi = beta_range
    c_lo, c_hi = price_range
    if not 0.0 < b_lo < b_hi < 1.0:
        raise BadRange(f"beta range must satisfy 0 < lo < hi < 1, got {beta_range}")
    if not 0.0 <= c_lo < c_hi:
        raise BadRange(f"price range must satisfy 0 <= lo < hi, got {price_range}")
    betas = np.linspace(b_lo, b_hi, resolution)
    prices = np.linspace(c_lo, c_hi, resolution)
    values = profit_surface(s, betas[:, None], prices[None, :])
    return ProfitGrid(betas, prices, values)


def zero_crossings(grid: ProfitGrid):
    """Linearly interpolated price where each beta row changes sign.

    Returns (beta, price, bracket_low, bracket_high) tuples; rows without a
    sign change are skipped.
    """
    out = []
    for i, beta in enumerate(grid.beta_axis):
        row = grid.values[i]
        change = np.flatnonzero(np.sign(row[:-1]) != np.sign(row[1:]))
        for j in change:
            c0, c1 = grid.price_axis[j], grid.price_axis[j + 1]
            v0, v1 = row[j], row[j + 1]
            price = c0 if v0 == v1 else c0 - v0 * (c1 - c0) / (v1 - v0)
            out.append((float(beta), float(price), float(c0), float(c1)))
    return out


def write_grid_csv(grid: ProfitGrid, path):
    """CSV with header beta,price,profit, row-major by beta then price."""
    lines = ["beta,price,profit"]
    for i, beta in enumerate(grid.beta_axis):
        for j, price in enumerate(grid.price_axis):
            lines.append(f"{beta:.6f},{price:.6f},{grid.values[i, j]:.6f}")
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
