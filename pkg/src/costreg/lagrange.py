"""Shadow price of the complexity budget.

For ``min loss(w) s.t. g(w) <= c`` the envelope theorem gives
``d loss*(c) / dc = -multiplier`` wherever the value function is
differentiable. :func:`sensitivity_check` measures that slope with a central
difference and compares it to the multiplier found by the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError
from .solvers import SolveOptions, solve_constrained


@dataclass(frozen=True)
class SensitivityReport:
    c: float
    multiplier: float
    finite_difference_slope: float
    residual: float
    delta_c: float
    loss_at_c: float
    constraint_active: bool


def sensitivity_check(loss, penalty, c, delta_c, d,
                      opts: Optional[SolveOptions] = None) -> SensitivityReport:
    if not c > delta_c > 0:
        raise ConfigError(f"need c > delta_c > 0, got c={c}, delta_c={delta_c}")
    centre = solve_constrained(loss, penalty, c, d, opts)
    below = solve_constrained(loss, penalty, c - delta_c, d, opts)
    above = solve_constrained(loss, penalty, c + delta_c, d, opts)
    slope = (above.fit.loss_value - below.fit.loss_value) / (2.0 * delta_c)
    return SensitivityReport(c=float(c), multiplier=centre.multiplier,
                             finite_difference_slope=slope,
                             residual=abs(centre.multiplier + slope), delta_c=float(delta_c),
                             loss_at_c=centre.fit.loss_value,
                             constraint_active=centre.constraint_active)
