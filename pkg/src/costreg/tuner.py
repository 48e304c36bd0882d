"""Regularization strength selection.

Grid and random search score each candidate lam by k-fold cross-validated
held-out loss (the bare loss, without the penalty). ``recommend_lambda``
skips the search entirely and reads lam off a quantified false-alarm cost.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cost import ClassPriors, aggregation_rule, expected_unit_cost, lambda_from_cost
from .errors import ConfigError
from .losses import eval_loss
from .solvers import SolveOptions, solve_penalized


class TuneMethod(enum.Enum):
    GRID = "grid"
    RANDOM = "random"
    COST_DERIVED = "cost_derived"


@dataclass(frozen=True)
class LambdaScore:
    lam: float
    mean: float
    fold_scores: tuple
    # folds whose solve hit max_iterations; their score is the best iterate's
    unconverged_folds: tuple = ()


@dataclass(frozen=True)
class TuneResult:
    best_lambda: float
    scores: tuple
    method: TuneMethod
    seed: Optional[int] = None
    gamma: Optional[float] = None
    aggregation: Optional[str] = None

    @property
    def best_score(self):
        for s in self.scores:
            if s.lam == self.best_lambda:
                return s
        return None


def _score(loss, penalty, lam, d, folds, opts):
    per_fold = []
    unconverged = []
    for f in range(folds.k):
        train = d.subset(folds.train_rows(f))
        test = d.subset(folds.test_rows(f))
        fit = solve_penalized(loss, penalty, lam, train, opts)
        if not fit.converged:
            unconverged.append(f)
        per_fold.append(eval_loss(loss, fit.w, test))
    return LambdaScore(float(lam), float(np.mean(per_fold)), tuple(per_fold), tuple(unconverged))


def _pick(scores):
    """Lowest mean; ties go to the largest lam."""
    best = None
    for s in scores:
        if best is None or s.mean < best.mean or (s.mean == best.mean and s.lam >= best.lam):
            best = s
    return best.lam


def grid_search(loss, penalty, lambdas, d, folds, opts: Optional[SolveOptions] = None) -> TuneResult:
    lambdas = [float(x) for x in lambdas]
    if not lambdas:
        raise ConfigError("lambda grid is empty")
    if any(x <= 0 or not math.isfinite(x) for x in lambdas):
        raise ConfigError("lambda grid values must be positive and finite")
    if any(b < a for a, b in zip(lambdas, lambdas[1:])):
        raise ConfigError("lambda grid must be ascending")
    opts = opts or SolveOptions()
    scores = tuple(_score(loss, penalty, lam, d, folds, opts) for lam in lambdas)
    return TuneResult(_pick(scores), scores, TuneMethod.GRID)


def sample_log_uniform(log_range, trials, seed):
    lo, hi = log_range
    if not 0 < lo < hi:
        raise ConfigError(f"log range must satisfy 0 < lower < upper, got {log_range}")
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size=trials))


def random_search(loss, penalty, log_range, trials, d, folds, seed,
                  opts: Optional[SolveOptions] = None) -> TuneResult:
    """Score ``trials`` lam values drawn log-uniformly from ``log_range``.

    Scores are kept in draw order.
    """
    opts = opts or SolveOptions()
    lambdas = sample_log_uniform(log_range, trials, seed)
    scores = tuple(_score(loss, penalty, lam, d, folds, opts) for lam in lambdas)
    return TuneResult(_pick(scores), scores, TuneMethod.RANDOM, seed=seed)


def recommend_lambda(cm, priors: ClassPriors) -> TuneResult:
    """lam = 1 / expected unit cost of an error; no search is run."""
    lam = lambda_from_cost(cm, priors)
    gamma = expected_unit_cost(cm, priors)
    score = LambdaScore(lam, math.nan, ())
    return TuneResult(lam, (score,), TuneMethod.COST_DERIVED, gamma=gamma,
                      aggregation=aggregation_rule(cm))
