"""Penalized, cost-scaled and constrained empirical risk minimization.

Three problem forms share one engine:

* penalized      ``loss(w) + lam * g(w)``
* cost-scaled    ``gamma * loss(w) + g(w)``, solved as penalized with lam = 1/gamma
* constrained    ``loss(w)`` subject to ``g(w) <= c``, solved by bisection on lam

The intercept, when the loss carries one, is the trailing coefficient and is
never penalized.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import optimize
from scipy.special import expit

from . import losses
from .errors import (ConfigError, DimensionMismatch, IllPosed, NotConverged,
                     UnsupportedPenalty)
from .losses import LossKind, LossSpec
from .penalties import PenaltyKind, PenaltySpec, eval_penalty, prox_penalty

log = logging.getLogger(__name__)

METHODS = ("closed_form", "coordinate_descent", "proximal_gradient",
           "subgradient", "l0_local_search")


@dataclass(frozen=True)
class SolveOptions:
    max_iterations: int = 20000
    tolerance: float = 1e-13
    seed: int = 0
    restarts: int = 4

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be at least 1")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.restarts < 0:
            raise ConfigError("restarts must be non-negative")


@dataclass(frozen=True)
class Fit:
    """A solved coefficient vector with its objective decomposition.

    ``objective`` is ``loss_value + lam * penalty_value``, except for
    cost-scaled fits (``gamma`` set) where it is
    ``gamma * loss_value + penalty_value``.
    """

    w: np.ndarray
    loss_value: float
    penalty_value: float
    objective: float
    lam: float
    iterations_used: int
    converged: bool
    method: str
    gamma: Optional[float] = None
    history: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class ConstrainedFit:
    fit: Fit
    c: float
    multiplier: float
    constraint_active: bool
    bisection_steps: int = 0


class _Problem:
    """Design matrix, labels and penalty bookkeeping for one solve."""

    def __init__(self, loss: LossSpec, penalty: PenaltySpec, lam, d):
        losses.check_labels(loss, d.labels)
        self.loss = loss
        self.penalty = penalty
        self.kind = loss.kind
        self.lam = float(lam)
        self.A = losses.design_matrix(loss, d.features)
        self.y = d.labels
        self.T = d.T
        self.p = d.p
        self.n = self.A.shape[1]
        if penalty.weights is not None and len(penalty.weights) != self.p:
            raise DimensionMismatch(f"{len(penalty.weights)} weights for {self.p} features")
        self.col_sq = np.einsum("ij,ij->j", self.A, self.A) / self.T

    def loss_value(self, w):
        return losses.value(self.kind, self.A, self.y, w)

    def grad(self, w):
        return losses.gradient(self.kind, self.A, self.y, w)

    def pen(self, w):
        return eval_penalty(self.penalty, w[:self.p])

    def objective(self, w):
        return self.loss_value(w) + self.lam * self.pen(w)

    def prox(self, v, t):
        out = np.array(v, dtype=float)
        if self.lam > 0:
            out[:self.p] = prox_penalty(self.penalty, v[:self.p], t * self.lam)
        return out

    def coord_weights(self):
        """(l1, l2) weight per coefficient; intercept gets (0, 0)."""
        a = np.zeros(self.n)
        b = np.zeros(self.n)
        a[:self.p], b[:self.p] = self.penalty.split_weights(self.p)
        return a, b

    def lipschitz(self):
        s = np.linalg.norm(self.A, 2) ** 2 / self.T
        return s / 4.0 if self.kind is LossKind.LOGISTIC else s

    def finish(self, w, iterations, converged, method, history=()):
        loss_value = self.loss_value(w)
        penalty_value = self.pen(w)
        return Fit(w=w, loss_value=loss_value, penalty_value=penalty_value,
                   objective=loss_value + self.lam * penalty_value, lam=self.lam,
                   iterations_used=iterations, converged=converged, method=method,
                   history=tuple(history))


def _stalled(prev, cur, tol):
    return abs(prev - cur) <= tol * abs(prev)


def _closed_form(prob: _Problem, opts, w0=None):
    """Ridge / weighted ridge normal equations (squared loss only)."""
    _, b = prob.coord_weights()
    H = prob.A.T @ prob.A / prob.T + 2.0 * prob.lam * np.diag(b)
    rhs = prob.A.T @ prob.y / prob.T
    try:
        w = np.linalg.solve(H, rhs)
    except np.linalg.LinAlgError:
        w = np.linalg.lstsq(H, rhs, rcond=None)[0]
    return prob.finish(w, 1, True, "closed_form", [prob.objective(w)])


def _coordinate_descent(prob: _Problem, opts, w0=None):
    """Cyclic coordinate descent for convex elastic-net-type penalties.

    Squared loss takes exact coordinate minimizers; logistic loss takes the
    minimizer of the coordinate-wise quadratic majorizer (curvature bound
    ||a_j||^2 / 4T), which keeps every step a descent step.
    """
    A, y, T, lam = prob.A, prob.y, prob.T, prob.lam
    a, b = prob.coord_weights()
    w = np.zeros(prob.n) if w0 is None else np.array(w0, dtype=float)
    z = A @ w
    squared = prob.kind is LossKind.SQUARED
    curv = prob.col_sq if squared else prob.col_sq / 4.0
    obj = prob.objective(w)
    history = [obj]
    for sweep in range(1, opts.max_iterations + 1):
        for j in range(prob.n):
            if curv[j] == 0.0:
                new = 0.0
            else:
                if squared:
                    g = A[:, j] @ (z - y) / T
                else:
                    g = -(A[:, j] @ (y * expit(-y * z))) / T
                u = curv[j] * w[j] - g
                new = np.sign(u) * max(abs(u) - lam * a[j], 0.0) / (curv[j] + 2.0 * lam * b[j])
            if new != w[j]:
                z += (new - w[j]) * A[:, j]
                w[j] = new
        prev, obj = obj, prob.objective(w)
        history.append(obj)
        if _stalled(prev, obj, opts.tolerance):
            return prob.finish(w, sweep, True, "coordinate_descent", history)
    return prob.finish(w, opts.max_iterations, False, "coordinate_descent", history)


def _proximal_gradient(prob: _Problem, opts, w0=None):
    """Proximal gradient with backtracking on the quadratic upper bound.

    Each accepted step minimizes a majorizer of the objective, so objective
    values never increase. The trial step grows again after each acceptance.
    """
    w = np.zeros(prob.n) if w0 is None else np.array(w0, dtype=float)
    L = prob.lipschitz()
    t = 1.0 / L if L > 0 else 1.0
    f = prob.loss_value(w)
    obj = f + prob.lam * prob.pen(w)
    history = [obj]
    for it in range(1, opts.max_iterations + 1):
        g = prob.grad(w)
        for _ in range(100):
            w_new = prob.prox(w - t * g, t)
            step = w_new - w
            f_new = prob.loss_value(w_new)
            if f_new <= f + g @ step + (step @ step) / (2.0 * t) + 1e-15 * abs(f):
                break
            t *= 0.5
        new_obj = f_new + prob.lam * prob.pen(w_new)
        if new_obj > obj:
            # rounding noise at the optimum; keep the better point
            history.append(obj)
            return prob.finish(w, it, True, "proximal_gradient", history)
        w, f, prev, obj = w_new, f_new, obj, new_obj
        history.append(obj)
        if _stalled(prev, obj, opts.tolerance):
            return prob.finish(w, it, True, "proximal_gradient", history)
        t *= 2.0
    return prob.finish(w, opts.max_iterations, False, "proximal_gradient", history)


def _subgradient(prob: _Problem, opts, w0=None):
    """Proximal subgradient descent for the non-smooth hinge loss.

    Steps shrink like 1/sqrt(k). Objective values are not monotone, so the
    best iterate is tracked and convergence is declared when a block of 1000
    iterations improves the best objective by less than the relative
    tolerance.
    """
    w = np.zeros(prob.n) if w0 is None else np.array(w0, dtype=float)
    L = max(prob.lipschitz(), 1e-12)
    best_w, best = w.copy(), prob.objective(w)
    history = [best]
    block_start = best
    for it in range(1, opts.max_iterations + 1):
        t = 1.0 / (L * math.sqrt(it))
        w = prob.prox(w - t * prob.grad(w), t)
        obj = prob.objective(w)
        if obj < best:
            best, best_w = obj, w.copy()
        if it % 1000 == 0:
            history.append(best)
            if _stalled(block_start, best, opts.tolerance):
                return prob.finish(best_w, it, True, "subgradient", history)
            block_start = best
    return prob.finish(best_w, opts.max_iterations, False, "subgradient", history)


class _SupportSearch:
    """Best-subset objective F(S) = min over w supported on S of loss + lam |S|."""

    def __init__(self, prob: _Problem):
        self.prob = prob
        self.cache = {}
        self.intercept_cols = list(range(prob.p, prob.n))

    def refit(self, support):
        key = frozenset(support)
        if key in self.cache:
            return self.cache[key]
        prob = self.prob
        cols = sorted(key) + self.intercept_cols
        w = np.zeros(prob.n)
        if cols:
            As = prob.A[:, cols]
            if prob.kind is LossKind.SQUARED:
                w[cols] = np.linalg.lstsq(As, prob.y, rcond=None)[0]
            else:
                y, T = prob.y, prob.T
                res = optimize.minimize(
                    lambda v: losses.value(prob.kind, As, y, v),
                    np.zeros(len(cols)),
                    jac=lambda v: losses.gradient(prob.kind, As, y, v),
                    method="L-BFGS-B", options={"gtol": 1e-12, "ftol": 1e-15, "maxiter": 2000})
                w[cols] = res.x
        obj = prob.loss_value(w) + prob.lam * len(key)
        self.cache[key] = (obj, w)
        return obj, w

    def local_search(self, support):
        """Best-improvement descent over drop, add and swap moves."""
        p = self.prob.p
        current = frozenset(support)
        best, _ = self.refit(current)
        moves = 0
        while True:
            inactive = [j for j in range(p) if j not in current]
            neighbours = [current - {i} for i in current]
            neighbours += [current | {j} for j in inactive]
            neighbours += [(current - {i}) | {j} for i in current for j in inactive]
            scored = [(self.refit(s)[0], sorted(s), s) for s in neighbours]
            if not scored:
                return current, moves
            obj, _, s = min(scored, key=lambda x: (x[0], x[1]))
            if obj < best - 1e-13 * max(1.0, abs(best)):
                best, current = obj, s
                moves += 1
            else:
                return current, moves


def _l0_coordinate_descent(prob: _Problem, opts):
    """Cyclic coordinate descent with coordinate-wise hard thresholding."""
    A, y, T, lam = prob.A, prob.y, prob.T, prob.lam
    squared = prob.kind is LossKind.SQUARED
    curv = prob.col_sq if squared else prob.col_sq / 4.0
    w = np.zeros(prob.n)
    z = np.zeros(T)
    obj = prob.objective(w)
    for sweep in range(1, opts.max_iterations + 1):
        for j in range(prob.n):
            if curv[j] == 0.0:
                new = 0.0
            else:
                if squared:
                    g = A[:, j] @ (z - y) / T
                else:
                    g = -(A[:, j] @ (y * expit(-y * z))) / T
                u = w[j] - g / curv[j]
                penalized = j < prob.p
                new = u if (not penalized or 0.5 * curv[j] * u * u >= lam) else 0.0
            if new != w[j]:
                z += (new - w[j]) * A[:, j]
                w[j] = new
        prev, obj = obj, prob.objective(w)
        if _stalled(prev, obj, opts.tolerance):
            return w, sweep, True
    return w, opts.max_iterations, False


def _l0_search(prob: _Problem, opts, w0=None):
    """Coordinate descent, then local combinatorial search with restarts.

    Restarts begin from random supports drawn with ``opts.seed``. The result
    is a local optimum under single drop/add/swap moves; it is not certified
    globally optimal.
    """
    if prob.kind is LossKind.HINGE:
        raise UnsupportedPenalty("l0 penalty is supported for squared and logistic losses only")
    search = _SupportSearch(prob)
    w_cd, sweeps, cd_converged = _l0_coordinate_descent(prob, opts)
    starts = [frozenset(np.flatnonzero(w_cd[:prob.p]).tolist())]
    rng = np.random.default_rng(opts.seed)
    for _ in range(opts.restarts):
        size = int(rng.integers(0, prob.p + 1))
        starts.append(frozenset(rng.choice(prob.p, size=size, replace=False).tolist()))
    best = None
    total_moves = 0
    for s in starts:
        support, moves = search.local_search(s)
        total_moves += moves
        obj, w = search.refit(support)
        if best is None or obj < best[0] - 1e-13 * max(1.0, abs(best[0])):
            best = (obj, w)
    w = best[1].copy()
    return prob.finish(w, sweeps + total_moves, cd_converged, "l0_local_search", [best[0]])


def _auto_method(loss: LossSpec, penalty: PenaltySpec):
    kind = penalty.kind
    if kind is PenaltyKind.L0:
        return "l0_local_search"
    if loss.kind is LossKind.HINGE:
        return "subgradient"
    if loss.kind is LossKind.SQUARED and kind in (PenaltyKind.L2, PenaltyKind.WEIGHTED_L2):
        return "closed_form"
    if kind in (PenaltyKind.L1, PenaltyKind.ELASTIC_NET):
        return "coordinate_descent"
    return "proximal_gradient"


def _check_method(method, loss: LossSpec, penalty: PenaltySpec):
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}")
    bad = (
        (method == "closed_form" and not (loss.kind is LossKind.SQUARED and penalty.kind in
                                          (PenaltyKind.L2, PenaltyKind.WEIGHTED_L2)))
        or (method == "coordinate_descent" and (not loss.smooth or not penalty.convex))
        or (method == "proximal_gradient" and not loss.smooth)
        or (method == "l0_local_search" and penalty.kind is not PenaltyKind.L0)
    )
    if bad:
        raise ConfigError(f"method {method} does not apply to {loss.kind.value} loss "
                          f"with {penalty.kind.value} penalty")


_DISPATCH = {
    "closed_form": _closed_form,
    "coordinate_descent": _coordinate_descent,
    "proximal_gradient": _proximal_gradient,
    "subgradient": _subgradient,
    "l0_local_search": _l0_search,
}


def solve_penalized(loss: LossSpec, penalty: PenaltySpec, lam, d,
                    opts: Optional[SolveOptions] = None, method=None, w0=None) -> Fit:
    """Minimize ``loss(w) + lam * g(w)``.

    ``method`` forces a specific algorithm (mainly for cross-checking);
    by default squared loss with (weighted) ridge uses the normal equations,
    L1 and elastic net use cyclic coordinate descent, L0 uses coordinate
    descent followed by local subset search, the hinge loss uses proximal
    subgradient steps and everything else proximal gradient.

    A solve that hits ``max_iterations`` returns its best iterate with
    ``converged=False`` rather than raising.
    """
    opts = opts or SolveOptions()
    lam = float(lam)
    if not (lam >= 0 and math.isfinite(lam)):
        raise ConfigError(f"lambda must be a finite non-negative number, got {lam}")
    if lam == 0 and loss.kind is LossKind.SQUARED and d.T < loss.n_coef(d.p):
        raise IllPosed(f"unpenalized least squares needs T >= {loss.n_coef(d.p)}, got T={d.T}")
    method = method or _auto_method(loss, penalty)
    _check_method(method, loss, penalty)
    prob = _Problem(loss, penalty, lam, d)
    if w0 is not None and len(w0) != prob.n:
        raise DimensionMismatch(f"warm start has {len(w0)} entries, expected {prob.n}")
    fit = _DISPATCH[method](prob, opts, w0)
    if not fit.converged:
        log.warning("%s stopped after %d iterations without converging", method, fit.iterations_used)
    return fit


def solve_cost_scaled(loss: LossSpec, penalty: PenaltySpec, gamma, d,
                      opts: Optional[SolveOptions] = None, method=None) -> Fit:
    """Minimize ``gamma * loss(w) + g(w)`` with gamma the unit cost of an error.

    Dividing by gamma leaves the minimizer unchanged, so this is the
    penalized problem at ``lam = 1 / gamma``; only the reported objective is
    rescaled.
    """
    gamma = float(gamma)
    if not (gamma > 0 and math.isfinite(gamma)):
        raise ConfigError(f"gamma must be a finite positive number, got {gamma}")
    fit = solve_penalized(loss, penalty, 1.0 / gamma, d, opts, method)
    return replace(fit, gamma=gamma, objective=gamma * fit.loss_value + fit.penalty_value)


def _intercept_only(loss: LossSpec, y):
    if not loss.intercept:
        return np.zeros(0)
    if loss.kind is LossKind.SQUARED:
        return np.array([y.mean()])
    if loss.kind is LossKind.LOGISTIC:
        q = np.clip((y > 0).mean(), 1e-12, 1 - 1e-12)
        return np.array([math.log(q / (1 - q))])
    return np.zeros(1)


def lambda_max(loss: LossSpec, penalty: PenaltySpec, d):
    """Smallest lam at which the L1 / elastic-net solution is all zero.

    Returns ``inf`` when the penalty has no L1 part.
    """
    if penalty.kind not in (PenaltyKind.L1, PenaltyKind.ELASTIC_NET):
        return math.inf
    l1_weight = 1.0 if penalty.kind is PenaltyKind.L1 else penalty.mix
    if l1_weight == 0:
        return math.inf
    losses.check_labels(loss, d.labels)
    w = np.concatenate([np.zeros(d.p), _intercept_only(loss, d.labels)])
    A = losses.design_matrix(loss, d.features)
    g = losses.gradient(loss.kind, A, d.labels, w)[:d.p]
    return float(np.max(np.abs(g))) / l1_weight


def solve_constrained(loss: LossSpec, penalty: PenaltySpec, c, d,
                      opts: Optional[SolveOptions] = None,
                      constraint_tol=None) -> ConstrainedFit:
    """Minimize ``loss(w)`` subject to ``g(w) <= c`` for a convex penalty.

    If the unconstrained minimizer is feasible it is returned with
    multiplier 0. Otherwise lam is bisected on the non-increasing map
    ``lam -> g(w*(lam))`` until ``|g - c| <= constraint_tol``; the final lam is
    the multiplier. The default tolerance, ``1e-10 * max(1, c)``, is tight
    enough for the multiplier itself to be accurate to about 1e-8.
    """
    opts = opts or SolveOptions()
    if not penalty.convex:
        raise UnsupportedPenalty(f"constrained form needs a convex penalty, got {penalty.kind.value}")
    c = float(c)
    if not (c > 0 and math.isfinite(c)):
        raise ConfigError(f"complexity budget c must be positive, got {c}")
    tol_g = constraint_tol if constraint_tol is not None else 1e-10 * max(1.0, c)
    accept_g = max(tol_g, 1e-6 * max(1.0, c))

    try:
        free = solve_penalized(loss, penalty, 0.0, d, opts)
    except IllPosed:
        free = None
    if free is not None and free.penalty_value <= c:
        return ConstrainedFit(free, c, 0.0, False)

    cache = {}

    def at(lam, warm=None):
        if lam not in cache:
            cache[lam] = solve_penalized(loss, penalty, lam, d, opts,
                                         w0=None if warm is None else warm.w)
        return cache[lam]

    lo, hi = 0.0, lambda_max(loss, penalty, d)
    if not math.isfinite(hi) or hi <= 0:
        hi = 1.0
    hi_fit = at(hi)
    doublings = 0
    while hi_fit.penalty_value > c:
        doublings += 1
        if doublings > 200:
            raise NotConverged("could not bracket the multiplier", best=hi_fit)
        lo, hi = hi, 2.0 * hi
        hi_fit = at(hi, hi_fit)

    best = hi_fit
    steps = 0
    while abs(best.penalty_value - c) > tol_g:
        if steps >= 400 or hi - lo <= 4 * np.finfo(float).eps * hi:
            break
        steps += 1
        mid = 0.5 * (lo + hi)
        mid_fit = at(mid, best)
        if mid_fit.penalty_value > c:
            lo = mid
        else:
            hi, hi_fit = mid, mid_fit
        best = mid_fit
    if abs(best.penalty_value - c) > tol_g:
        # bracket collapsed: fall back to the feasible end if it is close enough
        best = hi_fit
        if abs(best.penalty_value - c) > accept_g:
            raise NotConverged(f"bisection ended with |g - c| = {abs(best.penalty_value - c):.3g}",
                               best=best)
    return ConstrainedFit(best, c, best.lam, best.lam > 0, steps)

