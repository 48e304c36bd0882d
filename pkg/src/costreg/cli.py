"""Command-line entry point.

Every command writes one JSON report (inputs echoed, results, self-checks)
to the output directory and to stdout. ``contour`` and ``tune`` also write
a CSV table and an SVG figure.

Exit status: 0 success, 1 usage or configuration error, 2 data error,
3 numeric failure (not converged, ill-posed).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config, override
from .cost import (BinaryCost, ClassPriors, MatrixCost, Negligible,
                   Unquantifiable, aggregation_rule, classify_regime,
                   cost_model_from_config, cost_model_to_config,
                   expected_unit_cost, lambda_from_cost)
from .data import load_csv, split_folds, standardize
from .errors import ConfigError, CostregError, NotConverged
from .lagrange import sensitivity_check
from .losses import LossSpec
from .penalties import PenaltySpec
from .solvers import SolveOptions, solve_cost_scaled, solve_penalized
from .tuner import grid_search, random_search, recommend_lambda
from .usefulness import (CampaignScenario, break_even_price, contour_grid,
                         is_ml_useful, precision_condition, write_grid_csv,
                         zero_crossings)

log = logging.getLogger("costreg")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _emit(cfg, command, report):
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    doc = {"command": command, "version": __version__, "config": cfg, **report}
    text = json.dumps(_jsonable(doc), indent=2) + "\n"
    (out / f"{command}_report.json").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return out


# -- config resolution -----------------------------------------------------

def _solve_options(cfg):
    block = cfg["solver"]
    return SolveOptions(max_iterations=int(block.get("max_iterations", 20000)),
                        tolerance=float(block.get("tolerance", 1e-13)),
                        seed=int(cfg["seed"]),
                        restarts=int(block.get("restarts", 4)))


def _specs(cfg):
    m = cfg["model"]
    loss = LossSpec(m.get("loss", "squared"), bool(m.get("intercept", False)))
    weights = m.get("weights")
    penalty = PenaltySpec(m.get("penalty", "l2"), mix=m.get("mix"),
                          weights=None if weights is None else tuple(weights))
    return loss, penalty


def _dataset(cfg):
    block = cfg["data"]
    if not block.get("path"):
        raise ConfigError("no dataset given (data.path or --data)")
    if not block.get("label"):
        raise ConfigError("no label column given (data.label or --label)")
    d = load_csv(block["path"], block["label"])
    scaling = None
    if block.get("standardize", True):
        d, scaling = standardize(d)
    return d, scaling


def _priors(block, cm, d=None):
    if block.get("priors") is not None:
        return ClassPriors(tuple(block["priors"]))
    if isinstance(cm, BinaryCost):
        # empirical class frequencies when the labels are +/-1
        if d is not None and np.all(np.isin(d.labels, (-1.0, 1.0))):
            return ClassPriors.binary(float(np.mean(d.labels == 1.0)))
        return ClassPriors.uniform(2)
    if isinstance(cm, MatrixCost):
        return ClassPriors.uniform(cm.k)
    return ClassPriors((1.0,))


def _scenario(cfg):
    if not cfg["scenario"]:
        raise ConfigError("this command needs a scenario block")
    return CampaignScenario.from_config(cfg["scenario"])


def _cost_block(cfg):
    if not cfg["cost"]:
        raise ConfigError("this command needs a cost block (or --gamma / --form)")
    return cost_model_from_config(cfg["cost"])


def _scaling_report(scaling, d):
    if scaling is None:
        return None
    return {"mean": scaling.mean, "scale": scaling.scale,
            "constant_columns": [d.feature_names[j] for j in scaling.constant_columns]}


def _fit_report(fit, d, loss):
    names = list(d.feature_names) + (["(intercept)"] if loss.intercept else [])
    return {"coefficients": dict(zip(names, fit.w)), "loss_value": fit.loss_value,
            "penalty_value": fit.penalty_value, "objective": fit.objective,
            "lambda": fit.lam, "gamma": fit.gamma, "method": fit.method,
            "iterations_used": fit.iterations_used, "converged": fit.converged}


# -- commands --------------------------------------------------------------

def cmd_train(cfg, args):
    loss, penalty = _specs(cfg)
    d, scaling = _dataset(cfg)
    opts = _solve_options(cfg)
    has_lambda = cfg["model"].get("lambda") is not None
    has_cost = bool(cfg["cost"])
    if has_lambda == has_cost:
        raise ConfigError("train needs exactly one of an explicit lambda or a cost model")
    cost_info = None
    if has_cost:
        cm = _cost_block(cfg)
        priors = _priors(cfg["cost"], cm, d)
        gamma = expected_unit_cost(cm, priors)
        fit = solve_cost_scaled(loss, penalty, gamma, d, opts)
        cost_info = {"cost_model": cost_model_to_config(cm), "priors": priors.probabilities,
                     "gamma": gamma, "aggregation": aggregation_rule(cm),
                     "lambda": 1.0 / gamma}
    else:
        fit = solve_penalized(loss, penalty, float(cfg["model"]["lambda"]), d, opts)
    checks = {"objective_decomposition": abs(
        fit.objective - ((fit.gamma * fit.loss_value + fit.penalty_value) if fit.gamma
                         else (fit.loss_value + fit.lam * fit.penalty_value))) <= 1e-10}
    _emit(cfg, "train", {"data": {"T": d.T, "p": d.p, "scaling": _scaling_report(scaling, d)},
                         "cost": cost_info, "fit": _fit_report(fit, d, loss), "checks": checks})
    return 0 if fit.converged else 3


def cmd_tune(cfg, args):
    block = cfg["tuning"]
    method = block.get("method", "grid")
    if method == "cost":
        cm = _cost_block(cfg)
        d = None
        if cfg["data"].get("path"):
            d, _ = _dataset(cfg)
        priors = _priors(cfg["cost"], cm, d)
        result = recommend_lambda(cm, priors)
        _emit(cfg, "tune", {"result": _tune_report(result),
                            "cost": {"cost_model": cost_model_to_config(cm),
                                     "priors": priors.probabilities}})
        return 0
    loss, penalty = _specs(cfg)
    d, _ = _dataset(cfg)
    opts = _solve_options(cfg)
    folds = split_folds(d, int(block.get("folds", 5)), int(cfg["seed"]))
    if method == "grid":
        lambdas = block.get("lambdas")
        if not lambdas:
            raise ConfigError("grid search needs tuning.lambdas")
        result = grid_search(loss, penalty, lambdas, d, folds, opts)
    elif method == "random":
        log_range = block.get("log_range")
        if not log_range or len(log_range) != 2:
            raise ConfigError("random search needs tuning.log_range = [lower, upper]")
        result = random_search(loss, penalty, tuple(log_range), int(block.get("trials", 20)),
                               d, folds, int(cfg["seed"]), opts)
    else:
        raise ConfigError(f"unknown tuning method {method!r}")
    out = _emit(cfg, "tune", {"result": _tune_report(result)})
    rows = ["lambda,mean," + ",".join(f"fold{f}" for f in range(folds.k))]
    for s in result.scores:
        rows.append(",".join(f"{v:.6f}" if abs(v) >= 1e-3 else f"{v:.6e}"
                             for v in (s.lam, s.mean, *s.fold_scores)))
    (out / "tune_scores.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    if not args.no_figure:
        from .plotting import plot_cv_curve
        plot_cv_curve(result, out / "tune_cv.svg")
    unconverged = any(s.unconverged_folds for s in result.scores)
    return 3 if unconverged else 0


def _tune_report(result):
    return {"method": result.method.value, "best_lambda": result.best_lambda,
            "seed": result.seed, "gamma": result.gamma, "aggregation": result.aggregation,
            "scores": [{"lambda": s.lam, "mean": s.mean, "folds": s.fold_scores,
                        "unconverged_folds": s.unconverged_folds} for s in result.scores]}


def cmd_profit(cfg, args):
    s = _scenario(cfg)
    r = is_ml_useful(s)
    precision = precision_condition(s)
    report = {
        "scenario": s.to_config(),
        "opportunity_cost": s.opportunity_cost,
        "profit_with_ml": r.profit_with_ml,
        "profit_without_ml": r.profit_without_ml,
        "differential": r.differential,
        "useful": r.useful,
        "inequality": {"lhs": r.lhs, "rhs": r.rhs},
        "precision_condition": precision,
        "break_even_price": break_even_price(s, s.beta) if s.n_positive_pred > 0 else None,
        "checks": {"forms_agree": r.forms_agree},
    }
    _emit(cfg, "profit", report)
    return 0


def cmd_contour(cfg, args):
    s = _scenario(cfg)
    block = cfg["contour"]
    grid = contour_grid(s, tuple(block.get("beta_range", (0.01, 0.99))),
                        tuple(block.get("price_range", (1.0, 100.0))),
                        int(block.get("resolution", 100)))
    rows_dec = bool(np.all(np.diff(grid.values, axis=0) < 0))
    cols_inc = bool(np.all(np.diff(grid.values, axis=1) > 0))
    crossings = zero_crossings(grid)
    bracketed = all(lo <= break_even_price(s, b) <= hi for b, _, lo, hi in crossings)
    out = _emit(cfg, "contour", {
        "scenario": s.to_config(),
        "shape": list(grid.values.shape),
        "profit_range": [grid.values.min(), grid.values.max()],
        "zero_contour_points": len(crossings),
        "checks": {"decreasing_in_beta": rows_dec, "increasing_in_price": cols_inc,
                   "zero_contour_brackets_break_even": bracketed},
        "files": ["contour.csv"] + ([] if args.no_figure else ["contour.svg"]),
    })
    write_grid_csv(grid, out / "contour.csv")
    if not args.no_figure:
        from .plotting import plot_profit_contour
        betas = grid.beta_axis
        prices = np.array([break_even_price(s, b) for b in betas], dtype=float)
        keep = prices <= grid.price_axis[-1]
        plot_profit_contour(grid, out / "contour.svg", break_even=(betas[keep], prices[keep]))
    return 0


def cmd_regime(cfg, args):
    cm = _cost_block(cfg)
    block = cfg["regime"]
    if block.get("gamma_low") is None or block.get("gamma_high") is None:
        raise ConfigError("regime needs explicit gamma_low and gamma_high thresholds")
    low, high = float(block["gamma_low"]), float(block["gamma_high"])
    quantified = not isinstance(cm, (Unquantifiable, Negligible))
    priors = _priors(cfg["cost"], cm) if quantified else None
    regime = classify_regime(cm, low, high, priors)
    report = {"cost_model": cost_model_to_config(cm), "thresholds": [low, high],
              "regime": regime.value}
    if quantified:
        report.update(priors=priors.probabilities, gamma=expected_unit_cost(cm, priors),
                      **{"lambda": lambda_from_cost(cm, priors)},
                      aggregation=aggregation_rule(cm))
    _emit(cfg, "regime", report)
    return 0


def cmd_lagrange(cfg, args):
    loss, penalty = _specs(cfg)
    d, _ = _dataset(cfg)
    block = cfg["lagrange"]
    if block.get("c") is None:
        raise ConfigError("lagrange-check needs lagrange.c (or --c)")
    c = float(block["c"])
    delta_c = float(block.get("delta_c", 1e-4))
    r = sensitivity_check(loss, penalty, c, delta_c, d, _solve_options(cfg))
    _emit(cfg, "lagrange-check", {
        "c": r.c, "delta_c": r.delta_c, "multiplier": r.multiplier,
        "finite_difference_slope": r.finite_difference_slope, "residual": r.residual,
        "loss_at_c": r.loss_at_c, "constraint_active": r.constraint_active,
    })
    return 0


COMMANDS = {"train": cmd_train, "tune": cmd_tune, "profit": cmd_profit,
            "contour": cmd_contour, "regime": cmd_regime, "lagrange-check": cmd_lagrange}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int)
    common.add_argument("--output-dir")
    common.add_argument("-v", "--verbose", action="store_true")

    model = _Parser(add_help=False)
    model.add_argument("--data")
    model.add_argument("--label")
    model.add_argument("--no-standardize", action="store_true")
    model.add_argument("--loss", choices=["squared", "logistic", "hinge"])
    model.add_argument("--intercept", action="store_true", default=None)
    model.add_argument("--penalty", choices=["l0", "l1", "l2", "elastic_net", "weighted_l2"])
    model.add_argument("--mix", type=float)
    model.add_argument("--weights", type=_floats)

    cost = _Parser(add_help=False)
    cost.add_argument("--form", choices=["scalar", "binary", "matrix",
                                         "unquantifiable", "negligible"])
    cost.add_argument("--gamma", type=float, help="scalar unit cost of an error")
    cost.add_argument("--gamma-fp", type=float)
    cost.add_argument("--gamma-fn", type=float)
    cost.add_argument("--priors", type=_floats)

    scenario = _Parser(add_help=False)
    for flag in ("--alpha", "--beta", "--theta", "--unit-fp-cost", "--price"):
        scenario.add_argument(flag, type=float)
    for flag in ("--n0", "--n1", "--n-total"):
        scenario.add_argument(flag, type=int)

    parser = _Parser(prog="costreg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", parents=[common, model, cost], help="fit one model")
    p.add_argument("--lambda", dest="lam", type=float)

    p = sub.add_parser("tune", parents=[common, model, cost], help="select lambda")
    p.add_argument("--method", choices=["grid", "random", "cost"])
    p.add_argument("--lambdas", type=_floats)
    p.add_argument("--folds", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--log-range", type=_floats)
    p.add_argument("--no-figure", action="store_true")

    sub.add_parser("profit", parents=[common, scenario], help="campaign profitability")

    p = sub.add_parser("contour", parents=[common, scenario], help="profit grid over beta and price")
    p.add_argument("--resolution", type=int)
    p.add_argument("--beta-range", type=_floats)
    p.add_argument("--price-range", type=_floats)
    p.add_argument("--no-figure", action="store_true")

    p = sub.add_parser("regime", parents=[common, cost], help="usefulness regime of a cost model")
    p.add_argument("--gamma-low", type=float)
    p.add_argument("--gamma-high", type=float)

    p = sub.add_parser("lagrange-check", parents=[common, model],
                       help="multiplier versus finite-difference sensitivity")
    p.add_argument("--c", type=float)
    p.add_argument("--delta-c", type=float)
    return parser


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _apply_flags(cfg, args):
    g = vars(args)
    override(cfg, None, seed=g.get("seed"), output_dir=g.get("output_dir"))
    override(cfg, "data", path=g.get("data"), label=g.get("label"))
    if g.get("no_standardize"):
        cfg["data"]["standardize"] = False
    override(cfg, "model", loss=g.get("loss"), intercept=g.get("intercept"),
             penalty=g.get("penalty"), mix=g.get("mix"), weights=g.get("weights"))
    if g.get("lam") is not None:
        cfg["model"]["lambda"] = g["lam"]
        cfg["cost"] = {}
    form = g.get("form") or ("scalar" if g.get("gamma") is not None else None)
    if form is not None or g.get("gamma_fp") is not None or g.get("gamma_fn") is not None:
        if form is not None and form != cfg["cost"].get("form"):
            cfg["cost"] = {"form": form, "currency": cfg["cost"].get("currency", "")}
        override(cfg, "cost", gamma=g.get("gamma"), gamma_fp=g.get("gamma_fp"),
                 gamma_fn=g.get("gamma_fn"))
        cfg["cost"].setdefault("form", "binary")
        cfg["model"].pop("lambda", None)
    override(cfg, "cost", priors=g.get("priors"))
    if not cfg["cost"].get("form"):
        cfg["cost"] = {}
    override(cfg, "scenario", alpha=g.get("alpha"), beta=g.get("beta"), theta=g.get("theta"),
             unit_fp_cost=g.get("unit_fp_cost"), price=g.get("price"), n0=g.get("n0"),
             n1=g.get("n1"), n_total=g.get("n_total"))
    if g.get("n0") is not None or g.get("n1") is not None:
        if g.get("n_total") is None:
            cfg["scenario"].pop("n_total", None)
    override(cfg, "tuning", method=g.get("method"), lambdas=g.get("lambdas"),
             folds=g.get("folds"), trials=g.get("trials"), log_range=g.get("log_range"))
    override(cfg, "contour", resolution=g.get("resolution"), beta_range=g.get("beta_range"),
             price_range=g.get("price_range"))
    override(cfg, "regime", gamma_low=g.get("gamma_low"), gamma_high=g.get("gamma_high"))
    override(cfg, "lagrange", c=g.get("c"), delta_c=g.get("delta_c"))
    for block in ("data", "model", "cost", "scenario", "tuning", "contour", "regime",
                  "lagrange", "solver"):
        cfg[block] = dict(sorted(cfg[block].items()))
    return cfg


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        cfg = _apply_flags(load_config(args.config), args)
        return COMMANDS[args.command](cfg, args)
    except NotConverged as exc:
        print(f"costreg: not converged: {exc}", file=sys.stderr)
        return exc.exit_code
    except CostregError as exc:
        print(f"costreg: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"costreg: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
