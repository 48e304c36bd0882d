"""Cost-aware regularization: penalized fitting where the regularization
strength is read off the unit cost of a false alarm (lam = 1 / gamma), plus
the campaign arithmetic that decides whether a model pays for itself."""

__version__ = "0.1.0"

from .cost import (BinaryCost, ClassPriors, MatrixCost, Negligible, Regime,
                   ScalarCost, Unquantifiable, classify_regime,
                   expected_total_cost, expected_unit_cost, lambda_from_cost,
                   optimal_threshold)
from .data import Dataset, load_csv, split_folds, standardize, unstandardize
from .lagrange import SensitivityReport, sensitivity_check
from .losses import LossSpec, eval_loss, grad_loss
from .penalties import PenaltySpec, eval_penalty, prox_penalty
from .solvers import (ConstrainedFit, Fit, SolveOptions, solve_constrained,
                      solve_cost_scaled, solve_penalized)
from .tuner import TuneResult, grid_search, random_search, recommend_lambda
from .usefulness import (CampaignScenario, ProfitGrid, ProfitReport,
                         break_even_price, contour_grid, is_ml_useful,
                         precision_condition, profit_with_ml,
                         profit_without_ml)
