"""Expected-utility model of a two-player asymmetric conflict."""

from .incentives import (
    IncentiveSpec,
    NoiseSpec,
    PdfSpec,
    ShiftSpec,
    ValidationReport,
    eval_incentive,
    eval_incentive_derivative,
    eval_pdf,
    eval_shift,
    validate_incentive,
    validate_shift,
)
from .integrate import IntegratorConfig, expect_noisy_incentive, expect_shift, mc_cross_check
from .model import (
    Capabilities,
    Scenario,
    ScenarioError,
    SolverSettings,
    StrategyProfile,
    UtilityBounds,
    eval_cn_incomplete,
    eval_cn_perfect,
    eval_general_cn,
    eval_general_us,
    eval_us_incomplete,
    eval_us_perfect,
    win_probabilities,
)
from .scenario_io import dump_scenario, emit_report, emit_series, load_scenario, load_scenario_file
from .solver import best_response, check_sign_conditions, gradient_check, solve_extrema, sweep, verify_propositions

__version__ = "0.1.0"
