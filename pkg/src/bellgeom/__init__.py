"""Local hidden-variable models for two-outcome random games.

Correlation functions in the admissible class, the chart-change law that
realises them with a shared hidden configuration, Monte Carlo and
closed-form statistics of the game, and numerical extremisation of the
CHSH functional.
"""

from ._backend import available as available_backends
from ._backend import default_backend
from .bell_game import (
    JointDistribution,
    RoundRecord,
    SimulationSummary,
    closed_form_distribution,
    reconstruct_correlation,
    run_round,
    simulate,
)
from .chsh_bound import (
    ChshQuery,
    ChshResult,
    chsh_value,
    generalized_bound,
    optimize_chsh,
    small_angle_dominance,
    stationarity_residual,
    verify_bound,
)
from .correlation_family import (
    CorrelationFamily,
    ValidationReport,
    canonicalize,
    chi,
    derivative,
    evaluate,
    make_family,
    validate,
)
from .hidden_model import ModelContext, density, q_sign, response, sample_lambda, transform

__version__ = "0.1.0"
