"""Monte Carlo laboratory for Berry-Esseen bounds of self-normalised martingales."""

from .applications import (
    Ar1Path,
    ar1_second_moment,
    ar1_self_normalized,
    ar1_simulate,
    ls_estimator,
    student_t,
    t_identity_check,
)
from .bounds import BoundEvaluation, berry_esseen_core, fit_rate, ratio_series
from .distributions import BaseDistribution
from .empirics import (
    NnEstimate,
    dkw_band,
    estimate_Nn,
    kolmogorov_distance,
    moment_abs,
    std_normal_cdf,
)
from .errors import ConfigError, DegenerateError, ExperimentAborted, NumericError
from .harness import ExperimentConfig, emit_plot_data, parse_config, run_experiment
from .models import Family, ModelSpec, closed_form_moments, make_model
from .paths import MartingalePath, Statistic, replicate_statistic, self_normalized, simulate_path, variance_normalized
from .rng import Substream
from .sample import EmpiricalSample

__version__ = "0.1.0"
