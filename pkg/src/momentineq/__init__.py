"""Minimax tests and confidence intervals for Gaussian moment inequalities."""
__version__ = "0.1.0"

from .bounds import BoundReport, SweepRow, asymptotic_sweep, np_statistic, upper_bound_power
from .ci import (
    LossSpec,
    RiskReport,
    UpperCI,
    ci_risk,
    coverage,
    duality_check,
    invert_test,
    least_favorable_mu,
    loss_integral_check,
)
from .critical import (
    CriticalValue,
    CriticalValueCache,
    critical_value,
    critical_value_max,
    critical_value_mc,
)
from .kernels import BACKEND
from .model import ModelParams, RawSample, aggregate, in_null, sample_z, theta_bar
from .montecarlo import SimConfig
from .normal import DomainError, StreamSeed, sample_gaussian_vector, std_normal_cdf, std_normal_quantile
from .power import (
    PowerReport,
    TestSpec,
    make_test,
    minimax_power_exact,
    minimax_power_lp_alt,
    power_at,
    reject,
)
from .stats import norm_order, one_sided_norm_neg, one_sided_norm_pos, s_p
from .treatment import (
    TreatmentModel,
    compare_tests_welfare,
    minimax_power_welfare,
    treatment_reject,
    welfare_gain,
)
