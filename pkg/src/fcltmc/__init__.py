"""Monte Carlo couplings and Wasserstein-1 rate brackets for rescaled
stationary Gaussian partial sums and integrals converging to Brownian
motion."""

from .couplings import (
    CoupledPair,
    JointStepLaw,
    Kappa,
    build_ar1_pair,
    build_ct_pair,
    build_dt0_pair,
    wkappa_by_quadrature,
)
from .errors import AssertionFailure, ConfigurationError
from .experiments import (
    ConstantEstimate,
    SweepConfig,
    SweepRow,
    SweepTable,
    dt_sup_asymptotic,
    estimate_lower_rate_constant,
    estimate_scaled_max_limit,
    estimate_upper_rate_constant,
    ou_unit_max_stats,
    sweep_rate,
)
from .gaussian_paths import (
    Ar1Params,
    Path,
    TimeGrid,
    ou_via_time_change,
    sample_ar1,
    sample_bm,
    sample_bridge,
    sample_ou_stationary,
)
from .metrics import (
    MCEstimate,
    WeightedNormConfig,
    l1_diff,
    marginal_w1,
    mc_mean,
    mc_mean_vec,
    sup_norm,
    w1_lower_ct,
    w1_upper,
    weighted_norm,
)
from .oracles import (
    OracleValue,
    borell_tis_tail,
    closed_moment,
    l1_rate,
    max_tail,
    norm_cdf,
    rate_envelope,
    var_wkappa_ct,
)
from .rng import RngStreamSpec
from .sde import DriftSpec, psi_alpha, solve_combined, solve_drift, weak_error_sweep

__version__ = "0.1.0"
