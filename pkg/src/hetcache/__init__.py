"""Delivery analysis and Monte Carlo validation for cache-enabled dense
cellular networks with massive-MIMO self-backhaul."""

from .backhaul import (
    BackhaulRateReport,
    backhaul_rate_exact,
    backhaul_rate_lower,
    backhaul_rate_report,
    backhaul_time,
    delta1_bar,
    delta2_bar,
    max_backhaul_load,
    min_antennas_for_delay_parity,
    min_mbs_density,
)
from .content import (
    ContentConfig,
    hit_probability,
    mpc_hit_approx,
    sample_cache_realization,
    zipf_popularity,
)
from .delivery import (
    CacheRegimeReport,
    DelayReport,
    ScdReport,
    avg_access_rate,
    avg_delay,
    cache_size_regime,
    eta_balance,
    hit_lower_bound,
    kmax_backhaul,
    lambda_backhaul,
    piecewise_scd,
    scd_total,
)
from .exceptions import ConvergenceError, DivergentRateError, InfeasibleError
from .load import (
    CellLoadPmf,
    cell_load_pmf,
    hit_upper_bound,
    kmax_cached,
    lambda_cached,
    load_pmf,
    min_load_ratio,
    min_sbs_density,
    scd_cached,
)
from .montecarlo import (
    SimEstimate,
    SimulationSpec,
    simulate_access_ccdf,
    simulate_access_ccdf_multi,
    simulate_backhaul_rate,
    simulate_cell_load,
    simulate_delay,
    simulate_delay_weighted,
)
from .params import DeliverySpec, DeploymentConfig, RadioConfig
from .special import Tolerance, array_gain_sq, exp_integral_ei, hyp2f1_access

__version__ = "0.1.0"

__all__ = [
    "BackhaulRateReport",
    "CacheRegimeReport",
    "CellLoadPmf",
    "ContentConfig",
    "ConvergenceError",
    "DelayReport",
    "DeliverySpec",
    "DeploymentConfig",
    "DivergentRateError",
    "InfeasibleError",
    "RadioConfig",
    "ScdReport",
    "SimEstimate",
    "SimulationSpec",
    "Tolerance",
    "array_gain_sq",
    "avg_access_rate",
    "avg_delay",
    "backhaul_rate_exact",
    "backhaul_rate_lower",
    "backhaul_rate_report",
    "backhaul_time",
    "cache_size_regime",
    "cell_load_pmf",
    "delta1_bar",
    "delta2_bar",
    "eta_balance",
    "exp_integral_ei",
    "hit_lower_bound",
    "hit_probability",
    "hit_upper_bound",
    "hyp2f1_access",
    "kmax_backhaul",
    "kmax_cached",
    "lambda_backhaul",
    "lambda_cached",
    "load_pmf",
    "max_backhaul_load",
    "min_antennas_for_delay_parity",
    "min_load_ratio",
    "min_mbs_density",
    "min_sbs_density",
    "mpc_hit_approx",
    "piecewise_scd",
    "sample_cache_realization",
    "scd_cached",
    "scd_total",
    "simulate_access_ccdf",
    "simulate_access_ccdf_multi",
    "simulate_backhaul_rate",
    "simulate_cell_load",
    "simulate_delay",
    "simulate_delay_weighted",
    "zipf_popularity",
]
