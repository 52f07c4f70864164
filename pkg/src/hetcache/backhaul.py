"""Massive-MIMO wireless backhaul: achievable rate, load and dimensioning.

The macro station serves S_o small cells by zero-forcing with equal power
split.  Conditioned on the serving distance y (truncated-Rayleigh law, the
nearest macro beyond the minimum separation r_b), the mean-field SINR uses

    Xi_1(y) = L(y) * (Gamma(N-S_o+3/2)/Gamma(N-S_o+1))^2   beamforming gain
    Xi_2(y) = (N-S_o+1) L(y) - Xi_1(y)                      gain dispersion
    Xi_3(y) = P_b 2 pi lam_M beta y^(2-a_b)/(a_b-2)         mean interference

and the rate integrates log2(1 + .) over the distance law.  A closed-form
lower bound replaces the distance average by geometric means (Jensen),
with the beamforming gain reduced to N - S_o + 1/2 via Stirling.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .exceptions import ConvergenceError, InfeasibleError
from .params import DeploymentConfig, RadioConfig
from .special import array_gain_sq, exp_integral_ei

# Stirling-based lower bound degrades when too few antenna degrees of
# freedom remain after serving S_o cells.
MIN_ANTENNA_GAP = 8

_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-6, limit=200)


def _expect_over_distance(fn, lambda_m: float, r_b: float) -> float:
    """E[fn(y)] under the truncated-Rayleigh nearest-macro law, via the
    substitution s = pi lam (y^2 - r_b^2) that leaves an exp(-s) weight."""
    a = math.pi * lambda_m
    u_b = a * r_b * r_b

    def integrand(s: float) -> float:
        y = math.sqrt((s + u_b) / a)
        return fn(y) * math.exp(-s)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(integrand, 0.0, math.inf, **_QUAD_OPTS)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"distance-average quadrature failed: {exc}") from exc
    return value


def mean_interference(y: float, radio: RadioConfig, lambda_m: float) -> float:
    """Campbell mean of the co-channel macro interference beyond radius y."""
    return (
        radio.p_b_watt
        * 2.0
        * math.pi
        * lambda_m
        * radio.beta
        * y ** (2.0 - radio.alpha_b)
        / (radio.alpha_b - 2.0)
    )


def _spectral_efficiency(y: float, radio: RadioConfig, deploy: DeploymentConfig, s_o: int) -> float:
    gain = array_gain_sq(deploy.antennas - s_o)
    pathloss = radio.pathloss(y, radio.alpha_b)
    p_share = radio.p_b_watt / s_o
    signal = p_share * gain * pathloss
    dispersion = p_share * ((deploy.antennas - s_o + 1) - gain) * pathloss
    interference = mean_interference(y, radio, deploy.lambda_m)
    return math.log2(1.0 + signal / (dispersion + interference + radio.sigma_b_sq))


def backhaul_rate_exact(radio: RadioConfig, deploy: DeploymentConfig, s_o: int) -> float:
    """Mean achievable backhaul rate (bits/s) at macro load s_o."""
    _check_load(s_o, deploy.antennas)
    se = _expect_over_distance(
        lambda y: _spectral_efficiency(y, radio, deploy, s_o), deploy.lambda_m, radio.r_b_m
    )
    return radio.backhaul_bandwidth_hz * se


def delta1_bar(radio: RadioConfig, deploy: DeploymentConfig) -> float:
    """Distance part of the mean log pathloss: E[ln L(y)] - ln beta.

    Closed form -a_b * e^(u_b) * (-Ei(-u_b)/2 + e^(-u_b) ln r_b) with
    u_b = pi lam_M r_b^2.
    """
    u_b = math.pi * deploy.lambda_m * radio.r_b_m ** 2
    return -radio.alpha_b * math.exp(u_b) * (
        -exp_integral_ei(-u_b) / 2.0 + math.exp(-u_b) * math.log(radio.r_b_m)
    )


def delta2_bar(
    radio: RadioConfig,
    deploy: DeploymentConfig,
    s_o: int,
    backhaul_bandwidth_hz: float | None = None,
    strict_paper: bool = False,
) -> float:
    """Mean log of the residual denominator (gain dispersion at its large-N
    limit L(y)/2, mean interference, noise).

    ``strict_paper`` reproduces a printed variant whose first term uses the
    minimum-separation constant as the pathloss exponent; dimensional
    analysis says the exponent is a_b, which is the default.
    """
    _check_load(s_o, deploy.antennas)
    from .params import noise_power_watt

    sigma_sq = (
        radio.sigma_b_sq
        if backhaul_bandwidth_hz is None
        else noise_power_watt(backhaul_bandwidth_hz)
    )
    exponent = radio.r_b_m if strict_paper else radio.alpha_b
    p_b = radio.p_b_watt
    beta = radio.beta

    def log_denominator(y: float) -> float:
        dispersion = p_b * beta / (2.0 * s_o) * y ** -exponent
        return math.log(dispersion + mean_interference(y, radio, deploy.lambda_m) + sigma_sq)

    return _expect_over_distance(log_denominator, deploy.lambda_m, radio.r_b_m)


def backhaul_rate_lower(
    radio: RadioConfig,
    deploy: DeploymentConfig,
    s_o: int,
    min_n_gap: int = MIN_ANTENNA_GAP,
    strict_paper_delta2: bool = False,
) -> float:
    """Closed-form lower bound on the backhaul rate (bits/s), tight for
    large antenna counts."""
    _check_load(s_o, deploy.antennas)
    if deploy.antennas - s_o < min_n_gap:
        warnings.warn(
            f"N - s_o = {deploy.antennas - s_o} is below the asymptotic "
            f"validity floor {min_n_gap}; the bound may be loose",
            RuntimeWarning,
            stacklevel=2,
        )
    d1 = delta1_bar(radio, deploy)
    d2 = delta2_bar(radio, deploy, s_o, strict_paper=strict_paper_delta2)
    sinr = (
        radio.p_b_watt
        * radio.beta
        * (deploy.antennas - s_o + 0.5)
        / s_o
        * math.exp(d1 - d2)
    )
    return radio.backhaul_bandwidth_hz * math.log2(1.0 + sinr)


def backhaul_time(content_bits: float, rate: float) -> float:
    """Seconds needed to push the content over the backhaul."""
    if rate <= 0:
        raise ValueError("rate: must be > 0")
    if content_bits < 0:
        raise ValueError("content_bits: must be >= 0")
    return content_bits / rate


def max_backhaul_load(radio: RadioConfig, deploy: DeploymentConfig, r_min: float) -> int:
    """Largest macro load S keeping the mean backhaul rate above r_min.

    The rate decreases with the load, so a monotone integer search over
    [1, N-1] suffices.
    """
    if r_min <= 0:
        raise ValueError("r_min: must be > 0")
    if backhaul_rate_exact(radio, deploy, 1) < r_min:
        raise InfeasibleError("minimum backhaul rate unattainable even at load 1")
    lo, hi = 1, deploy.antennas - 1
    if backhaul_rate_exact(radio, deploy, hi) >= r_min:
        return hi
    # invariant: rate(lo) >= r_min > rate(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if backhaul_rate_exact(radio, deploy, mid) >= r_min:
            lo = mid
        else:
            hi = mid
    return lo


def min_mbs_density(
    lambda_s: float,
    q_hit: float,
    s_max: int,
    rho: float,
    gamma_load: float = 3.5,
) -> float:
    """Minimum macro density keeping the probability of backhaul loads
    above s_max below rho.  Mirrors the small-cell rule with the backhaul
    demand density lambda_s * (1 - q_hit)."""
    if lambda_s <= 0:
        raise ValueError("lambda_s: must be > 0")
    if not 0.0 <= q_hit <= 1.0:
        raise ValueError("q_hit: must be in [0,1]")
    demand = lambda_s * (1.0 - q_hit)
    if demand == 0.0:
        return 0.0
    from .load import min_load_ratio

    return demand / min_load_ratio(s_max, rho, gamma_load)


def min_antennas_for_delay_parity(
    radio: RadioConfig,
    deploy: DeploymentConfig,
    s_o: int,
    e_ra: float,
    e_rap: float,
    eta_o: float,
) -> int:
    """Smallest antenna count letting self-backhauled delivery match the
    cached-delivery delay.

    ``e_ra`` and ``e_rap`` are the mean access rates of cached and
    self-backhauled delivery at the operating spectrum split, and eta_o is
    the split equalising them; parity needs e_rap > e_ra.  The closed form
    needs no re-evaluation per candidate N because the distance-average
    terms are antenna-free.
    """
    if not e_rap > e_ra > 0.0:
        raise ValueError("rates: need e_rap > e_ra > 0 for delay parity")
    if not 0.0 < eta_o < 1.0:
        raise ValueError("eta_o: must be in (0,1)")
    if s_o < 1:
        raise ValueError("s_o: must be >= 1")
    theta = e_ra * e_rap / ((e_rap - e_ra) * (1.0 - eta_o) * radio.bandwidth_hz)
    d1 = delta1_bar(radio, deploy)
    d2 = delta2_bar(
        radio, deploy, s_o, backhaul_bandwidth_hz=(1.0 - eta_o) * radio.bandwidth_hz
    )
    try:
        growth = 2.0 ** theta
    except OverflowError as exc:
        raise InfeasibleError(
            "required backhaul spectral efficiency overflows; rates are too close"
        ) from exc
    n_real = ((growth - 1.0) / (radio.p_b_watt * radio.beta * math.exp(d1 - d2)) + 1.0) * s_o - 0.5
    if not math.isfinite(n_real):
        raise InfeasibleError("no finite antenna count achieves delay parity")
    return math.ceil(n_real)


@dataclass(frozen=True)
class BackhaulRateReport:
    """Exact and lower-bound rates plus the backhaul time at a load."""

    s_o: int
    n: int
    rate_exact: float
    rate_lower: float
    t1: float
    delta1_bar: float
    delta2_bar: float

    def __post_init__(self) -> None:
        if not 1 <= self.s_o < self.n:
            raise ValueError("s_o: must satisfy 1 <= s_o < n")
        if self.t1 <= 0:
            raise ValueError("t1: must be > 0")
        if self.rate_lower > self.rate_exact * (1.0 + 1e-6):
            raise ValueError("rate_lower: exceeds the exact rate beyond tolerance")


def backhaul_rate_report(
    radio: RadioConfig,
    deploy: DeploymentConfig,
    s_o: int,
    content_bits: float,
    use_lower_bound_time: bool = False,
) -> BackhaulRateReport:
    """Assemble the rate pair and the delivery time for ``content_bits``."""
    exact = backhaul_rate_exact(radio, deploy, s_o)
    lower = backhaul_rate_lower(radio, deploy, s_o)
    t1 = backhaul_time(content_bits, lower if use_lower_bound_time else exact)
    return BackhaulRateReport(
        s_o=s_o,
        n=deploy.antennas,
        rate_exact=exact,
        rate_lower=lower,
        t1=t1,
        delta1_bar=delta1_bar(radio, deploy),
        delta2_bar=delta2_bar(radio, deploy, s_o),
    )


def _check_load(s_o: int, antennas: int) -> None:
    if not 1 <= s_o < antennas:
        raise ValueError("s_o: backhaul load must satisfy 1 <= s_o < N")
