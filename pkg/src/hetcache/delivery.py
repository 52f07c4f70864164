"""Self-backhauled delivery, combined success probability, cache-size
regimes, mean access rates and the average content-delivery delay."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .content import ContentConfig, hit_probability
from .exceptions import ConvergenceError, DivergentRateError, InfeasibleError
from .load import (
    K_CAP,
    CellLoadPmf,
    cell_load_pmf,
    conditional_scd,
    hit_upper_bound,
    kmax_cached,
    largest_load_meeting,
)
from .params import DeliverySpec, DeploymentConfig, RadioConfig
from .special import Tolerance, hyp2f1_access

_DEFAULT_TOL = Tolerance()

BACKHAUL_LIMITED = "backhaul_limited"  # cached load ceiling is the higher one
CACHE_LIMITED = "cache_limited"

_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-6, limit=200)
_CCDF_FLOOR = 1e-12


def lambda_backhaul(
    k: float,
    q_hit: float,
    t1: float,
    spec: DeliverySpec,
    radio: RadioConfig,
    tol: Tolerance = _DEFAULT_TOL,
) -> float:
    """Probability that a non-cached content reaches the UE within the
    remaining time budget after a backhaul phase of t1 seconds, given k
    UEs share the backhaul-side access band."""
    if k < 1:
        raise ValueError("k: cell load must be >= 1")
    if t1 < 0:
        raise ValueError("t1: must be >= 0")
    if t1 >= spec.deadline_s:
        raise InfeasibleError("backhaul time consumes the whole delivery deadline")
    budget = spec.deadline_s - t1
    exponent = k * spec.content_bits / (radio.backhaul_bandwidth_hz * budget)
    return conditional_scd(exponent, 1.0 - q_hit, radio.alpha_a, tol)


def kmax_backhaul(
    q_hit: float,
    t1: float,
    spec: DeliverySpec,
    radio: RadioConfig,
    tol: Tolerance = _DEFAULT_TOL,
    k_cap: int = K_CAP,
) -> int:
    """Maximum load still meeting the threshold for self-backhauled
    delivery; zero when the backhaul phase already exhausts the deadline."""
    if t1 >= spec.deadline_s:
        return 0
    if q_hit == 1.0 or spec.content_bits == 0.0:
        return k_cap
    return largest_load_meeting(
        lambda k: lambda_backhaul(k, q_hit, t1, spec, radio, tol),
        spec.scd_threshold,
        k_cap=k_cap,
    )


def hit_lower_bound(
    t1: float, spec: DeliverySpec, radio: RadioConfig, tol: Tolerance = _DEFAULT_TOL
) -> float:
    """Smallest hit probability at which a unit load remains deliverable
    over the self-backhaul route: [1 - Xi_b (1-eps)/eps]+."""
    if t1 >= spec.deadline_s:
        raise InfeasibleError("backhaul time consumes the whole delivery deadline")
    eps = spec.scd_threshold
    budget = spec.deadline_s - t1
    exponent = spec.content_bits / (radio.backhaul_bandwidth_hz * budget)
    if exponent == 0.0:
        return 0.0
    growth = 2.0 ** exponent
    chi = hyp2f1_access(radio.alpha_a, 1.0 - growth, tol)
    xi_b = 1.0 / ((2.0 * growth - 2.0) / (radio.alpha_a - 2.0) * chi)
    return max(1.0 - xi_b * (1.0 - eps) / eps, 0.0)


@dataclass(frozen=True)
class ScdReport:
    """Success probabilities of both delivery routes and their blend."""

    q_hit: float
    kmax_a: int
    kmax_b: int
    psi_a: float
    psi_b: float
    psi_total: float
    regime: str

    def __post_init__(self) -> None:
        lo = min(self.psi_a, self.psi_b) - 1e-12
        hi = max(self.psi_a, self.psi_b) + 1e-12
        if not lo <= self.psi_total <= hi:
            raise ValueError("psi_total: outside the [psi_a, psi_b] envelope")
        blend = self.q_hit * self.psi_a + (1.0 - self.q_hit) * self.psi_b
        if abs(self.psi_total - blend) > 1e-12:
            raise ValueError("psi_total: does not match the hit-weighted blend")


def piecewise_scd(
    q_hit: float, kmax_a: int, kmax_b: int, pmf: CellLoadPmf
) -> float:
    """Combined success probability in its piecewise form: full mass up to
    the smaller load ceiling, then only the surviving route's share."""
    probs = pmf.probabilities
    if kmax_a >= kmax_b:
        head = math.fsum(probs[: min(kmax_b, len(probs))])
        mid = math.fsum(probs[min(kmax_b, len(probs)) : min(kmax_a, len(probs))])
        return head + q_hit * mid
    head = math.fsum(probs[: min(kmax_a, len(probs))])
    mid = math.fsum(probs[min(kmax_a, len(probs)) : min(kmax_b, len(probs))])
    return head + (1.0 - q_hit) * mid


def scd_total(
    deploy: DeploymentConfig,
    radio: RadioConfig,
    spec: DeliverySpec,
    content: ContentConfig,
    t1: float,
    tol: Tolerance = _DEFAULT_TOL,
) -> ScdReport:
    """Blend the cached and self-backhauled success probabilities by the
    hit probability."""
    q_hit = hit_probability(content)
    kmax_a = kmax_cached(q_hit, spec, radio, tol)
    kmax_b = kmax_backhaul(q_hit, t1, spec, radio, tol)
    pmf = cell_load_pmf(deploy.load_ratio, deploy.gamma_load)
    psi_a = pmf.mass_up_to(kmax_a)
    psi_b = pmf.mass_up_to(kmax_b)
    psi_total = q_hit * psi_a + (1.0 - q_hit) * psi_b
    regime = BACKHAUL_LIMITED if kmax_a >= kmax_b else CACHE_LIMITED
    return ScdReport(
        q_hit=q_hit,
        kmax_a=kmax_a,
        kmax_b=kmax_b,
        psi_a=psi_a,
        psi_b=psi_b,
        psi_total=psi_total,
        regime=regime,
    )


@dataclass(frozen=True)
class CacheRegimeReport:
    """Cache-size interval over which the combined success probability
    grows with the cache, plus its value at the configured cache size."""

    regime: str
    l_min: int
    l_max: int
    psi_approx: float

    @property
    def feasible(self) -> bool:
        return self.l_min <= self.l_max


def cache_size_regime(
    content: ContentConfig,
    radio: RadioConfig,
    spec: DeliverySpec,
    deploy: DeploymentConfig,
    t1: float,
    tol: Tolerance = _DEFAULT_TOL,
) -> CacheRegimeReport:
    """Identify which route limits delivery for the configured spectrum
    split and backhaul time, and the top-L cache sizes that keep the
    combined success probability increasing.

    Uses the large-library approximation q_hit = (L/J)^(1-s), so the Zipf
    exponent must be below one.  Interval endpoints are rounded inward; an
    empty interval (l_min > l_max) flags an infeasible regime.
    """
    varsigma = content.zipf_exponent
    if varsigma >= 1.0:
        raise ValueError("zipf_exponent: regime analysis requires s < 1")
    if t1 >= spec.deadline_s:
        raise InfeasibleError("backhaul time consumes the whole delivery deadline")
    j = content.library_size
    inv = 1.0 / (1.0 - varsigma)
    q_hit = hit_probability(content)
    pmf = cell_load_pmf(deploy.load_ratio, deploy.gamma_load)
    backhaul_binding = (spec.deadline_s - t1) / spec.deadline_s <= radio.eta / (
        1.0 - radio.eta
    )
    if backhaul_binding:
        regime = BACKHAUL_LIMITED
        lo_real = j * hit_lower_bound(t1, spec, radio, tol) ** inv
        hi_real = j * 0.5 ** inv
        kmax = kmax_backhaul(q_hit, t1, spec, radio, tol)
    else:
        regime = CACHE_LIMITED
        lo_real = j * 0.5 ** inv
        hi_real = j * hit_upper_bound(spec, radio, tol) ** inv
        kmax = kmax_cached(q_hit, spec, radio, tol)
    l_min = max(0, math.ceil(lo_real - 1e-9))
    l_max = min(j, math.floor(hi_real + 1e-9))
    return CacheRegimeReport(
        regime=regime, l_min=l_min, l_max=l_max, psi_approx=pmf.mass_up_to(kmax)
    )


def avg_access_rate(
    k: int,
    q_eff: float,
    band_frac: float,
    radio: RadioConfig,
    tol: Tolerance = _DEFAULT_TOL,
) -> float:
    """Mean access rate (bits/s) at cell load k, integrating the rate CCDF.

    ``q_eff`` is the thinning weight of the co-band interferers (the hit
    probability for cached delivery, its complement for self-backhauled
    delivery) and ``band_frac`` the share of the system bandwidth carrying
    the band.  A zero weight makes the noise-free CCDF identically one and
    the mean rate unbounded, which is rejected.
    """
    if k < 1:
        raise ValueError("k: cell load must be >= 1")
    if q_eff == 0.0:
        raise DivergentRateError(
            "mean rate diverges without co-band interferers in the noise-free model"
        )
    if not 0.0 < q_eff <= 1.0:
        raise ValueError("q_eff: must be in (0,1]")
    if not 0.0 < band_frac < 1.0:
        raise ValueError("band_frac: must be in (0,1)")
    band = band_frac * radio.bandwidth_hz

    def ccdf(x: float) -> float:
        return conditional_scd(k * x / band, q_eff, radio.alpha_a, tol)

    x_hi = band / k
    for _ in range(200):
        if ccdf(x_hi) < _CCDF_FLOOR:
            break
        x_hi *= 2.0
    else:
        raise ConvergenceError("rate CCDF does not decay; truncation point not found")
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(ccdf, 0.0, x_hi, **_QUAD_OPTS)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"mean-rate quadrature failed: {exc}") from exc
    return value


def eta_balance(
    q_hit: float,
    k: int,
    radio: RadioConfig,
    tol: Tolerance = _DEFAULT_TOL,
    eta_tol: float = 1e-9,
) -> float:
    """Spectrum split equalising the cached and self-backhauled mean access
    rates.  The rate difference increases with the split, so bisection on
    (0,1) converges; both weights must be interior for either rate to be
    finite."""
    if not 0.0 < q_hit < 1.0:
        raise ValueError("q_hit: must be in (0,1)")

    def gap(eta: float) -> float:
        cached = avg_access_rate(k, q_hit, eta, radio, tol)
        backhauled = avg_access_rate(k, 1.0 - q_hit, 1.0 - eta, radio, tol)
        return cached - backhauled

    lo, hi = 1e-6, 1.0 - 1e-6
    if gap(lo) >= 0.0 or gap(hi) <= 0.0:
        raise InfeasibleError("rate difference does not change sign on (0,1)")
    while hi - lo > eta_tol:
        mid = 0.5 * (lo + hi)
        g = gap(mid)
        if g == 0.0:
            return mid
        if g < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class DelayReport:
    """Average delivery delay split into its cached and self-backhauled
    components, with the per-load mean rates that produced it."""

    kmax_used: int
    t1: float
    e_ra_per_k: np.ndarray
    e_rap_per_k: np.ndarray
    pmf_weights: np.ndarray = field(repr=False)
    delay: float = 0.0
    delay_cached: float = math.nan
    delay_backhaul: float = math.nan
    eta_o: float = math.nan
    theta: float = math.nan

    def __post_init__(self) -> None:
        if not self.delay > 0:
            raise ValueError("delay: must be > 0")
        for rates in (self.e_ra_per_k, self.e_rap_per_k):
            finite = rates[np.isfinite(rates)]
            if len(finite) > 1 and not np.all(np.diff(finite) < 0):
                raise ValueError("rate vectors must be strictly decreasing in k")


def avg_delay(
    deploy: DeploymentConfig,
    radio: RadioConfig,
    spec: DeliverySpec,
    content: ContentConfig,
    kmax_used: int,
    t1: float,
    tol: Tolerance = _DEFAULT_TOL,
    compute_balance: bool = True,
) -> DelayReport:
    """Average delay of a content request served by a typical small cell.

    The load PMF is renormalised over 1..kmax_used (loads above the
    admissible maximum are excluded by dimensioning), and each load
    contributes the hit-weighted blend of content volume over the mean
    cached rate and backhaul time plus content volume over the mean
    self-backhauled rate.
    """
    if kmax_used < 1:
        raise ValueError("kmax_used: must be >= 1")
    if t1 < 0:
        raise ValueError("t1: must be >= 0")
    q_hit = hit_probability(content)
    loads = np.arange(1, kmax_used + 1)
    pmf = cell_load_pmf(deploy.load_ratio, deploy.gamma_load)
    weights = pmf.probabilities[:kmax_used].copy()
    weights /= math.fsum(weights)

    e_ra = np.full(kmax_used, math.nan)
    e_rap = np.full(kmax_used, math.nan)
    if q_hit > 0.0:
        for i, k in enumerate(loads):
            e_ra[i] = avg_access_rate(int(k), q_hit, radio.eta, radio, tol)
    if q_hit < 1.0:
        for i, k in enumerate(loads):
            e_rap[i] = avg_access_rate(int(k), 1.0 - q_hit, 1.0 - radio.eta, radio, tol)

    q_bits = spec.content_bits
    delay_cached = (
        float(np.sum(weights * q_bits / e_ra)) if q_hit > 0.0 else math.nan
    )
    delay_backhaul = (
        float(np.sum(weights * (t1 + q_bits / e_rap))) if q_hit < 1.0 else math.nan
    )
    delay = 0.0
    if q_hit > 0.0:
        delay += q_hit * delay_cached
    if q_hit < 1.0:
        delay += (1.0 - q_hit) * delay_backhaul

    eta_o = math.nan
    theta = math.nan
    if compute_balance and 0.0 < q_hit < 1.0:
        eta_o = eta_balance(q_hit, 1, radio, tol)
        if e_rap[0] > e_ra[0]:
            theta = (
                e_ra[0]
                * e_rap[0]
                / ((e_rap[0] - e_ra[0]) * (1.0 - eta_o) * radio.bandwidth_hz)
            )
    return DelayReport(
        kmax_used=kmax_used,
        t1=t1,
        e_ra_per_k=e_ra,
        e_rap_per_k=e_rap,
        pmf_weights=weights,
        delay=delay,
        delay_cached=delay_cached,
        delay_backhaul=delay_backhaul,
        eta_o=eta_o,
        theta=theta,
    )
