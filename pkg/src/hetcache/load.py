"""Cached-content delivery analysis.

Covers the cell-load distribution of a typical small cell, the conditional
delivery probability at load k, the maximum load meeting a delivery
threshold, the hit-probability upper bound, and the minimum small-cell
density that keeps the overload probability below a target.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleError
from .params import DeliverySpec, RadioConfig, DeploymentConfig
from .special import Tolerance, hyp2f1_access

# Beyond this demand exponent the delivery probability is treated as zero.
OVERFLOW_EXPONENT = 1e4
# 2^x stays representable below ~1023; switch to log-space asymptotics earlier.
_LOGSPACE_EXPONENT = 600.0
# Search ceiling for maximum-load searches (the load PMF carries no mass
# remotely near this for any sane density ratio).
K_CAP = 10_000

_DEFAULT_TOL = Tolerance()


def load_pmf(ratio: float, k: int, gamma_load: float = 3.5) -> float:
    """P(k) for the number of UEs sharing a typical cell, k >= 1.

    P(k) = g^g/(k-1)! * Gamma(k+g)/Gamma(g) * r^(k-1) / (g+r)^(k+g)
    with r the UE-to-station density ratio; evaluated in log space.
    """
    if k < 1:
        raise ValueError("k: cell load must be >= 1")
    if ratio < 0:
        raise ValueError("ratio: must be >= 0")
    g = gamma_load
    if ratio == 0.0:
        return 1.0 if k == 1 else 0.0
    log_p = (
        g * math.log(g)
        - math.lgamma(k)
        + math.lgamma(k + g)
        - math.lgamma(g)
        + (k - 1) * math.log(ratio)
        - (k + g) * math.log(g + ratio)
    )
    return math.exp(log_p)


@dataclass(frozen=True)
class CellLoadPmf:
    """Truncated load PMF with the unaccounted tail mass made explicit."""

    ratio: float
    probabilities: np.ndarray  # index i holds P(k = i + 1)
    tail_mass: float

    def mass_up_to(self, kmax: int) -> float:
        """Sum of P(k) for k = 1..kmax (kmax beyond the truncation adds
        nothing but the truncation point is chosen so that is < 1e-15)."""
        if kmax <= 0:
            return 0.0
        return math.fsum(self.probabilities[: min(kmax, len(self.probabilities))])


def cell_load_pmf(
    ratio: float, gamma_load: float = 3.5, tail_eps: float = 1e-15
) -> CellLoadPmf:
    """Tabulate the load PMF out to max(10*ratio + 200, first k with
    P(k) < tail_eps)."""
    k_floor = int(10 * ratio + 200)
    probs = []
    k = 1
    while True:
        p = load_pmf(ratio, k, gamma_load)
        probs.append(p)
        if k >= k_floor and p < tail_eps:
            break
        k += 1
    arr = np.asarray(probs)
    tail = max(0.0, 1.0 - math.fsum(probs))
    return CellLoadPmf(ratio=ratio, probabilities=arr, tail_mass=tail)


def conditional_scd(
    exponent: float,
    weight: float,
    alpha_a: float,
    tol: Tolerance = _DEFAULT_TOL,
) -> float:
    """Conditional delivery probability for a demand exponent and an
    interferer-thinning weight:

        1 / (1 + w * (2^(e+1) - 2)/(alpha-2) * chi(1 - 2^e))

    with chi the hypergeometric factor.  Weight zero (no co-band
    interferers) gives exactly 1.  Exponents beyond the overflow guard
    saturate to zero with a warning; between the float ceiling and the
    guard a log-space asymptotic keeps the value positive and decreasing.
    """
    if not 0.0 <= weight <= 1.0:
        raise ValueError("weight: must be in [0,1]")
    if exponent < 0:
        raise ValueError("exponent: must be >= 0")
    if weight == 0.0 or exponent == 0.0:
        return 1.0
    if exponent > OVERFLOW_EXPONENT:
        warnings.warn(
            f"demand exponent {exponent:.3g} beyond overflow guard; "
            "delivery probability saturated to 0",
            RuntimeWarning,
            stacklevel=2,
        )
        return 0.0
    if exponent <= _LOGSPACE_EXPONENT:
        growth = 2.0 ** exponent
        chi = hyp2f1_access(alpha_a, 1.0 - growth, tol)
        return 1.0 / (1.0 + weight * (2.0 * growth - 2.0) / (alpha_a - 2.0) * chi)
    # asymptotic regime: chi(z) ~ c2*(-z)^(tau-1), -z ~ 2^e
    tau = 2.0 / alpha_a
    c2 = (1.0 - tau) * math.pi / math.sin(math.pi * tau)
    log_wa = (
        math.log(weight)
        + math.log(2.0 * c2 / (alpha_a - 2.0))
        + exponent * tau * math.log(2.0)
    )
    if log_wa > 36.0:
        return math.exp(-log_wa) if log_wa < 745.0 else 0.0
    return 1.0 / (1.0 + math.exp(log_wa))


def lambda_cached(
    k: float,
    q_hit: float,
    spec: DeliverySpec,
    radio: RadioConfig,
    tol: Tolerance = _DEFAULT_TOL,
) -> float:
    """Probability that a cached content is delivered within the deadline
    when k UEs share the access band."""
    if k < 1:
        raise ValueError("k: cell load must be >= 1")
    exponent = k * spec.content_bits / (radio.access_bandwidth_hz * spec.deadline_s)
    return conditional_scd(exponent, q_hit, radio.alpha_a, tol)


def largest_load_meeting(
    lam, eps: float, k_start_hi: float = 32.0, k_cap: int = K_CAP
) -> int:
    """Largest integer k with lam(k) >= eps for lam strictly decreasing.

    Bisection on the continuous relaxation followed by flooring; the floor
    is then verified (and nudged) so the returned k always satisfies
    lam(k) >= eps > lam(k+1).  Returns 0 when even k = 1 fails, and k_cap
    (with a warning) when the constraint never binds.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps: must be in (0,1)")
    if lam(1.0) < eps:
        return 0
    k_hi = k_start_hi
    for _ in range(4):  # initial bracket plus up to 3 widenings
        if lam(k_hi) < eps or k_hi >= k_cap:
            break
        k_hi = min(k_hi * 10.0, float(k_cap))
    if lam(k_hi) >= eps:
        if k_hi >= k_cap:
            warnings.warn(
                f"maximum load exceeds the search cap {k_cap}; returning the cap",
                RuntimeWarning,
                stacklevel=2,
            )
            return k_cap
    k_lo = 1.0
    while k_hi - k_lo > 1e-6:
        mid = 0.5 * (k_lo + k_hi)
        if lam(mid) >= eps:
            k_lo = mid
        else:
            k_hi = mid
    k = int(math.floor(k_lo))
    while k > 1 and lam(float(k)) < eps:
        k -= 1
    while k < k_cap and lam(float(k + 1)) >= eps:
        k += 1
    return k


def kmax_cached(
    q_hit: float,
    spec: DeliverySpec,
    radio: RadioConfig,
    tol: Tolerance = _DEFAULT_TOL,
    k_cap: int = K_CAP,
) -> int:
    """Maximum small-cell load for which cached delivery still meets the
    threshold.  With no demand or no co-band interferers the load is
    unbounded and the search cap is returned."""
    if q_hit == 0.0 or spec.content_bits == 0.0:
        return k_cap
    return largest_load_meeting(
        lambda k: lambda_cached(k, q_hit, spec, radio, tol),
        spec.scd_threshold,
        k_cap=k_cap,
    )


def scd_cached(
    q_hit: float,
    deploy: DeploymentConfig,
    spec: DeliverySpec,
    radio: RadioConfig,
    tol: Tolerance = _DEFAULT_TOL,
) -> float:
    """Cached-delivery success probability: load-PMF mass up to the
    maximum admissible load."""
    kmax = kmax_cached(q_hit, spec, radio, tol)
    if kmax == 0:
        return 0.0
    pmf = cell_load_pmf(deploy.load_ratio, deploy.gamma_load)
    return pmf.mass_up_to(kmax)


def hit_upper_bound(
    spec: DeliverySpec, radio: RadioConfig, tol: Tolerance = _DEFAULT_TOL
) -> float:
    """Largest hit probability at which a unit load remains deliverable:
    min(Xi_a * (1-eps)/eps, 1)."""
    eps = spec.scd_threshold
    exponent = spec.content_bits / (radio.access_bandwidth_hz * spec.deadline_s)
    if exponent == 0.0:
        return 1.0
    growth = 2.0 ** exponent
    chi = hyp2f1_access(radio.alpha_a, 1.0 - growth, tol)
    xi_a = 1.0 / ((2.0 * growth - 2.0) / (radio.alpha_a - 2.0) * chi)
    return min(xi_a * (1.0 - eps) / eps, 1.0)


def _bisect_increasing(f, lo: float, hi: float, xtol: float = 1e-13) -> float:
    """Root of an increasing f with f(lo) < 0 <= f(hi)."""
    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo >= 0.0 or f_hi < 0.0:
        raise InfeasibleError("root is not bracketed")
    while hi - lo > xtol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def min_load_ratio(kmax: int, rho: float, gamma_load: float = 3.5) -> float:
    """Largest admissible density ratio keeping P(k) <= rho for every
    k > kmax.

    Returns kmax + 1 when the PMF at ratio kmax+1 already satisfies the
    bound; otherwise the ratio mu in (0, kmax*g/(g+1)] solving
    P_mu(kmax+1) = rho, found by monotone bisection (the PMF at fixed
    k = kmax+1 increases with the ratio on that interval).
    """
    if kmax < 1:
        raise ValueError("kmax: must be >= 1")
    if not 0.0 < rho < 1.0:
        raise ValueError("rho: must be in (0,1)")
    k_edge = kmax + 1
    if load_pmf(float(k_edge), k_edge, gamma_load) <= rho:
        return float(k_edge)
    mu_hi = kmax * gamma_load / (gamma_load + 1.0)
    f = lambda mu: load_pmf(mu, k_edge, gamma_load) - rho
    if f(mu_hi) < 0.0:
        raise InfeasibleError(
            f"overload target rho={rho} is below the PMF peak on the admissible interval"
        )
    return _bisect_increasing(f, 1e-12, mu_hi)


def min_sbs_density(
    lambda_u: float, kmax: int, rho: float, gamma_load: float = 3.5
) -> float:
    """Minimum small-cell density so that the probability of any load
    above kmax stays below rho."""
    if lambda_u <= 0:
        raise ValueError("lambda_u: must be > 0")
    return lambda_u / min_load_ratio(kmax, rho, gamma_load)
