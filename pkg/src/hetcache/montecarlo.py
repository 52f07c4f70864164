"""Monte Carlo oracle for the analytical results.

Stationary point processes are simulated around a typical receiver at the
origin (Slivnyak conditioning).  Interference from beyond the simulation
window is not discarded: its Campbell mean is added as a deterministic
far-field term, so window truncation cannot bias means at the tolerances
the cross-checks use.  Every trial derives its own counter-based random
stream from (seed, trial index, substream role), which makes all outputs
bit-identical for a fixed seed regardless of how trials are distributed
over workers.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.spatial import cKDTree

from .content import ContentConfig, hit_probability
from .exceptions import ConvergenceError
from .params import DeliverySpec, DeploymentConfig, RadioConfig, noise_power_watt

# substream roles
_ROLE_ACCESS = 0
_ROLE_BACKHAUL = 1
_ROLE_ACCESS_PRIME = 2
_ROLE_BRANCH = 3

_MAX_WINDOW_M = 20_000.0


@dataclass(frozen=True)
class SimulationSpec:
    """Monte Carlo controls.  ``window_radius_m`` of None selects the
    default 20/sqrt(min density) capped at 20 km."""

    trials: int = 100_000
    seed: int = 0
    window_radius_m: float | None = None
    include_noise: bool = True

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials: must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed: must be a 64-bit unsigned integer")
        if self.window_radius_m is not None and self.window_radius_m <= 0:
            raise ValueError("window_radius_m: must be > 0")


@dataclass(frozen=True)
class SimEstimate:
    """Sample mean with a 95% confidence half-width."""

    mean: float
    ci_half_width_95: float
    trials_used: int

    def __post_init__(self) -> None:
        if self.ci_half_width_95 < 0:
            raise ValueError("ci_half_width_95: must be >= 0")


def _trial_rng(seed: int, trial: int, role: int) -> np.random.Generator:
    # Philox is a counter-based generator: distinct keys give independent
    # streams, so (seed, trial, role) can be packed straight into the key.
    key = (int(seed) << 64) | (int(trial) << 2) | int(role)
    return np.random.Generator(np.random.Philox(key=key))


def resolve_window(sim: SimulationSpec, *densities: float) -> float:
    """Window radius for the processes a simulation draws; raises when an
    explicit window is too small to contain the typical-cell geometry."""
    min_density = min(densities)
    if sim.window_radius_m is None:
        return min(20.0 / math.sqrt(min_density), _MAX_WINDOW_M)
    floor = 4.0 / math.sqrt(min_density)  # 8x the mean nearest-neighbor spacing
    if sim.window_radius_m < floor:
        raise ValueError(
            f"window_radius_m: {sim.window_radius_m:.3g} m is below the "
            f"setup floor {floor:.3g} m for density {min_density:.3g}"
        )
    return sim.window_radius_m


def _estimate(samples: np.ndarray) -> SimEstimate:
    n = len(samples)
    mean = float(np.mean(samples))
    if n > 1:
        half = 1.96 * float(np.std(samples, ddof=1)) / math.sqrt(n)
    else:
        half = 0.0
    return SimEstimate(mean=mean, ci_half_width_95=half, trials_used=n)


def _chunks(trials: int, workers: int) -> list[tuple[int, int]]:
    step = math.ceil(trials / max(workers, 1))
    return [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]


def _map_chunks(worker, trials: int, workers: int) -> np.ndarray:
    bounds = _chunks(trials, workers)
    if workers <= 1:
        parts = [worker(b) for b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(worker, bounds))
    # concatenation in chunk order keeps the reduction deterministic
    return np.concatenate(parts) if len(parts) > 1 else parts[0]


# --- access link -----------------------------------------------------------

def _access_se_one(
    rng: np.random.Generator,
    p_tx: float,
    beta: float,
    alpha: float,
    lam_full: float,
    thinning: float,
    sigma_sq: float,
    window: float,
) -> float:
    """One draw of log2(1 + SINR) for a typical receiver served by the
    nearest station of the full process, with interferers thinned."""
    win_sq = window * window
    n = rng.poisson(lam_full * math.pi * win_sq)
    if n == 0:
        return 0.0
    d_sq = rng.uniform(0.0, win_sq, n)  # squared radii are uniform on a disc
    serving = int(np.argmin(d_sq))
    h0 = rng.exponential()
    other = np.delete(d_sq, serving)
    active = rng.random(n - 1) < thinning
    fades = rng.exponential(size=n - 1)
    interference = p_tx * beta * float(
        np.sum(fades[active] * other[active] ** (-alpha / 2.0))
    )
    # Campbell mean of the field beyond the window
    interference += (
        p_tx * beta * 2.0 * math.pi * lam_full * thinning
        * window ** (2.0 - alpha) / (alpha - 2.0)
    )
    signal = p_tx * h0 * beta * d_sq[serving] ** (-alpha / 2.0)
    denom = interference + sigma_sq
    if denom == 0.0:
        return math.inf
    return math.log2(1.0 + signal / denom)


def _access_chunk(params: tuple, bounds: tuple[int, int]) -> np.ndarray:
    seed, role, p_tx, beta, alpha, lam_full, thinning, sigma_sq, window = params
    lo, hi = bounds
    out = np.empty(hi - lo)
    for i, trial in enumerate(range(lo, hi)):
        rng = _trial_rng(seed, trial, role)
        out[i] = _access_se_one(
            rng, p_tx, beta, alpha, lam_full, thinning, sigma_sq, window
        )
    return out


def _access_se_samples(
    radio: RadioConfig,
    deploy: DeploymentConfig,
    thinning: float,
    band_hz: float,
    sim: SimulationSpec,
    role: int,
    workers: int,
) -> np.ndarray:
    window = resolve_window(sim, deploy.lambda_s)
    sigma_sq = noise_power_watt(band_hz) if sim.include_noise else 0.0
    params = (
        sim.seed,
        role,
        radio.p_a_watt,
        radio.beta,
        radio.alpha_a,
        deploy.lambda_s,
        thinning,
        sigma_sq,
        window,
    )
    return _map_chunks(partial(_access_chunk, params), sim.trials, workers)


def simulate_access_ccdf(
    radio: RadioConfig,
    deploy: DeploymentConfig,
    content: ContentConfig,
    k: int,
    rate_threshold: float,
    sim: SimulationSpec,
    workers: int = 1,
) -> SimEstimate:
    """Probability that the cached-delivery access rate at cell load k
    clears the threshold."""
    return simulate_access_ccdf_multi(
        radio, deploy, content, (k,), rate_threshold, sim, workers
    )[0]


def simulate_access_ccdf_multi(
    radio: RadioConfig,
    deploy: DeploymentConfig,
    content: ContentConfig,
    ks,
    rate_threshold: float,
    sim: SimulationSpec,
    workers: int = 1,
) -> list[SimEstimate]:
    """CCDF estimates for several cell loads from one set of channel draws
    (the SINR does not depend on the load, only the per-UE bandwidth share
    does)."""
    if any(k < 1 for k in ks):
        raise ValueError("k: cell load must be >= 1")
    q_hit = hit_probability(content)
    band = radio.access_bandwidth_hz
    se = _access_se_samples(radio, deploy, q_hit, band, sim, _ROLE_ACCESS, workers)
    return [
        _estimate(((band / k) * se >= rate_threshold).astype(float)) for k in ks
    ]


# --- cell load -------------------------------------------------------------

def _cell_load_chunk(params: tuple, bounds: tuple[int, int]) -> np.ndarray:
    seed, lam_u, lam_s, window = params
    lo, hi = bounds
    out = np.empty(hi - lo, dtype=np.int64)
    win_sq = window * window
    area = math.pi * win_sq
    for i, trial in enumerate(range(lo, hi)):
        rng = _trial_rng(seed, trial, _ROLE_ACCESS)
        n_s = rng.poisson(lam_s * area)
        if n_s == 0:
            out[i] = 1
            continue
        r_s = np.sqrt(rng.uniform(0.0, win_sq, n_s))
        th_s = rng.uniform(0.0, 2.0 * math.pi, n_s)
        stations = np.column_stack((r_s * np.cos(th_s), r_s * np.sin(th_s)))
        n_u = rng.poisson(lam_u * area)
        serving = int(np.argmin(r_s))
        if n_u == 0:
            out[i] = 1
            continue
        r_u = np.sqrt(rng.uniform(0.0, win_sq, n_u))
        th_u = rng.uniform(0.0, 2.0 * math.pi, n_u)
        users = np.column_stack((r_u * np.cos(th_u), r_u * np.sin(th_u)))
        _, nearest = cKDTree(stations).query(users)
        out[i] = 1 + int(np.sum(nearest == serving))
    return out


def simulate_cell_load(
    deploy: DeploymentConfig, sim: SimulationSpec, workers: int = 1
) -> np.ndarray:
    """Empirical PMF of the typical (size-biased) cell population; entry i
    is the frequency of load k = i + 1."""
    window = resolve_window(sim, deploy.lambda_u, deploy.lambda_s)
    params = (sim.seed, deploy.lambda_u, deploy.lambda_s, window)
    loads = _map_chunks(partial(_cell_load_chunk, params), sim.trials, workers)
    counts = np.bincount(loads)[1:]  # drop the empty k = 0 slot
    return counts / float(sim.trials)


# --- backhaul link ---------------------------------------------------------

def _backhaul_se_one(
    rng: np.random.Generator,
    p_b: float,
    beta: float,
    alpha_b: float,
    lam_m: float,
    n_ant: int,
    s_o: int,
    r_b: float,
    sigma_sq: float,
    window: float,
) -> float:
    a = math.pi * lam_m
    u = rng.uniform()
    y_sq = r_b * r_b - math.log1p(-u) / a  # truncated-Rayleigh inverse CDF
    win_sq = max(window * window, y_sq)
    m = rng.poisson(lam_m * math.pi * (win_sq - y_sq))
    d_sq = y_sq + rng.uniform(0.0, 1.0, m) * (win_sq - y_sq)
    g_o = rng.gamma(n_ant - s_o + 1)
    g_j = rng.gamma(s_o, size=m)
    mean_sqrt_g = math.exp(math.lgamma(n_ant - s_o + 1.5) - math.lgamma(n_ant - s_o + 1))
    p_share = p_b / s_o
    pathloss_o = beta * y_sq ** (-alpha_b / 2.0)
    signal = p_share * mean_sqrt_g ** 2 * pathloss_o
    distortion = p_share * (math.sqrt(g_o) - mean_sqrt_g) ** 2 * pathloss_o
    interference = p_share * beta * float(np.sum(g_j * d_sq ** (-alpha_b / 2.0)))
    interference += (
        p_b * beta * 2.0 * math.pi * lam_m
        * win_sq ** ((2.0 - alpha_b) / 2.0) / (alpha_b - 2.0)
    )
    return math.log2(1.0 + signal / (distortion + interference + sigma_sq))


def _backhaul_chunk(params: tuple, bounds: tuple[int, int]) -> np.ndarray:
    seed, role, p_b, beta, alpha_b, lam_m, n_ant, s_o, r_b, sigma_sq, window = params
    lo, hi = bounds
    out = np.empty(hi - lo)
    for i, trial in enumerate(range(lo, hi)):
        rng = _trial_rng(seed, trial, role)
        out[i] = _backhaul_se_one(
            rng, p_b, beta, alpha_b, lam_m, n_ant, s_o, r_b, sigma_sq, window
        )
    return out


def _backhaul_se_samples(
    radio: RadioConfig,
    deploy: DeploymentConfig,
    s_o: int,
    sim: SimulationSpec,
    workers: int,
) -> np.ndarray:
    if not 1 <= s_o < deploy.antennas:
        raise ValueError("s_o: backhaul load must satisfy 1 <= s_o < N")
    window = resolve_window(sim, deploy.lambda_m)
    sigma_sq = radio.sigma_b_sq if sim.include_noise else 0.0
    params = (
        sim.seed,
        _ROLE_BACKHAUL,
        radio.p_b_watt,
        radio.beta,
        radio.alpha_b,
        deploy.lambda_m,
        deploy.antennas,
        s_o,
        radio.r_b_m,
        sigma_sq,
        window,
    )
    return _map_chunks(partial(_backhaul_chunk, params), sim.trials, workers)


def simulate_backhaul_rate(
    radio: RadioConfig,
    deploy: DeploymentConfig,
    s_o: int,
    sim: SimulationSpec,
    workers: int = 1,
) -> SimEstimate:
    """Mean achievable backhaul rate (bits/s) at macro load s_o."""
    se = _backhaul_se_samples(radio, deploy, s_o, sim, workers)
    return _estimate(radio.backhaul_bandwidth_hz * se)


# --- delay -----------------------------------------------------------------

def simulate_delay(
    radio: RadioConfig,
    deploy: DeploymentConfig,
    content: ContentConfig,
    spec: DeliverySpec,
    k: int,
    s_o: int,
    sim: SimulationSpec,
    workers: int = 1,
) -> SimEstimate:
    """Mean delivery delay at cell load k.

    Each trial requests one content: with probability q_hit it samples a
    cached access channel, otherwise a backhaul link plus a backhauled
    access channel.  Because the per-request inverse access rate has no
    finite mean under Rayleigh fading, the delay is composed from the
    branch mean rates exactly as the analytical definition composes it:
    content volume over the mean cached rate, and content volume over the
    mean backhaul rate plus content volume over the mean self-backhauled
    rate.  The confidence half-width propagates the component
    uncertainties to first order.
    """
    if k < 1:
        raise ValueError("k: cell load must be >= 1")
    q_hit = hit_probability(content)
    branch_rng = _trial_rng(sim.seed, 0, _ROLE_BRANCH)
    cached_mask = branch_rng.random(sim.trials) < q_hit

    q_bits = spec.content_bits
    delay = 0.0
    half = 0.0
    zero_rate_rejected = 0

    if q_hit > 0.0:
        se = _access_se_samples(
            radio, deploy, q_hit, radio.access_bandwidth_hz, sim, _ROLE_ACCESS, workers
        )
        rates = (radio.access_bandwidth_hz / k) * se[cached_mask]
        keep = rates > 0.0
        zero_rate_rejected += int(np.sum(~keep))
        rates = rates[keep]
        if len(rates) == 0:
            raise ConvergenceError("no usable cached-branch samples")
        est = _estimate(rates)
        delay += q_hit * q_bits / est.mean
        half += q_hit * q_bits * est.ci_half_width_95 / est.mean ** 2

    if q_hit < 1.0:
        se_b = _backhaul_se_samples(radio, deploy, s_o, sim, workers)
        rates_b = radio.backhaul_bandwidth_hz * se_b[~cached_mask]
        se_p = _access_se_samples(
            radio,
            deploy,
            1.0 - q_hit,
            radio.backhaul_bandwidth_hz,
            sim,
            _ROLE_ACCESS_PRIME,
            workers,
        )
        rates_p = (radio.backhaul_bandwidth_hz / k) * se_p[~cached_mask]
        keep = rates_p > 0.0
        zero_rate_rejected += int(np.sum(~keep))
        rates_p = rates_p[keep]
        if len(rates_p) == 0 or len(rates_b) == 0:
            raise ConvergenceError("no usable backhaul-branch samples")
        est_b = _estimate(rates_b)
        est_rp = _estimate(rates_p)
        delay += (1.0 - q_hit) * (q_bits / est_b.mean + q_bits / est_rp.mean)
        half += (1.0 - q_hit) * (
            q_bits * est_b.ci_half_width_95 / est_b.mean ** 2
            + q_bits * est_rp.ci_half_width_95 / est_rp.mean ** 2
        )

    if zero_rate_rejected:
        warnings.warn(
            f"excluded {zero_rate_rejected} zero-rate draws", RuntimeWarning, stacklevel=2
        )
    return SimEstimate(mean=delay, ci_half_width_95=half, trials_used=sim.trials)


def simulate_delay_weighted(
    radio: RadioConfig,
    deploy: DeploymentConfig,
    content: ContentConfig,
    spec: DeliverySpec,
    kmax_used: int,
    s_o: int,
    sim: SimulationSpec,
    workers: int = 1,
) -> SimEstimate:
    """Mean delay blended over cell loads 1..kmax_used with the
    renormalised load PMF, matching the analytical composition.

    The access spectral-efficiency draws do not depend on the load (only
    the per-load bandwidth share does), so one set of branch samples
    serves every load and the load enters through its mean.
    """
    from .load import cell_load_pmf

    if kmax_used < 1:
        raise ValueError("kmax_used: must be >= 1")
    pmf = cell_load_pmf(deploy.load_ratio, deploy.gamma_load)
    weights = pmf.probabilities[:kmax_used].copy()
    weights /= float(np.sum(weights))
    k_mean = float(np.sum(weights * np.arange(1, kmax_used + 1)))

    q_hit = hit_probability(content)
    branch_rng = _trial_rng(sim.seed, 0, _ROLE_BRANCH)
    cached_mask = branch_rng.random(sim.trials) < q_hit
    q_bits = spec.content_bits
    delay = 0.0
    half = 0.0

    if q_hit > 0.0:
        se = _access_se_samples(
            radio, deploy, q_hit, radio.access_bandwidth_hz, sim, _ROLE_ACCESS, workers
        )
        est = _estimate(se[cached_mask])
        rate1 = radio.access_bandwidth_hz * est.mean  # load-1 mean rate
        delay += q_hit * k_mean * q_bits / rate1
        half += q_hit * k_mean * q_bits * (
            radio.access_bandwidth_hz * est.ci_half_width_95
        ) / rate1 ** 2

    if q_hit < 1.0:
        se_b = _backhaul_se_samples(radio, deploy, s_o, sim, workers)
        est_b = _estimate(radio.backhaul_bandwidth_hz * se_b[~cached_mask])
        se_p = _access_se_samples(
            radio,
            deploy,
            1.0 - q_hit,
            radio.backhaul_bandwidth_hz,
            sim,
            _ROLE_ACCESS_PRIME,
            workers,
        )
        est_p = _estimate(se_p[~cached_mask])
        rate1_p = radio.backhaul_bandwidth_hz * est_p.mean
        delay += (1.0 - q_hit) * (q_bits / est_b.mean + k_mean * q_bits / rate1_p)
        half += (1.0 - q_hit) * (
            q_bits * est_b.ci_half_width_95 / est_b.mean ** 2
            + k_mean * q_bits * (radio.backhaul_bandwidth_hz * est_p.ci_half_width_95)
            / rate1_p ** 2
        )
    return SimEstimate(mean=delay, ci_half_width_95=half, trials_used=sim.trials)
