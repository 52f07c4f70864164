"""Physical-layer and deployment parameter containers.

All internal math is carried out in SI units (watts, Hz, metres, bits,
seconds).  Transmit powers are accepted in dBm and converted once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 3.0e8
THERMAL_NOISE_DBM_PER_HZ = -174.0


def dbm_to_watt(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def noise_power_watt(bandwidth_hz: float) -> float:
    """Thermal noise over a band: -174 + 10*log10(bandwidth) dBm."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth_hz must be > 0")
    return dbm_to_watt(THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(bandwidth_hz))


@dataclass(frozen=True)
class RadioConfig:
    """Transmit powers, pathloss law, spectrum split and noise rule.

    ``eta`` is the fraction of the system bandwidth given to access links;
    the complement carries the wireless backhaul.  ``r_b_m`` is the minimum
    separation between a macro station and the small cell it serves.
    """

    p_a_dbm: float = 30.0
    p_b_dbm: float = 46.0
    alpha_a: float = 3.0
    alpha_b: float = 2.6
    carrier_hz: float = 3.5e9
    bandwidth_hz: float = 100e6
    eta: float = 0.5
    r_b_m: float = 5.0

    def __post_init__(self) -> None:
        if self.alpha_a <= 2.0:
            raise ValueError("alpha_a: pathloss exponent must be > 2")
        if self.alpha_b <= 2.0:
            raise ValueError("alpha_b: pathloss exponent must be > 2")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta: must be in (0,1)")
        if self.carrier_hz <= 0:
            raise ValueError("carrier_hz: must be > 0")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz: must be > 0")
        if self.r_b_m <= 0:
            raise ValueError("r_b_m: must be > 0")

    @property
    def beta(self) -> float:
        """Frequency-dependent pathloss constant (c / 4 pi f_c)^2."""
        return (SPEED_OF_LIGHT / (4.0 * math.pi * self.carrier_hz)) ** 2

    @property
    def p_a_watt(self) -> float:
        return dbm_to_watt(self.p_a_dbm)

    @property
    def p_b_watt(self) -> float:
        return dbm_to_watt(self.p_b_dbm)

    @property
    def access_bandwidth_hz(self) -> float:
        return self.eta * self.bandwidth_hz

    @property
    def backhaul_bandwidth_hz(self) -> float:
        return (1.0 - self.eta) * self.bandwidth_hz

    @property
    def sigma_a_sq(self) -> float:
        """Noise power over the access band."""
        return noise_power_watt(self.access_bandwidth_hz)

    @property
    def sigma_b_sq(self) -> float:
        """Noise power over the backhaul band."""
        return noise_power_watt(self.backhaul_bandwidth_hz)

    def pathloss(self, distance_m, alpha: float):
        """beta * d^-alpha; accepts scalars or numpy arrays."""
        return self.beta * distance_m ** -alpha


@dataclass(frozen=True)
class DeploymentConfig:
    """Node densities (per m^2), macro antenna count and the cell-load
    model constant."""

    lambda_u: float = 3e-4
    lambda_s: float = 1e-4
    lambda_m: float = 1e-5
    antennas: int = 128
    gamma_load: float = 3.5

    def __post_init__(self) -> None:
        for name in ("lambda_u", "lambda_s", "lambda_m"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name}: density must be > 0")
        if self.antennas < 1:
            raise ValueError("antennas: must be >= 1")
        if self.gamma_load <= 0:
            raise ValueError("gamma_load: must be > 0")

    @property
    def load_ratio(self) -> float:
        """Mean UEs per small cell, lambda_u / lambda_s."""
        return self.lambda_u / self.lambda_s


@dataclass(frozen=True)
class DeliverySpec:
    """Content volume, deadline and the delivery/overload thresholds."""

    content_bits: float = 1e6
    deadline_s: float = 1.0
    scd_threshold: float = 0.8
    overload_rho: float = 0.1
    min_backhaul_rate: float = 1e8

    def __post_init__(self) -> None:
        if self.content_bits < 0:
            raise ValueError("content_bits: must be >= 0")
        if self.deadline_s <= 0:
            raise ValueError("deadline_s: must be > 0")
        if not 0.0 < self.scd_threshold < 1.0:
            raise ValueError("scd_threshold: must be in (0,1)")
        if not 0.0 < self.overload_rho < 1.0:
            raise ValueError("overload_rho: must be in (0,1)")
        if self.min_backhaul_rate <= 0:
            raise ValueError("min_backhaul_rate: must be > 0")

    @property
    def target_rate(self) -> float:
        """Rate that delivers the content exactly at the deadline."""
        return self.content_bits / self.deadline_s
