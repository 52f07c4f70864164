"""Content popularity, cache placement and hit probability."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MOST_POPULAR = "most_popular"
EXPLICIT = "explicit"


@lru_cache(maxsize=64)
def _zipf_normalizer(library_size: int, zipf_exponent: float) -> float:
    # fsum keeps 1e5-term partial sums reproducible to the last ulp
    return math.fsum(j ** -zipf_exponent for j in range(1, library_size + 1))


def zipf_popularity(library_size: int, zipf_exponent: float) -> np.ndarray:
    """Request probabilities a_j = j^-s / sum_m m^-s for j = 1..J."""
    if library_size < 1:
        raise ValueError("library_size: must be >= 1")
    if zipf_exponent < 0:
        raise ValueError("zipf_exponent: must be >= 0")
    ranks = np.arange(1, library_size + 1, dtype=float)
    weights = ranks ** -zipf_exponent
    return weights / _zipf_normalizer(library_size, zipf_exponent)


@dataclass(frozen=True)
class ContentConfig:
    """Library size, Zipf exponent, cache size and placement policy.

    ``placement`` is either the deterministic top-L policy or an explicit
    vector of per-content caching probabilities q_j with sum(q) <= L.
    """

    library_size: int = 100_000
    zipf_exponent: float = 0.7
    cache_size: int = 3000
    placement: str = MOST_POPULAR
    explicit_q: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.library_size < 1:
            raise ValueError("library_size: must be >= 1")
        if self.zipf_exponent < 0:
            raise ValueError("zipf_exponent: must be >= 0")
        if not 0 <= self.cache_size <= self.library_size:
            raise ValueError("cache_size: must satisfy 0 <= L <= J")
        if self.placement not in (MOST_POPULAR, EXPLICIT):
            raise ValueError(f"placement: unknown policy {self.placement!r}")
        if self.placement == EXPLICIT:
            q = np.asarray(self.explicit_q, dtype=float)
            if q.shape != (self.library_size,):
                raise ValueError("explicit_q: must have one entry per content")
            if np.any(q < 0.0) or np.any(q > 1.0):
                raise ValueError("explicit_q: entries must lie in [0,1]")
            if math.fsum(q) > self.cache_size + 1e-9:
                raise ValueError("explicit_q: sum of probabilities exceeds the cache size")
            q = q.copy()
            q.flags.writeable = False
            object.__setattr__(self, "explicit_q", q)
        elif self.explicit_q is not None:
            raise ValueError("explicit_q: only valid with explicit placement")

    def popularity(self) -> np.ndarray:
        return zipf_popularity(self.library_size, self.zipf_exponent)

    def placement_probs(self) -> np.ndarray:
        """Per-content caching probability q_j implied by the policy."""
        if self.placement == MOST_POPULAR:
            q = np.zeros(self.library_size)
            q[: self.cache_size] = 1.0
            return q
        return np.asarray(self.explicit_q, dtype=float)


def hit_probability(cfg: ContentConfig) -> float:
    """q_hit = sum_j a_j q_j; reduces to the top-L partial sum for the
    most-popular policy."""
    popularity = cfg.popularity()
    if cfg.placement == MOST_POPULAR:
        return math.fsum(popularity[: cfg.cache_size])
    return math.fsum(popularity * cfg.explicit_q)


def mpc_hit_approx(cache_size: int, library_size: int, zipf_exponent: float) -> float:
    """Large-library approximation (L/J)^(1-s) of the top-L hit probability.

    Only meaningful for Zipf exponents below one, where the exponent 1-s
    stays positive.
    """
    if not 0 < cache_size <= library_size:
        raise ValueError("cache_size: must satisfy 0 < L <= J")
    if not 0.0 <= zipf_exponent < 1.0:
        raise ValueError("zipf_exponent: approximation requires s in [0,1)")
    return (cache_size / library_size) ** (1.0 - zipf_exponent)


def sample_cache_realization(cfg: ContentConfig, rng: np.random.Generator) -> set[int]:
    """Draw one cache realization: a set of content indices (1-based).

    The top-L policy is deterministic.  For explicit marginals the
    systematic (interval) rounding scheme is used: the q_j mass is laid out
    contiguously on [0, sum q), one uniform offset is drawn, and every
    interval hit by offset + integer shifts is selected.  Each content is
    included with probability exactly q_j and the draw holds at most
    ceil(sum q) <= L contents.
    """
    if cfg.placement == MOST_POPULAR:
        return set(range(1, cfg.cache_size + 1))
    q = np.asarray(cfg.explicit_q, dtype=float)
    edges = np.cumsum(q)
    total = edges[-1]
    if total <= 0.0:
        return set()
    offset = rng.uniform(0.0, 1.0)
    points = offset + np.arange(math.ceil(total), dtype=float)
    points = points[points < total]
    chosen = np.searchsorted(edges, points, side="right")
    return set(int(j) + 1 for j in chosen)
