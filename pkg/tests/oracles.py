"""Independent oracles the tests check the library against.

These deliberately avoid the library's own evaluation routes: the
hypergeometric factor is integrated from its Euler representation, the
exponential integral is summed from its defining power series, and the
load PMF is evaluated at high precision with mpmath.
"""

import math

import mpmath as mp
from scipy.integrate import quad

EULER_GAMMA = 0.5772156649015328606


def hyp2f1_euler(alpha: float, z: float) -> float:
    """2F1(1, b; b+1; z) = b * int_0^1 u^(b-1)/(1 - z u) du with
    b = 1 - 2/alpha, regularised by u = v^(1/b) so the integrand is
    bounded at the origin."""
    b = 1.0 - 2.0 / alpha
    value, _ = quad(
        lambda v: 1.0 / (1.0 - z * v ** (1.0 / b)),
        0.0,
        1.0,
        epsabs=1e-14,
        epsrel=1e-13,
        limit=400,
    )
    return value


def ei_series(x: float, rel_tol: float = 1e-16, max_terms: int = 500) -> float:
    """Ei(x) = gamma + ln|x| + sum_k x^k/(k k!)."""
    total = EULER_GAMMA + math.log(abs(x))
    power = 1.0
    for k in range(1, max_terms):
        power *= x / k
        term = power / k
        total += term
        if abs(term) < rel_tol * abs(total):
            break
    return total


def load_pmf_highprec(ratio: float, k: int, gamma_load: float = 3.5) -> float:
    """Load PMF evaluated with 50-digit arithmetic and exact Gamma ratios."""
    with mp.workdps(50):
        g = mp.mpf(gamma_load)
        r = mp.mpf(ratio)
        value = (
            g ** g
            / mp.factorial(k - 1)
            * mp.gamma(k + g)
            / mp.gamma(g)
            * r ** (k - 1)
            / (g + r) ** (k + g)
        )
        return float(value)


def array_gain_sq_highprec(n_eff: int) -> float:
    with mp.workdps(50):
        return float((mp.gamma(n_eff + mp.mpf(3) / 2) / mp.gamma(n_eff + 1)) ** 2)


def zipf_partial_sum_reversed(library_size: int, zipf_exponent: float, top: int) -> float:
    """Top-`top` popularity mass summed in descending-rank order."""
    total = math.fsum(
        j ** -zipf_exponent for j in range(library_size, 0, -1)
    )
    head = math.fsum(j ** -zipf_exponent for j in range(top, 0, -1))
    return head / total
