"""Special functions needed by the closed-form delivery analysis.

Three functions are required:

* a Gauss hypergeometric factor 2F1(1, 1-2/a; 2-2/a; z) on z <= 0, which
  shows up in every interference-limited coverage expression,
* the exponential integral Ei(x) for small arguments, and
* the squared Gamma ratio (Gamma(m+3/2)/Gamma(m+1))^2 that carries the
  zero-forcing array gain.

Everything here is self-contained (no library hypergeometric routines) so
that the test suite can check it against independent quadrature and series
oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import ConvergenceError

EULER_GAMMA = 0.5772156649015328606

# Pfaff series handles z in [-_Z_SWITCH, 0]; the inversion formula takes over
# below that, where the series in w = z/(z-1) would need O(|z|) terms.
_Z_SWITCH = 16.0


@dataclass(frozen=True)
class Tolerance:
    """Accuracy controls for the series evaluations."""

    rel_tol: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self) -> None:
        if self.rel_tol <= 0:
            raise ValueError("rel_tol: must be > 0")
        if self.max_terms < 1:
            raise ValueError("max_terms: must be >= 1")


_DEFAULT_TOL = Tolerance()


def hyp2f1_access(alpha: float, z: float, tol: Tolerance = _DEFAULT_TOL) -> float:
    """Evaluate 2F1(1, 1-2/alpha; 2-2/alpha; z) for alpha > 2 and z <= 0.

    The same routine serves the parameterisation written with
    (alpha-2)/alpha and (2*alpha-2)/alpha, which is algebraically identical.

    For moderate |z| the Pfaff transformation maps the argument to
    w = z/(z-1) in [0,1) and the series 2F1(1,1;2-2/alpha;w)/(1-z) is
    summed; its term ratio is below w, so the geometric tail bounds the
    truncation error.  For |z| beyond the switch point the standard
    z -> 1/z inversion is used, which for these parameters collapses to

        -(1-t)/t * (-z)^-1 * 2F1(1, t; 1+t; 1/z)
        + (1-t) * pi/sin(pi*t) * (-z)^(t-1),        t = 2/alpha,

    a rapidly convergent series plus an algebraic term.
    """
    if alpha <= 2.0:
        raise ValueError("alpha: pathloss exponent must be > 2")
    if z > 0.0:
        raise ValueError("z: argument must be <= 0")
    if z == 0.0:
        return 1.0
    tau = 2.0 / alpha
    if z >= -_Z_SWITCH:
        return _pfaff_series(tau, z, tol)
    return _inversion_formula(tau, z, tol)


def _pfaff_series(tau: float, z: float, tol: Tolerance) -> float:
    c = 2.0 - tau
    w = z / (z - 1.0)
    term = 1.0
    total = 1.0
    for n in range(tol.max_terms):
        term *= (n + 1.0) / (c + n) * w
        total += term
        # all terms positive with ratio < w, so the tail is < term*w/(1-w)
        if term * w <= tol.rel_tol * total * (1.0 - w):
            return total / (1.0 - z)
    raise ConvergenceError(
        f"hypergeometric series did not converge within {tol.max_terms} terms"
    )


def _inversion_formula(tau: float, z: float, tol: Tolerance) -> float:
    inv_z = 1.0 / z
    term = 1.0
    total = 1.0
    converged = False
    for n in range(1, tol.max_terms):
        term *= inv_z
        contrib = term * tau / (tau + n)
        total += contrib
        if abs(contrib) <= tol.rel_tol * abs(total):
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"inversion series did not converge within {tol.max_terms} terms"
        )
    head = -(1.0 - tau) / tau / (-z) * total
    tail = (1.0 - tau) * math.pi / math.sin(math.pi * tau) * (-z) ** (tau - 1.0)
    return head + tail


def exp_integral_ei(x: float, tol: Tolerance = _DEFAULT_TOL) -> float:
    """Exponential integral Ei(x) = -int_{-x}^inf e^-t / t dt, x != 0.

    The power series Ei(x) = gamma + ln|x| + sum x^k/(k k!) is used on
    [-5, 40]; below -5 the alternating series cancels catastrophically, so
    Ei(x) = -E1(-x) is evaluated with the continued fraction for E1.
    Arguments beyond |x| = 40 are rejected rather than returned with
    silently degraded accuracy.
    """
    if x == 0.0:
        raise ValueError("x: Ei has a logarithmic singularity at 0")
    if abs(x) > 40.0:
        raise ValueError("x: |x| > 40 is outside the supported range")
    if x < -5.0:
        return -_e1_continued_fraction(-x, tol)
    return _ei_power_series(x, tol)


def _ei_power_series(x: float, tol: Tolerance) -> float:
    total = EULER_GAMMA + math.log(abs(x))
    power = 1.0
    for k in range(1, tol.max_terms):
        power *= x / k
        term = power / k
        total += term
        if abs(term) <= tol.rel_tol * max(abs(total), 1e-300):
            return total
    raise ConvergenceError(f"Ei series did not converge within {tol.max_terms} terms")


def _e1_continued_fraction(x: float, tol: Tolerance) -> float:
    # E1(x) = e^-x / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(...)))), modified Lentz
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for n in range(1, tol.max_terms):
        a = -(n * n)
        b += 2.0
        d = 1.0 / (b + a * d) if abs(b + a * d) > tiny else 1.0 / tiny
        c = b + a / c if abs(b + a / c) > tiny else tiny
        delta = c * d
        h *= delta
        if abs(delta - 1.0) <= tol.rel_tol:
            return math.exp(-x) * h
    raise ConvergenceError(
        f"E1 continued fraction did not converge within {tol.max_terms} terms"
    )


def array_gain_sq(n_eff: int) -> float:
    """Squared Gamma ratio (Gamma(n+3/2)/Gamma(n+1))^2 for n = N - S_o >= 0.

    Computed through log-gamma differences so antenna counts in the
    hundreds cannot overflow.  Grows like n + 3/4 for large n, i.e. it
    approaches the n + 1/2 array-gain asymptote from above.
    """
    if n_eff < 0:
        raise ValueError("n_eff: must be >= 0")
    return math.exp(2.0 * (math.lgamma(n_eff + 1.5) - math.lgamma(n_eff + 1.0)))
