"""Exception types shared across the toolkit."""


class ConvergenceError(ArithmeticError):
    """A series or quadrature failed to reach the requested accuracy."""


class InfeasibleError(RuntimeError):
    """A requested operating point cannot be met (e.g. backhaul time exceeds
    the delivery deadline, or a rate target is unattainable at any load)."""


class DivergentRateError(InfeasibleError):
    """The mean-rate integral is unbounded (noise-free model with no
    interferers has a CCDF identically one)."""
