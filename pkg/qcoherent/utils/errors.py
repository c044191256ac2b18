"""
errors.py — exception hierarchy shared by all services.

Every error carries the offending index / value as attributes so the CLI can
report it without parsing the message.
"""


class QAlgebraError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""

    exit_code: int = 2


# ─────────────────────────────────────────────────────────────────
# Parameter / domain validation
# ─────────────────────────────────────────────────────────────────

class InvalidDeformation(QAlgebraError):
    pass


class RootOfUnity(QAlgebraError):
    def __init__(self, message: str, n: int | None = None) -> None:
        super().__init__(message)
        self.n = n


class NonRealValue(QAlgebraError):
    pass


class PositivityViolation(QAlgebraError):
    def __init__(self, n: int, value: float) -> None:
        super().__init__(f"box value at n={n} is not positive ({value:.6g})")
        self.n = n
        self.value = value


class NotInvertible(QAlgebraError):
    def __init__(self, n: int, value: float) -> None:
        super().__init__(f"[rho_{n + 1}]_q vanishes at n={n} ({value:.3g}); F is undefined")
        self.n = n
        self.value = value


class NegativeRatio(QAlgebraError):
    def __init__(self, n: int, ratio: float) -> None:
        super().__init__(f"f_{n}^2 = {ratio:.6g} is negative; no real square root")
        self.n = n
        self.ratio = ratio


class DimensionMismatch(QAlgebraError):
    pass


class SequenceMismatch(QAlgebraError):
    pass


class Unsupported(QAlgebraError):
    pass


class Diverges(QAlgebraError):
    pass


class GridTooShort(QAlgebraError):
    def __init__(self, n: int, ratio: float) -> None:
        super().__init__(
            f"moment n={n}: integrand at the last grid point is {ratio:.3g} of its peak"
        )
        self.n = n
        self.ratio = ratio


# ─────────────────────────────────────────────────────────────────
# Numerical failures
# ─────────────────────────────────────────────────────────────────

class NoConvergence(QAlgebraError):
    exit_code = 1

    def __init__(self, order: int, bound: float) -> None:
        super().__init__(f"tail bound {bound:.3g} not reached within order {order}")
        self.order = order
        self.bound = bound


class PrecisionLoss(QAlgebraError):
    exit_code = 1

    def __init__(self, order: int, rounding: float, limit: float) -> None:
        super().__init__(
            f"rounding bound {rounding:.3g} at order {order} exceeds the target {limit:.3g}"
        )
        self.order = order
        self.rounding = rounding
        self.limit = limit


class DivisionByZero(QAlgebraError):
    exit_code = 1


class QuadratureFailure(QAlgebraError):
    exit_code = 1

    def __init__(self, panels: int, change: float) -> None:
        super().__init__(
            f"adaptive quadrature stalled at {panels} panels (last change {change:.3g})"
        )
        self.panels = panels
        self.change = change


class NonDecayingIntegrand(QAlgebraError):
    exit_code = 1


class MomentQualityTooLow(QAlgebraError):
    exit_code = 1

    def __init__(self, worst: float, tolerance: float) -> None:
        super().__init__(
            f"certified moment error {worst:.3g} exceeds requested tolerance {tolerance:.3g}"
        )
        self.worst = worst
        self.tolerance = tolerance
