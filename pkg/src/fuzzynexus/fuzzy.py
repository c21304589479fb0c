"""Trapezoidal fuzzy numbers and their possibility, necessity, and credibility measures.

A trapezoidal fuzzy number (m1, m2, m3, m4) has membership 1 on the core
[m2, m3] and linear shoulders falling to 0 at m1 and m4.  For a fuzzy
parameter and a crisp threshold, the three measures grade the events
{fuzzy <= threshold} and {fuzzy >= threshold} from optimistic (possibility)
through moderate (credibility, the average of the other two) to pessimistic
(necessity).  A chance constraint "measure of event >= alpha" collapses to a
single crisp inequality whose threshold is `crisp_bound`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class MeasureKind(enum.Enum):
    """Which grade of a fuzzy event a chance constraint uses."""

    POSSIBILITY = "poss"
    NECESSITY = "nece"
    CREDIBILITY = "cred"

    @classmethod
    def parse(cls, text: str) -> "MeasureKind":
        key = text.strip().lower()
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise ValueError(f"unknown measure kind {text!r}; expected poss, nece, or cred")


class Direction(enum.Enum):
    """Event direction of a chance constraint: {fuzzy <= g} or {fuzzy >= g}."""

    LESS_OR_EQUAL = "le"
    GREATER_OR_EQUAL = "ge"


@dataclass(frozen=True)
class TrapezoidalFuzzy:
    """An uncertain quantity (mu1, mu2, mu3, mu4) with mu1 <= mu2 <= mu3 <= mu4.

    Equal adjacent components are allowed so that crisp parameters embed as
    (c, c, c, c); a degenerate shoulder makes the membership step instead of
    ramp at that edge.
    """

    mu1: float
    mu2: float
    mu3: float
    mu4: float

    def __post_init__(self) -> None:
        vals = (self.mu1, self.mu2, self.mu3, self.mu4)
        for v in vals:
            if not math.isfinite(v):
                raise ValueError(f"trapezoid components must be finite, got {vals}")
        if not (self.mu1 <= self.mu2 <= self.mu3 <= self.mu4):
            raise ValueError(
                f"trapezoid requires mu1 <= mu2 <= mu3 <= mu4, got {vals}"
            )

    @classmethod
    def crisp(cls, value: float) -> "TrapezoidalFuzzy":
        """Embed a crisp number as the degenerate trapezoid (v, v, v, v)."""
        return cls(value, value, value, value)

    @property
    def is_crisp(self) -> bool:
        return self.mu1 == self.mu4

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.mu1, self.mu2, self.mu3, self.mu4)


def membership(f: TrapezoidalFuzzy, x: float) -> float:
    """Membership grade of x: 0 outside [mu1, mu4], 1 on [mu2, mu3], linear between.

    On a degenerate shoulder (mu1 == mu2 or mu3 == mu4) the grade steps
    straight to 1 at that edge.
    """
    if x < f.mu1 or x > f.mu4:
        return 0.0
    if f.mu2 <= x <= f.mu3:
        return 1.0
    if x < f.mu2:
        return (x - f.mu1) / (f.mu2 - f.mu1)
    return (f.mu4 - x) / (f.mu4 - f.mu3)


def _possibility_le(f: TrapezoidalFuzzy, gamma: float) -> float:
    # Branch order makes degenerate shoulders behave as steps.
    if gamma >= f.mu2:
        return 1.0
    if gamma <= f.mu1:
        return 0.0
    return (gamma - f.mu1) / (f.mu2 - f.mu1)


def _possibility_ge(f: TrapezoidalFuzzy, gamma: float) -> float:
    if gamma <= f.mu3:
        return 1.0
    if gamma >= f.mu4:
        return 0.0
    return (f.mu4 - gamma) / (f.mu4 - f.mu3)


def _necessity_le(f: TrapezoidalFuzzy, gamma: float) -> float:
    if gamma >= f.mu4:
        return 1.0
    if gamma <= f.mu3:
        return 0.0
    return (gamma - f.mu3) / (f.mu4 - f.mu3)


def _necessity_ge(f: TrapezoidalFuzzy, gamma: float) -> float:
    if gamma <= f.mu1:
        return 1.0
    if gamma >= f.mu2:
        return 0.0
    return (f.mu2 - gamma) / (f.mu2 - f.mu1)


def measure_le(f: TrapezoidalFuzzy, gamma: float, kind: MeasureKind) -> float:
    """Grade of the event {fuzzy <= gamma} under the chosen measure.

    Nondecreasing in gamma with values in [0, 1].  Credibility is evaluated
    as the average of possibility and necessity, which is its definition and
    agrees with the expanded piecewise form on every branch.
    """
    if kind is MeasureKind.POSSIBILITY:
        return _possibility_le(f, gamma)
    if kind is MeasureKind.NECESSITY:
        return _necessity_le(f, gamma)
    return 0.5 * (_possibility_le(f, gamma) + _necessity_le(f, gamma))


def measure_ge(f: TrapezoidalFuzzy, gamma: float, kind: MeasureKind) -> float:
    """Grade of the event {fuzzy >= gamma}; nonincreasing in gamma, in [0, 1]."""
    if kind is MeasureKind.POSSIBILITY:
        return _possibility_ge(f, gamma)
    if kind is MeasureKind.NECESSITY:
        return _necessity_ge(f, gamma)
    return 0.5 * (_possibility_ge(f, gamma) + _necessity_ge(f, gamma))


def crisp_bound(
    f: TrapezoidalFuzzy,
    kind: MeasureKind,
    direction: Direction,
    alpha: float,
) -> float:
    """Crisp threshold equivalent to a fuzzy chance constraint at level alpha.

    For direction GREATER_OR_EQUAL the constraint measure{f >= g} >= alpha
    holds exactly when g <= crisp_bound(...); for LESS_OR_EQUAL it holds
    exactly when g >= crisp_bound(...).  The equivalence is exact for
    alpha in (0, 1]; at alpha = 0 every event trivially has grade >= 0 while
    the bound stays at its loosest knot.

    The credibility transform has two branches that meet discontinuously at
    alpha = 0.5; alpha = 0.5 itself is evaluated on the "alpha <= 0.5"
    branch, which is the side consistent with the 1/2 plateau of the
    credibility measure.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"confidence level must be in [0, 1], got {alpha}")
    le = direction is Direction.LESS_OR_EQUAL
    if kind is MeasureKind.POSSIBILITY:
        if le:
            return (1.0 - alpha) * f.mu1 + alpha * f.mu2
        return alpha * f.mu3 + (1.0 - alpha) * f.mu4
    if kind is MeasureKind.NECESSITY:
        if le:
            return (1.0 - alpha) * f.mu3 + alpha * f.mu4
        return alpha * f.mu1 + (1.0 - alpha) * f.mu2
    # credibility
    if le:
        if alpha > 0.5:
            return (2.0 - 2.0 * alpha) * f.mu3 + (2.0 * alpha - 1.0) * f.mu4
        return (1.0 - 2.0 * alpha) * f.mu1 + 2.0 * alpha * f.mu2
    if alpha > 0.5:
        return (2.0 * alpha - 1.0) * f.mu1 + (2.0 - 2.0 * alpha) * f.mu2
    return 2.0 * alpha * f.mu3 + (1.0 - 2.0 * alpha) * f.mu4


def product_nonneg(a: TrapezoidalFuzzy, b: TrapezoidalFuzzy) -> TrapezoidalFuzzy:
    """Component-wise product of two nonnegative trapezoids.

    Exact for the support and core endpoints of nonnegative trapezoids;
    the shoulders of the true product are curved and are approximated as
    linear.  Components of either factor must be >= 0.
    """
    for name, f in (("left factor", a), ("right factor", b)):
        if f.mu1 < 0.0:
            raise ValueError(
                f"{name} must have nonnegative components, got {f.as_tuple()}"
            )
    return TrapezoidalFuzzy(
        a.mu1 * b.mu1, a.mu2 * b.mu2, a.mu3 * b.mu3, a.mu4 * b.mu4
    )
