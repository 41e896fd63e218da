"""Locally constant test functions, the zero-mean subspace, and the
core-plus-tail class closed under Riesz potentials.

A ``TestFunction`` is locally constant with compact support: supported in
the ball at ``support_level``, invariant under translation by anything of
size <= q**(-constancy_level), and stored as an exact value table indexed
by coset digit addresses.  An ``ExtendedFunction`` couples such a core on
a window ball with an exact analytic tail (zero, c*|x|**s, or
c0 + c1*ln|x|) describing the function outside the window.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import DivergentIntegralError, UltrafracError
from .field import (
    Digits,
    FieldParams,
    Point,
    abs_exponent,
    coset_digits,
    digits_to_point,
    enumerate_digits,
    zero_point,
)
from .numerics import (
    CV_ZERO,
    ComplexValue,
    ExactScalar,
    NumericValue,
    as_fraction,
    geometric_tail,
    q_pow,
)


@dataclass(frozen=True)
class TestFunction:
    """Bruhat-Schwartz function: exact coset-indexed table on a window ball.

    ``values`` maps each digit address of a constancy-level coset inside the
    support ball to the function's value there; the table always has exactly
    q**(constancy_level - support_level) entries.
    """

    fp: FieldParams
    support_level: int
    constancy_level: int
    values: Mapping[Digits, ComplexValue]

    __test__ = False  # keep pytest from collecting this as a test class

    def __post_init__(self) -> None:
        if self.constancy_level < self.support_level:
            raise ValueError("constancy level must be at least the support level")
        expected = self.fp.q ** (self.constancy_level - self.support_level)
        if len(self.values) != expected:
            raise ValueError(
                f"value table has {len(self.values)} entries, expected {expected}"
            )

    def addresses(self) -> list[Digits]:
        """All digit addresses in canonical (lexicographic) order."""
        return list(enumerate_digits(self.fp, self.support_level, self.constancy_level))

    def items(self):
        """(address, representative point, value) triples in canonical order."""
        for d in self.addresses():
            yield d, digits_to_point(self.fp, d, self.support_level), self.values[d]

    def evaluate(self, x: Point) -> ComplexValue:
        e = abs_exponent(self.fp, x)
        if e is not None and e > -self.support_level:
            return CV_ZERO
        d = coset_digits(self.fp, x, self.support_level, self.constancy_level)
        return self.values[d]

    def integral(self) -> ComplexValue:
        """Exact Haar integral: sum of table values times the coset measure."""
        meas = Fraction(self.fp.q) ** (-self.constancy_level)
        total = CV_ZERO
        for v in self.values.values():
            total = total + v * meas
        return total

    def refined(self, support_level: int | None = None, constancy_level: int | None = None) -> "TestFunction":
        """Same function on a coarser window and/or finer constancy level."""
        sl = self.support_level if support_level is None else support_level
        k = self.constancy_level if constancy_level is None else constancy_level
        if sl > self.support_level or k < self.constancy_level:
            raise ValueError("refinement may only enlarge the window or refine constancy")
        if sl == self.support_level and k == self.constancy_level:
            return self
        table = {
            d: self.evaluate(digits_to_point(self.fp, d, sl))
            for d in enumerate_digits(self.fp, sl, k)
        }
        return TestFunction(self.fp, sl, k, table)

    def translated(self, h: Point) -> "TestFunction":
        """The function x -> f(x - h)."""
        e = abs_exponent(self.fp, h)
        sl = self.support_level if e is None else min(self.support_level, -e)
        table = {
            d: self.evaluate(digits_to_point(self.fp, d, sl) - h)
            for d in enumerate_digits(self.fp, sl, self.constancy_level)
        }
        return TestFunction(self.fp, sl, self.constancy_level, table)

    def _combined(self, other: "TestFunction", op) -> "TestFunction":
        if self.fp != other.fp:
            raise UltrafracError("cannot combine functions over different fields")
        sl = min(self.support_level, other.support_level)
        k = max(self.constancy_level, other.constancy_level)
        table = {}
        for d in enumerate_digits(self.fp, sl, k):
            pt = digits_to_point(self.fp, d, sl)
            table[d] = op(self.evaluate(pt), other.evaluate(pt))
        return TestFunction(self.fp, sl, k, table)

    def __add__(self, other: "TestFunction") -> "TestFunction":
        return self._combined(other, lambda a, b: a + b)

    def __sub__(self, other: "TestFunction") -> "TestFunction":
        return self._combined(other, lambda a, b: a - b)

    def scaled(self, factor) -> "TestFunction":
        return TestFunction(
            self.fp,
            self.support_level,
            self.constancy_level,
            {d: v * factor for d, v in self.values.items()},
        )

    def table_equal(self, other: "TestFunction") -> bool:
        """Exact table equality after refining to a common window/constancy."""
        sl = min(self.support_level, other.support_level)
        k = max(self.constancy_level, other.constancy_level)
        a, b = self.refined(sl, k), other.refined(sl, k)
        for d in a.addresses():
            if (a.values[d] - b.values[d]).to_complex() != 0:
                return False
        return True


def constant_on_ball(fp: FieldParams, level: int, value) -> TestFunction:
    """value * indicator of the ball at ``level`` (centered at zero)."""
    cv = value if isinstance(value, ComplexValue) else ComplexValue.from_rational(value)
    return TestFunction(fp, level, level, {tuple(() for _ in range(fp.n)): cv})


def indicator_ball(fp: FieldParams, level: int) -> TestFunction:
    return constant_on_ball(fp, level, 1)


def indicator_coset(fp: FieldParams, center: Point, level: int) -> TestFunction:
    """Indicator of center + ball(level); window grows to contain the coset."""
    e = abs_exponent(fp, center)
    sl = level if e is None else min(level, -e)
    table = {}
    target = coset_digits(fp, center, sl, level)
    for d in enumerate_digits(fp, sl, level):
        table[d] = ComplexValue.from_rational(1 if d == target else 0)
    return TestFunction(fp, sl, level, table)


def zero_function(fp: FieldParams) -> TestFunction:
    return constant_on_ball(fp, 0, 0)


# ---------------------------------------------------------------------------
# analytic tails


class Tail:
    """Marker base class for analytic tails."""


@dataclass(frozen=True)
class ZeroTail(Tail):
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class PowerTail(Tail):
    """c * |x|**exponent outside the window."""

    coeff: ComplexValue
    exponent: Fraction

    def __str__(self) -> str:
        return f"[{self.coeff}] * |x|**({self.exponent})"


@dataclass(frozen=True)
class LogTail(Tail):
    """const + log_coeff * ln|x| outside the window."""

    const: ComplexValue
    log_coeff: ComplexValue

    def __str__(self) -> str:
        return f"[{self.const}] + [{self.log_coeff}] * ln|x|"


ZERO_TAIL = ZeroTail()


def power_tail(coeff, exponent) -> Tail:
    cv = ComplexValue._coerce(coeff)
    if cv.is_exact_zero():
        return ZERO_TAIL
    return PowerTail(cv, as_fraction(exponent))


def log_tail(const, log_coeff) -> Tail:
    c0 = ComplexValue._coerce(const)
    c1 = ComplexValue._coerce(log_coeff)
    if c1.is_exact_zero():
        if c0.is_exact_zero():
            return ZERO_TAIL
        return PowerTail(c0, Fraction(0))
    return LogTail(c0, c1)


def tail_power_terms(tail: Tail) -> list[tuple[Fraction, ComplexValue]]:
    """Power-term expansion (exponent, coefficient); log part reported separately."""
    if isinstance(tail, ZeroTail):
        return []
    if isinstance(tail, PowerTail):
        return [(tail.exponent, tail.coeff)]
    return [(Fraction(0), tail.const)]


def tail_log_coeff(tail: Tail) -> ComplexValue:
    if isinstance(tail, LogTail):
        return tail.log_coeff
    return CV_ZERO


@dataclass(frozen=True)
class ExtendedFunction:
    """TestFunction core on a window ball plus an exact analytic tail.

    This is the image class of the Riesz potentials: evaluation uses the
    core table inside the window ball and the tail formula strictly outside.
    """

    core: TestFunction
    tail: Tail = ZERO_TAIL

    @classmethod
    def from_test_function(cls, f: TestFunction) -> "ExtendedFunction":
        return cls(f, ZERO_TAIL)

    @property
    def fp(self) -> FieldParams:
        return self.core.fp

    @property
    def window_level(self) -> int:
        return self.core.support_level

    @property
    def constancy_level(self) -> int:
        return self.core.constancy_level

    @property
    def has_strong_decay(self) -> bool:
        """Structural check that the tail is O(|x|**(-beta)) with beta > 1."""
        if isinstance(self.tail, ZeroTail):
            return True
        if isinstance(self.tail, PowerTail):
            return self.tail.exponent < -1
        return False

    def tail_value_at_exponent(self, e: int) -> ComplexValue:
        """Tail formula at |x| = q**e (valid for e > -window_level)."""
        if isinstance(self.tail, ZeroTail):
            return CV_ZERO
        if isinstance(self.tail, PowerTail):
            return self.tail.coeff * q_pow(self.fp, self.tail.exponent * e)
        ln_abs = NumericValue.from_exact(ExactScalar.ln_q(self.fp, e))
        return self.tail.const + self.tail.log_coeff * ln_abs

    def evaluate(self, x: Point) -> ComplexValue:
        e = abs_exponent(self.fp, x)
        if e is not None and e > -self.window_level:
            return self.tail_value_at_exponent(e)
        return self.core.evaluate(x)


def _as_extended(f) -> ExtendedFunction:
    if isinstance(f, ExtendedFunction):
        return f
    if isinstance(f, TestFunction):
        return ExtendedFunction.from_test_function(f)
    raise TypeError(f"expected a function, got {type(f).__name__}")


# ---------------------------------------------------------------------------
# norms and distances


def _combined_tail_terms(f: ExtendedFunction, g: ExtendedFunction):
    """Power terms and log coefficient of the difference tail f - g."""
    terms: dict[Fraction, ComplexValue] = {}
    for s, c in tail_power_terms(f.tail):
        terms[s] = terms.get(s, CV_ZERO) + c
    for s, c in tail_power_terms(g.tail):
        terms[s] = terms.get(s, CV_ZERO) - c
    terms = {s: c for s, c in terms.items() if not c.is_exact_zero()}
    logc = tail_log_coeff(f.tail) - tail_log_coeff(g.tail)
    return terms, logc


def _tail_lp_contribution(fp: FieldParams, terms, p: float, outer_level: int) -> float:
    """Integral of |tail difference|**p over {|x| > q**(-outer_level)}."""
    if not terms:
        return 0.0
    q = fp.q
    s_max = max(terms)
    if float(s_max) * p >= -1:
        raise DivergentIntegralError(
            f"L^{p} tail with slowest decay |x|**{s_max} diverges"
        )
    if len(terms) == 1:
        ((s, c),) = terms.items()
        sigma = float(s) * p + 1  # < 0
        closed = float(geometric_tail(fp, -sigma, -(outer_level - 1)))
        return abs(c) ** p * (1 - 1 / q) * closed
    # several decay rates: sum shells until the dominated remainder is negligible
    total = 0.0
    j = outer_level - 1
    ratio = float(q) ** (float(s_max) * p + 1)
    for _ in range(100_000):
        shell_val = abs(sum(c.to_complex() * float(q) ** (-j * float(s)) for s, c in terms.items()))
        total += shell_val**p * (1 - 1 / q) * float(q) ** (-j)
        # domination bound only valid once all exponents act as decay (j < 0)
        if j <= -1:
            bound = (
                (sum(abs(c) for c in terms.values()) * float(q) ** (-(j - 1) * float(s_max))) ** p
                * float(q) ** (-(j - 1))
                / (1 - ratio)
            )
            if bound <= 1e-17 * max(total, 1e-300):
                break
        j -= 1
    return total


def lp_distance(f, g, p) -> float:
    """L^p distance between two core-plus-tail functions.

    Exact coset sums on the common refinement window plus a closed-form
    tail integral; a divergent tail raises instead of returning a number.
    """
    p = float(p)
    if p < 1:
        raise ValueError(f"L^p norms need p >= 1, got {p}")
    fe, ge = _as_extended(f), _as_extended(g)
    if fe.fp != ge.fp:
        raise UltrafracError("cannot compare functions over different fields")
    fp = fe.fp
    window = min(fe.window_level, ge.window_level)
    k = max(fe.constancy_level, ge.constancy_level)
    terms, logc = _combined_tail_terms(fe, ge)
    if not logc.is_exact_zero():
        raise DivergentIntegralError("L^p norm of a log-growth tail diverges")

    diffs = []
    all_exact_zero = True
    for d in enumerate_digits(fp, window, k):
        pt = digits_to_point(fp, d, window)
        dv = fe.evaluate(pt) - ge.evaluate(pt)
        if not dv.is_exact_zero():
            all_exact_zero = False
        diffs.append(dv)
    tail_part = _tail_lp_contribution(fp, terms, p, window)
    if all_exact_zero and tail_part == 0.0:
        return 0.0
    meas = float(Fraction(fp.q) ** (-k))
    window_part = sum(abs(dv) ** p for dv in diffs) * meas
    return (window_part + tail_part) ** (1.0 / p)


def lp_norm(f, p) -> float:
    return lp_distance(f, zero_function(_as_extended(f).fp), p)


def modulus_of_continuity(f: TestFunction, h: Point, p) -> float:
    """L^p norm of f - f(. - h); exactly zero within the constancy scale."""
    e = abs_exponent(f.fp, h)
    if e is None or e <= -f.constancy_level:
        return 0.0
    return lp_distance(f, f.translated(h), p)


def lizorkin_project(f: TestFunction, window_level: int | None = None) -> TestFunction:
    """Project onto zero-mean functions by subtracting the average over a window ball."""
    wl = f.support_level if window_level is None else window_level
    if wl > f.support_level:
        raise ValueError("projection window must contain the support")
    total = f.integral()
    c0 = total * (Fraction(f.fp.q) ** wl)
    refined = f.refined(support_level=wl)
    return TestFunction(
        f.fp,
        wl,
        refined.constancy_level,
        {d: v - c0 for d, v in refined.values.items()},
    )
