"""Exact scalar ring Q + Q*ln(q) (+ Q/ln(q)), tagged exact/float values,
and closed-form geometric tail sums.

Every formula in the package is built from factors q**(a*k) and ln(q); the
exact path keeps ln(q) symbolic so that identities whose ln(q) factors
cancel (the log-kernel normalizations) can be verified by exact rational
cancellation.  Arithmetic that mixes an exact value with a float, or that
leaves the ring, demotes to a float; demotion is visible through
``NumericValue.is_exact`` so tests can assert which path ran.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DivergentSeriesError, ExactnessLost
from .field import FieldParams

DEFAULT_REL_TOL = 1e-10


def as_fraction(x) -> Fraction:
    """Exact conversion to Fraction; floats convert via their binary expansion."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"cannot convert {x} to a rational")
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def _integer_root(base: int, k: int) -> int | None:
    """Integer r with r**k == base, or None."""
    if k == 1:
        return base
    if base < 1:
        return None
    guess = round(base ** (1.0 / k))
    for r in range(max(1, guess - 2), guess + 3):
        if r**k == base:
            return r
    return None


@dataclass(frozen=True)
class ExactScalar:
    """Element a + b*ln(logbase) + c/ln(logbase) with rational coefficients.

    ``logbase`` is None exactly when b == c == 0 (a plain rational); the
    extra 1/ln(q) coefficient carries normalizers like (1-q)/(q*ln q) so
    that products with ln(q)-multiples cancel exactly.
    """

    a: Fraction
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    logbase: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))
        object.__setattr__(self, "c", as_fraction(self.c))
        if self.b == 0 and self.c == 0:
            object.__setattr__(self, "logbase", None)
        elif self.logbase is None or self.logbase < 2:
            raise ValueError("log terms need a logbase >= 2")

    @classmethod
    def rational(cls, x) -> "ExactScalar":
        return cls(as_fraction(x))

    @classmethod
    def ln_q(cls, fp: FieldParams, coeff=1) -> "ExactScalar":
        return cls(Fraction(0), as_fraction(coeff), Fraction(0), fp.q)

    @classmethod
    def inv_ln_q(cls, fp: FieldParams, coeff=1) -> "ExactScalar":
        return cls(Fraction(0), Fraction(0), as_fraction(coeff), fp.q)

    @property
    def is_rational(self) -> bool:
        return self.b == 0 and self.c == 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0

    def _merged_base(self, other: "ExactScalar") -> int | None:
        if self.logbase is None:
            return other.logbase
        if other.logbase is None or other.logbase == self.logbase:
            return self.logbase
        raise ExactnessLost(
            f"mixed log bases {self.logbase} and {other.logbase} in exact arithmetic"
        )

    def __add__(self, other: "ExactScalar") -> "ExactScalar":
        base = self._merged_base(other)
        return ExactScalar(self.a + other.a, self.b + other.b, self.c + other.c, base)

    def __sub__(self, other: "ExactScalar") -> "ExactScalar":
        return self + (-other)

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(-self.a, -self.b, -self.c, self.logbase)

    def __mul__(self, other: "ExactScalar") -> "ExactScalar":
        base = self._merged_base(other)
        if self.b * other.b != 0 or self.c * other.c != 0:
            raise ExactnessLost("product leaves the ring Q + Q*ln q + Q/ln q")
        a = self.a * other.a + self.b * other.c + self.c * other.b
        b = self.a * other.b + self.b * other.a
        c = self.a * other.c + self.c * other.a
        return ExactScalar(a, b, c, base)

    def __truediv__(self, other: "ExactScalar") -> "ExactScalar":
        if other.is_zero():
            raise ZeroDivisionError("exact division by zero")
        if other.is_rational:
            inv = 1 / other.a
            return ExactScalar(self.a * inv, self.b * inv, self.c * inv, self.logbase)
        base = self._merged_base(other)
        # ratios of pure log (or pure 1/log) multiples are rational
        if other.a == 0 and other.c == 0 and self.a == 0 and self.c == 0:
            return ExactScalar(self.b / other.b)
        if other.a == 0 and other.b == 0 and self.a == 0 and self.b == 0:
            return ExactScalar(self.c / other.c)
        if other.a == 0 and other.c == 0 and self.b == 0 and self.c == 0:
            return ExactScalar(Fraction(0), Fraction(0), self.a / other.b, base)
        raise ExactnessLost("quotient leaves the ring Q + Q*ln q + Q/ln q")

    def evaluate(self) -> float:
        if self.logbase is None:
            return float(self.a)
        ln = math.log(self.logbase)
        return float(self.a) + float(self.b) * ln + float(self.c) / ln

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.a)
        parts = []
        if self.a != 0:
            parts.append(str(self.a))
        if self.b != 0:
            parts.append(f"{self.b}*ln({self.logbase})")
        if self.c != 0:
            parts.append(f"{self.c}/ln({self.logbase})")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class NumericValue:
    """Tagged union Exact(ExactScalar) | Float(double).

    Exactly one of ``exact``/``approx`` is set.  Arithmetic stays exact when
    both operands are exact and the result is representable; otherwise the
    value demotes to a float, which is observable via ``is_exact``.
    """

    exact: ExactScalar | None
    approx: float | None = None

    def __post_init__(self) -> None:
        if (self.exact is None) == (self.approx is None):
            raise ValueError("NumericValue needs exactly one of exact/approx")

    @classmethod
    def from_exact(cls, es: ExactScalar) -> "NumericValue":
        return cls(es, None)

    @classmethod
    def from_rational(cls, x) -> "NumericValue":
        return cls(ExactScalar.rational(x), None)

    @classmethod
    def from_float(cls, x: float) -> "NumericValue":
        return cls(None, float(x))

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def is_exact_zero(self) -> bool:
        return self.exact is not None and self.exact.is_zero()

    def __float__(self) -> float:
        return self.exact.evaluate() if self.exact is not None else self.approx  # type: ignore[return-value]

    @staticmethod
    def _coerce(x) -> "NumericValue":
        if isinstance(x, NumericValue):
            return x
        if isinstance(x, ExactScalar):
            return NumericValue.from_exact(x)
        if isinstance(x, (int, Fraction)):
            return NumericValue.from_rational(x)
        if isinstance(x, float):
            return NumericValue.from_float(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to NumericValue")

    def _binary(self, other, exact_op, float_op) -> "NumericValue":
        other = self._coerce(other)
        if self.exact is not None and other.exact is not None:
            try:
                return NumericValue.from_exact(exact_op(self.exact, other.exact))
            except ExactnessLost:
                pass
        return NumericValue.from_float(float_op(float(self), float(other)))

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_exact_zero():
            return other
        if other.is_exact_zero():
            return self
        return self._binary(other, lambda a, b: a + b, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __mul__(self, other):
        other = self._coerce(other)
        # exact zero absorbs: keeps structural zeros exact through float factors
        if self.is_exact_zero() or other.is_exact_zero():
            return NV_ZERO
        return self._binary(other, lambda a, b: a * b, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def __neg__(self):
        if self.exact is not None:
            return NumericValue.from_exact(-self.exact)
        return NumericValue.from_float(-self.approx)  # type: ignore[arg-type]

    def pow_int(self, k: int) -> "NumericValue":
        if self.exact is not None:
            if k == 0:
                return NumericValue.from_rational(1)
            if k == 1:
                return self
            if self.exact.is_rational:
                return NumericValue.from_rational(self.exact.a**k)
        return NumericValue.from_float(float(self) ** k)

    def __str__(self) -> str:
        if self.exact is not None:
            return str(self.exact)
        return repr(self.approx)


NV_ZERO = NumericValue.from_rational(0)
NV_ONE = NumericValue.from_rational(1)


def q_pow(fp: FieldParams, exponent) -> NumericValue:
    """q**exponent; exact rational whenever q is a perfect power matching the denominator."""
    e = as_fraction(exponent)
    if e == 0:
        return NV_ONE
    root = _integer_root(fp.q, e.denominator)
    if root is not None:
        return NumericValue.from_rational(Fraction(root) ** e.numerator)
    return NumericValue.from_float(float(fp.q) ** float(e))


def q_power(fp: FieldParams, alpha, k: int) -> NumericValue:
    """q**(alpha*k), exact when that power of q is rational."""
    return q_pow(fp, as_fraction(alpha) * k)


def geometric_tail(fp: FieldParams, s, j0: int) -> NumericValue:
    """Sum over j >= j0 of q**(-s*j), s > 0, in closed form."""
    s = as_fraction(s)
    if s <= 0:
        raise DivergentSeriesError(f"geometric tail needs s > 0, got {s}")
    x = q_pow(fp, -s)
    return x.pow_int(j0) / (NV_ONE - x)


def weighted_geometric_tail(fp: FieldParams, s, j0: int) -> NumericValue:
    """Sum over j >= j0 of j * q**(-s*j), s > 0, in closed form."""
    s = as_fraction(s)
    if s <= 0:
        raise DivergentSeriesError(f"weighted geometric tail needs s > 0, got {s}")
    x = q_pow(fp, -s)
    one_minus = NV_ONE - x
    return x.pow_int(j0) * (NumericValue.from_rational(j0) - (j0 - 1) * x) / (one_minus * one_minus)


@dataclass(frozen=True)
class ComplexValue:
    """Complex value with independently tracked exact/float real and imaginary parts."""

    re: NumericValue
    im: NumericValue

    @classmethod
    def zero(cls) -> "ComplexValue":
        return cls(NV_ZERO, NV_ZERO)

    @classmethod
    def one(cls) -> "ComplexValue":
        return cls(NV_ONE, NV_ZERO)

    @classmethod
    def from_rational(cls, re, im=0) -> "ComplexValue":
        return cls(NumericValue.from_rational(re), NumericValue.from_rational(im))

    @classmethod
    def from_numeric(cls, nv) -> "ComplexValue":
        return cls(NumericValue._coerce(nv), NV_ZERO)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexValue":
        return cls(NumericValue.from_float(z.real), NumericValue.from_float(z.imag))

    @property
    def is_exact(self) -> bool:
        return self.re.is_exact and self.im.is_exact

    def is_exact_zero(self) -> bool:
        return self.re.is_exact_zero() and self.im.is_exact_zero()

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> float:
        return abs(self.to_complex())

    @staticmethod
    def _coerce(x) -> "ComplexValue":
        if isinstance(x, ComplexValue):
            return x
        if isinstance(x, complex):
            return ComplexValue.from_complex(x)
        return ComplexValue(NumericValue._coerce(x), NV_ZERO)

    def __add__(self, other):
        other = self._coerce(other)
        return ComplexValue(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return ComplexValue(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __neg__(self):
        return ComplexValue(-self.re, -self.im)

    def __mul__(self, other):
        other = self._coerce(other)
        return ComplexValue(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = NumericValue._coerce(other)
        return ComplexValue(self.re / other, self.im / other)

    def conj(self) -> "ComplexValue":
        return ComplexValue(self.re, -self.im)

    def __str__(self) -> str:
        return f"({self.re}) + ({self.im})i"


CV_ZERO = ComplexValue.zero()
