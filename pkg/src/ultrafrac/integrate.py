"""Exact closed-form Haar integrals, the radial-times-locally-constant
quadrature engine, and brute-force oracles validating every closed form.

All infinite shell sums are evaluated through the closed geometric forms in
:mod:`ultrafrac.numerics`; the oracles are the only place truncation occurs
and they always report their analytic tail bound separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import (
    DivergentIntegralError,
    RegionMismatchError,
    UnsupportedIntegrandError,
)
from .field import (
    FieldParams,
    Point,
    abs_exponent,
    point,
    sphere_coset_reps,
    zero_point,
)
from .functions import ExtendedFunction, TestFunction, _as_extended, tail_log_coeff, tail_power_terms
from .numerics import (
    CV_ZERO,
    NV_ZERO,
    ComplexValue,
    ExactScalar,
    NumericValue,
    as_fraction,
    geometric_tail,
    q_pow,
    weighted_geometric_tail,
)

# ---------------------------------------------------------------------------
# radial profiles and regions


class RadialProfile:
    """Marker base class for radial integrand factors."""


@dataclass(frozen=True)
class PowerProfile(RadialProfile):
    """|x|**exponent; integrable over a ball iff exponent > -1."""

    exponent: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponent", as_fraction(self.exponent))


@dataclass(frozen=True)
class LogProfile(RadialProfile):
    """ln|x|."""


@dataclass(frozen=True)
class ShiftedProfile(RadialProfile):
    """base profile of |x - shift|."""

    base: RadialProfile
    shift: Point


@dataclass(frozen=True)
class Region:
    """Contiguous range of sphere levels [lo, hi]; None means unbounded.

    ``lo`` is the smallest included level (None: arbitrarily large absolute
    value), ``hi`` the largest (None: down to zero, i.e. a full ball).
    """

    lo: int | None
    hi: int | None

    @classmethod
    def everything(cls) -> "Region":
        return cls(None, None)

    @classmethod
    def ball(cls, level: int) -> "Region":
        return cls(level, None)

    @classmethod
    def sphere(cls, level: int) -> "Region":
        return cls(level, level)

    @classmethod
    def outside(cls, level: int) -> "Region":
        """{x : |x| >= q**(-level)}."""
        return cls(None, level)


def _sphere_measure(fp: FieldParams, level: int) -> Fraction:
    return (1 - Fraction(1, fp.q)) * Fraction(fp.q) ** (-level)


def profile_value(fp: FieldParams, profile: RadialProfile, e: int) -> NumericValue:
    """Profile value at |x| = q**e."""
    if isinstance(profile, PowerProfile):
        return q_pow(fp, profile.exponent * e)
    if isinstance(profile, LogProfile):
        return NumericValue.from_exact(ExactScalar.ln_q(fp, e))
    raise TypeError(f"not a radial profile: {profile!r}")


# ---------------------------------------------------------------------------
# closed forms


def power_over_ball(fp: FieldParams, alpha, radius_exp: int) -> NumericValue:
    """Integral of |x|**(alpha-1) over {|x| <= q**radius_exp}, alpha > 0."""
    a = as_fraction(alpha)
    if a <= 0:
        raise DivergentIntegralError(f"power integral over a ball needs alpha > 0, got {a}")
    one_minus = NumericValue.from_rational(1 - Fraction(1, fp.q))
    return one_minus / (1 - q_pow(fp, -a)) * q_pow(fp, a * radius_exp)


def shifted_power_over_sphere(fp: FieldParams, alpha, radius_exp: int, a_abs_exp: int | None = None) -> NumericValue:
    """Integral of |x - a|**(alpha-1) over {|x| = q**radius_exp} with |a| = q**radius_exp."""
    a = as_fraction(alpha)
    if a <= 0:
        raise DivergentIntegralError(f"shifted power integral needs alpha > 0, got {a}")
    if a_abs_exp is not None and a_abs_exp != radius_exp:
        raise RegionMismatchError(
            f"|a| = q**{a_abs_exp} does not match the sphere radius q**{radius_exp}"
        )
    q = fp.q
    coeff = (q - 2 + q_pow(fp, -a)) / (q * (1 - q_pow(fp, -a)))
    return coeff * q_pow(fp, a * radius_exp)


def log_over_ball(fp: FieldParams, radius_exp: int) -> NumericValue:
    """Integral of ln|x| over {|x| <= q**radius_exp}; exact in Q*ln(q)."""
    coeff = (radius_exp - Fraction(1, fp.q - 1)) * Fraction(fp.q) ** radius_exp
    return NumericValue.from_exact(ExactScalar.ln_q(fp, coeff))


def shifted_log_over_sphere(fp: FieldParams, radius_exp: int, a_abs_exp: int | None = None) -> NumericValue:
    """Integral of ln|x - a| over {|x| = q**radius_exp} with |a| = q**radius_exp."""
    if a_abs_exp is not None and a_abs_exp != radius_exp:
        raise RegionMismatchError(
            f"|a| = q**{a_abs_exp} does not match the sphere radius q**{radius_exp}"
        )
    q = fp.q
    coeff = ((1 - Fraction(1, q)) * radius_exp - Fraction(1, q - 1)) * Fraction(q) ** radius_exp
    return NumericValue.from_exact(ExactScalar.ln_q(fp, coeff))


def ball_profile_integral(fp: FieldParams, profile: RadialProfile, radius_exp: int) -> NumericValue:
    """Integral of a radial profile over {|x| <= q**radius_exp}."""
    if isinstance(profile, PowerProfile):
        return power_over_ball(fp, profile.exponent + 1, radius_exp)
    if isinstance(profile, LogProfile):
        return log_over_ball(fp, radius_exp)
    raise TypeError(f"not a centered radial profile: {profile!r}")


def profile_coset_integral(fp: FieldParams, profile: RadialProfile, rel_exp: int | None, level: int) -> NumericValue:
    """Integral of profile(|x - c|) over a level-``level`` ball at distance q**rel_exp from c.

    ``rel_exp`` is the absolute-value exponent of (representative - c), None
    when the singular point c lies inside the ball.
    """
    if rel_exp is not None and rel_exp > -level:
        return profile_value(fp, profile, rel_exp) * Fraction(fp.q) ** (-level)
    return ball_profile_integral(fp, profile, -level)


# ---------------------------------------------------------------------------
# the quadrature workhorse


def translate_extended(f: ExtendedFunction, a: Point) -> ExtendedFunction:
    """The core-plus-tail function t -> f(a + t)."""
    e = abs_exponent(f.fp, a)
    window = f.window_level if e is None else min(f.window_level, -e)
    k = f.constancy_level
    from .field import digits_to_point, enumerate_digits

    table = {
        d: f.evaluate(a + digits_to_point(f.fp, d, window))
        for d in enumerate_digits(f.fp, window, k)
    }
    return ExtendedFunction(TestFunction(f.fp, window, k, table), f.tail)


def _closed_far_sum(fp: FieldParams, profile: RadialProfile, f: ExtendedFunction, j_hi: int) -> ComplexValue:
    """Sum of profile * f over all shells j <= j_hi, where f is in tail regime."""
    one_minus = 1 - Fraction(1, fp.q)
    total = CV_ZERO
    ln_q = NumericValue.from_exact(ExactScalar.ln_q(fp))
    power_terms = tail_power_terms(f.tail)
    log_coeff = tail_log_coeff(f.tail)

    if isinstance(profile, PowerProfile):
        for s_t, c in power_terms:
            sigma = profile.exponent + s_t + 1
            if sigma >= 0:
                raise DivergentIntegralError(
                    f"far shells of |x|**{profile.exponent} against a |x|**{s_t} tail diverge"
                )
            total = total + c * (one_minus * geometric_tail(fp, -sigma, -j_hi))
        if not log_coeff.is_exact_zero():
            sigma = profile.exponent + 1
            if sigma >= 0:
                raise DivergentIntegralError(
                    f"far shells of |x|**{profile.exponent} against a log tail diverge"
                )
            total = total + log_coeff * (
                one_minus * ln_q * weighted_geometric_tail(fp, -sigma, -j_hi)
            )
        return total

    if isinstance(profile, LogProfile):
        for s_t, c in power_terms:
            sigma = s_t + 1
            if sigma >= 0:
                raise DivergentIntegralError(
                    f"far shells of ln|x| against a |x|**{s_t} tail diverge"
                )
            total = total + c * (one_minus * ln_q * weighted_geometric_tail(fp, -sigma, -j_hi))
        if not log_coeff.is_exact_zero():
            raise UnsupportedIntegrandError("ln|x| against a log tail has no closed form here")
        return total

    raise TypeError(f"not a centered radial profile: {profile!r}")


def integrate_product(profile: RadialProfile, f, region: Region | None = None) -> ComplexValue:
    """Exact integral of profile(x) * f(x) over a shell-range region.

    Decomposes the region into shells where f is constant, applies the
    closed ball/sphere forms, and sums tails in closed form; divergence is
    detected structurally from the exponents, never by truncation.
    """
    fe = _as_extended(f)
    fp = fe.fp
    region = Region.everything() if region is None else region

    if isinstance(profile, ShiftedProfile):
        if region.lo is not None or region.hi is not None:
            raise UnsupportedIntegrandError(
                "shifted profiles are only supported over the whole field"
            )
        return integrate_product(profile.base, translate_extended(fe, profile.shift), region)

    window = fe.window_level
    k = fe.constancy_level
    total = CV_ZERO

    # far shells (f in tail regime): j <= min(window - 1, hi)
    tail_hi = window - 1 if region.hi is None else min(window - 1, region.hi)
    if region.lo is None:
        total = total + _closed_far_sum(fp, profile, fe, tail_hi)
    else:
        for j in range(region.lo, tail_hi + 1):
            val = fe.tail_value_at_exponent(-j)
            if val.is_exact_zero():
                continue
            total = total + val * (profile_value(fp, profile, -j) * _sphere_measure(fp, j))

    # window shells where f varies: coset sums at the constancy level
    w_lo = window if region.lo is None else max(window, region.lo)
    mid_hi = k - 1 if region.hi is None else min(k - 1, region.hi)
    coset_meas = Fraction(fp.q) ** (-k)
    for j in range(w_lo, mid_hi + 1):
        pv = profile_value(fp, profile, -j)
        for rep in sphere_coset_reps(fp, j, k):
            v = fe.core.evaluate(rep)
            if v.is_exact_zero():
                continue
            total = total + v * (pv * coset_meas)

    # shells at or beyond the constancy level: f is constant there
    deep_lo = max(w_lo, k)
    v0 = fe.core.evaluate(zero_point(fp))
    if not v0.is_exact_zero():
        if region.hi is None:
            total = total + v0 * ball_profile_integral(fp, profile, -deep_lo)
        else:
            for j in range(deep_lo, region.hi + 1):
                total = total + v0 * (profile_value(fp, profile, -j) * _sphere_measure(fp, j))
    return total


# ---------------------------------------------------------------------------
# oracles


@dataclass(frozen=True)
class OracleTailSpec:
    """Analytic bounds |integrand| <= coeff * |x|**exponent off the sampled shells."""

    inner: tuple[float, float] | None = None
    outer: tuple[float, float] | None = None


@dataclass(frozen=True)
class OracleResult:
    value: float
    tail_bound: float


def brute_force_oracle(
    fp: FieldParams,
    sampler: Callable[[Point], float],
    region: Region,
    resolution: int,
    tail_spec: OracleTailSpec | None = None,
) -> OracleResult:
    """Riemann-type coset sum at a fine level plus an analytic tail bound.

    Samples the integrand at canonical representatives of level-``resolution``
    cosets over the region's shells; parts of the region not covered by the
    sampled shells must be bounded through ``tail_spec``.
    """
    tail_spec = tail_spec or OracleTailSpec()
    q = fp.q
    lo = region.lo if region.lo is not None else -resolution
    hi = min(region.hi, resolution - 1) if region.hi is not None else resolution - 1
    meas = float(Fraction(q) ** (-resolution))

    value = 0.0
    for j in range(lo, hi + 1):
        for rep in sphere_coset_reps(fp, j, resolution):
            value += float(sampler(rep)) * meas

    bound = 0.0
    if region.hi is None:
        if tail_spec.inner is None:
            raise DivergentIntegralError("oracle needs an inner tail bound for a full ball")
        coeff, s = tail_spec.inner
        if s <= -1:
            raise DivergentIntegralError("inner tail bound must be integrable (s > -1)")
        bound += coeff * (1 - 1 / q) * float(geometric_tail(fp, as_fraction(s) + 1, resolution))
    if region.lo is None:
        if tail_spec.outer is None:
            raise DivergentIntegralError("oracle needs an outer tail bound for an unbounded region")
        coeff, s = tail_spec.outer
        if s >= -1:
            raise DivergentIntegralError("outer tail bound must be integrable (s < -1)")
        bound += coeff * (1 - 1 / q) * float(geometric_tail(fp, -(as_fraction(s) + 1), -(lo - 1)))
    return OracleResult(value, bound)


def _shifted_sphere_setup(fp: FieldParams, radius_exp: int):
    """Shift point a with |a| = q**radius_exp and the kept critical-shell cosets.

    The critical shell is |t| = q**radius_exp for t = x - a; a coset there
    belongs to the sphere {|x| = |a|} iff |rep + a| = |a|, checked exactly.
    """
    a_pt = point(fp, *([Fraction(fp.p) ** (-radius_exp)] + [0] * (fp.n - 1)))
    kept = [
        rep
        for rep in sphere_coset_reps(fp, -radius_exp, -radius_exp + 1)
        if abs_exponent(fp, rep + a_pt) == radius_exp
    ]
    return a_pt, kept


def oracle_power_over_ball(fp: FieldParams, alpha, radius_exp: int, depth: int = 40) -> NumericValue:
    """Shell-by-shell series for the power-over-ball integral, closed tail only."""
    a = as_fraction(alpha)
    if a <= 0:
        raise DivergentIntegralError(f"needs alpha > 0, got {a}")
    one_minus = 1 - Fraction(1, fp.q)
    total = NV_ZERO
    for lev in range(-radius_exp, -radius_exp + depth + 1):
        total = total + q_pow(fp, -a * lev) * one_minus
    return total + geometric_tail(fp, a, -radius_exp + depth + 1) * one_minus


def oracle_shifted_power_over_sphere(fp: FieldParams, alpha, radius_exp: int, depth: int = 40) -> NumericValue:
    """Series-plus-enumeration evaluation of the shifted power integral."""
    a = as_fraction(alpha)
    if a <= 0:
        raise DivergentIntegralError(f"needs alpha > 0, got {a}")
    _, kept = _shifted_sphere_setup(fp, radius_exp)
    coset_meas = Fraction(fp.q) ** (radius_exp - 1)
    total = q_pow(fp, (a - 1) * radius_exp) * (len(kept) * coset_meas)
    one_minus = 1 - Fraction(1, fp.q)
    for lev in range(-radius_exp + 1, -radius_exp + depth + 1):
        total = total + q_pow(fp, -a * lev) * one_minus
    return total + geometric_tail(fp, a, -radius_exp + depth + 1) * one_minus


def oracle_log_over_ball(fp: FieldParams, radius_exp: int, depth: int = 40) -> NumericValue:
    """Shell series for the log-over-ball integral; exact ln(q) coefficient."""
    one_minus = 1 - Fraction(1, fp.q)
    partial = Fraction(0)
    for lev in range(-radius_exp, -radius_exp + depth + 1):
        partial += (-lev) * Fraction(fp.q) ** (-lev)
    tail = weighted_geometric_tail(fp, 1, -radius_exp + depth + 1)
    ln_q = NumericValue.from_exact(ExactScalar.ln_q(fp))
    return (NumericValue.from_rational(partial) - tail) * one_minus * ln_q


def oracle_shifted_log_over_sphere(fp: FieldParams, radius_exp: int, depth: int = 40) -> NumericValue:
    """Series-plus-enumeration evaluation of the shifted log integral."""
    _, kept = _shifted_sphere_setup(fp, radius_exp)
    coset_meas = Fraction(fp.q) ** (radius_exp - 1)
    ln_q = NumericValue.from_exact(ExactScalar.ln_q(fp))
    total = ln_q * (radius_exp * len(kept) * coset_meas)
    one_minus = 1 - Fraction(1, fp.q)
    partial = Fraction(0)
    for lev in range(-radius_exp + 1, -radius_exp + depth + 1):
        partial += (-lev) * Fraction(fp.q) ** (-lev)
    tail = weighted_geometric_tail(fp, 1, -radius_exp + depth + 1)
    return total + (NumericValue.from_rational(partial) - tail) * one_minus * ln_q
