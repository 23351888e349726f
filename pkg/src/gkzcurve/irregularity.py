"""Slopes, the published dimension tables, solution bases and Gevrey diagnostics.

Everything here is stated along the singular support Y = (x_n = 0) and its
stratification by Z = (x_{n-1} = 0).  Queries the covered results do not
answer return a NotCovered value instead of a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .curves import CurveError, CurveKind, CurveMatrix, semigroup_member
from .exponents import polynomial_exponent_index
from .series import (
    FormalSeries,
    SubstitutionResult,
    exponent_series,
    gamma_series,
    generic_exponent_base,
    inverse_contiguity,
    substitute_x0,
    witness_series,
)
from .weyl import TrustedSeries, annihilation_report, named_generators


class SlopeTooSmallError(CurveError):
    """No Gevrey-quotient classes below the slope for non-natural parameters."""


class InsufficientDataError(CurveError):
    """Too few coefficients for a growth-rate fit."""


class PointClass(Enum):
    GENERIC = "generic"            # points off Y
    SMOOTH_STRATUM = "smooth"      # Y minus Y * Z
    DEEP_STRATUM = "deep"          # Y * Z


class SheafKind(Enum):
    HOLOMORPHIC = "holomorphic"            # O_{X|Y}
    GEVREY_FORMAL = "gevrey_formal"        # order-s formal series along Y
    GEVREY_QUOTIENT = "gevrey_quotient"    # order-s series modulo convergent


@dataclass(frozen=True)
class SheafTag:
    kind: SheafKind
    order: Fraction | None = None      # None encodes s = infinity

    def __post_init__(self):
        if self.kind is SheafKind.HOLOMORPHIC:
            assert self.order is None
        elif self.order is not None:
            assert self.order >= 1

    @classmethod
    def holomorphic(cls) -> "SheafTag":
        return cls(SheafKind.HOLOMORPHIC)

    @classmethod
    def formal(cls, s) -> "SheafTag":
        return cls(SheafKind.GEVREY_FORMAL, None if s is None else Fraction(s))

    @classmethod
    def quotient(cls, s) -> "SheafTag":
        return cls(SheafKind.GEVREY_QUOTIENT, None if s is None else Fraction(s))

    def order_at_least(self, bound: Fraction) -> bool:
        return self.order is None or self.order >= bound


@dataclass(frozen=True)
class DimensionAnswer:
    """A germ dimension, or None when the published results do not cover the query."""

    value: int | None

    @property
    def covered(self) -> bool:
        return self.value is not None

    @classmethod
    def of(cls, value: int) -> "DimensionAnswer":
        return cls(value)

    @classmethod
    def not_covered(cls) -> "DimensionAnswer":
        return cls(None)


def slope(A: CurveMatrix) -> Fraction:
    """The unique slope a_n / a_{n-1} of the system along its singular support."""
    return Fraction(A.entries[-1], A.entries[-2])


def _is_natural(beta) -> bool:
    beta = Fraction(beta)
    return beta.denominator == 1 and beta >= 0


def irregularity_dimension(A: CurveMatrix, beta, point: PointClass,
                           sheaf: SheafTag, degree: int) -> DimensionAnswer:
    """Dimension of the Ext^degree germ of the system with values in the sheaf,
    at a point of the given stratum.

    Gevrey-quotient values hold for both matrix kinds; the holomorphic and
    formal rows are published for smooth matrices only.  All three sheaves are
    supported on Y, so germs at generic points vanish."""
    if degree < 0:
        raise CurveError("Ext degree must be nonnegative")
    sigma = slope(A)
    if point is PointClass.GENERIC:
        return DimensionAnswer.of(0)

    if sheaf.kind is SheafKind.GEVREY_QUOTIENT:
        if degree >= 1:
            return DimensionAnswer.of(0)
        if point is PointClass.DEEP_STRATUM:
            return DimensionAnswer.of(0)
        if not sheaf.order_at_least(sigma):
            return DimensionAnswer.of(0)
        return DimensionAnswer.of(A.entries[-2])

    if A.kind is CurveKind.GENERAL:
        return DimensionAnswer.not_covered()
    natural = _is_natural(beta)

    if sheaf.kind is SheafKind.HOLOMORPHIC:
        if not natural:
            return DimensionAnswer.of(0)
        return DimensionAnswer.of(1 if degree in (0, 1) else 0)

    # formal Gevrey series of order s
    if sheaf.order_at_least(sigma):
        if degree == 0:
            if point is PointClass.SMOOTH_STRATUM:
                return DimensionAnswer.of(A.entries[-2])
            return DimensionAnswer.of(1 if natural else 0)
        if degree == 1:
            if point is PointClass.DEEP_STRATUM:
                return DimensionAnswer.of(1 if natural else 0)
            return DimensionAnswer.of(0)
        return DimensionAnswer.not_covered()
    if point is PointClass.SMOOTH_STRATUM and degree == 0:
        return DimensionAnswer.of(1 if natural else 0)
    return DimensionAnswer.not_covered()


# ---------------------------------------------------------------------------
# Solution bases


@dataclass(frozen=True)
class BasisMember:
    series: FormalSeries
    label: str
    exponent: tuple[Fraction, ...]
    is_solution: bool              # False only for the witness series
    defect_generator: str | None   # generator name the witness fails on
    caveats: tuple[str, ...] = ()


def _witness_defect_name(A: CurveMatrix) -> str:
    return f"toric[{A.n - 1}]"


def _smooth_singular_basis(A, beta, s, level, max_terms) -> list[BasisMember]:
    sigma = slope(A)
    q = polynomial_exponent_index(A, beta)
    s_frac = None if s is None else Fraction(s)
    below = s_frac is not None and s_frac < sigma
    if below:
        if q is None:
            raise SlopeTooSmallError(
                f"no classes of order {s} < slope {sigma} for beta = {beta}")
        poly = exponent_series(A, beta, q, level, max_terms=max_terms)
        return [BasisMember(poly, f"exponent[{q}]", poly.base, True, None)]
    out = []
    for j in range(A.entries[A.n - 2]):
        if j == q:
            continue
        ser = exponent_series(A, beta, j, level, max_terms=max_terms)
        out.append(BasisMember(ser, f"exponent[{j}]", ser.base, True, None))
    if q is not None:
        wit = witness_series(A, beta, level, max_terms=max_terms)
        out.append(BasisMember(wit, "witness", wit.base, False,
                               _witness_defect_name(A)))
    return out


def _smooth_generic_basis(A, beta, level, max_terms) -> list[BasisMember]:
    out = []
    for j in range(A.entries[-1]):
        base = generic_exponent_base(A, beta, j)
        ser = gamma_series(A, base, level, max_terms=max_terms)
        out.append(BasisMember(ser, f"generic[{j}]", base, True, None))
    return out


def _substituted(A, member: BasisMember, caveat=()) -> BasisMember:
    sub: SubstitutionResult = substitute_x0(member.series, A)
    return BasisMember(sub.series, member.label + "|x0=0", sub.series.base,
                       member.is_solution, member.defect_generator,
                       member.caveats + tuple(caveat))


def _general_basis(A, beta, point, s, level, max_terms) -> list[BasisMember]:
    aux = A.auxiliary()
    beta = Fraction(beta)
    natural_gap = (beta.denominator == 1 and beta >= 0
                   and not semigroup_member(A, int(beta)))
    if not natural_gap:
        if point is PointClass.GENERIC:
            members = _smooth_generic_basis(aux, beta, level, max_terms)
        else:
            members = _smooth_singular_basis(aux, beta, s, level, max_terms)
        return [_substituted(A, m) for m in members]

    # beta in N \ NA: the direct substitution vanishes on the polynomial slot.
    # Build the basis at beta' = beta - t*a_n < 0 and divide by d_n^t, which is
    # an isomorphism of the solution spaces (both parameters are integers
    # outside the semigroup).  No falling factor of the division can vanish: a
    # zero factor would force beta = sum a_i m_i + (t-k) a_n with nonnegative
    # coefficients, putting beta in the semigroup and contradicting the gap
    # hypothesis that selected this route.
    t = int(beta) // A.entries[-1] + 1
    w = tuple(0 if i < A.n - 1 else t for i in range(A.n))
    shifted = beta - A.entries[-1] * t
    assert shifted < 0
    if point is PointClass.GENERIC:
        members = _smooth_generic_basis(aux, shifted, level, max_terms)
    else:
        members = _smooth_singular_basis(aux, shifted, s, level, max_terms)
    out = []
    note = (f"parameter reached through beta'={shifted} and division by d_n^{t}",)
    for m in members:
        sub = _substituted(A, m)
        lifted = inverse_contiguity(TrustedSeries.from_series(sub.series), w)
        out.append(BasisMember(lifted.series, sub.label + f"*d^-{t}",
                               lifted.series.base, sub.is_solution,
                               sub.defect_generator, sub.caveats + note))
    return out


def solution_basis(A: CurveMatrix, beta, point: PointClass, s=None,
                   level: int = 12, max_terms: int | None = None) -> list[BasisMember]:
    """Basis series for the solution space selected by the point class.

    Smooth stratum, s >= slope: the Gevrey-quotient basis; for natural beta the
    polynomial exponent is replaced by the witness series, which fails exactly
    the toric generator d_1^{a_{n-1}} - d_{n-1}.  Smooth stratum, s < slope:
    only the polynomial class survives (natural beta), otherwise the space is
    empty and SlopeTooSmallError is raised.  Deep stratum: the space is zero.
    Generic points: the a_n holomorphic solution series.  General matrices are
    routed through the auxiliary smooth matrix and the x_0 = 0 substitution.
    """
    if point is PointClass.DEEP_STRATUM:
        return []
    if not A.is_smooth:
        return _general_basis(A, beta, point, s, level, max_terms)
    if point is PointClass.GENERIC:
        return _smooth_generic_basis(A, beta, level, max_terms)
    return _smooth_singular_basis(A, beta, s, level, max_terms)


def verify_basis(A: CurveMatrix, members, beta, ball_radius: int = 3):
    """Annihilation reports for every basis member against the checking set.

    Solutions are checked against the full set; the witness is checked against
    everything except its defect generator.  Returns a list of
    (member, AnnihilationReport) pairs."""
    gens = named_generators(A, beta, ball_radius)
    out = []
    for m in members:
        if m.is_solution:
            subset = gens
        else:
            subset = [(name, op) for name, op in gens
                      if name != m.defect_generator and not name.startswith("box")]
        out.append((m, annihilation_report(subset, m.series)))
    return out


# ---------------------------------------------------------------------------
# Monodromy and Gevrey diagnostics


def monodromy_rotations(A: CurveMatrix, beta) -> list[Fraction]:
    """Rotation numbers (beta - k)/a_{n-1} mod 1, k = 0..a_{n-1}-1, of the
    monodromy of the quotient-class basis around x_{n-1} = 0; contains 0
    exactly once when beta is an integer."""
    beta = Fraction(beta)
    a_pen = A.entries[A.n - 2]
    out = []
    for k in range(a_pen):
        r = Fraction(beta - k, a_pen)
        out.append(r - math.floor(r))
    return sorted(out)


def gevrey_rescale(series: FormalSeries, s, axis: int):
    """Coefficients with the axis-exponent factorial raised to 1 - s, as floats.

    Diagnostic only: order-s series become convergent.  Returns (offset, float)
    pairs in sorted offset order."""
    s = float(s)
    out = []
    for off, c in series.sorted_terms():
        i = float(series.base[axis] + off[axis])
        try:
            factor = math.gamma(i + 1.0) ** (1.0 - s)
        except ValueError:
            factor = 0.0        # gamma pole: infinite factorial, killed for s > 1
        out.append((off, float(c) * factor))
    return out


def slope_subseries(A: CurveMatrix, beta, which, count: int = 200):
    """Exact coefficient stream of the one-variable subsum along the ray
    (0, ..., 0, a_n, a_{n-1}) of the kernel coordinates, indexed by the
    x_n-exponent k.

    which = "witness": c_m = (-1)^{a_n m} (a_n m)! / (a_{n-1} m)! at k = a_{n-1} m.
    which = ("exponent", j): c_m = ((beta-j)/a_{n-1})_{a_n m} / (a_{n-1} m)!
    (falling factorial), defined when (beta-j)/a_{n-1} is not a natural number.

    Both streams realize the Gevrey index a_n/a_{n-1}.  Returns a list of
    (k, Fraction) pairs.
    """
    a_pen, a_top = A.entries[-2], A.entries[-1]
    out = []
    if which == "witness":
        for m in range(count):
            c = Fraction((-1) ** (a_top * m) * math.factorial(a_top * m),
                         math.factorial(a_pen * m))
            out.append((a_pen * m, c))
        return out
    kind, j = which
    if kind != "exponent":
        raise CurveError(f"unknown subseries selector {which!r}")
    theta = Fraction(Fraction(beta) - j, a_pen)
    if theta.denominator == 1 and theta >= 0:
        raise CurveError("the exponent-ray stream terminates for the polynomial slot")
    for m in range(count):
        num = Fraction(1)
        for i in range(a_top * m):
            num *= theta - i
        out.append((a_pen * m, num / math.factorial(a_pen * m)))
    return out


def _log_abs(c: Fraction) -> float:
    """log |c| for possibly huge exact rationals."""

    def log_int(n: int) -> float:
        bits = n.bit_length()
        if bits <= 512:
            return math.log(n)
        shift = bits - 512
        return math.log(n >> shift) + shift * math.log(2)

    return log_int(abs(c.numerator)) - log_int(c.denominator)


def gevrey_index_estimate(stream, window: int | None = None) -> float:
    """Least-squares Gevrey-order fit of a coefficient stream.

    Fits log|c_k| = (s - 1) * lgamma(k + 1) + C*k + D over the nonzero entries
    (top half by default) and returns max(s, 1): the Gevrey index is at least 1,
    so convergent streams report 1.  Raises InsufficientDataError below 16
    nonzero coefficients."""
    points = [(k, c) for k, c in stream if c != 0]
    if len(points) < 16:
        raise InsufficientDataError(f"{len(points)} nonzero coefficients < 16")
    points.sort()
    if window is None:
        window = len(points) // 2
    points = points[-window:]
    rows = np.array([[math.lgamma(k + 1.0), float(k), 1.0] for k, _ in points])
    rhs = np.array([_log_abs(c) for _, c in points])
    coeffs, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    return max(1.0, 1.0 + float(coeffs[0]))


# ---------------------------------------------------------------------------
# The published dimension table


_TABLE_SHEAVES = (SheafKind.HOLOMORPHIC, SheafKind.GEVREY_FORMAL, SheafKind.GEVREY_QUOTIENT)
_TABLE_POINTS = (PointClass.DEEP_STRATUM, PointClass.SMOOTH_STRATUM)


def stratum_dimension_table(A: CurveMatrix, beta_special, beta_generic, s) -> dict:
    """The 24 germ dimensions at a natural and a non-natural parameter, for the
    three sheaves, both strata of Y, and Ext degrees 0 and 1 (s >= slope).

    Keys are (sheaf kind value, beta label, point value, degree)."""
    if not _is_natural(beta_special):
        raise CurveError(f"beta_special = {beta_special} is not a natural number")
    if _is_natural(beta_generic):
        raise CurveError(f"beta_generic = {beta_generic} must not be natural")
    if not (s is None or Fraction(s) >= slope(A)):
        raise CurveError(f"s = {s} is below the slope {slope(A)}")
    out = {}
    for kind in _TABLE_SHEAVES:
        tag = SheafTag.holomorphic() if kind is SheafKind.HOLOMORPHIC \
            else SheafTag(kind, None if s is None else Fraction(s))
        for blabel, beta in (("special", beta_special), ("generic", beta_generic)):
            for point in _TABLE_POINTS:
                for degree in (0, 1):
                    ans = irregularity_dimension(A, beta, point, tag, degree)
                    assert ans.covered
                    out[(kind.value, blabel, point.value, degree)] = ans.value
    return out


def reference_dimension_table(A: CurveMatrix) -> dict:
    """The published table, hard-coded with a_{n-1} as the only free entry."""
    a = A.entries[A.n - 2]
    rows = {
        ("holomorphic", "special"): {("deep", 0): 1, ("smooth", 0): 1,
                                     ("deep", 1): 1, ("smooth", 1): 1},
        ("holomorphic", "generic"): {("deep", 0): 0, ("smooth", 0): 0,
                                     ("deep", 1): 0, ("smooth", 1): 0},
        ("gevrey_formal", "special"): {("deep", 0): 1, ("smooth", 0): a,
                                       ("deep", 1): 1, ("smooth", 1): 0},
        ("gevrey_formal", "generic"): {("deep", 0): 0, ("smooth", 0): a,
                                       ("deep", 1): 0, ("smooth", 1): 0},
        ("gevrey_quotient", "special"): {("deep", 0): 0, ("smooth", 0): a,
                                         ("deep", 1): 0, ("smooth", 1): 0},
        ("gevrey_quotient", "generic"): {("deep", 0): 0, ("smooth", 0): a,
                                         ("deep", 1): 0, ("smooth", 1): 0},
    }
    out = {}
    for (sheaf, blabel), cells in rows.items():
        for (point, degree), value in cells.items():
            out[(sheaf, blabel, point, degree)] = value
    return out


def dimension_table_diff(A: CurveMatrix, beta_special, beta_generic, s) -> dict:
    """Cells where the computed table deviates from the published one (empty on
    success): key -> (computed, expected)."""
    computed = stratum_dimension_table(A, beta_special, beta_generic, s)
    expected = reference_dimension_table(A)
    return {k: (computed[k], expected[k])
            for k in expected if computed[k] != expected[k]}
