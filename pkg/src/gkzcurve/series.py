"""Gamma-series of a curve matrix: construction, supports and substitutions.

A formal series here is x^v * sum_u c_u x^u with a rational base exponent v,
integer offsets u, and exact rational coefficients.  Coefficients of the
Gamma-series come from the falling-factorial ratio

    Gamma[v; u] = (v)_{u_-} / ((v + u)_{u_+}),   (z)_a = prod_i prod_{j<a_i} (z_i - j),

which is declared 0 unless u preserves the negative support of v.  Truncation
is by the enumeration level sum |m_i| of the kernel coordinates of u, and every
series carries a support descriptor so that an operator application can decide,
offset by offset, whether all contributions were inside the stored window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .curves import (
    CurveError,
    CurveMatrix,
    DimensionMismatchError,
    LatticeBasis,
    lattice_basis,
    lattice_decompose,
    make_curve,
    semigroup_member,
)


class BetaNotNaturalError(CurveError):
    """The construction needs a natural-number parameter."""


class WrongAuxiliaryShapeError(CurveError):
    """Series/matrix pair does not match the auxiliary (1, a_1, ..., a_n) setup."""


class IndexOutOfRangeError(CurveError):
    """Exponent index j outside its allowed range."""


class TermLimitError(CurveError):
    """A construction exceeded the configured term budget."""


class ContiguityError(CurveError):
    """Formal division by a derivative hit a zero falling factorial."""


UNKNOWN = object()   # sentinel for "outside the certifiable window"


def negative_support(v) -> frozenset[int]:
    """Indices (0-based) where v has a negative integer entry."""
    out = set()
    for i, x in enumerate(v):
        x = Fraction(x)
        if x.denominator == 1 and x < 0:
            out.add(i)
    return frozenset(out)


def falling_product(z, alpha) -> Fraction:
    """(z)_alpha = prod_i z_i (z_i - 1) ... (z_i - alpha_i + 1) for alpha in N^n."""
    out = Fraction(1)
    for zi, ai in zip(z, alpha):
        zi = Fraction(zi)
        for j in range(ai):
            out *= zi - j
            if out == 0:
                return out
    return out


def gamma_coefficient(v, u) -> Fraction:
    """Gamma[v; u]: the series coefficient attached to the offset u.

    Zero unless negative_support(v + u) == negative_support(v); under that
    guard the denominator (v+u)_{u_+} cannot vanish.
    """
    v = tuple(Fraction(x) for x in v)
    u = tuple(int(x) for x in u)
    w = tuple(a + b for a, b in zip(v, u))
    if negative_support(w) != negative_support(v):
        return Fraction(0)
    u_plus = tuple(x if x > 0 else 0 for x in u)
    u_minus = tuple(-x if x < 0 else 0 for x in u)
    den = falling_product(w, u_plus)
    assert den != 0, "pole excluded by the negative-support guard"
    return falling_product(v, u_minus) / den


# ---------------------------------------------------------------------------
# Support descriptors
#
# classify(offset) returns
#   - an int: the enumeration level of a potential support point (it is stored
#     whenever its level is <= the truncation level),
#   - None: provably outside the support, exact coefficient 0,
#   - UNKNOWN: nothing can be certified about this offset.


class LatticeGammaSupport:
    """Support of a Gamma-series: offsets in L_A whose Gamma[v; u] survives."""

    def __init__(self, basis: LatticeBasis, base):
        self.basis = basis
        self.base = tuple(Fraction(x) for x in base)
        self._nsupp = negative_support(self.base)

    def classify(self, offset):
        m = lattice_decompose(self.basis, offset)
        if m is None:
            return None
        w = tuple(b + o for b, o in zip(self.base, offset))
        if negative_support(w) != self._nsupp:
            return None
        return sum(abs(c) for c in m)

    def json_fields(self) -> dict:
        return {"descriptor": "lattice"}


class SectionSupport:
    """Support of the x_0 = 0 section of an auxiliary-curve Gamma-series.

    An offset d of the section corresponds to the parent offset
    (-j, d_1, ..., d_n) where j is the integer x_0-exponent of the parent base.
    """

    def __init__(self, parent: LatticeGammaSupport):
        self.parent = parent
        j = parent.base[0]
        if j.denominator != 1:
            raise WrongAuxiliaryShapeError("parent base must have integer x_0 exponent")
        self.x0_offset = -int(j)

    def classify(self, offset):
        return self.parent.classify((self.x0_offset,) + tuple(offset))

    def json_fields(self) -> dict:
        return {
            "descriptor": "x0_section",
            "aux_matrix": list(self.parent.basis.matrix.entries),
            "aux_base": [str(x) for x in self.parent.base],
        }


class FiniteSupport:
    """A complete finite series: everything not stored is exactly 0."""

    def classify(self, offset):
        return None

    def json_fields(self) -> dict:
        return {"descriptor": "finite"}


class WindowSupport:
    """Trust decided by an explicit predicate (the output of an operator
    application).  Certified offsets that were not stored are exactly 0;
    everything outside the predicate is unknown."""

    def __init__(self, predicate):
        self.predicate = predicate

    def classify(self, offset):
        return None if self.predicate(offset) else UNKNOWN

    def json_fields(self) -> dict:
        return {"descriptor": "window"}


class FormalSeries:
    """x^base * sum of coeff * x^offset with sparse exact terms.

    terms maps integer offset tuples to nonzero Fractions.  truncation is the
    enumeration level up to which the support was exhausted; the descriptor
    knows how to place any offset relative to that enumeration.
    """

    __slots__ = ("base", "terms", "truncation", "descriptor")

    def __init__(self, base, terms, truncation, descriptor):
        self.base = tuple(Fraction(x) for x in base)
        self.terms = {tuple(int(c) for c in off): Fraction(v)
                      for off, v in terms.items() if v != 0}
        self.truncation = truncation
        self.descriptor = descriptor

    @property
    def nvars(self) -> int:
        return len(self.base)

    def is_zero(self) -> bool:
        return not self.terms

    def exponent(self, offset) -> tuple[Fraction, ...]:
        return tuple(b + o for b, o in zip(self.base, offset))

    def absolute_terms(self) -> dict[tuple[Fraction, ...], Fraction]:
        return {self.exponent(off): c for off, c in self.terms.items()}

    def coefficient_known(self, offset, threshold: int | None = None):
        """Exact coefficient at the offset, or None when it cannot be certified.

        threshold defaults to the truncation level; stored values are always
        exact, and descriptor-outside offsets are exactly 0.
        """
        offset = tuple(int(c) for c in offset)
        if offset in self.terms:
            return self.terms[offset]
        level = self.descriptor.classify(offset)
        if level is None:
            return Fraction(0)
        if level is UNKNOWN:
            return None
        limit = self.truncation if threshold is None else threshold
        return Fraction(0) if level <= limit else None

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __eq__(self, other):
        return (isinstance(other, FormalSeries)
                and self.base == other.base and self.terms == other.terms)

    def __repr__(self):
        shown = ", ".join(f"{off}: {c}" for off, c in list(self.sorted_terms())[:4])
        more = "" if len(self.terms) <= 4 else f", ... ({len(self.terms)} terms)"
        return f"FormalSeries(base={self.base}, {{{shown}{more}}})"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "base_exponent": [str(x) for x in self.base],
            "terms": [{"offset": list(off), "coeff": str(c)}
                      for off, c in self.sorted_terms()],
            "truncation": self.truncation,
        }
        out.update(self.descriptor.json_fields())
        return out


def series_from_json(data: dict, matrix: CurveMatrix | None = None) -> FormalSeries:
    """Rebuild a series from its JSON form; lattice descriptors need the matrix."""
    base = tuple(Fraction(x) for x in data["base_exponent"])
    terms = {tuple(t["offset"]): Fraction(t["coeff"]) for t in data["terms"]}
    kind = data.get("descriptor", "finite")
    if kind == "lattice":
        if matrix is None:
            raise CurveError("lattice descriptor needs the curve matrix")
        descriptor = LatticeGammaSupport(lattice_basis(matrix), base)
    elif kind == "x0_section":
        aux = make_curve(data["aux_matrix"])
        aux_base = tuple(Fraction(x) for x in data["aux_base"])
        descriptor = SectionSupport(LatticeGammaSupport(lattice_basis(aux), aux_base))
    elif kind == "finite":
        descriptor = FiniteSupport()
    elif kind == "window":
        # the original trust predicate is not serializable; fall back to the
        # stored offsets, which stay exact (re-verification windows shrink)
        stored = frozenset(terms)
        descriptor = WindowSupport(lambda off, _s=stored: tuple(off) in _s)
    else:
        raise CurveError(f"cannot rebuild a series with descriptor {kind!r}")
    return FormalSeries(base, terms, int(data["truncation"]), descriptor)


# ---------------------------------------------------------------------------
# Gamma-series construction


def _enumerate_ball(rank: int, radius: int):
    """All m in Z^rank with sum |m_i| <= radius, lexicographic order."""

    def rec(prefix, budget):
        if len(prefix) == rank:
            yield tuple(prefix)
            return
        for c in range(-budget, budget + 1):
            yield from rec(prefix + [c], budget - abs(c))

    yield from rec([], radius)


def gamma_series(A: CurveMatrix, base, level: int,
                 max_terms: int | None = None) -> FormalSeries:
    """The Gamma-series x^v sum_{u in L_A} Gamma[v; u] x^u truncated at the
    enumeration level sum |m_i| <= level of the kernel coordinates.

    The coefficient of x^v is 1 (the offset-0 term), and the negative-support
    guard inside gamma_coefficient confines the support to the region where the
    series is defined.
    """
    basis = lattice_basis(A)
    base = tuple(Fraction(x) for x in base)
    if len(base) != A.n:
        raise DimensionMismatchError(f"base of length {len(base)} for {A.n} variables")
    terms = {}
    for m in _enumerate_ball(basis.rank, level):
        u = basis.combine(m)
        c = gamma_coefficient(base, u)
        if c != 0:
            terms[u] = c
            if max_terms is not None and len(terms) > max_terms:
                raise TermLimitError(f"more than {max_terms} stored terms")
    return FormalSeries(base, terms, level, LatticeGammaSupport(basis, base))


def exponent_base(A: CurveMatrix, beta, j: int) -> tuple[Fraction, ...]:
    """The exponent v^j = j e_1 + ((beta - j)/a_{n-1}) e_{n-1} of the system
    along the singular support, for j = 0..a_{n-1}-1."""
    beta = Fraction(beta)
    n = A.n
    a_pen = A.entries[n - 2]
    if not 0 <= j < a_pen:
        raise IndexOutOfRangeError(f"j={j} outside 0..{a_pen - 1}")
    v = [Fraction(0)] * n
    v[0] += j
    v[n - 2] += Fraction(beta - j, a_pen)
    return tuple(v)


def generic_exponent_base(A: CurveMatrix, beta, j: int) -> tuple[Fraction, ...]:
    """The exponent w^j = j e_1 + ((beta - j)/a_n) e_n at generic points,
    for j = 0..a_n-1."""
    beta = Fraction(beta)
    n = A.n
    a_n = A.entries[-1]
    if not 0 <= j < a_n:
        raise IndexOutOfRangeError(f"j={j} outside 0..{a_n - 1}")
    v = [Fraction(0)] * n
    v[0] += j
    v[n - 1] += Fraction(beta - j, a_n)
    return tuple(v)


def _closed_form_coefficient(A: CurveMatrix, beta, j: int, m) -> Fraction:
    """Closed form of Gamma[v^j; u(m)] on m in N^{n-1}:
    ((beta-j)/a_{n-1})_{m_{n-1}} j! / (m_2! ... m_{n-2}! m_n! (x_1-exponent)!)."""
    beta = Fraction(beta)
    n = A.n
    a = A.entries
    theta = Fraction(beta - j, a[n - 2])
    m_pen = m[n - 3] if n >= 3 else 0      # coordinate for index n-1
    x1_exp = j - sum(a[i] * m[i - 1] for i in range(1, n) if i != n - 2)
    x1_exp += a[n - 2] * m_pen
    if x1_exp < 0:
        return Fraction(0)
    num = falling_product((theta,), (m_pen,)) * math.factorial(j)
    den = Fraction(math.factorial(x1_exp))
    for i in range(1, n):
        if i != n - 2:
            den *= math.factorial(m[i - 1])
    return num / den


def exponent_series(A: CurveMatrix, beta, j: int, level: int,
                    max_terms: int | None = None) -> FormalSeries:
    """Gamma-series at the singular exponent v^j, for smooth A.

    Cross-checks every stored coefficient against the closed factorial form of
    the coefficients in the kernel coordinates.
    """
    if not A.is_smooth:
        raise WrongAuxiliaryShapeError("direct exponent series needs a smooth matrix")
    base = exponent_base(A, beta, j)
    series = gamma_series(A, base, level, max_terms=max_terms)
    if A.n >= 3:
        basis = lattice_basis(A)
        for u, c in series.terms.items():
            m = lattice_decompose(basis, u)
            if all(x >= 0 for x in m):
                assert c == _closed_form_coefficient(A, beta, j, m), (u, m)
    return series


def polynomial_exponent_index(A: CurveMatrix, beta) -> int | None:
    """The unique j in 0..a_{n-1}-1 with (beta - j)/a_{n-1} in N, when beta is a
    natural number; the series at that exponent is a polynomial."""
    beta = Fraction(beta)
    if beta.denominator != 1 or beta < 0:
        return None
    a_pen = A.entries[A.n - 2]
    q = int(beta) % a_pen
    assert Fraction(int(beta) - q, a_pen).denominator == 1
    return q


def witness_base(A: CurveMatrix, beta) -> tuple[Fraction, ...]:
    """(beta + a_{n-1}) e_1 - e_{n-1}: the shifted exponent whose Gamma-series
    witnesses the irregularity when beta is a natural number."""
    beta = Fraction(beta)
    if beta.denominator != 1 or beta < 0:
        raise BetaNotNaturalError(f"beta={beta} is not a natural number")
    n = A.n
    if n < 3:
        raise WrongAuxiliaryShapeError("witness series needs at least 3 variables")
    v = [Fraction(0)] * n
    v[0] = beta + A.entries[n - 2]
    v[n - 2] = Fraction(-1)
    return tuple(v)


def witness_series(A: CurveMatrix, beta, level: int,
                   max_terms: int | None = None) -> FormalSeries:
    """The Gamma-series at the shifted exponent (beta + a_{n-1}, 0, ..., -1, 0).

    Its base exponent does not have minimal negative support, so it is not a
    solution: the toric generator d_1^{a_{n-1}} - d_{n-1} sends it to the finite
    meromorphic series of witness_defect, while the Euler operator and the other
    toric generators annihilate it.
    """
    if not A.is_smooth:
        raise WrongAuxiliaryShapeError("witness series needs a smooth matrix")
    base = witness_base(A, beta)
    series = gamma_series(A, base, level, max_terms=max_terms)
    assert series.terms.get((0,) * A.n) == 1
    return series


def witness_defect(A: CurveMatrix, beta) -> FormalSeries:
    """The image of the witness series under d_1^{a_{n-1}} - d_{n-1}: the finite sum

        sum (beta + a_{n-1})! / (m_2! .. m_{n-2}! m_n! (beta - S)!)
            * x_1^{beta - S} x_2^{m_2} .. x_{n-2}^{m_{n-2}} x_{n-1}^{-1} x_n^{m_n}

    over m in N^{n-2} with S = sum_{i != n-1} a_i m_i <= beta.  Every term has
    x_{n-1}-exponent exactly -1.  Offsets are relative to the witness base, so
    the result is directly comparable with the operator application.
    """
    beta = Fraction(beta)
    if beta.denominator != 1 or beta < 0:
        raise BetaNotNaturalError(f"beta={beta} is not a natural number")
    n = A.n
    a = A.entries
    base = witness_base(A, beta)
    b = int(beta)
    free = [i for i in range(1, n) if i != n - 2]   # 0-based slots 2..n-2, n
    terms = {}

    def rec(idx, remaining, m_acc):
        if idx == len(free):
            s = b - remaining
            coeff = Fraction(math.factorial(b + a[n - 2]))
            coeff /= math.factorial(remaining)
            exponent = [Fraction(0)] * n
            exponent[0] = Fraction(remaining)
            exponent[n - 2] = Fraction(-1)
            for slot, mi in zip(free, m_acc):
                coeff /= math.factorial(mi)
                exponent[slot] = Fraction(mi)
            offset = tuple(int(e - v) for e, v in zip(exponent, base))
            terms[offset] = coeff
            return
        slot = free[idx]
        for mi in range(remaining // a[slot] + 1):
            rec(idx + 1, remaining - mi * a[slot], m_acc + [mi])

    rec(0, b, [])
    return FormalSeries(base, terms, 0, FiniteSupport())


# ---------------------------------------------------------------------------
# Minimal negative support


@dataclass(frozen=True)
class MinimalSupportAnswer:
    status: bool | None            # True / False / None = unknown at this radius
    witness: tuple[int, ...] | None
    radius: int


def has_minimal_negative_support(A: CurveMatrix, v, radius: int = 3) -> MinimalSupportAnswer:
    """Decide whether some kernel offset strictly shrinks the negative support.

    Empty negative support is trivially minimal.  Rank-1 kernels (n = 2) are
    decided completely: beyond a stabilization bound the sign pattern of
    v + t*g is constant, so a finite scan is exhaustive.  For higher rank the
    search covers the coordinate box |m_i| <= radius and answers None (unknown)
    when no witness turns up.
    """
    v = tuple(Fraction(x) for x in v)
    nsupp = negative_support(v)
    if not nsupp:
        return MinimalSupportAnswer(True, None, radius)
    basis = lattice_basis(A)
    rank = basis.rank

    if rank == 1:
        g = basis.rows[0]
        stab = max(math.ceil((abs(x) + 2) / abs(gi))
                   for x, gi in zip(v, g) if gi != 0)
        for t in range(-stab, stab + 1):
            if t == 0:
                continue
            u = basis.combine((t,))
            if negative_support(tuple(b + o for b, o in zip(v, u))) < nsupp:
                return MinimalSupportAnswer(False, u, radius)
        return MinimalSupportAnswer(True, None, radius)

    def box():
        def rec(prefix):
            if len(prefix) == rank:
                yield tuple(prefix)
                return
            for c in range(-radius, radius + 1):
                yield from rec(prefix + [c])
        yield from rec([])

    for m in box():
        if not any(m):
            continue
        u = basis.combine(m)
        if negative_support(tuple(b + o for b, o in zip(v, u))) < nsupp:
            return MinimalSupportAnswer(False, u, radius)
    return MinimalSupportAnswer(None, None, radius)


# ---------------------------------------------------------------------------
# x_0 = 0 substitution and contiguity


@dataclass(frozen=True)
class SubstitutionResult:
    series: FormalSeries
    dropped: int                   # parent terms with nonzero x_0-exponent
    certified_zero: bool           # empty and provably so (beta in N \ NA)


def _is_polynomial_family_member(aux: CurveMatrix, base, beta) -> bool:
    """Whether the base is a singular/generic exponent of the auxiliary matrix
    whose Gamma-series terminates (the distinguished coordinate is a natural
    number, so the falling factors eventually vanish)."""
    n = aux.n
    j0 = base[0]
    if j0.denominator != 1 or j0 < 0:
        return False
    j = int(j0)
    if j < aux.entries[n - 2] and base == exponent_base(aux, beta, j):
        theta = base[n - 2]
        return theta.denominator == 1 and theta >= 0
    if j < aux.entries[n - 1] and base == generic_exponent_base(aux, beta, j):
        theta = base[n - 1]
        return theta.denominator == 1 and theta >= 0
    return False


def substitute_x0(parent: FormalSeries, A: CurveMatrix) -> SubstitutionResult:
    """Set x_0 = 0 in a series built for the auxiliary matrix (1, a_1, ..., a_n).

    Keeps exactly the terms whose x_0-exponent is 0 and reindexes them over the
    remaining n variables.  The result is a formal solution for A whenever the
    parent solved the auxiliary system.  An empty result is certified to be the
    zero series only when the parent is known to be a polynomial divisible by
    x_0, which happens exactly when beta is a natural number outside the
    semigroup of A; an empty window alone proves nothing.
    """
    if not isinstance(parent.descriptor, LatticeGammaSupport):
        raise WrongAuxiliaryShapeError("substitution needs a lattice Gamma-series")
    aux = parent.descriptor.basis.matrix
    if aux.entries != (1,) + A.entries:
        raise WrongAuxiliaryShapeError(
            f"parent matrix {aux.entries} is not the auxiliary matrix of {A.entries}")
    if parent.base[0].denominator != 1:
        raise WrongAuxiliaryShapeError("parent base must have integer x_0 exponent")
    new_base = parent.base[1:]
    kept, dropped = {}, 0
    for off, c in parent.terms.items():
        if parent.base[0] + off[0] == 0:
            kept[off[1:]] = c
        else:
            dropped += 1
    series = FormalSeries(new_base, kept, parent.truncation,
                          SectionSupport(parent.descriptor))
    beta = aux.weight(parent.base)
    certified = (not kept) and beta.denominator == 1 and beta >= 0 \
        and not semigroup_member(A, int(beta)) \
        and _is_polynomial_family_member(aux, parent.base, beta)
    return SubstitutionResult(series, dropped, certified)


def apply_contiguity(trusted, w):
    """Apply d^w termwise.  A solution for parameter beta maps to a solution for
    beta - A.w; callers track the parameter shift."""
    from .weyl import WeylOperator, apply
    n = trusted.series.nvars if hasattr(trusted, "series") else trusted.nvars
    op = WeylOperator.monomial(n, (0,) * n, tuple(int(x) for x in w))
    return apply(op, trusted)


def inverse_contiguity(trusted, w):
    """Divide termwise by d^w: the unique preimage with support shifted by +w.

    The preimage coefficient at offset u + w is c_u / (v + u + w)_w; raises
    ContiguityError when a falling factorial vanishes (choose a different w).
    A solution for beta pulls back to a solution for beta + A.w, exactly on the
    Euler side and window-verified on the toric side.
    """
    from .weyl import TrustedSeries
    src = trusted.series
    w = tuple(int(x) for x in w)
    if len(w) != src.nvars or any(x < 0 for x in w):
        raise DimensionMismatchError(f"bad derivative multi-index {w}")
    terms = {}
    for u, c in src.terms.items():
        target = tuple(ui + wi for ui, wi in zip(u, w))
        factor = falling_product(src.exponent(target), w)
        if factor == 0:
            raise ContiguityError(f"zero falling factorial at offset {u}")
        terms[target] = c / factor

    def trusted_at(offset):
        shifted = tuple(o - wi for o, wi in zip(offset, w))
        if trusted.coefficient_known(shifted) is None:
            return False
        return falling_product(src.exponent(offset), w) != 0

    out = FormalSeries(src.base, terms, src.truncation, WindowSupport(trusted_at))
    return TrustedSeries(out, trusted.trusted_level)
