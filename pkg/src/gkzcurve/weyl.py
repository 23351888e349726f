"""Sparse Weyl-algebra operators and their exact action on formal series.

Operators are finite sums of c * x^a * d^g in normal order (all x's left of all
d's), with exact rational coefficients.  Equality is structural: two operators
are equal exactly when their normal-form term maps coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .curves import (
    CurveMatrix,
    DimensionMismatchError,
    NotInKernelError,
    CurveError,
    lattice_ball,
    lattice_basis,
)
from .series import FormalSeries, WindowSupport, falling_product


class NotSmoothError(CurveError):
    """Operation defined only for smooth matrices."""


class WeylOperator:
    """A differential operator sum c_{a,g} x^a d^g on a fixed number of variables.

    Multiplication normal-orders with the commutation rule [d_i, x_i] = 1:

        d^g x^b = sum_k C(g, k) * b!/(b-k)! * x^{b-k} d^{g-k}

    taken coordinatewise over 0 <= k <= min(g, b).
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = {}
        if terms:
            for (a, g), c in terms.items():
                c = Fraction(c)
                if c != 0:
                    key = (tuple(a), tuple(g))
                    self.terms[key] = self.terms.get(key, Fraction(0)) + c
            self.terms = {k: v for k, v in self.terms.items() if v != 0}

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "WeylOperator":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> "WeylOperator":
        z = (0,) * nvars
        return cls(nvars, {(z, z): Fraction(c)})

    @classmethod
    def monomial(cls, nvars: int, xexp, dexp, c=1) -> "WeylOperator":
        return cls(nvars, {(tuple(xexp), tuple(dexp)): Fraction(c)})

    @classmethod
    def x(cls, nvars: int, i: int) -> "WeylOperator":
        e = tuple(1 if j == i else 0 for j in range(nvars))
        return cls.monomial(nvars, e, (0,) * nvars)

    @classmethod
    def d(cls, nvars: int, i: int) -> "WeylOperator":
        e = tuple(1 if j == i else 0 for j in range(nvars))
        return cls.monomial(nvars, (0,) * nvars, e)

    @classmethod
    def theta(cls, nvars: int, i: int) -> "WeylOperator":
        e = tuple(1 if j == i else 0 for j in range(nvars))
        return cls.monomial(nvars, e, e)

    # -- ring structure -----------------------------------------------------

    def _check(self, other: "WeylOperator"):
        if self.nvars != other.nvars:
            raise DimensionMismatchError(
                f"operators on {self.nvars} and {other.nvars} variables")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = WeylOperator.constant(self.nvars, other)
        self._check(other)
        merged = dict(self.terms)
        for k, c in other.terms.items():
            merged[k] = merged.get(k, Fraction(0)) + c
        return WeylOperator(self.nvars, merged)

    __radd__ = __add__

    def __neg__(self):
        return WeylOperator(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = WeylOperator.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return WeylOperator(self.nvars,
                                {k: c * Fraction(other) for k, c in self.terms.items()})
        self._check(other)
        out: dict = {}
        for (a1, g1), c1 in self.terms.items():
            for (a2, g2), c2 in other.terms.items():
                base = c1 * c2
                # iterate over the per-variable contraction orders k_i
                ranges = [range(min(g, b) + 1) for g, b in zip(g1, a2)]

                def rec(i, coeff, kvec):
                    if i == self.nvars:
                        xe = tuple(x + y - k for x, y, k in zip(a1, a2, kvec))
                        de = tuple(x + y - k for x, y, k in zip(g1, g2, kvec))
                        key = (xe, de)
                        out[key] = out.get(key, Fraction(0)) + coeff
                        return
                    for k in ranges[i]:
                        rec(i + 1,
                            coeff * math.comb(g1[i], k) * math.perm(a2[i], k),
                            kvec + [k])

                rec(0, base, [])
        return WeylOperator(self.nvars, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        out = WeylOperator.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return (isinstance(other, WeylOperator)
                and self.nvars == other.nvars and self.terms == other.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def order_bound(self) -> int:
        """max |a|_1 + |g|_1 over the terms; 0 for the zero operator."""
        return max((sum(a) + sum(g) for a, g in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, g), c in sorted(self.terms.items()):
            bits = [] if c == 1 and (any(a) or any(g)) else [str(c)]
            bits += [f"x{i+1}" + (f"^{e}" if e > 1 else "")
                     for i, e in enumerate(a) if e]
            bits += [f"d{i+1}" + (f"^{e}" if e > 1 else "")
                     for i, e in enumerate(g) if e]
            parts.append(" ".join(bits))
        return " + ".join(parts)


def euler_operator(A: CurveMatrix, beta) -> WeylOperator:
    """E(beta) = sum_i a_i x_i d_i - beta.  On a monomial x^w it acts by the
    scalar A.w - beta."""
    n = A.n
    terms = {}
    for i, a in enumerate(A.entries):
        e = tuple(1 if j == i else 0 for j in range(n))
        terms[(e, e)] = Fraction(a)
    z = (0,) * n
    terms[(z, z)] = -Fraction(beta)
    return WeylOperator(n, terms)


def box_operator(A: CurveMatrix, u) -> WeylOperator:
    """d^{u_+} - d^{u_-} for a kernel vector u of A."""
    if len(u) != A.n:
        raise DimensionMismatchError(f"vector of length {len(u)} for {A.n} variables")
    u = tuple(int(x) for x in u)
    if A.weight(u) != 0:
        raise NotInKernelError(f"{u} is not in ker_Z{A.entries}")
    plus = tuple(x if x > 0 else 0 for x in u)
    minus = tuple(-x if x < 0 else 0 for x in u)
    z = (0,) * A.n
    return (WeylOperator.monomial(A.n, z, plus)
            - WeylOperator.monomial(A.n, z, minus))


def toric_generators(A: CurveMatrix) -> list[WeylOperator]:
    """Generators d_1^{a_i} - d_i (i = 2..n) of the toric ideal of a smooth matrix."""
    if not A.is_smooth:
        raise NotSmoothError(f"{A.entries} is not smooth")
    n = A.n
    out = []
    for i in range(1, n):
        u = [0] * n
        u[0] = A.entries[i]
        u[i] = -1
        out.append(box_operator(A, u))
    return out


def initial_form(P: WeylOperator, omega) -> WeylOperator:
    """Sub-sum of the terms of maximal (-omega, omega)-weight omega.(g - a)."""
    if P.is_zero():
        return P
    omega = [Fraction(w) for w in omega]

    def wt(key):
        a, g = key
        return sum(w * (gi - ai) for w, ai, gi in zip(omega, a, g))

    top = max(wt(k) for k in P.terms)
    return WeylOperator(P.nvars, {k: c for k, c in P.terms.items() if wt(k) == top})


# ---------------------------------------------------------------------------
# Action on series


@dataclass
class TrustedSeries:
    """A formal series together with the level up to which its stored
    coefficients exhaust the support exactly."""

    series: FormalSeries
    trusted_level: int

    @classmethod
    def from_series(cls, series: FormalSeries) -> "TrustedSeries":
        return cls(series, series.truncation)

    @property
    def nvars(self) -> int:
        return self.series.nvars

    def coefficient_known(self, offset):
        return self.series.coefficient_known(offset, self.trusted_level)


def apply(P: WeylOperator, S) -> TrustedSeries:
    """Exact term-by-term action of an operator on a (trusted) series.

    x^a d^g sends the coefficient c at exponent e to c * (e)_g at e - g + a,
    with fractional entries of e handled exactly.  An output offset is kept
    only when every operator term's unique contributor offset is certified by
    the input (stored, provably outside the support, or killed by a zero
    falling factorial); everything else is dropped, so all stored output
    coefficients are exact values of P applied to the full series.
    """
    if isinstance(S, FormalSeries):
        S = TrustedSeries.from_series(S)
    src = S.series
    if P.nvars != src.nvars:
        raise DimensionMismatchError(
            f"operator on {P.nvars} variables against {src.nvars}-variable series")

    accum: dict[tuple[int, ...], Fraction] = {}
    for u, c in src.terms.items():
        e = src.exponent(u)
        for (a, g), pc in P.terms.items():
            f = falling_product(e, g)
            if f == 0:
                continue
            w = tuple(ui - gi + ai for ui, gi, ai in zip(u, g, a))
            accum[w] = accum.get(w, Fraction(0)) + c * pc * f

    cache: dict[tuple[int, ...], bool] = {}

    def certified(offset) -> bool:
        offset = tuple(int(x) for x in offset)
        if offset in cache:
            return cache[offset]
        ok = True
        for (a, g) in P.terms:
            contrib = tuple(o + gi - ai for o, gi, ai in zip(offset, g, a))
            if S.coefficient_known(contrib) is None:
                if falling_product(src.exponent(contrib), g) != 0:
                    ok = False
                    break
        cache[offset] = ok
        return ok

    kept = {w: c for w, c in accum.items() if c != 0 and certified(w)}
    out = FormalSeries(src.base, kept, src.truncation, WindowSupport(certified))
    return TrustedSeries(out, max(-1, S.trusted_level - P.order_bound()))


@dataclass(frozen=True)
class GeneratorViolation:
    name: str
    violation: Fraction
    trusted_terms: int


@dataclass(frozen=True)
class AnnihilationReport:
    max_violation: Fraction
    per_generator: tuple[GeneratorViolation, ...]

    @property
    def annihilated(self) -> bool:
        return self.max_violation == 0


def annihilation_report(generators, S) -> AnnihilationReport:
    """Apply each generator and report the largest coefficient surviving on the
    trusted window; 0 means annihilation is verified there.

    generators: iterable of WeylOperator or (name, WeylOperator) pairs.
    """
    rows = []
    worst = Fraction(0)
    for idx, gen in enumerate(generators):
        if isinstance(gen, tuple):
            name, op = gen
        else:
            name, op = f"generator[{idx}]", gen
        result = apply(op, S)
        terms = result.series.terms
        violation = max((abs(c) for c in terms.values()), default=Fraction(0))
        rows.append(GeneratorViolation(name, violation, len(terms)))
        worst = max(worst, violation)
    return AnnihilationReport(worst, tuple(rows))


def named_generators(A: CurveMatrix, beta, ball_radius: int = 3):
    """The checking set for the hypergeometric system: Euler, the named toric
    generators (smooth matrices), and all box operators of kernel vectors with
    coordinate level sum |m_i| <= ball_radius.

    Box operators come in +/- pairs carrying the same information; only the
    representative whose first nonzero coordinate is positive is kept.
    """
    out = [("euler", euler_operator(A, beta))]
    if A.is_smooth:
        for i, op in enumerate(toric_generators(A), start=2):
            out.append((f"toric[{i}]", op))
    basis = lattice_basis(A)
    seen = set()
    for m, u in lattice_ball(basis, ball_radius):
        first = next(x for x in m if x)
        if first < 0:
            continue
        if u in seen:
            continue
        seen.add(u)
        out.append((f"box{list(m)}", box_operator(A, u)))
    return out


def series_match_on_window(result: TrustedSeries, reference: FormalSeries) -> bool:
    """Coefficientwise equality of an operator-application result against a
    complete reference series, restricted to the result's certified window."""
    for off, c in result.series.terms.items():
        ref = reference.coefficient_known(off)
        if ref is None or ref != c:
            return False
    for off, c in reference.terms.items():
        mine = result.coefficient_known(off)
        if mine is not None and mine != c:
            return False
    return True
