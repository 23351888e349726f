"""Monomial-curve matrices, their integer kernels and numerical-semigroup arithmetic.

A curve matrix is a single row A = (a_1 ... a_n) of strictly increasing positive
integers.  Everything downstream (series supports, toric operators, parameter
classification) is driven by the integer kernel L_A = ker_Z(A) and by the
numerical semigroup N*a_1 + ... + N*a_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache


class CurveError(Exception):
    """Base class for domain errors raised by this package."""


class TooShortError(CurveError):
    """Fewer than two entries."""


class NotIncreasingError(CurveError):
    """Entries not positive or not strictly increasing."""


class GcdNotOneError(CurveError):
    """Entries of a non-smooth matrix must have gcd 1."""


class NotInKernelError(CurveError):
    """A vector expected in ker_Z(A) is not."""


class DimensionMismatchError(CurveError):
    """Vector or operator length does not match the number of variables."""


class CurveKind(Enum):
    SMOOTH = "smooth"
    GENERAL = "general"


@dataclass(frozen=True)
class CurveMatrix:
    """Row matrix A = (a_1 ... a_n), 0 < a_1 < ... < a_n, n >= 2.

    Smooth kind means a_1 = 1 (the curve t -> (t, t^{a_2}, ...) is smooth);
    general kind means a_1 > 1, in which case gcd(a_1, ..., a_n) = 1 is required.
    """

    entries: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def kind(self) -> CurveKind:
        return CurveKind.SMOOTH if self.entries[0] == 1 else CurveKind.GENERAL

    @property
    def is_smooth(self) -> bool:
        return self.entries[0] == 1

    def weight(self, vector) -> Fraction:
        """The product A.v of the row with a rational vector of length n."""
        if len(vector) != self.n:
            raise DimensionMismatchError(
                f"vector of length {len(vector)} against {self.n} variables"
            )
        return sum((Fraction(a) * Fraction(x) for a, x in zip(self.entries, vector)),
                   Fraction(0))

    def auxiliary(self) -> "CurveMatrix":
        """The matrix A' = (1, a_1, ..., a_n) used to reduce a general curve to a
        smooth one by one extra variable x_0."""
        if self.is_smooth:
            raise CurveError("auxiliary matrix is only defined for general kind")
        return CurveMatrix((1,) + self.entries)

    def __str__(self) -> str:
        return "(" + " ".join(str(a) for a in self.entries) + ")"


def make_curve(entries) -> CurveMatrix:
    """Validate a list of integers as a curve matrix.

    Raises TooShortError (n < 2), NotIncreasingError, or GcdNotOneError
    (general kind with gcd > 1).
    """
    entries = list(entries)
    if any(a != int(a) for a in entries):
        raise NotIncreasingError(f"entries must be integers: {entries}")
    tup = tuple(int(a) for a in entries)
    if len(tup) < 2:
        raise TooShortError(f"need at least 2 entries, got {len(tup)}")
    if tup[0] < 1 or any(b <= a for a, b in zip(tup, tup[1:])):
        raise NotIncreasingError(f"entries must be positive and strictly increasing: {tup}")
    if tup[0] > 1 and math.gcd(*tup) != 1:
        raise GcdNotOneError(f"gcd{tup} = {math.gcd(*tup)} != 1")
    return CurveMatrix(tup)


# ---------------------------------------------------------------------------
# Integer kernel


@dataclass(frozen=True)
class LatticeBasis:
    """A Z-basis (u^2, ..., u^n) of L_A = ker_Z(A), one row per index i = 2..n.

    For smooth matrices the rows have the fixed shape
        u^i     = -a_i e_1 + e_i          (i = 2..n-2 and i = n)
        u^{n-1} = a_{n-1} e_1 - e_{n-1}
    so that membership and coordinates can be read off directly.
    """

    matrix: CurveMatrix
    rows: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.rows)

    def combine(self, m) -> tuple[int, ...]:
        """u(m) = sum_i m_i u^i for integer coordinates m of length n-1."""
        if len(m) != self.rank:
            raise DimensionMismatchError(f"{len(m)} coordinates for rank {self.rank}")
        n = self.matrix.n
        out = [0] * n
        for c, row in zip(m, self.rows):
            for j in range(n):
                out[j] += c * row[j]
        return tuple(out)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def lattice_basis(A: CurveMatrix) -> LatticeBasis:
    """A Z-basis of ker_Z(A).

    Smooth matrices get the fixed curve-shaped rows; general matrices fall back
    to a gcd-chain construction (row k kills the running gcd of a_1..a_{k-1}
    against a_k), which is a Z-basis for any gcd-1 row.
    """
    n = A.n
    a = A.entries
    rows: list[tuple[int, ...]] = []
    if A.is_smooth:
        for i in range(2, n + 1):           # 1-based variable index
            row = [0] * n
            if i == n - 1:
                row[0] = a[n - 2]
                row[n - 2] = -1
            else:
                row[0] = -a[i - 1]
                row[i - 1] = 1
            rows.append(tuple(row))
    else:
        coeffs = [1]                        # running solution of sum c_j a_j = g
        g = a[0]
        for k in range(1, n):
            x, y, g_new = _xgcd(g, a[k])
            row = [a[k] // g_new * c for c in coeffs] + [0] * (n - k)
            row[k] = -(g // g_new)
            rows.append(tuple(row))
            coeffs = [x * c for c in coeffs] + [y]
            g = g_new
    basis = LatticeBasis(A, tuple(rows))
    for row in basis.rows:
        assert A.weight(row) == 0
    return basis


def lattice_decompose(basis: LatticeBasis, u) -> tuple[int, ...] | None:
    """Coordinates m with u = sum m_i u^i, or None when u is not in L_A."""
    A = basis.matrix
    n = A.n
    if len(u) != n:
        raise DimensionMismatchError(f"vector of length {len(u)} for {n} variables")
    u = tuple(int(x) for x in u)
    if sum(ai * ui for ai, ui in zip(A.entries, u)) != 0:
        return None
    if A.is_smooth:
        # coordinates are visible in slots 2..n
        m = []
        for i in range(2, n + 1):
            m.append(-u[n - 2] if i == n - 1 else u[i - 1])
        if basis.combine(m) != u:
            return None
        return tuple(m)
    return _solve_integer_combination(basis.rows, u)


def _solve_integer_combination(rows, target) -> tuple[int, ...] | None:
    """Solve sum m_i rows[i] = target over Z by exact elimination."""
    k = len(rows)
    n = len(target)
    # system: for each coordinate j, sum_i m_i rows[i][j] = target[j]
    aug = [[Fraction(rows[i][j]) for i in range(k)] + [Fraction(target[j])]
           for j in range(n)]
    pivots = []
    r = 0
    for col in range(k):
        pivot = next((i for i in range(r, n) if aug[i][col] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        pr = aug[r]
        for i in range(n):
            if i != r and aug[i][col] != 0:
                f = aug[i][col] / pr[col]
                aug[i] = [x - f * y for x, y in zip(aug[i], pr)]
        pivots.append((r, col))
        r += 1
    sol = [Fraction(0)] * k
    for row_idx, col in pivots:
        sol[col] = aug[row_idx][k] / aug[row_idx][col]
    # consistency rows
    for i in range(n):
        if all(aug[i][c] == 0 for c in range(k)) and aug[i][k] != 0:
            return None
    if any(s.denominator != 1 for s in sol):
        return None
    m = tuple(int(s) for s in sol)
    # verify (elimination above does not track dependent rows exhaustively)
    got = [sum(m[i] * rows[i][j] for i in range(k)) for j in range(n)]
    return m if tuple(got) == tuple(target) else None


def lattice_ball(basis: LatticeBasis, radius: int):
    """All nonzero u(m) with sum |m_i| <= radius, paired with their coordinates.

    Deterministic order: coordinates in lexicographic order.
    """
    rank = basis.rank
    out = []

    def rec(prefix, budget):
        if len(prefix) == rank:
            if any(prefix):
                out.append((tuple(prefix), basis.combine(prefix)))
            return
        for c in range(-budget, budget + 1):
            rec(prefix + [c], budget - abs(c))

    rec([], radius)
    out.sort(key=lambda t: t[0])
    return out


# ---------------------------------------------------------------------------
# Numerical semigroup


@dataclass(frozen=True)
class SemigroupTable:
    """Membership of 0..bound in N*a_1 + ... + N*a_n, plus the largest gap."""

    entries: tuple[int, ...]
    bound: int
    membership: tuple[bool, ...]
    frobenius: int


@lru_cache(maxsize=None)
def _membership(entries: tuple[int, ...], bound: int) -> tuple[bool, ...]:
    dp = [False] * (bound + 1)
    dp[0] = True
    for v in range(1, bound + 1):
        dp[v] = any(v >= a and dp[v - a] for a in entries)
    return tuple(dp)


def _frobenius_cap(entries: tuple[int, ...]) -> int:
    # a_1 * a_n safely dominates the largest gap of any gcd-1 semigroup
    return entries[0] * entries[-1]


def semigroup_table(A: CurveMatrix, bound: int | None = None) -> SemigroupTable:
    entries = A.entries
    cap = _frobenius_cap(entries)
    bound = max(bound if bound is not None else 0, cap)
    mask = _membership(entries, bound)
    frob = -1
    for v in range(min(bound, cap), -1, -1):
        if not mask[v]:
            frob = v
            break
    return SemigroupTable(entries, bound, mask, frob)


def semigroup_member(A: CurveMatrix, b: int) -> bool:
    """Whether b lies in the numerical semigroup of the entries.  Negative b is out."""
    if b < 0:
        return False
    return _membership(A.entries, max(b, 1))[b]


def frobenius_number(A: CurveMatrix) -> int:
    """Largest integer outside the semigroup; -1 when the semigroup is all of N."""
    if math.gcd(*A.entries) != 1:
        raise GcdNotOneError(f"gcd{A.entries} != 1, no Frobenius number")
    return semigroup_table(A).frobenius


def semigroup_gaps(A: CurveMatrix) -> tuple[int, ...]:
    table = semigroup_table(A)
    return tuple(v for v in range(table.frobenius + 1) if not table.membership[v])


# ---------------------------------------------------------------------------
# Delta exponents: the smallest delta_i with 1 + delta_i a_i representable by
# the other entries; used to present a general curve as a slice of its
# auxiliary smooth curve.


@dataclass(frozen=True)
class DeltaExponent:
    position: int                 # 0-based index into entries
    delta: int
    witness: tuple[int, ...]      # coefficients over the other entries, in order


@lru_cache(maxsize=None)
def _representable(gens: tuple[int, ...], value: int) -> bool:
    if value < 0:
        return False
    if value == 0:
        return True
    return any(value >= g and _representable(gens, value - g) for g in gens)


def _lex_witness(gens: tuple[int, ...], value: int) -> tuple[int, ...] | None:
    """Lexicographically smallest c in N^len(gens) with c . gens = value."""
    if not gens:
        return () if value == 0 else None
    g = gens[0]
    for c in range(value // g + 1):
        if _representable(gens[1:], value - c * g):
            rest = _lex_witness(gens[1:], value - c * g)
            return (c,) + rest
    return None


_DELTA_SEARCH_CAP = 100_000


def delta_exponents(A: CurveMatrix) -> tuple[DeltaExponent, ...]:
    """For each entry a_i the least delta >= 0 with 1 + delta*a_i in the semigroup
    of the remaining entries, together with the lexicographically smallest witness.

    Existence is guaranteed by gcd(a_1, ..., a_n) = 1.
    """
    if math.gcd(*A.entries) != 1:
        raise GcdNotOneError(f"gcd{A.entries} != 1")
    out = []
    for i, a_i in enumerate(A.entries):
        others = tuple(a for j, a in enumerate(A.entries) if j != i)
        delta = 0
        while not _representable(others, 1 + delta * a_i):
            delta += 1
            if delta > _DELTA_SEARCH_CAP:
                raise CurveError(f"delta search for entry {a_i} exceeded cap")
        witness = _lex_witness(others, 1 + delta * a_i)
        assert witness is not None
        assert sum(c * g for c, g in zip(witness, others)) == 1 + delta * a_i
        out.append(DeltaExponent(i, delta, witness))
    return tuple(out)


# ---------------------------------------------------------------------------
# Parameter classification


class BetaClass(Enum):
    IN_SEMIGROUP = "in_semigroup"
    INTEGER_OUTSIDE = "integer_outside_semigroup"
    NON_INTEGER = "non_integer"


@dataclass(frozen=True)
class BetaClassification:
    category: BetaClass
    residue: Fraction | None      # beta mod 1, only for NON_INTEGER


def beta_class(A: CurveMatrix, beta) -> BetaClassification:
    """Classify a rational parameter: in the semigroup, an integer outside it,
    or a non-integer (recording its residue mod 1).

    Two parameters define isomorphic hypergeometric modules exactly when they
    carry the same tag and, for non-integers, differ by an integer.
    """
    beta = Fraction(beta)
    if beta.denominator == 1:
        b = int(beta)
        if b >= 0 and semigroup_member(A, b):
            return BetaClassification(BetaClass.IN_SEMIGROUP, None)
        return BetaClassification(BetaClass.INTEGER_OUTSIDE, None)
    return BetaClassification(BetaClass.NON_INTEGER, beta - math.floor(beta))


def isomorphic_parameters(A: CurveMatrix, b1, b2) -> bool:
    c1, c2 = beta_class(A, b1), beta_class(A, b2)
    if c1.category != c2.category:
        return False
    if c1.category is BetaClass.NON_INTEGER:
        return (Fraction(b1) - Fraction(b2)).denominator == 1
    return True
