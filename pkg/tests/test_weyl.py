import itertools
import random
from fractions import Fraction

import pytest

from gkzcurve import (
    FormalSeries,
    TrustedSeries,
    WeylOperator,
    annihilation_report,
    apply,
    box_operator,
    euler_operator,
    exponent_series,
    initial_form,
    make_curve,
    named_generators,
    toric_generators,
)
from gkzcurve.curves import DimensionMismatchError, NotInKernelError
from gkzcurve.series import FiniteSupport


def x(i, n=2):
    return WeylOperator.x(n, i)


def d(i, n=2):
    return WeylOperator.d(n, i)


def monomial_series(n, exponent, coeff=1):
    base = tuple(Fraction(e) for e in exponent)
    return FormalSeries(base, {(0,) * n: Fraction(coeff)}, 0, FiniteSupport())


def act_on_polynomial(P, exponents):
    """Oracle: apply P to sum x^e over the given integer exponents, by the
    calculus rules, returning exponent -> coefficient."""
    out = {}
    for e in exponents:
        for (a, g), c in P.terms.items():
            coeff = Fraction(c)
            new = list(e)
            for i in range(P.nvars):
                for _ in range(g[i]):
                    coeff *= new[i]
                    new[i] -= 1
                new[i] += a[i]
            if coeff:
                key = tuple(new)
                out[key] = out.get(key, Fraction(0)) + coeff
    return {k: v for k, v in out.items() if v != 0}


def test_commutation_rule():
    # d1 * x1 = x1 d1 + 1
    assert d(0) * x(0) == x(0) * d(0) + WeylOperator.constant(2, 1)


def test_theta_factorization():
    theta = WeylOperator.theta(2, 0)
    lhs = theta * (theta - 1)
    rhs = WeylOperator.monomial(2, (2, 0), (2, 0))
    assert lhs == rhs


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_xk_dk_equals_theta_falling(k):
    n = 1
    lhs = WeylOperator.monomial(n, (k,), (k,))
    theta = WeylOperator.theta(n, 0)
    rhs = WeylOperator.constant(n, 1)
    for j in range(k):
        rhs = rhs * (theta - j)
    assert lhs == rhs


def random_operator(rng, n=2, nterms=2, deg=2):
    terms = {}
    for _ in range(nterms):
        a = tuple(rng.randint(0, deg) for _ in range(n))
        g = tuple(rng.randint(0, deg) for _ in range(n))
        terms[(a, g)] = Fraction(rng.randint(-3, 3))
    return WeylOperator(n, terms)


def test_product_matches_composed_action_on_monomials():
    rng = random.Random(11)
    box = [tuple(e) for e in itertools.product(range(6), repeat=2)]
    for _ in range(25):
        P, Q = random_operator(rng), random_operator(rng)
        PQ = P * Q
        for e in box[::7]:
            via_product = act_on_polynomial(PQ, [e])
            via_composition = {}
            mid = act_on_polynomial(Q, [e])
            for me, mc in mid.items():
                for fe, fc in act_on_polynomial(P, [me]).items():
                    via_composition[fe] = via_composition.get(fe, Fraction(0)) + mc * fc
            via_composition = {k: v for k, v in via_composition.items() if v != 0}
            assert via_product == via_composition


def test_product_associative():
    rng = random.Random(23)
    for _ in range(20):
        P, Q, R = (random_operator(rng, nterms=2, deg=1) for _ in range(3))
        assert (P * Q) * R == P * (Q * R)


def test_euler_operator_shape():
    A = make_curve((1, 2, 3))
    E = euler_operator(A, 4)
    expected = (WeylOperator.theta(3, 0) + 2 * WeylOperator.theta(3, 1)
                + 3 * WeylOperator.theta(3, 2) - 4)
    assert E == expected
    assert euler_operator(make_curve((2, 3)), 0) == (
        2 * WeylOperator.theta(2, 0) + 3 * WeylOperator.theta(2, 1))


def test_euler_eigenvalue_on_monomials():
    A = make_curve((1, 2, 3))
    rng = random.Random(5)
    for _ in range(20):
        w = tuple(Fraction(rng.randint(-6, 6), rng.choice([1, 2, 3])) for _ in range(3))
        beta = Fraction(rng.randint(-5, 5), 2)
        S = monomial_series(3, w)
        out = apply(euler_operator(A, beta), S)
        expected = A.weight(w) - beta
        got = out.series.terms.get((0, 0, 0), Fraction(0))
        assert got == expected


def test_box_operator_examples():
    A = make_curve((1, 2, 3))
    assert box_operator(A, (2, -1, 0)) == (
        WeylOperator.monomial(3, (0, 0, 0), (2, 0, 0))
        - WeylOperator.monomial(3, (0, 0, 0), (0, 1, 0)))
    assert box_operator(A, (-1, -1, 1)) == (
        WeylOperator.monomial(3, (0, 0, 0), (0, 0, 1))
        - WeylOperator.monomial(3, (0, 0, 0), (1, 1, 0)))
    assert box_operator(A, (0, 0, 0)).is_zero()
    with pytest.raises(NotInKernelError):
        box_operator(A, (1, 0, 0))


def test_toric_generators_match_box_operators():
    A = make_curve((1, 2, 3))
    gens = toric_generators(A)
    assert gens[0] == box_operator(A, (2, -1, 0))
    assert gens[1] == box_operator(A, (3, 0, -1))
    assert [len(g.terms) for g in toric_generators(make_curve((1, 5)))] == [2]


def test_apply_polynomial_solution():
    A = make_curve((1, 2, 3))
    phi = exponent_series(A, 4, 0, 10)
    for op in toric_generators(A) + [euler_operator(A, 4)]:
        out = apply(op, phi)
        assert not out.series.terms


def test_apply_no_dependence():
    S = monomial_series(3, (Fraction(1, 2), 0, 0))
    out = apply(WeylOperator.d(3, 1), S)
    assert not out.series.terms


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        apply(WeylOperator.d(2, 0), monomial_series(3, (0, 0, 0)))


def test_apply_is_linear():
    rng = random.Random(3)
    n = 2
    for _ in range(10):
        P = random_operator(rng, n=n, nterms=2, deg=2)
        t1 = {tuple(rng.randint(0, 4) for _ in range(n)): Fraction(rng.randint(-4, 4))
              for _ in range(3)}
        t2 = {tuple(rng.randint(0, 4) for _ in range(n)): Fraction(rng.randint(-4, 4))
              for _ in range(3)}
        base = (Fraction(0),) * n
        s1 = FormalSeries(base, t1, 0, FiniteSupport())
        s2 = FormalSeries(base, t2, 0, FiniteSupport())
        merged = dict(t1)
        for k, v in t2.items():
            merged[k] = merged.get(k, Fraction(0)) + v
        s12 = FormalSeries(base, merged, 0, FiniteSupport())
        lhs = apply(P, s12).series.terms
        r1, r2 = apply(P, s1).series.terms, apply(P, s2).series.terms
        rhs = dict(r1)
        for k, v in r2.items():
            rhs[k] = rhs.get(k, Fraction(0)) + v
        rhs = {k: v for k, v in rhs.items() if v != 0}
        assert lhs == rhs


def test_annihilation_report_nonsolution():
    # d2 applied to x2: constant term 1 survives
    S = monomial_series(2, (0, 1))
    report = annihilation_report([("d2", WeylOperator.d(2, 1))], S)
    assert report.max_violation == 1
    assert not report.annihilated


def test_annihilation_box_ball_on_built_series():
    A = make_curve((1, 2, 3))
    for beta in (Fraction(1, 2), 4):
        phi = exponent_series(A, beta, 0, 12)
        gens = [(n, op) for n, op in named_generators(A, beta, 3)]
        report = annihilation_report(gens, TrustedSeries.from_series(phi))
        assert report.max_violation == 0, report


def test_annihilation_box_ball_on_generic_point_series():
    # the generic-exponent support runs against the kernel ray direction
    from gkzcurve.series import gamma_series, generic_exponent_base

    for entries, beta in [((1, 2, 3), Fraction(1, 2)), ((1, 2, 5), 0)]:
        A = make_curve(entries)
        for j in range(A.entries[-1]):
            phi = gamma_series(A, generic_exponent_base(A, beta, j), 12)
            report = annihilation_report(named_generators(A, beta, 3),
                                         TrustedSeries.from_series(phi))
            assert report.max_violation == 0, (entries, beta, j, report)


def test_initial_form_weights():
    A = make_curve((1, 2, 3))
    toric = toric_generators(A)
    omega = (1, Fraction(7, 4), 4)
    # d1^2 - d2: initial picks d1^2 under a2*w1 > w2
    assert initial_form(toric[0], omega) == WeylOperator.monomial(3, (0,) * 3, (2, 0, 0))
    # d1^3 - d3: initial picks -d3 under w3 > 3*w1
    assert initial_form(toric[1], omega) == WeylOperator.monomial(
        3, (0,) * 3, (0, 0, 1), c=-1)


def test_operator_repr():
    assert repr(WeylOperator.zero(2)) == "0"
    E = euler_operator(make_curve((2, 3)), 0)
    assert "x1 d1" in repr(E)
