import json
import random
from fractions import Fraction

import pytest

from gkzcurve import (
    TrustedSeries,
    annihilation_report,
    apply,
    apply_contiguity,
    box_operator,
    exponent_series,
    gamma_coefficient,
    gamma_series,
    has_minimal_negative_support,
    inverse_contiguity,
    make_curve,
    named_generators,
    negative_support,
    series_from_json,
    series_match_on_window,
    substitute_x0,
    toric_generators,
    witness_defect,
    witness_series,
)
from gkzcurve.exponents import polynomial_exponent_index
from gkzcurve.series import (
    BetaNotNaturalError,
    IndexOutOfRangeError,
    TermLimitError,
    WrongAuxiliaryShapeError,
    exponent_base,
    falling_product,
    generic_exponent_base,
    witness_base,
)
from gkzcurve.weyl import WeylOperator


def test_negative_support():
    assert negative_support((1, -2, 0)) == {1}
    assert negative_support((Fraction(-1, 2), 3, -1)) == {2}
    assert negative_support((0, 0, 0)) == frozenset()


def test_minimal_negative_support_search():
    A = make_curve((1, 2, 3))
    ans = has_minimal_negative_support(A, (-1, 2, 0), radius=2)
    assert ans.status is False
    # any valid witness strictly shrinks the support
    w = ans.witness
    assert negative_support((-1 + w[0], 2 + w[1], 0 + w[2])) < {0}

    assert has_minimal_negative_support(A, (0, 2, 0)).status is True
    assert has_minimal_negative_support(A, (1, Fraction(-1, 2), 0)).status is True


def test_minimal_negative_support_rank_one_complete():
    A = make_curve((2, 3))
    # (-1, 0): kernel is Z(3, -2); u = t(3,-2) releases slot 0 only for t >= 1,
    # but then slot 1 goes to -2t < 0: stays non-minimal? no: slot1 = -2t is a
    # new negative integer so nsupp is not a subset -> minimal.
    ans = has_minimal_negative_support(A, (-1, 0))
    assert ans.status is True
    # (-3, 2): t=1 gives (0, 0): empty support, strictly smaller
    ans2 = has_minimal_negative_support(A, (-3, 2))
    assert ans2.status is False and ans2.witness == (3, -2)


def test_witness_base_not_minimal():
    A = make_curve((1, 2, 3))
    ans = has_minimal_negative_support(A, witness_base(A, 4), radius=4)
    assert ans.status is False


def test_gamma_coefficient_examples():
    assert gamma_coefficient((5, 0), (-2, 1)) == 20
    assert gamma_coefficient((5, 0), (-4, 2)) == 60
    assert gamma_coefficient((Fraction(1, 3), 7, -2), (0, 0, 0)) == 1


def gamma_ratio_oracle(v, u):
    """Independent Gamma(v+1)/Gamma(v+u+1) via telescoping, coordinatewise:
    u_i >= 0 -> 1/((v_i+1)...(v_i+u_i)), u_i < 0 -> v_i (v_i-1)...(v_i+u_i+1).
    A pole in the denominator makes the whole ratio 0."""
    out = Fraction(1)
    for vi, ui in zip(v, u):
        vi = Fraction(vi)
        if ui >= 0:
            den = Fraction(1)
            for k in range(1, ui + 1):
                den *= vi + k
            if den == 0:
                return Fraction(0)
            out /= den
        else:
            for k in range(-ui):
                out *= vi - k
    return out


def test_gamma_coefficient_against_ratio_oracle():
    rng = random.Random(91)
    checked = 0
    while checked < 200:
        n = rng.choice([2, 3, 4])
        v = []
        for _ in range(n):
            den = rng.choice([1, 1, 2, 3, 4])
            num = rng.randint(-8, 12)
            x = Fraction(num, den)
            if x.denominator == 1 and x < 0:
                x += 20          # keep nsupp(v) empty
            v.append(x)
        u = tuple(rng.randint(-5, 5) for _ in range(n))
        assert gamma_coefficient(v, u) == gamma_ratio_oracle(v, u)
        checked += 1


def test_exponent_bases():
    A = make_curve((1, 2, 3))
    assert exponent_base(A, Fraction(1, 2), 0) == (0, Fraction(1, 4), 0)
    assert exponent_base(A, Fraction(1, 2), 1) == (1, Fraction(-1, 4), 0)
    A4 = make_curve((1, 2, 3, 5))
    assert exponent_base(A4, 0, 2) == (2, 0, Fraction(-2, 3), 0)
    with pytest.raises(IndexOutOfRangeError):
        exponent_base(A, 0, 2)
    assert generic_exponent_base(A, 0, 1) == (1, 0, Fraction(-1, 3))


def test_polynomial_gamma_series():
    A = make_curve((1, 2, 3))
    expected = {
        (Fraction(0), Fraction(2), Fraction(0)): Fraction(1),
        (Fraction(2), Fraction(1), Fraction(0)): Fraction(1),
        (Fraction(4), Fraction(0), Fraction(0)): Fraction(1, 12),
        (Fraction(1), Fraction(0), Fraction(1)): Fraction(2),
    }
    for level in (4, 8, 16):
        phi = exponent_series(A, 4, 0, level)
        assert phi.absolute_terms() == expected


def test_gamma_series_single_term_at_level_zero():
    A = make_curve((1, 2, 3))
    phi = gamma_series(A, (0, Fraction(1, 4), 0), 0)
    assert phi.absolute_terms() == {(0, Fraction(1, 4), 0): 1}


def test_gamma_series_base_coefficient_is_one():
    A = make_curve((1, 2, 3))
    for beta in (0, 4):
        wit = witness_series(A, beta, 6)
        assert wit.terms[(0, 0, 0)] == 1


def test_series_rebase_invariance():
    # Shifting the base along the kernel reproduces the same series up to the
    # exact scalar Gamma[v; u]: the 1/Gamma-normalized series x^v sum x^u /
    # Gamma(v+u+1) is shift-invariant, and the coefficient-1 normalization
    # used here rescales it by Gamma(v+1).
    A = make_curve((1, 2, 3))
    v = (0, Fraction(1, 4), 0)
    u = (2, -1, 0)
    scale = gamma_coefficient(v, u)
    assert scale != 0
    s1 = gamma_series(A, v, 10)
    v2 = tuple(Fraction(a) + b for a, b in zip(v, u))
    s2 = gamma_series(A, v2, 10)
    t1, t2 = s1.absolute_terms(), s2.absolute_terms()
    overlap = set(t1) & set(t2)
    assert len(overlap) >= 15
    for e in overlap:
        assert t1[e] == t2[e] * scale


def test_witness_bases():
    assert witness_series(make_curve((1, 2, 3)), 4, 2).base == (6, -1, 0)
    assert witness_series(make_curve((1, 2, 3)), 0, 2).base == (2, -1, 0)
    with pytest.raises(BetaNotNaturalError):
        witness_series(make_curve((1, 2, 3)), Fraction(1, 2), 2)
    with pytest.raises(WrongAuxiliaryShapeError):
        witness_series(make_curve((1, 5)), 3, 2)


def test_witness_defect_closed_form():
    A = make_curve((1, 2, 3))
    defect = witness_defect(A, 0)
    assert defect.absolute_terms() == {(0, -1, 0): 2}
    # every term sits at x_{n-1}-exponent exactly -1
    for beta in (0, 4, 5):
        for e in witness_defect(A, beta).absolute_terms():
            assert e[1] == -1


@pytest.mark.parametrize("entries,beta", [((1, 2, 3), 0), ((1, 2, 3), 4),
                                          ((1, 2, 5), 4), ((1, 3, 4, 5), 0)])
def test_witness_defect_matches_operator_application(entries, beta):
    A = make_curve(entries)
    wit = witness_series(A, beta, 12)
    p_last = toric_generators(A)[A.n - 3]     # d_1^{a_{n-1}} - d_{n-1}
    image = apply(p_last, wit)
    assert image.series.terms, "defect must be visible on the window"
    assert series_match_on_window(image, witness_defect(A, beta))


def test_witness_fails_only_on_the_last_toric_generator():
    A = make_curve((1, 2, 3))
    wit = TrustedSeries.from_series(witness_series(A, 4, 12))
    gens = dict(named_generators(A, 4, 1))
    assert annihilation_report([gens["euler"]], wit).max_violation == 0
    assert annihilation_report([gens["toric[3]"]], wit).max_violation == 0
    assert annihilation_report([gens["toric[2]"]], wit).max_violation > 0


def test_term_limit():
    A = make_curve((1, 2, 3))
    with pytest.raises(TermLimitError):
        gamma_series(A, (0, Fraction(1, 4), 0), 10, max_terms=3)


def test_substitution_example():
    A = make_curve((2, 3))
    parent = exponent_series(A.auxiliary(), Fraction(1, 2), 0, 12)
    sub = substitute_x0(parent, A)
    assert sub.series.base == (Fraction(1, 4), 0)
    assert sub.series.terms[(-3, 2)] == Fraction(21, 128)
    assert not sub.certified_zero
    # the substituted series solves the system of A
    report = annihilation_report(named_generators(A, Fraction(1, 2), 3),
                                 TrustedSeries.from_series(sub.series))
    assert report.max_violation == 0


def test_substitution_zero_detection():
    # beta in N outside the semigroup: the polynomial slot dies at x_0 = 0
    A = make_curve((3, 5, 7))
    beta = 2
    q = polynomial_exponent_index(A.auxiliary(), beta)
    parent = exponent_series(A.auxiliary(), beta, q, 12)
    sub = substitute_x0(parent, A)
    assert sub.series.is_zero()
    assert sub.certified_zero


def test_substitution_ray_structure():
    # Delta_0 contains the origin and, within the window, the ray step
    # (0, ..., 0, a_n, a_{n-1}) in the m-coordinates.
    A = make_curve((2, 3))
    parent = exponent_series(A.auxiliary(), Fraction(1, 2), 0, 12)
    sub = substitute_x0(parent, A).series
    assert sub.terms[(0, 0)] == 1            # lambda = 0 in Delta_0
    # m-ray step for aux (1,2,3): m -> m + (3, 2): offset step (-3, 2)
    assert (-3, 2) in sub.terms and (-6, 4) in sub.terms


def test_substitution_wrong_shape():
    A = make_curve((2, 3))
    other = exponent_series(make_curve((1, 2, 5)), Fraction(1, 2), 0, 4)
    with pytest.raises(WrongAuxiliaryShapeError):
        substitute_x0(other, A)


def test_substitution_commutes_with_x0_free_operators():
    # operators not touching x_0/d_0 commute with the substitution on the window
    A = make_curve((2, 3))
    aux = A.auxiliary()
    parent = exponent_series(aux, Fraction(1, 2), 0, 12)
    sub = substitute_x0(parent, A).series
    cases = [
        (box_operator(aux, (0, 3, -2)), box_operator(A, (3, -2))),        # annihilates
        (WeylOperator.d(3, 2), WeylOperator.d(2, 1)),                     # does not
        (WeylOperator.monomial(3, (0, 1, 0), (0, 0, 1)),
         WeylOperator.monomial(2, (1, 0), (0, 1))),
    ]
    for op_parent, op_child in cases:
        applied_then_sub = apply(op_parent, parent)
        sub_then_applied = apply(op_child, sub)
        child = sub_then_applied.series.terms
        x0_exp = parent.base[0]
        parent_slice = {off[1:]: c for off, c in applied_then_sub.series.terms.items()
                        if x0_exp + off[0] == 0}
        common = set(child) & set(parent_slice) if child or parent_slice else set()
        for off in common:
            assert child[off] == parent_slice[off]
        # at least the x0-slice of the parent image must be reproduced
        for off, c in parent_slice.items():
            got = sub_then_applied.coefficient_known(off)
            if got is not None:
                assert got == c
    # sanity: the derivative case really produces terms on both sides
    nonzero = apply(WeylOperator.d(2, 1), sub)
    assert nonzero.series.terms


def test_contiguity_forward():
    A = make_curve((1, 2, 3))
    # w = 0 is the identity
    phi = exponent_series(A, 4, 0, 8)
    same = apply_contiguity(TrustedSeries.from_series(phi), (0, 0, 0))
    assert same.series.terms == phi.terms
    # a single monomial drops its exponent
    single = gamma_series(A, (0, Fraction(1, 4), 0), 0)
    derived = apply_contiguity(TrustedSeries.from_series(single), (0, 1, 0))
    assert derived.series.absolute_terms() == {
        (0, Fraction(-3, 4), 0): Fraction(1, 4)}


def test_contiguity_preserves_annihilation():
    # solutions for beta' = beta - A.w map to solutions for beta
    A = make_curve((3, 5, 7))
    w = (1, 0, 0)
    beta = Fraction(1, 2)                    # target parameter
    beta_src = beta + A.weight(w)            # 7/2
    aux = A.auxiliary()
    parent = exponent_series(aux, beta_src, 0, 14)
    src = substitute_x0(parent, A).series
    assert annihilation_report(named_generators(A, beta_src, 2),
                               TrustedSeries.from_series(src)).max_violation == 0
    out = apply_contiguity(TrustedSeries.from_series(src), w)
    report = annihilation_report(named_generators(A, beta, 2), out)
    assert report.max_violation == 0
    assert out.series.terms, "image should not vanish on the window"


def test_inverse_contiguity_roundtrip():
    A = make_curve((1, 2, 3))
    phi = TrustedSeries.from_series(exponent_series(A, Fraction(1, 2), 0, 8))
    lifted = inverse_contiguity(phi, (0, 0, 2))
    back = apply_contiguity(lifted, (0, 0, 2))
    assert back.series.terms == phi.series.terms


def test_serialization_roundtrip():
    A = make_curve((1, 2, 3))
    phi = exponent_series(A, Fraction(1, 2), 1, 8)
    data = json.loads(json.dumps(phi.to_json()))
    back = series_from_json(data, matrix=A)
    assert back.base == phi.base
    assert back.terms == phi.terms
    assert back.truncation == phi.truncation
    # deterministic term order: strictly increasing offsets
    offsets = [tuple(t["offset"]) for t in data["terms"]]
    assert offsets == sorted(offsets)

    # section descriptor carries enough to rebuild
    Ag = make_curve((2, 3))
    sub = substitute_x0(exponent_series(Ag.auxiliary(), Fraction(1, 2), 0, 10), Ag)
    data2 = sub.series.to_json()
    back2 = series_from_json(json.loads(json.dumps(data2)), matrix=Ag)
    assert back2.terms == sub.series.terms
    report = annihilation_report(named_generators(Ag, Fraction(1, 2), 2),
                                 TrustedSeries.from_series(back2))
    assert report.max_violation == 0


def test_falling_product():
    assert falling_product((5, 3), (2, 1)) == 60
    assert falling_product((Fraction(1, 2),), (2,)) == Fraction(-1, 4)
    assert falling_product((3,), (5,)) == 0
