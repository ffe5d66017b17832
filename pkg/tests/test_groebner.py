"""Groebner engine: S-polynomials, Buchberger, normal forms, module bases."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from fibrecheck import (
    QQ,
    ComputeBudget,
    Ideal,
    ModuleOrder,
    ModulePresentation,
    Polynomial,
    ResourceLimitError,
    RingLayout,
    buchberger,
    default_order,
    ideal_member,
    module_buchberger,
    module_normal_form,
    normal_form,
    s_polynomial,
)
from fibrecheck.groebner import vec_is_zero, vector_leading

from oracles import macaulay_member
from test_poly import poly_strategy
from util import BLOWUP_LAYOUT, P, PW, ideal_equal, ideal_of

XY2 = RingLayout((), ("x", "y"))  # plain bivariate ring, grevlex x > y
POW2 = BLOWUP_LAYOUT.powered(2)


def _pow2(text):
    return PW(POW2, text)


BLOWUP2 = Ideal(POW2, QQ, (_pow2("y1*x1 - y2"), _pow2("y1*x2 - y2")))


# ---------------------------------------------------------------------------
# S-polynomials


def test_s_polynomial_hand_example():
    f = P(XY2, "x^2 - y")
    g = P(XY2, "x*y - 1")
    assert s_polynomial(f, g, default_order(XY2)) == P(XY2, "x - y^2")


def test_s_polynomial_identical_inputs():
    f = P(XY2, "x^2 - y")
    assert s_polynomial(f, f, default_order(XY2)).is_zero


def test_s_polynomial_coprime_pair_cancels():
    s = s_polynomial(P(XY2, "x"), P(XY2, "y"), default_order(XY2))
    assert s.is_zero


def test_s_polynomial_rejects_zero():
    with pytest.raises(ValueError):
        s_polynomial(P(XY2, "x"), Polynomial.zero(XY2, QQ), default_order(XY2))


# ---------------------------------------------------------------------------
# Buchberger


def test_buchberger_blowup_power2():
    basis = BLOWUP2.groebner_basis()
    assert _pow2("y2*x1 - y2*x2") in basis
    _assert_buchberger_criterion(basis, default_order(POW2))


def test_buchberger_two_step_reduction():
    basis = buchberger((P(XY2, "x^2 - y"), P(XY2, "x")), default_order(XY2))
    assert set(basis) == {P(XY2, "x"), P(XY2, "y")}


def test_buchberger_unit_ideal():
    basis = buchberger((P(XY2, "1"),), default_order(XY2))
    assert [str(g) for g in basis] == ["1"]


def test_buchberger_zero_ideal():
    assert buchberger((), default_order(XY2)) == []


def _assert_buchberger_criterion(basis, order):
    basis = list(basis)
    for f, g in itertools.combinations(basis, 2):
        assert normal_form(s_polynomial(f, g, order), basis, order).is_zero


def test_buchberger_criterion_on_fixture_bases():
    from corpus import full_corpus
    from fibrecheck import fibred_power_ideal

    for problem in full_corpus():
        for k in range(1, problem.n + 1):
            Jk = fibred_power_ideal(problem.ideal, k)
            order = default_order(Jk.layout)
            _assert_buchberger_criterion(Jk.groebner_basis(order), order)


def test_generators_reduce_to_zero_against_basis():
    order = default_order(POW2)
    basis = list(BLOWUP2.groebner_basis(order))
    for g in BLOWUP2.gens:
        assert normal_form(g, basis, order).is_zero


def test_basis_canonical_under_generator_permutation():
    gens = (P(XY2, "x^2 - y"), P(XY2, "x*y - 1"), P(XY2, "y^2 - x"))
    order = default_order(XY2)
    reference = buchberger(gens, order)
    for perm in itertools.permutations(gens):
        assert buchberger(perm, order) == reference


def test_tracing_re_expands_exactly():
    gens = (P(XY2, "x^2 - y"), P(XY2, "x*y - 1"))
    order = default_order(XY2)
    basis, cofs = buchberger(gens, order, trace=True)
    assert len(basis) == len(cofs)
    for b, row in zip(basis, cofs):
        acc = Polynomial.zero(XY2, QQ)
        for c, g in zip(row, gens):
            acc = acc + c * g
        assert acc == b


def test_pair_limit_raises_resource_error():
    gens = (P(XY2, "x^3 - 2*x*y"), P(XY2, "x^2*y - 2*y^2 + x"))
    with pytest.raises(ResourceLimitError):
        buchberger(gens, default_order(XY2), ComputeBudget(pair_limit=1))


# ---------------------------------------------------------------------------
# normal forms and membership


def test_normal_form_single_division_step():
    basis = [P(XY2, "x^2 - y")]
    assert normal_form(P(XY2, "x^2"), basis, default_order(XY2)) == P(XY2, "y")


@settings(max_examples=30)
@given(poly_strategy(XY2))
def test_normal_form_idempotent(f):
    order = default_order(XY2)
    basis = list(buchberger((P(XY2, "x^2 - y"), P(XY2, "x*y - 1")), order))
    once = normal_form(f, basis, order)
    assert normal_form(once, basis, order) == once


def test_normal_form_difference_lies_in_ideal():
    order = default_order(POW2)
    basis = list(BLOWUP2.groebner_basis(order))
    f = _pow2("y1*x1 - y1*x2")
    assert normal_form(f, basis, order).is_zero


def test_ideal_member_examples():
    assert ideal_member(_pow2("y1*x1 - y1*x2"), BLOWUP2)
    assert not ideal_member(_pow2("x1 - x2"), BLOWUP2)
    assert ideal_member(Polynomial.zero(POW2, QQ), BLOWUP2)


def test_ideal_member_agrees_with_macaulay_oracle():
    fixtures = [
        (ideal_of(XY2, "x^2 - y", "x*y - 1"), ["x", "y", "x - y^2", "y^3 - 1", "x + y"]),
        (ideal_of(XY2, "x^2 - y"), ["x^2 - y", "x^3 - x*y", "y", "x"]),
        (BLOWUP2, ["y1*x1 - y1*x2", "x1 - x2", "y2*x1 - y2*x2", "y1", "0"]),
    ]
    for I, candidates in fixtures:
        bound = max(g.total_degree() for g in I.gens) + 6
        for text in candidates:
            f = _pow2(text) if I is BLOWUP2 else P(XY2, text)
            assert ideal_member(f, I) == macaulay_member(f, I.gens, bound), (
                I.gens,
                text,
            )


# ---------------------------------------------------------------------------
# modules


def test_module_rank1_reduces_to_ideal():
    gens = (P(XY2, "x^2 - y"), P(XY2, "x*y - 1"))
    pres = ModulePresentation(XY2, QQ, 1, tuple((g,) for g in gens))
    mod_basis = pres.groebner_basis()
    ideal_basis = buchberger(gens, default_order(XY2))
    assert [v[0] for v in mod_basis] == list(ideal_basis)


def test_module_disjoint_positions_untouched():
    x = P(XY2, "x")
    zero = Polynomial.zero(XY2, QQ)
    pres = ModulePresentation(XY2, QQ, 2, ((x, zero), (zero, x)))
    basis = pres.groebner_basis()
    assert sorted(basis, key=str) == sorted([(x, zero), (zero, x)], key=str)


def test_module_buchberger_s_vectors_reduce_to_zero():
    y1x = P(BLOWUP_LAYOUT, "y1*x - y2")
    y1 = P(BLOWUP_LAYOUT, "y1")
    zero = Polynomial.zero(BLOWUP_LAYOUT, QQ)
    pres = ModulePresentation(BLOWUP_LAYOUT, QQ, 2, ((y1x, zero), (y1, y1)))
    morder = pres.morder
    basis = pres.groebner_basis()
    fld = QQ
    from fibrecheck.poly import mono_div, mono_lcm
    from fibrecheck.groebner import vec_mul_term, vec_sub

    for u, v in itertools.combinations(basis, 2):
        pu, cu, mu = vector_leading(u, morder)
        pv, cv, mv = vector_leading(v, morder)
        if pu != pv:
            continue
        lcm = mono_lcm(mu, mv)
        s = vec_sub(
            vec_mul_term(u, fld.inv(cu), mono_div(lcm, mu)),
            vec_mul_term(v, fld.inv(cv), mono_div(lcm, mv)),
        )
        assert vec_is_zero(module_normal_form(s, list(basis), morder))
    for rel in pres.relations:
        assert vec_is_zero(module_normal_form(rel, list(basis), morder))
