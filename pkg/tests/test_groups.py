from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pfclass import linalg as la
from pfclass.cyclo import conj, is_real, simplify
from pfclass.forms import check_hyperbolic, pf_functional
from pfclass.groups import (FiniteGroup, GroupAlgebraElement, GroupError, algebra_involution, algebra_mul,
                            apply_rep, catalog_group, character_degree_sum_ok, frobenius_schur, inner_product,
                            symplectic_character_basis)

CATALOG = ["C1", "C2", "C3", "C4", "C5", "C6", "S3", "D3", "D4", "D5", "Q8"]
FIELD = ["C2", "C3", "C4", "C6", "S3", "D4", "Q8"]


@pytest.fixture(scope="module", params=CATALOG)
def group(request):
    return catalog_group(request.param)


def test_c2_catalog():
    g = catalog_group("C2")
    assert g.order == 2
    assert [c.degree for c in g.characters] == [1, 1]


def test_q8_character_values():
    g = catalog_group("Q8")
    assert g.order == 8
    degrees = sorted(c.degree for c in g.characters)
    assert degrees == [1, 1, 1, 1, 2]
    theta = next(c for c in g.characters if c.degree == 2)
    assert [simplify(v) for v in theta.class_values] == [2, -2, 0, 0, 0]


def test_s3_degrees():
    assert sorted(c.degree for c in catalog_group("S3").characters) == [1, 1, 2]


def test_unknown_group_rejected():
    with pytest.raises(GroupError):
        catalog_group("A7")
    with pytest.raises(GroupError):
        catalog_group("D", 2)


def test_bad_table_rejected():
    with pytest.raises(GroupError):
        FiniteGroup("bad", ((0, 1), (1, 1)), ("e", "x"), (1,))


def test_group_law_and_classes(group):
    n = group.order
    t = group.mult_table
    for a in range(n):
        for b in range(n):
            for c in range(n):
                assert t[t[a][b]][c] == t[a][t[b][c]]
    assert sorted(x for cls in group.conjugacy_classes for x in cls) == list(range(n))


def test_representations_are_homomorphisms(group):
    for rep in group.irreducibles:
        for a in range(group.order):
            for b in range(group.order):
                assert la.mat_eq(la.mat_mul(rep(a), rep(b)), rep(group.mul(a, b)))
        assert la.mat_eq(rep(group.identity), la.identity(rep.degree))


def test_degree_sum_and_orthogonality(group):
    assert character_degree_sum_ok(group)
    assert sum(c.degree ** 2 for c in group.characters) == group.order
    chars = group.characters
    for i, a in enumerate(chars):
        for j, b in enumerate(chars):
            assert simplify(inner_product(a, b)) == (1 if i == j else 0)


def brute_fs(chi, group):
    return simplify(sum((chi(group.mul(g, g)) for g in range(group.order)), Fraction(0)) / group.order)


def test_frobenius_schur_matches_direct_sum(group):
    for chi in group.characters:
        assert frobenius_schur(chi) == brute_fs(chi, group)
        assert frobenius_schur(chi) in (-1, 0, 1)


def test_frobenius_schur_examples():
    q8 = catalog_group("Q8")
    assert frobenius_schur(next(c for c in q8.characters if c.degree == 2)) == -1
    c4 = catalog_group("C4")
    faithful = [c for c in c4.characters if not is_real(c(1))]
    assert faithful and all(frobenius_schur(c) == 0 for c in faithful)
    for name in FIELD:
        assert frobenius_schur(catalog_group(name).characters[0]) == 1


@pytest.mark.parametrize("name,kinds", [
    ("C2", ["doubled-orthogonal", "doubled-orthogonal"]),
    ("C3", ["doubled-orthogonal", "conjugate-pair"]),
    ("Q8", ["doubled-orthogonal"] * 4 + ["symplectic-irreducible"]),
])
def test_symplectic_basis_examples(name, kinds):
    items = symplectic_character_basis(catalog_group(name))
    assert [it.kind for it in items] == kinds
    assert all(it.degree == 2 for it in items)


@pytest.mark.parametrize("name", FIELD)
def test_symplectic_basis_items(name):
    g = catalog_group(name)
    for it in symplectic_character_basis(g):
        k = it.kappa_gram
        assert la.is_alternating(k) and simplify(la.det(k)) != 0
        for x in range(g.order):
            r = it.representation(x)
            assert la.mat_eq(la.mat_mul(la.transpose(r), la.mat_mul(k, r)), k)
        assert check_hyperbolic(k, it.hyperbolic_basis)
        assert simplify(pf_functional(k, it.hyperbolic_basis)) == 1
        assert it.degree % 2 == 0
        assert all(is_real(v) for v in it.character.class_values)


def elements(group):
    coeff = st.fractions(min_value=-3, max_value=3, max_denominator=3)
    return st.lists(coeff, min_size=group.order, max_size=group.order).map(
        lambda cs: GroupAlgebraElement(group, tuple(cs)))


@pytest.mark.parametrize("name", ["C3", "S3", "Q8"])
@given(data=st.data())
def test_algebra_identities(name, data):
    g = catalog_group(name)
    a, b, c = (data.draw(elements(g)) for _ in range(3))
    one = GroupAlgebraElement.one(g)
    assert algebra_mul(one, b) == b
    assert algebra_mul(algebra_mul(a, b), c) == algebra_mul(a, algebra_mul(b, c))
    assert algebra_involution(algebra_involution(a)) == a
    assert algebra_involution(algebra_mul(a, b)) == algebra_mul(algebra_involution(b), algebra_involution(a))
    for rep in g.irreducibles:
        assert la.mat_eq(apply_rep(rep, algebra_mul(a, b)),
                         la.mat_mul(apply_rep(rep, a), apply_rep(rep, b)))
        # involution: sum conj(a_g) rho(g)^{-1}
        rhs = la.zeros(rep.degree, rep.degree)
        for x, ax in enumerate(a.coeffs):
            rhs = la.mat_add(rhs, la.mat_scale(conj(ax), la.inverse(rep(x))))
        lhs = apply_rep(rep, algebra_involution(a))
        assert la.mat_eq([[simplify(x) for x in r] for r in lhs], [[simplify(x) for x in r] for r in rhs])


def test_apply_rep_sign_example():
    g = catalog_group("C2")
    sgn = g.irreducibles[1]
    a = GroupAlgebraElement(g, (Fraction(3), Fraction(1)))
    assert [[simplify(x) for x in r] for r in apply_rep(sgn, a)] == [[2]]


def test_group_mismatch():
    a = GroupAlgebraElement.one(catalog_group("C2"))
    b = GroupAlgebraElement.one(catalog_group("C3"))
    with pytest.raises(GroupError):
        algebra_mul(a, b)
