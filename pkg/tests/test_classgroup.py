import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pfclass import linalg as la
from pfclass.classgroup import (CharacterValue, ClassRepresentative, CohomologyPairingData, DualityDatum,
                                PreconditionError, SignedMagnitude, lifted_pairing_class, basis_change_factor,
                                chi_arakelov, chi_hermitian, decompose_sign, duality_signature_check,
                                hermitian_coordinate, hyperbolic_witness, invert, phi, projection_chain_map,
                                random_opposite_degree_pairing, random_cohomology_pairing, recombine, symmetrize_duality,
                                sign_comparison_check, dual_route_check, transport_pairing)
from pfclass.complexes import (PerfectGComplex, acyclic_piece, chain_map_basis_change, change_basis,
                               direct_sum, even_odd_degrees, ga_identity, ga_matmul, random_complex,
                               random_symmetric_complex, random_unimodular)
from pfclass.cyclo import simplify
from pfclass.demos import degree_zero_complex, evaluation_pairing, pairing_on_degree_zero
from pfclass.detlines import cohomology_coordinates
from pfclass.groups import GroupAlgebraElement, apply_rep, catalog_group, symplectic_character_basis

F = Fraction
GROUPS = ["C2", "C3", "S3", "Q8"]
seeds = st.integers(min_value=0, max_value=10 ** 6)
heavy = settings(max_examples=6, deadline=None)


def exacts(rep):
    return [v.exact for v in rep.values]


def same(a, b):
    return simplify(a - b) == 0


def no_pairing():
    return CohomologyPairingData([], [])


# --- value types ------------------------------------------------------------


def test_signed_magnitude_validation():
    assert SignedMagnitude.of(F(-3, 2)) == SignedMagnitude(-1, F(9, 4))
    with pytest.raises(ValueError):
        SignedMagnitude(1, F(0))
    with pytest.raises(ValueError):
        SignedMagnitude(2, F(1))


def rep_with_signs(signs):
    return ClassRepresentative([CharacterValue(f"t{k}", F(1), SignedMagnitude(s, F(k + 2)))
                                for k, s in enumerate(signs)])


def test_decompose_sign_examples():
    arak, s = decompose_sign(rep_with_signs([1, 1, 1]))
    assert set(s.values.values()) == {1}
    arak, s = decompose_sign(rep_with_signs([1, -1, 1]))
    assert [s[k] for k in ("t0", "t1", "t2")] == [1, -1, 1]
    assert all(v.arch.sign == 1 for v in arak.values)
    back = recombine(arak, s)
    orig = rep_with_signs([1, -1, 1])
    assert [(v.finite, v.arch) for v in back.values] == [(v.finite, v.arch) for v in orig.values]


# --- acyclic triviality and direct sums -----------------------------------------


@pytest.mark.parametrize("name", ["C1", "C2", "C3", "C4", "C6", "S3", "D4", "Q8"])
def test_acyclic_with_zero_form_is_trivial(name):
    g = catalog_group(name)
    rng = random.Random(name)
    p = acyclic_piece(g, rng.choice([-1, 0]), 2, random_unimodular(g, 2, rng))
    herm = chi_hermitian(p, no_pairing())
    assert all(v.finite == 1 and v.exact == 1 and v.arch == SignedMagnitude(1, F(1)) for v in herm.values)
    arak = chi_arakelov(p, no_pairing())
    assert all(v.arch == SignedMagnitude(1, F(1)) for v in arak.values)


def test_trivial_group_rank_one():
    g = catalog_group("C1")
    p = degree_zero_complex(g, 1)
    rep = chi_hermitian(p, pairing_on_degree_zero(p, [[F(1)]]))
    assert rep.values[0].arch == SignedMagnitude(1, F(1))


def test_arakelov_trivial_group_stores_square():
    g = catalog_group("C1")
    p = degree_zero_complex(g, 1)
    rep = chi_arakelov(p, pairing_on_degree_zero(p, [[F(4)]]))
    v = rep.values[0]
    assert v.arch.sign == 1
    assert v.rooted.power == 16 and v.arch.magnitude_squared == 16


def direct_sum_pairing(p1, s1, p2, s2):
    """sigma_1 + sigma_2 rewritten on the canonical cohomology bases of P1 + P2."""
    s = direct_sum(p1, p2)
    n = s.group.order
    out = []
    for parity in (0, 1):
        forms = [(p1, s1.sigma_ev if parity == 0 else s1.sigma_odd),
                 (p2, s2.sigma_ev if parity == 0 else s2.sigma_odd)]
        offsets = []
        for p, _ in forms:
            off, total = {}, 0
            for i in even_odd_degrees(p)[parity]:
                off[i] = total
                total += len(p.splitting.H[i])
            offsets.append(off)
        layout = []  # (summand, degree, index)
        for i in even_odd_degrees(s)[parity]:
            for a, (p, _) in enumerate(forms):
                layout += [(a, i, k) for k in range(len(p.splitting.H.get(i, [])))]
        union = la.zeros(len(layout), len(layout))
        for r, (a, i, k) in enumerate(layout):
            for c, (b, j, l) in enumerate(layout):
                if a == b:
                    union[r][c] = forms[a][1][offsets[a][i] + k][offsets[a][j] + l]
        cols = []
        for i in even_odd_degrees(s)[parity]:
            cut = p1.rank(i) * n
            for v in s.splitting.H[i]:
                col = []
                for a, (p, _) in enumerate(forms):
                    part = v[:cut] if a == 0 else v[cut:]
                    if p.splitting.H.get(i):
                        col += cohomology_coordinates(p.rational, i, [part], p.splitting)[0]
                col_full = [F(0)] * len(layout)
                pos = [r for r, (a, j, k) in enumerate(layout) if j == i]
                for r, x in zip(pos, col):
                    col_full[r] = x
                cols.append(col_full)
        if not cols:
            out.append([])
            continue
        phi_m = la.from_columns(cols, len(layout))
        out.append([[simplify(x) for x in row] for row in la.mat_mul(la.transpose(phi_m), la.mat_mul(union, phi_m))])
    return s, CohomologyPairingData(out[0], out[1])


@pytest.mark.parametrize("name", GROUPS)
@heavy
@given(seed=seeds)
def test_direct_sum_multiplicativity(name, seed):
    g = catalog_group(name)
    rng = random.Random(seed)
    p1 = random_complex(g, rng, -1, 1, 1)
    p2 = random_complex(g, rng, -1, 1, 1)
    s1, s2 = random_cohomology_pairing(p1, rng), random_cohomology_pairing(p2, rng)
    s, ss = direct_sum_pairing(p1, s1, p2, s2)
    herm = chi_hermitian(s, ss)
    for v, a, b in zip(herm.values, chi_hermitian(p1, s1).values, chi_hermitian(p2, s2).values):
        assert same(v.exact, a.exact * b.exact)
        assert v.finite == a.finite * b.finite
    arak = chi_arakelov(s, ss)
    for v, a, b in zip(arak.values, chi_arakelov(p1, s1).values, chi_arakelov(p2, s2).values):
        assert v.rooted.power == a.rooted.power * b.rooted.power


# --- quasi-isomorphism invariance and basis changes ------------------------------


@pytest.mark.parametrize("name", GROUPS)
@heavy
@given(seed=seeds)
def test_invariance_under_acyclic_summands(name, seed):
    g = catalog_group(name)
    rng = random.Random(seed)
    p = random_complex(g, rng, -1, 1, 1)
    sigma = random_cohomology_pairing(p, rng)
    extra = acyclic_piece(g, rng.choice([-2, -1, 0, 1]), rng.randint(1, 2))
    q = direct_sum(p, extra)
    sq = transport_pairing(q, p, projection_chain_map(p, extra), sigma)
    assert all(same(a, b) for a, b in zip(exacts(chi_hermitian(p, sigma)), exacts(chi_hermitian(q, sq))))


@pytest.mark.parametrize("name", GROUPS)
@heavy
@given(seed=seeds)
def test_independent_of_splitting(name, seed):
    g = catalog_group(name)
    rng = random.Random(seed)
    p = random_complex(g, rng, -1, 1, 1)
    sigma = random_cohomology_pairing(p, rng)
    base = chi_hermitian(p, sigma)
    for it, v in zip(symplectic_character_basis(g), base.values):
        assert same(hermitian_coordinate(p, sigma, it, random.Random(seed + 1)), v.exact)


def det_at(item, a):
    mats = item.representation.matrices
    return la.det(la.block_matrix([[apply_rep(mats, x) for x in row] for row in a]))


@pytest.mark.parametrize("name", GROUPS)
@heavy
@given(seed=seeds)
def test_basis_change_covariance(name, seed):
    g = catalog_group(name)
    rng = random.Random(seed)
    p = random_complex(g, rng, -1, 1, 1)
    sigma = random_cohomology_pairing(p, rng)
    tr = {}
    for i in p.degrees:
        if p.rank(i):
            d = ga_identity(g, p.rank(i))
            d[0][0] = GroupAlgebraElement.from_dict(g, {0: rng.choice([2, 3, -2]), rng.randrange(g.order): 1})
            tr[i] = ga_matmul(random_unimodular(g, p.rank(i), rng), d, g)
    p2 = change_basis(p, tr)
    s2 = transport_pairing(p2, p, chain_map_basis_change(p, tr), sigma)
    items = symplectic_character_basis(g)
    for it, a, b in zip(items, chi_hermitian(p, sigma).values, chi_hermitian(p2, s2).values):
        factor = F(1)
        for i, m in tr.items():
            factor = simplify(factor * det_at(it, m) ** (-1 if i % 2 else 1))
        assert same(b.exact, a.exact * factor)
        assert same(factor, basis_change_factor(p, tr, it))


def test_finite_part_from_transitions():
    g = catalog_group("C2")
    two = GroupAlgebraElement.from_dict(g, {0: 2})
    p = PerfectGComplex(g, 0, [1], [], {0: [[two]]})
    rep = chi_hermitian(p, pairing_on_degree_zero(p, la.identity(2)))
    assert [v.finite for v in rep.values] == [4, 4]
    q = PerfectGComplex(g, -1, [1, 0], [[]], {-1: [[two]]})
    rep = chi_hermitian(q, CohomologyPairingData([], la.identity(2)))
    assert [v.finite for v in rep.values] == [F(1, 4), F(1, 4)]


# --- preconditions ---------------------------------------------------------------


def test_pairing_preconditions():
    g = catalog_group("C2")
    p = degree_zero_complex(g, 1)
    with pytest.raises(PreconditionError):
        chi_hermitian(p, CohomologyPairingData([[F(1)]], []))
    with pytest.raises(PreconditionError):
        chi_hermitian(p, CohomologyPairingData([[F(1), F(1)], [F(1), F(1)]], []))
    with pytest.raises(PreconditionError):
        chi_hermitian(p, CohomologyPairingData([[F(1), F(0)], [F(0), F(2)]], []))


# --- sign comparison ---------------------------------------------------------------


def test_sign_comparison_positive_definite():
    g = catalog_group("C3")
    p = degree_zero_complex(g, 1)
    rows = sign_comparison_check(p, pairing_on_degree_zero(p, la.identity(3)))
    assert all(r["sign"] == r["predicted"] == 1 and r["ok"] for r in rows)


def test_sign_comparison_negative_definite():
    g = catalog_group("C2")
    p = degree_zero_complex(g, 1)
    rows = {r["character"]: r for r in sign_comparison_check(p, pairing_on_degree_zero(p, la.mat_scale(-1, la.identity(2))))}
    assert rows["2*1"]["n_minus"] == 2 and rows["2*1"]["sign"] == -1 and rows["2*1"]["ok"]


def test_sign_comparison_hyperbolic_both_parities():
    g = catalog_group("S3")
    p = PerfectGComplex(g, 0, [2, 2], [[[GroupAlgebraElement.zero(g)] * 2 for _ in range(2)]])
    form = evaluation_pairing(g)
    ev = pairing_on_degree_zero(degree_zero_complex(g, 2), form).sigma_ev
    h1 = la.from_columns(p.splitting.H[1], len(form))
    odd = la.mat_mul(la.transpose(h1), la.mat_mul(form, h1))
    h0 = la.from_columns(p.splitting.H[0], len(form))
    ev = la.mat_mul(la.transpose(h0), la.mat_mul(form, h0))
    rows = sign_comparison_check(p, CohomologyPairingData(ev, odd))
    assert all(r["n_minus"] == 0 and r["sign"] == 1 and r["ok"] for r in rows)


@pytest.mark.parametrize("name", GROUPS)
@heavy
@given(seed=seeds)
def test_sign_comparison_random(name, seed):
    g = catalog_group(name)
    rng = random.Random(seed)
    p = random_complex(g, rng, -1, 1, 1)
    assert all(r["ok"] for r in sign_comparison_check(p, random_cohomology_pairing(p, rng)))


# --- lifted pairings and the dual route -------------------------------------------


def test_lifted_class_degree_zero_reduces_to_plain_coordinate():
    g = catalog_group("C1")
    p = degree_zero_complex(g, 1)
    sigma = pairing_on_degree_zero(p, [[F(-5)]])
    rows = dual_route_check(p, sigma, random.Random(0))
    assert all(r["ok"] for r in rows)
    h = lifted_pairing_class(p, sigma.scaled(g.order), random.Random(0))
    assert same(invert(phi(h)).values[0].exact, chi_hermitian(p, sigma).values[0].exact)
    # p^0 = sigma^0, so the pf part is the plain Pfaffian coordinate; phi then inverts it
    assert same(list(h.pf_part.values())[0], F(-5))


def test_lifted_class_acyclic_zero_form_is_trivial():
    g = catalog_group("C2")
    p = direct_sum(acyclic_piece(g, -1, 1), acyclic_piece(g, 0, 1))
    h = lifted_pairing_class(p, no_pairing(), random.Random(1))
    assert all(same(v, 1) for v in h.pf_part.values())
    assert all(r["ok"] for r in dual_route_check(p, no_pairing(), random.Random(1)))


@pytest.mark.parametrize("name", ["C2", "Q8"])
def test_lifted_class_hyperbolic_in_degrees_plus_minus_one(name):
    g = catalog_group(name)
    p = PerfectGComplex(g, -1, [1, 0, 1], [[[]], []])
    form = evaluation_pairing(g)  # H^1 paired with H^{-1}
    hs = [v + [F(0)] * g.order for v in p.splitting.H[1]] + [[F(0)] * g.order + v for v in p.splitting.H[-1]]
    hm = la.from_columns(hs, 2 * g.order)
    sigma = CohomologyPairingData([], la.mat_mul(la.transpose(hm), la.mat_mul(form, hm)))
    rows = dual_route_check(p, sigma, random.Random(2))
    assert all(r["ok"] and r["euler_rank"] == -2 for r in rows)
    # the odd-degree plane inverts the degree-zero one
    p0 = degree_zero_complex(g, 2)
    plane = chi_hermitian(p0, pairing_on_degree_zero(p0, form))
    for r, v in zip(rows, plane.values):
        assert same(r["route_a"] * v.exact, 1)


@pytest.mark.parametrize("name", GROUPS)
@heavy
@given(seed=seeds)
def test_dual_route_random(name, seed):
    g = catalog_group(name)
    rng = random.Random(seed)
    p = random_symmetric_complex(g, rng, 1, 1)
    rows = dual_route_check(p, random_opposite_degree_pairing(p, rng), rng)
    assert all(r["ok"] for r in rows)


def test_dual_route_nonzero_euler_characteristic_factor():
    g = catalog_group("C2")
    p = degree_zero_complex(g, 1)
    sigma = pairing_on_degree_zero(p, la.identity(2))
    rows = dual_route_check(p, sigma, random.Random(0))
    assert all(r["euler_rank"] == 1 and r["lift_pf"] and r["ok"] for r in rows)


# --- symmetrisation of duality pairings ---------------------------------------------


def test_symmetrize_d0():
    dd = DualityDatum(0, {(0, 0): 1}, {(0, 0): [[F(3)]]})
    sp = symmetrize_duality(dd)
    assert sp.sigma_t == {0: [[F(3)]]}
    assert sp.pairing.sigma_ev == [[F(3)]]


def test_symmetrize_d2_middle_only():
    m = [[F(1), F(2)], [F(2), F(-1)]]
    dd = DualityDatum(2, {(1, 1): 2}, {(1, 1): m})
    sp = symmetrize_duality(dd)
    assert sp.sigma_t == {0: m}
    assert duality_signature_check(sp, dd)["ok"]


def test_symmetrize_rejects_commutation_violation():
    dd = DualityDatum(2, {(1, 1): 2}, {(1, 1): [[F(1), F(2)], [F(3), F(1)]]})
    with pytest.raises(PreconditionError):
        symmetrize_duality(dd)


def test_symmetrize_d1_is_hyperbolic():
    a = [[F(2), F(1)], [F(0), F(3)]]
    dd = DualityDatum(1, {(0, 0): 2, (1, 1): 2}, {(0, 0): a, (1, 1): la.transpose(a)})
    sp = symmetrize_duality(dd)
    assert set(sp.sigma_t) == {-1}
    w = hyperbolic_witness(sp.sigma_t[-1], 2)
    assert w is not None
    assert sp.pairing.sigma_ev == [] and len(sp.pairing.sigma_odd) == 4
