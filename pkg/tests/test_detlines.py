import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from pfclass import linalg as la
from pfclass.detlines import (ComplexError, ComplexOverField, GradedLineElement, bhu_splitting, cycles, direct_sum,
                              koszul_reorder, pf_on_complex, upsilon_reorder, xi_det_cohomology)
from pfclass.forms import pfaffian, standard_symplectic
from oracles import det, random_alternating, random_rational_matrix

F = Fraction
seeds = st.integers(min_value=0, max_value=10 ** 9)


def line(grade):
    return GradedLineElement(F(1), grade)


def test_koszul_examples():
    assert koszul_reorder(line(2), line(4)) == 1
    assert koszul_reorder(line(1), line(1)) == -1
    assert koszul_reorder(line(0), line(7)) == 1


def test_graded_line_bookkeeping():
    x = GradedLineElement(F(3), 2).tensor(GradedLineElement(F(5), 1))
    assert (x.scalar, x.grade) == (15, 3)
    assert (x.inverse().scalar, x.inverse().grade) == (F(1, 15), -3)


def test_xi_identity_when_boundaries_vanish():
    c = ComplexOverField(0, [2, 2], [la.zeros(2, 2)])
    assert xi_det_cohomology(c).scalar == 1
    w = {0: [[F(2), F(0)], [F(0), F(1)]], 1: la.columns(la.identity(2))}
    assert xi_det_cohomology(c, w).scalar == 2


def test_xi_acyclic_single_step():
    # the splitting uses x_U = e0 and x_B = d(x_U) = c e1, so e1 = c^{-1} x_B and e1^{-1} = c x_B^{-1}
    c = F(7, 3)
    cx = ComplexOverField(0, [1, 1], [[[c]]])
    res = xi_det_cohomology(cx)
    assert res.scalar == c
    assert res.element.grade == 0


def test_xi_projection_example():
    cx = ComplexOverField(0, [2, 1], [[[F(1), F(0)]]])
    res = xi_det_cohomology(cx)
    sp = res.splitting
    assert sp.B[0] == [] and sp.B[1] == [[F(1)]] and sp.H[1] == []
    assert len(sp.H[0]) == 1 and sp.H[0][0][0] == 0 and sp.U[0][0][1] == 0
    h = sp.H[0][0][1]
    u = sp.U[0][0][0]
    # the splitting's own wedge x_H ^ x_U = e_2 ^ e_1 has coordinate 1 on H^0 = <e_2>
    own = xi_det_cohomology(cx, {0: [[F(0), F(1)], [F(1), F(0)]], 1: [[u]]}, sp)
    assert own.scalar * h == 1
    # the standard wedge e_1 ^ e_2 differs by the transposition
    assert res.scalar * h == -1


def test_nonzero_composition_rejected():
    with pytest.raises(ComplexError) as info:
        ComplexOverField(0, [1, 1, 1], [[[F(1)]], [[F(1)]]])
    assert info.value.degree == 0


def test_singular_wedge_rejected():
    c = ComplexOverField(0, [2], [])
    with pytest.raises(ComplexError):
        xi_det_cohomology(c, {0: [[F(1), F(1)], [F(1), F(1)]]})


def test_upsilon_examples():
    assert upsilon_reorder({-1: 2, 0: 4, 1: 2, 2: 6})[1] == 1
    assert upsilon_reorder({-1: 1, 0: 1})[1] == -1
    assert upsilon_reorder({}) == ([], 1)
    assert upsilon_reorder({-2: 1, -1: 1, 0: 1, 1: 1, 2: 1})[0] == [0, 2, -2, 1, -1]


@given(st.dictionaries(st.integers(-3, 3), st.integers(0, 3).map(lambda k: 2 * k)))
def test_upsilon_sign_free_for_even_dimensions(dims):
    assert upsilon_reorder(dims)[1] == 1


def random_field_complex(rng, lo=-1, length=3, max_piece=2, doubled=False):
    """Direct sum of elementary pieces (Q alone, or Q -> Q with a random scalar),
    disguised by random invertible basis changes in every degree."""
    hi = lo + length - 1
    pieces = []  # (degree, kind, scalar)
    for i in range(lo, hi + 1):
        for _ in range(rng.randint(0, max_piece)):
            pieces.append((i, "h", None))
        if i < hi:
            for _ in range(rng.randint(0, max_piece)):
                pieces.append((i, "u", F(rng.choice([1, -1]) * rng.randint(1, 5), rng.randint(1, 3))))
    if doubled:
        pieces = pieces + pieces
    idx = {i: [] for i in range(lo, hi + 1)}
    for k, (i, kind, c) in enumerate(pieces):
        idx[i].append(k)
        if kind == "u":
            idx[i + 1].append(k)
    dims = [len(idx[i]) for i in range(lo, hi + 1)]
    bds = []
    for i in range(lo, hi):
        m = la.zeros(dims[i + 1 - lo], dims[i - lo])
        for col, k in enumerate(idx[i]):
            deg, kind, c = pieces[k]
            if kind == "u" and deg == i:
                m[idx[i + 1].index(k)][col] = c
        bds.append(m)
    mats = {}
    for i in range(lo, hi + 1):
        n = dims[i - lo]
        while True:
            p = random_rational_matrix(rng, n)
            if n == 0 or det(p) != 0:
                break
        mats[i] = p
    new_bds = [la.mat_mul(mats[i + 1], la.mat_mul(bds[i - lo], la.inverse(mats[i])))
               if dims[i - lo] and dims[i + 1 - lo] else bds[i - lo] for i in range(lo, hi)]
    h_dims = {i: sum(1 for (d, kind, _) in pieces if d == i and kind == "h") for i in range(lo, hi + 1)}
    return ComplexOverField(lo, dims, new_bds), h_dims


@given(seeds)
def test_splitting_shape(seed):
    c, h_dims = random_field_complex(random.Random(seed))
    sp = bhu_splitting(c)
    for i in c.degrees:
        assert len(sp.H[i]) == h_dims[i]
        assert len(sp.B[i]) + len(sp.H[i]) + len(sp.U[i]) == c.dim(i)
        if c.dim(i):
            assert det(sp.basis_matrix(i)) != 0
        d = c.boundary(i)
        if d is not None:
            assert all(not any(la.mat_vec(d, v)) for v in sp.B[i] + sp.H[i])
            assert [la.mat_vec(d, v) for v in sp.U[i]] == sp.B[i + 1]
        assert len(cycles(c, i)) == len(sp.B[i]) + len(sp.H[i])


def even_cohomology_complex(rng):
    while True:
        c, h_dims = random_field_complex(rng, max_piece=3)
        if all(v % 2 == 0 for v in h_dims.values()):
            return c, h_dims


def random_forms(rng, c, h_dims):
    ev = sum(v for i, v in h_dims.items() if i % 2 == 0)
    odd = sum(v for i, v in h_dims.items() if i % 2)
    while True:
        a, b = random_alternating(rng, ev), random_alternating(rng, odd)
        if (not ev or det(a) != 0) and (not odd or det(b) != 0):
            return a, b


@given(seeds)
def test_pf_on_complex_independent_of_splitting(seed):
    rng = random.Random(seed)
    c, h_dims = even_cohomology_complex(rng)
    h_ev, h_odd = random_forms(rng, c, h_dims)
    base = pf_on_complex(c, h_ev, h_odd)
    other = bhu_splitting(c, random.Random(seed + 1))
    assert pf_on_complex(c, h_ev, h_odd, splitting=other) == base
    assert xi_det_cohomology(c, splitting=other).scalar != 0


def test_pf_on_complex_degree_zero_and_one():
    h = standard_symplectic(2)
    c0 = ComplexOverField(0, [4], [])
    assert pf_on_complex(c0, h, []) == 1
    c1 = c0.shifted(1)
    assert pf_on_complex(c1, [], h) == 1


def test_pf_on_complex_acyclic_zero_forms():
    c = ComplexOverField(-1, [1, 1], [[[F(1)]]])
    assert pf_on_complex(c, [], []) == 1


@given(seeds, st.integers(min_value=1, max_value=3))
def test_pf_on_complex_degree_zero_wedge(seed, half):
    rng = random.Random(seed)
    n = 2 * half
    h = random_alternating(rng, n)
    w = random_rational_matrix(rng, n)
    assume(det(h) != 0 and det(w) != 0)
    c = ComplexOverField(0, [n], [])
    got = pf_on_complex(c, h, [], {0: la.columns(w)})
    assert got == pfaffian(la.mat_mul(la.transpose(w), la.mat_mul(h, w)))
    assert got == det(w) * pfaffian(h)


@given(seeds)
def test_xi_multiplicative_on_direct_sums(seed):
    # every term even-dimensional: the identification is sign-free
    rng = random.Random(seed)
    c1, _ = random_field_complex(rng, doubled=True)
    c2, _ = random_field_complex(rng, lo=rng.randint(-2, 0), doubled=True)
    s = direct_sum(c1, c2)
    sp1, sp2 = bhu_splitting(c1), bhu_splitting(c2)
    # block-union splitting of the sum
    from pfclass.detlines import BHUSplitting

    def glue(a, b, i):
        n1, n2 = c1.dim(i), c2.dim(i)
        return [v + [F(0)] * n2 for v in a] + [[F(0)] * n1 + v for v in b]

    union = BHUSplitting({i: glue(sp1.B.get(i, []), sp2.B.get(i, []), i) for i in s.degrees},
                         {i: glue(sp1.H.get(i, []), sp2.H.get(i, []), i) for i in s.degrees},
                         {i: glue(sp1.U.get(i, []), sp2.U.get(i, []), i) for i in s.degrees})
    w1 = {i: la.columns(random_rational_matrix(rng, c1.dim(i))) for i in c1.degrees}
    w2 = {i: la.columns(random_rational_matrix(rng, c2.dim(i))) for i in c2.degrees}
    assume(all(det(la.from_columns(w, c.dim(i))) != 0 for c, ws in ((c1, w1), (c2, w2))
               for i, w in ws.items() if w))
    ws = {i: glue(w1.get(i, []), w2.get(i, []), i) for i in s.degrees}
    lhs = xi_det_cohomology(s, ws, union).scalar
    rhs = xi_det_cohomology(c1, w1, sp1).scalar * xi_det_cohomology(c2, w2, sp2).scalar
    assert lhs == rhs
