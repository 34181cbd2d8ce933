import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pfclass.complexes import (PerfectGComplex, acyclic_piece, dual_complex, ga_identity, ga_inverse,
                               ga_is_zero, ga_matmul, ga_zero_matrix, random_complex, random_symmetric_complex,
                               random_unimodular, regular_right_matrix)
from pfclass.detlines import ComplexError
from pfclass.groups import GroupAlgebraElement, catalog_group
from pfclass.serialize import ParseError, complex_from_json, complex_to_json, dumps

from oracles import sym

F = Fraction
seeds = st.integers(min_value=0, max_value=10 ** 6)
group_names = st.sampled_from(["C1", "C2", "C3", "C4", "S3", "Q8"])


def elt(group, coeffs):
    return GroupAlgebraElement(group, tuple(F(c) for c in coeffs))


def brute_dims(p):
    """dim H^i = dim P^i - rank d^i - rank d^{i-1}, ranks from sympy."""
    c = p.rational
    out = {}
    for i in p.degrees:
        dim = c.dim(i)
        r_out = sym(c.boundary(i)).rank() if c.boundary(i) is not None else 0
        r_in = sym(c.boundary(i - 1)).rank() if c.boundary(i - 1) is not None else 0
        out[i] = dim - r_out - r_in
    return out


def test_nonzero_square_rejected():
    g = catalog_group("C2")
    one = elt(g, [1, 0])
    with pytest.raises(ComplexError, match="degree -1"):
        PerfectGComplex(g, -1, [1, 1, 1], [[[one]], [[one]]])


def test_wrong_shape_and_count_rejected():
    g = catalog_group("C2")
    one = elt(g, [1, 0])
    with pytest.raises(ComplexError):
        PerfectGComplex(g, 0, [2, 1], [[[one]]])
    with pytest.raises(ComplexError):
        PerfectGComplex(g, 0, [1, 1], [])


def test_norm_and_augmentation_compose_to_zero():
    g = catalog_group("C2")
    p = PerfectGComplex(g, 0, [1, 1, 1], [[[elt(g, [1, -1])]], [[elt(g, [1, 1])]]])
    assert p.cohomology_dims() == {0: 1, 1: 0, 2: 1}
    assert brute_dims(p) == p.cohomology_dims()


def test_acyclic_piece_has_no_cohomology():
    g = catalog_group("S3")
    p = acyclic_piece(g, 1, 2)
    assert p.cohomology_dims() == {1: 0, 2: 0}
    assert p.euler_rank == 0


@settings(max_examples=25, deadline=None)
@given(group_names, seeds)
def test_random_complexes_square_to_zero(name, seed):
    g = catalog_group(name)
    p = random_complex(g, random.Random(seed))
    for i in range(p.lo, p.hi - 1):
        a, b = p.boundary(i), p.boundary(i + 1)
        if a is not None and b is not None:
            assert ga_is_zero(ga_matmul(a, b, g))
    c = p.rational
    for i in range(c.lo, c.hi - 1):
        a, b = c.boundary(i), c.boundary(i + 1)
        if a is not None and b is not None:
            assert (sym(b) * sym(a)).is_zero_matrix


@settings(max_examples=25, deadline=None)
@given(group_names, seeds)
def test_cohomology_dims_match_rank_oracle(name, seed):
    p = random_complex(catalog_group(name), random.Random(seed))
    assert p.cohomology_dims() == brute_dims(p)


@settings(max_examples=20, deadline=None)
@given(group_names, seeds)
def test_splitting_is_a_basis_and_stable(name, seed):
    p = random_complex(catalog_group(name), random.Random(seed))
    sp = p.splitting
    for i in p.degrees:
        dim = p.rational.dim(i)
        if not dim:
            continue
        assert sym(sp.basis_matrix(i)).rank() == dim
        if sp.H[i]:
            p.action_on(i, sp.H[i])  # raises if not G-stable


@settings(max_examples=20, deadline=None)
@given(group_names, seeds)
def test_dual_twice_is_identity(name, seed):
    p = random_complex(catalog_group(name), random.Random(seed))
    q = dual_complex(dual_complex(p))
    assert (q.lo, q.ranks) == (p.lo, p.ranks)
    assert complex_to_json(q) == complex_to_json(p)


@settings(max_examples=15, deadline=None)
@given(group_names, seeds)
def test_dual_cohomology_reflects(name, seed):
    p = random_complex(catalog_group(name), random.Random(seed))
    d, q = p.cohomology_dims(), dual_complex(p).cohomology_dims()
    assert all(q[-i] == d[i] for i in p.degrees)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["C2", "C3", "S3"]), seeds)
def test_symmetric_complex_has_symmetric_cohomology(name, seed):
    p = random_symmetric_complex(catalog_group(name), random.Random(seed))
    d = p.cohomology_dims()
    assert all(d[i] == d.get(-i, 0) for i in p.degrees)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["C2", "C3", "S3", "Q8"]), seeds, st.integers(1, 2))
def test_regular_matrix_is_multiplicative(name, seed, r):
    g = catalog_group(name)
    rng = random.Random(seed)
    a = random_unimodular(g, r, rng)
    b = random_unimodular(g, r, rng)
    lhs = regular_right_matrix(g, ga_matmul(a, b, g), r, r)
    # x -> x(ab) is (x -> x a) followed by (y -> y b)
    rhs = sym(regular_right_matrix(g, b, r, r)) * sym(regular_right_matrix(g, a, r, r))
    assert sym(lhs) == rhs


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["C2", "C3", "S3"]), seeds, st.integers(1, 2))
def test_unimodular_inverse(name, seed, r):
    g = catalog_group(name)
    a = random_unimodular(g, r, random.Random(seed))
    prod = ga_matmul(a, ga_inverse(g, a), g)
    assert all(prod[i][j] == (ga_identity(g, r)[i][j]) for i in range(r) for j in range(r))
    assert abs(sym(regular_right_matrix(g, a, r, r)).det()) == 1


def test_singular_matrix_has_no_inverse():
    g = catalog_group("C2")
    with pytest.raises(ComplexError):
        ga_inverse(g, [[elt(g, [1, 1])]])


@settings(max_examples=20, deadline=None)
@given(group_names, seeds)
def test_json_round_trip(name, seed):
    p = random_complex(catalog_group(name), random.Random(seed))
    text = dumps(complex_to_json(p))
    q = complex_from_json(json.loads(text))
    assert complex_to_json(q) == complex_to_json(p)
    assert q.cohomology_dims() == p.cohomology_dims()


def test_sparse_element_encoding():
    data = {"group": "C3", "lo": 0, "ranks": [1, 1], "boundaries": [[[{"0": "2", "1": "-1/2"}]]]}
    p = complex_from_json(data)
    assert p.boundary(0)[0][0].coeffs == (F(2), F(-1, 2), F(0))


@pytest.mark.parametrize("data, needle", [
    ({"group": "C2", "lo": 0, "ranks": [1, 1, 1], "boundaries": [[[["1", "0"]]], [[["1", "0"]]]]},
     "boundary composition nonzero at degree 0"),
    ({"group": "C2", "lo": 0, "ranks": [1, 1], "boundaries": [[[["1", "0", "0"]]]]}, "coefficients"),
    ({"group": "C2", "lo": 0, "ranks": [1, 1], "boundaries": []}, "one boundary"),
    ({"group": "C2", "lo": 0, "hi": 3, "ranks": [1, 1], "boundaries": [[[["1", "0"]]]]}, "hi"),
    ({"group": "Z99", "lo": 0, "ranks": [1]}, "header"),
    ({"group": "C2", "lo": 0, "ranks": [1, 1], "boundaries": [[[["x", "0"]]]]}, "scalar"),
    ({"group": "C2", "lo": 0, "ranks": [1, 1], "boundaries": [[[{"5": "1"}]]]}, "out of range"),
])
def test_malformed_json(data, needle):
    with pytest.raises(ParseError, match=needle):
        complex_from_json(data)


def test_zero_rank_boundaries_are_filled():
    g = catalog_group("C2")
    data = {"group": "C2", "lo": -1, "ranks": [0, 1, 0], "boundaries": [[], []]}
    p = complex_from_json(data)
    assert p.cohomology_dims() == {-1: 0, 0: 2, 1: 0}
    assert ga_zero_matrix(g, 0, 1) == p.boundaries[0]
