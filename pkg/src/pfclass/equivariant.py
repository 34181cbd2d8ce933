"""Equivariant evaluators on free group-ring modules.

A free module U = Q[G]^q is handled in Q-coordinates: the basis vector with
index ``i * |G| + g`` is the element g.u_i.  Forms on U are Q-matrices in
these coordinates, and W_m-valued tensors live in U (x) W_m with index
``(i * |G| + g) * dim W + a``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .cyclo import conj, is_zero, sign_of_real, simplify
from .forms import FormError, is_self_adjoint, n_m_signature, pfaffian, pfaffian_selfadjoint
from .groups import FiniteGroup, GroupAlgebraElement, SymplecticBasisItem, apply_rep


class EquivariantError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Free modules and invariant forms


def free_module_action(group: FiniteGroup, rank: int) -> list[la.Matrix]:
    """Left multiplication on Q[G]^rank, one Q-matrix per group element."""
    n = group.order
    mats = []
    for g in range(group.order):
        m = la.zeros(rank * n, rank * n)
        for i in range(rank):
            for h in range(n):
                m[i * n + group.mul(g, h)][i * n + h] = Fraction(1)
        mats.append(m)
    return mats


def is_invariant(action: Sequence[la.Matrix], form: la.Matrix, left_action=None) -> bool:
    right = action
    left = left_action if left_action is not None else action
    return all(la.mat_eq(la.mat_mul(la.transpose(a), la.mat_mul(form, b)), form) for a, b in zip(left, right))


def average_form(action: Sequence[la.Matrix], form: la.Matrix, right_action=None) -> la.Matrix:
    """Sum over g of a(g)^T form b(g); invariant for the pair of actions."""
    right = right_action if right_action is not None else action
    out = la.zeros(len(form), len(form[0]) if form else 0)
    for a, b in zip(action, right):
        out = la.mat_add(out, la.mat_mul(la.transpose(a), la.mat_mul(form, b)))
    return [[simplify(x) for x in row] for row in out]


def random_invariant_form(action: Sequence[la.Matrix], rng: random.Random, symmetric: bool = True,
                          right_action=None, bound: int = 3, tries: int = 50) -> la.Matrix:
    """Random nondegenerate invariant pairing, by averaging a random integer matrix."""
    rows = len(action[0])
    cols = len(right_action[0]) if right_action is not None else rows
    if rows == 0 or cols == 0:
        return la.zeros(rows, cols)
    for _ in range(tries):
        raw = [[Fraction(rng.randint(-bound, bound)) for _ in range(cols)] for _ in range(rows)]
        if symmetric:
            raw = [[raw[i][j] + raw[j][i] for j in range(cols)] for i in range(rows)]
        form = average_form(action, raw, right_action)
        if rows == cols and la.det(form) != 0:
            return form
    raise EquivariantError("could not generate a nondegenerate invariant form")


def is_invariant_free(group: FiniteGroup, sigma: la.Matrix, rank: int) -> bool:
    """Invariance on Q[G]^rank, checked as a permutation symmetry for each generator."""
    n = group.order
    size = rank * n
    for s in group.generators:
        perm = [i * n + group.mul(s, h) for i in range(rank) for h in range(n)]
        for a in range(size):
            row, prow = sigma[a], sigma[perm[a]]
            for b in range(size):
                if not is_zero(prow[perm[b]] - row[b]):
                    return False
    return True


def group_ring_form(group: FiniteGroup, sigma: la.Matrix, rank: int) -> list[list[GroupAlgebraElement]]:
    """Matrix of sigma~(u_i, u_j) = sum_g sigma(g u_i, u_j) g^{-1}."""
    if not is_invariant_free(group, sigma, rank):
        raise EquivariantError("form is not G-invariant")
    n = group.order
    inv = group.inverse
    e = group.identity
    out = []
    for i in range(rank):
        row = []
        for j in range(rank):
            terms = {inv[g]: sigma[i * n + g][j * n + e] for g in range(n)}
            row.append(GroupAlgebraElement.from_dict(group, terms))
        out.append(row)
    return out


def block_rep(mats, t: Sequence[Sequence[GroupAlgebraElement]]) -> la.Matrix:
    """T^{(q)}: substitute rho into every entry; block (k, j) is rho(t[k][j])."""
    return la.block_matrix([[apply_rep(mats, x) for x in row] for row in t])


def selfadjointness_check(t, item: SymplecticBasisItem) -> bool:
    q = len(t)
    kappa = la.block_diag([item.hyp_kappa] * q)
    return is_self_adjoint(block_rep(item.hyp_matrices, t), kappa)


# ---------------------------------------------------------------------------
# Fixed points and r_G


def r_g_vector(group: FiniteGroup, rank: int, i: int, w: Sequence, mats) -> list:
    """r_G(u_i (x) w) = sum_g g u_i (x) rho(g) w."""
    n, d = group.order, len(w)
    out = [Fraction(0)] * (rank * n * d)
    for g in range(n):
        gw = la.mat_vec(mats[g], w)
        base = (i * n + g) * d
        for a in range(d):
            out[base + a] = simplify(gw[a])
    return out


def r_g_basis(group: FiniteGroup, rank: int, item: SymplecticBasisItem) -> list[list]:
    """Vectors r_G(u_i (x) w_mn), i then n, in the original W_m coordinates."""
    mats = item.representation.matrices
    return [r_g_vector(group, rank, i, list(w), mats) for i in range(rank) for w in item.hyperbolic_basis]


def tensor_action(group: FiniteGroup, rank: int, mats) -> list[la.Matrix]:
    return [la.kron(u, m) for u, m in zip(free_module_action(group, rank), mats)]


def fixed_subspace(group: FiniteGroup, action: Sequence[la.Matrix]) -> list[list]:
    dim = len(action[0])
    rows = []
    for s in group.generators:
        rows.extend(la.mat_sub(action[s], la.identity(dim)))
    return la.nullspace(rows, dim)


# ---------------------------------------------------------------------------
# Pfaffian evaluation of invariant forms


def pf_on_fixed_space(group: FiniteGroup, sigma: la.Matrix, rank: int, item: SymplecticBasisItem):
    """Pf of (sigma (x) kappa) restricted to the fixed space, on the |G|^{-1}-scaled r_G basis."""
    basis = r_g_basis(group, rank, item)
    big = la.kron(sigma, item.kappa_gram)
    scale = Fraction(1, group.order)  # each basis vector carries |G|^{-1}
    gram = la.mat_scale(scale * scale, la.gram(big, basis))
    return pfaffian([[simplify(x) for x in row] for row in gram])


def pf_of_group_ring_form(group: FiniteGroup, sigma: la.Matrix, rank: int, item: SymplecticBasisItem):
    """pf of |G|^{-1} T_W^{(q)}(sigma~) with respect to kappa^{(q)}."""
    t = group_ring_form(group, sigma, rank)
    m = la.mat_scale(Fraction(1, group.order), block_rep(item.hyp_matrices, t))
    kappa = la.block_diag([item.hyp_kappa] * rank)
    return pfaffian_selfadjoint([[simplify(x) for x in row] for row in m], kappa)


def pf_coordinate(group: FiniteGroup, sigma: la.Matrix, rank: int, item: SymplecticBasisItem):
    """pf of T_W^{(q)}(sigma~) (no scaling)."""
    t = group_ring_form(group, sigma, rank)
    kappa = la.block_diag([item.hyp_kappa] * rank)
    return pfaffian_selfadjoint(block_rep(item.hyp_matrices, t), kappa)


def pf_sign_vs_signature(group: FiniteGroup, sigma: la.Matrix, rank: int, item: SymplecticBasisItem) -> dict:
    n_plus, n_minus = n_m_signature(free_module_action(group, rank), sigma, item)
    if n_minus % 2 or n_plus % 2:
        raise EquivariantError("odd isotypic signature count")
    predicted = -1 if n_minus % 4 else 1
    actual = sign_of_real(pf_coordinate(group, sigma, rank, item))
    return {"n_plus": n_plus, "n_minus": n_minus, "predicted": predicted, "pf_sign": actual,
            "ok": predicted == actual}


# ---------------------------------------------------------------------------
# Ideals of C[G] with the standard hermitian form


@dataclass
class IdealRep:
    """A left ideal V of C[G]: basis (columns in group-element coordinates),
    left-multiplication matrices and the gram of nu(x, y) = |G| sum x_g conj(y_g)."""

    label: str
    basis: list
    matrices: list
    nu_gram: la.Matrix
    degree: int  # chi(1) of the underlying irreducible

    @property
    def dim(self) -> int:
        return len(self.basis)


def _ideal_from_spanning(group: FiniteGroup, spanning: list, label: str, degree: int) -> IdealRep:
    basis = la.column_space(spanning)
    reg = group.regular_matrices()
    mats = []
    for g in range(group.order):
        cols = []
        for v in basis:
            coords = la.solve_in_span(basis, la.mat_vec(reg[g], v))
            if coords is None:
                raise EquivariantError("subspace is not a left ideal")
            cols.append([simplify(x) for x in coords])
        mats.append(la.from_columns(cols))
    n = group.order
    nu = [[simplify(n * sum((a * conj(b) for a, b in zip(x, y)), Fraction(0))) for y in basis] for x in basis]
    return IdealRep(label, basis, mats, nu, degree)


def left_ideal(group: FiniteGroup, irrep_index: int) -> IdealRep:
    """C[G] E_11 where E_11 = (d/|G|) sum_g rho(g^{-1})_{11} g, affording the irreducible."""
    rep = group.irreducibles[irrep_index]
    d = rep.degree
    inv = group.inverse
    e11 = [simplify(Fraction(d, group.order) * rep(inv[g])[0][0]) for g in range(group.order)]
    reg = group.regular_matrices()
    spanning = [la.mat_vec(reg[g], e11) for g in range(group.order)]
    return _ideal_from_spanning(group, spanning, rep.label, d)


def two_sided_ideal(group: FiniteGroup, irrep_index: int) -> IdealRep:
    """The simple two-sided ideal C[G] e_chi."""
    chi = group.characters[irrep_index]
    d = chi.degree
    inv = group.inverse
    e = [simplify(Fraction(d, group.order) * chi(inv[g])) for g in range(group.order)]
    reg = group.regular_matrices()
    spanning = [la.mat_vec(reg[g], e) for g in range(group.order)]
    return _ideal_from_spanning(group, spanning, chi.label, d)


def hermitian_det_abs(gram: la.Matrix):
    value = la.det(gram)
    if not is_zero(value - conj(value)):
        raise EquivariantError("hermitian determinant is not real")
    s = sign_of_real(value)
    if s == 0:
        raise EquivariantError("degenerate hermitian form")
    return simplify(value if s > 0 else -value)


def metric_identity_sides(group: FiniteGroup, sigma: la.Matrix, rank: int, ideal: IdealRep) -> tuple:
    """Both sides of the metric identity, squared.

    Left: |det (sigma (x) nu)| on the r_G(u_i (x) x_s) divided by det(N)^q,
    which converts the ideal basis x_s into an orthonormal one.
    Right: |det(|G| T_V^{(q)}(sigma~))|.
    """
    n = group.order
    reg = group.regular_matrices()
    vecs = []
    for i in range(rank):
        for x in ideal.basis:
            out = [Fraction(0)] * (rank * n * n)
            for g in range(n):
                gx = la.mat_vec(reg[g], x)
                base = (i * n + g) * n
                for a in range(n):
                    out[base + a] = gx[a]
            vecs.append(out)
    # (sigma (x) nu)(c, c') = sum sigma_{..} * |G| * c_a conj(c'_a); nu is |G| times identity
    big = la.kron(sigma, la.mat_scale(n, la.identity(n)))
    gram = la.gram(big, vecs, [[conj(x) for x in v] for v in vecs])
    lhs = simplify(hermitian_det_abs(gram) / la.det(ideal.nu_gram) ** rank)
    t = group_ring_form(group, sigma, rank)
    m = la.mat_scale(n, block_rep(ideal.matrices, t))  # |G| T_V^{(q)}
    d = la.det(m)
    rhs = simplify(d if sign_of_real(d) >= 0 else -d) if is_zero(d - conj(d)) else None
    if rhs is None:
        from .cyclo import abs_squared
        raise EquivariantError(f"non-real determinant {d}; |.|^2 = {abs_squared(d)}")
    return lhs, rhs
