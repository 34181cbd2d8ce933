"""Bilinear-form linear algebra: Pfaffians, hyperbolic bases, signatures,
self-adjoint Pfaffians and hyperbolic decompositions.

Convention: a form h is identified with the map V -> V^* given by
h(x)(y) = h(y, x).  With this choice the Pfaffian functional of h sends the
wedge of an ordered basis v_1, ..., v_2n to pf of the Gram matrix
[h(v_i, v_j)], and a hyperbolic basis u_1, u_1', ..., u_n, u_n' (with
h(u_i, u_j') = delta_ij) has value 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .cyclo import conj, is_zero, sign_of_real, simplify


class FormError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Pfaffians


def pfaffian_matching(a: la.Matrix):
    """Signed perfect-matching expansion along the first row (oracle)."""
    n = len(a)
    if n % 2:
        raise FormError("odd-dimensional alternating matrix has no Pfaffian")

    def rec(idx: tuple[int, ...]):
        if not idx:
            return Fraction(1)
        first, rest = idx[0], idx[1:]
        total = Fraction(0)
        for pos, j in enumerate(rest):
            entry = a[first][j]
            if is_zero(entry):
                continue
            sub = rest[:pos] + rest[pos + 1:]
            term = entry * rec(sub)
            total = total + term if pos % 2 == 0 else total - term
        return total

    return simplify(rec(tuple(range(n))))


def pfaffian_elimination(a: la.Matrix):
    """Skew-symmetric Gaussian elimination, pivoting on a nonzero first-row entry."""
    n = len(a)
    if n % 2:
        raise FormError("odd-dimensional alternating matrix has no Pfaffian")
    m = [list(row) for row in a]
    result = Fraction(1)
    while m:
        size = len(m)
        piv = next((j for j in range(1, size) if not is_zero(m[0][j])), None)
        if piv is None:
            return Fraction(0)
        if piv != 1:
            # swap indices 1 and piv in rows and columns: flips the sign
            m[1], m[piv] = m[piv], m[1]
            for row in m:
                row[1], row[piv] = row[piv], row[1]
            result = -result
        pivot = m[0][1]
        result = result * pivot
        c0 = m[0][2:]
        c1 = m[1][2:]
        inv = 1 / pivot
        rest = []
        for j in range(2, size):
            row = []
            a0, a1 = c0[j - 2], c1[j - 2]
            for k in range(2, size):
                val = m[j][k]
                corr = a1 * c0[k - 2] - a0 * c1[k - 2]
                if not is_zero(corr):
                    val = val + corr * inv
                row.append(val)
            rest.append(row)
        m = rest
    return simplify(result)


def pfaffian(a: la.Matrix, method: str = "auto"):
    if not la.is_alternating(a):
        raise FormError("pfaffian requires an alternating matrix")
    if len(a) % 2:
        raise FormError("odd-dimensional alternating matrix has no Pfaffian")
    if method == "matching" or (method == "auto" and len(a) <= 8):
        return pfaffian_matching(a)
    if method in ("elimination", "auto"):
        return pfaffian_elimination(a)
    raise ValueError(f"unknown Pfaffian method {method!r}")


def pf_functional(h: la.Matrix, wedge: Sequence[Sequence]):
    """Value of the Pfaffian functional of ``h`` on the wedge of the given vectors."""
    if len(wedge) != len(h):
        raise FormError("wedge length must equal the dimension")
    return pfaffian(la.gram(h, wedge))


def pf_functional_transposed_convention(h: la.Matrix, wedge: Sequence[Sequence]):
    """Pfaffian functional under the alternative identification h(x)(y) = h(x, y).

    Only used to document how the two conventions differ (by (-1)^n).
    """
    return pfaffian(la.mat_scale(-1, la.gram(h, wedge)))


def is_self_adjoint(a: la.Matrix, kappa: la.Matrix) -> bool:
    return la.mat_eq(la.mat_mul(la.transpose(a), kappa), la.mat_mul(kappa, a))


def pfaffian_selfadjoint(a: la.Matrix, kappa: la.Matrix):
    """pf_kappa(A) = Pf_{h'} / Pf_h where h'(x, y) = kappa(A x, y)."""
    if not is_self_adjoint(a, kappa):
        raise FormError("matrix is not self-adjoint for the alternating form")
    twisted = la.mat_mul(la.transpose(a), kappa)
    return simplify(pfaffian(twisted) / pfaffian(kappa))


def standard_symplectic(n_pairs: int) -> la.Matrix:
    return la.block_diag([[[Fraction(0), Fraction(1)], [Fraction(-1), Fraction(0)]]] * n_pairs)


# ---------------------------------------------------------------------------
# Hyperbolic bases


def hyperbolic_basis(h: la.Matrix) -> list[list]:
    """Symplectic Gram-Schmidt: returns [u_1, u_1', u_2, u_2', ...] as column vectors."""
    if not la.is_alternating(h):
        raise FormError("hyperbolic_basis requires an alternating form")
    n = len(h)
    remaining = [[Fraction(1) if i == j else Fraction(0) for i in range(n)] for j in range(n)]
    out = []

    def form(x, y):
        return simplify(sum((xi * hij * yj for i, xi in enumerate(x) if not is_zero(xi)
                             for j, (hij, yj) in enumerate(zip(h[i], y)) if not is_zero(hij) and not is_zero(yj)),
                            Fraction(0)))

    while remaining:
        u = remaining.pop(0)
        partner = next((k for k, v in enumerate(remaining) if not is_zero(form(u, v))), None)
        if partner is None:
            raise FormError("alternating form is degenerate")
        v = remaining.pop(partner)
        c = form(u, v)
        u_dual = [simplify(x / c) for x in v]
        new_remaining = []
        for x in remaining:
            a = form(x, u_dual)
            b = form(x, u)
            new_remaining.append([simplify(xi - a * ui + b * wi) for xi, ui, wi in zip(x, u, u_dual)])
        remaining = new_remaining
        out.extend([u, u_dual])
    return out


def check_hyperbolic(h: la.Matrix, basis: Sequence[Sequence]) -> bool:
    g = la.gram(h, basis)
    return la.mat_eq(g, standard_symplectic(len(basis) // 2))


# ---------------------------------------------------------------------------
# Signatures


def signature_full(s: la.Matrix) -> tuple[int, int, int]:
    """(n_plus, n_minus, n_zero) by Sylvester elimination with 2x2 hyperbolic pivots."""
    if not la.is_symmetric(s):
        raise FormError("signature requires a symmetric matrix")
    m = [list(row) for row in s]
    plus = minus = 0
    while m:
        size = len(m)
        diag = next((i for i in range(size) if not is_zero(m[i][i])), None)
        if diag is not None:
            p = m[diag][diag]
            if sign_of_real(p) > 0:
                plus += 1
            else:
                minus += 1
            keep = [i for i in range(size) if i != diag]
            inv = 1 / p
            m = [[simplify(m[i][j] - m[i][diag] * m[diag][j] * inv) for j in keep] for i in keep]
            continue
        off = next(((i, j) for i in range(size) for j in range(i + 1, size) if not is_zero(m[i][j])), None)
        if off is None:
            return plus, minus, size
        i0, j0 = off
        b = m[i0][j0]
        plus += 1
        minus += 1
        keep = [k for k in range(size) if k not in (i0, j0)]
        inv = 1 / b
        m = [
            [simplify(m[k][l] - (m[i0][k] * m[j0][l] + m[j0][k] * m[i0][l]) * inv) for l in keep]
            for k in keep
        ]
    return plus, minus, 0


def signature(s: la.Matrix) -> tuple[int, int]:
    p, n, z = signature_full(s)
    if z:
        raise FormError("signature of a degenerate form")
    return p, n


def central_idempotent_matrix(action: Sequence[la.Matrix], group, characters: Sequence) -> la.Matrix:
    """Matrix of sum over distinct chi of chi(1)/|G| sum_g chi(g^{-1}) g acting on a module."""
    dim = len(action[0])
    out = la.zeros(dim, dim)
    inv = group.inverse
    for chi in characters:
        factor = Fraction(chi.degree, group.order)
        for g in range(group.order):
            c = chi(inv[g])
            if is_zero(c):
                continue
            c = c * factor
            mg = action[g]
            for i in range(dim):
                for j in range(dim):
                    if not is_zero(mg[i][j]):
                        out[i][j] = out[i][j] + c * mg[i][j]
    return [[simplify(x) for x in row] for row in out]


def isotypic_component(action: Sequence[la.Matrix], group, characters: Sequence) -> list[list]:
    e = central_idempotent_matrix(action, group, characters)
    return la.column_space(la.columns(e))


def isotypic_signature(action: Sequence[la.Matrix], form: la.Matrix, group, characters: Sequence) -> tuple[int, int]:
    """Signature of ``form`` restricted to the isotypic component of the given
    (Galois-closed) set of irreducible characters."""
    basis = isotypic_component(action, group, characters)
    if not basis:
        return 0, 0
    restricted = la.gram(form, basis)
    if not all(is_zero(x - conj(x)) for row in restricted for x in row):
        raise FormError("restricted form is not real")
    p, n, z = signature_full(restricted)
    if z:
        raise FormError("form is degenerate on an isotypic component")
    return p, n


def n_m_signature(action: Sequence[la.Matrix], form: la.Matrix, item) -> tuple[int, int]:
    """(n_m^+, n_m^-): dimensions of (U^+ (x) W_m)^G and (U^- (x) W_m)^G."""
    group = item.group
    chars = [group.characters[k] for k in sorted(set(item.constituents))]
    deg = chars[0].degree
    psi_deg = sum(c.degree for c in chars)
    p, n = isotypic_signature(action, form, group, chars)
    scale = Fraction(item.degree, psi_deg * deg)
    np_, nm = p * scale, n * scale
    if np_.denominator != 1 or nm.denominator != 1:
        raise FormError("non-integral isotypic multiplicity")
    return int(np_), int(nm)


# ---------------------------------------------------------------------------
# Hyperbolic modules


def make_hyp(dim_or_action) -> tuple[la.Matrix, list | None]:
    """Hyp(V) = V + V^D with the evaluation pairing; gram [[0, I], [I, 0]].

    Accepts a dimension or a per-element list of action matrices on V; in the
    latter case the action on V^D is the contragredient one.
    """
    if isinstance(dim_or_action, int):
        n, action = dim_or_action, None
    else:
        action = list(dim_or_action)
        n = len(action[0])
    z, i = la.zeros(n, n), la.identity(n)
    gram = la.block_matrix([[z, i], [i, z]])
    if action is None:
        return gram, None
    hyp_action = [la.block_diag([m, la.transpose(la.inverse(m))]) for m in action]
    return gram, [[[simplify(x) for x in row] for row in m] for m in hyp_action]


@dataclass
class HypDecomposition:
    isotropic: list  # basis w_k of W
    dual: list  # basis w_k' with s(w_k, w_l') = delta, s(w', w') = 0
    complement: list  # basis of a lift of W^perp / W orthogonal to both
    hyp_gram: la.Matrix
    complement_gram: la.Matrix

    @property
    def transform(self) -> la.Matrix:
        return la.from_columns(self.isotropic + self.dual + self.complement)


def _equivariant_complement(sub: list, ambient: list, action) -> list:
    """A complement of span(sub) inside span(ambient); G-stable if ``action`` is given."""
    if not ambient:
        return []
    extra = la.complement_columns(sub, ambient) if sub else la.column_space(ambient)
    if action is None or not extra:
        return extra
    full = la.from_columns(sub + extra)
    coords_proj = la.zeros(len(full[0]), len(full[0]))
    for k in range(len(sub)):
        coords_proj[k][k] = Fraction(1)
    # projection onto span(sub) along span(extra), in ambient coordinates on span(full)
    full_inv = _left_inverse(full)
    proj = la.mat_mul(full, la.mat_mul(coords_proj, full_inv))
    avg = la.zeros(len(proj), len(proj))
    for m in action:
        m_inv = la.inverse(m)
        avg = la.mat_add(avg, la.mat_mul(m, la.mat_mul(proj, m_inv)))
    avg = la.mat_scale(Fraction(1, len(action)), avg)
    comp = la.mat_sub(la.identity(len(avg)), avg)
    vecs = [la.mat_vec(comp, v) for v in extra]
    return la.column_space([[simplify(x) for x in v] for v in vecs])


def _left_inverse(cols_matrix: la.Matrix) -> la.Matrix:
    """Left inverse L with L M = I for a full-column-rank matrix M (rows = ambient)."""
    mt = la.transpose(cols_matrix)
    return la.mat_mul(la.inverse(la.mat_mul(mt, cols_matrix)), mt)


def hyp_decompose(s: la.Matrix, isotropic_cols: Sequence[Sequence], action=None) -> HypDecomposition:
    """V = Hyp(W) + W^perp/W for an isotropic (G-stable) subspace W."""
    if not la.is_symmetric(s):
        raise FormError("hyp_decompose requires a symmetric form")
    n = len(s)
    w = la.column_space(isotropic_cols)
    if not la.is_zero_matrix(la.gram(s, w)) if w else False:
        raise FormError("subspace is not isotropic")
    if la.det(s) == 0:
        raise FormError("form is degenerate")
    if not w:
        return HypDecomposition([], [], la.columns(la.identity(n)), [], s)
    ws = la.mat_mul(la.transpose(la.from_columns(w)), s)
    w_perp = la.nullspace(ws, n)
    ambient = la.columns(la.identity(n))
    u = _equivariant_complement(w, w_perp, action)
    w_prime = _equivariant_complement(w_perp, ambient, action)
    # make W' orthogonal to U
    if u:
        su = la.gram(s, u)
        su_inv = la.inverse(su)
        umat = la.from_columns(u)
        proj = la.mat_mul(umat, la.mat_mul(su_inv, la.mat_mul(la.transpose(umat), s)))
        w_prime = [[simplify(a - b) for a, b in zip(v, la.mat_vec(proj, v))] for v in w_prime]
    # dualize against W
    pairing = la.gram(s, w, w_prime)
    x = la.inverse(pairing)
    wp_mat = la.mat_mul(la.from_columns(w_prime), x)
    w_prime = la.columns(wp_mat)
    # make W' isotropic
    a = la.gram(s, w_prime)
    adjusted = []
    for l, v in enumerate(w_prime):
        vec = list(v)
        for k, wk in enumerate(w):
            coeff = a[l][k] / 2
            if not is_zero(coeff):
                vec = [vi - coeff * wi for vi, wi in zip(vec, wk)]
        adjusted.append([simplify(x) for x in vec])
    hyp = la.gram(s, w + adjusted)
    comp_gram = la.gram(s, u) if u else []
    return HypDecomposition(w, adjusted, u, hyp, comp_gram)


def filtered_decompose(s: la.Matrix, negative_levels: Sequence[Sequence[Sequence]], action=None):
    """Split a filtered quadratic space as (sum of Hyp(Gr_i), i < 0) plus Gr_0.

    ``negative_levels`` lists bases of the isotropic pieces
    F_{-N} <= ... <= F_{-1}.  Returns ``(blocks, decomposition)`` where each
    block is the slice (Gr_i basis, dual basis) of the hyperbolic part.
    """
    pieces = []
    prev: list = []
    for level in negative_levels:
        cols = la.column_space(list(prev) + [list(v) for v in level])
        piece = _equivariant_complement(prev, cols, action) if prev else _equivariant_complement([], cols, action)
        pieces.append(piece)
        prev = prev + piece
    dec = hyp_decompose(s, prev, action)
    blocks = []
    start = 0
    for piece in pieces:
        end = start + len(piece)
        blocks.append((dec.isotropic[start:end], dec.dual[start:end]))
        start = end
    return blocks, dec
