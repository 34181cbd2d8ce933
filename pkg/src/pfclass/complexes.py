"""Perfect complexes of free Q[G]-modules.

Boundaries use the row convention of free modules: an element of P^i is a
row vector x over Q[G] of length r_i and the boundary sends x to x M^i, with
M^i an r_i x r_{i+1} matrix of group-algebra elements.  Internally every term
is also viewed as a Q-vector space with basis g.e_j (index ``j*|G| + g``) and
the boundary becomes a column-convention Q-matrix.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Sequence

from . import linalg as la
from .cyclo import simplify
from .detlines import BHUSplitting, ComplexError, ComplexOverField, cycles, upsilon_order
from .groups import FiniteGroup, GroupAlgebraElement, algebra_mul


GAMatrix = list  # list[list[GroupAlgebraElement]]


def ga_zero_matrix(group: FiniteGroup, rows: int, cols: int) -> GAMatrix:
    return [[GroupAlgebraElement.zero(group) for _ in range(cols)] for _ in range(rows)]


def ga_identity(group: FiniteGroup, n: int) -> GAMatrix:
    return [[GroupAlgebraElement.one(group) if i == j else GroupAlgebraElement.zero(group) for j in range(n)]
            for i in range(n)]


def ga_matmul(a: GAMatrix, b: GAMatrix, group: FiniteGroup) -> GAMatrix:
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = ga_zero_matrix(group, rows, cols)
    for i in range(rows):
        for j in range(cols):
            acc = GroupAlgebraElement.zero(group)
            for k in range(inner):
                if not a[i][k].is_zero() and not b[k][j].is_zero():
                    acc = acc + algebra_mul(a[i][k], b[k][j])
            out[i][j] = acc
    return out


def ga_is_zero(a: GAMatrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def ga_involution_transpose(a: GAMatrix) -> GAMatrix:
    """(iota a)^T, the adjoint used for dual complexes."""
    if not a:
        return []
    return [[a[i][j].involution() for i in range(len(a))] for j in range(len(a[0]))]


def regular_right_matrix(group: FiniteGroup, m: GAMatrix, rows: int, cols: int) -> la.Matrix:
    """Q-matrix (column convention) of x -> x m from Q[G]^rows to Q[G]^cols."""
    n = group.order
    out = la.zeros(cols * n, rows * n)
    for j in range(rows):
        for k in range(cols):
            coeffs = m[j][k].coeffs
            for h, c in enumerate(coeffs):
                if c == 0:
                    continue
                for g in range(n):
                    out[k * n + group.mul(g, h)][j * n + g] += c
    return out


def ga_inverse(group: FiniteGroup, a: GAMatrix) -> GAMatrix:
    r = len(a)
    q = regular_right_matrix(group, a, r, r)
    if la.det(q) == 0:
        raise ComplexError("group-algebra matrix is not invertible")
    qi = la.inverse(q)
    n = group.order
    e = group.identity
    out = ga_zero_matrix(group, r, r)
    for j in range(r):
        col = [row[j * n + e] for row in qi]
        for k in range(r):
            out[j][k] = GroupAlgebraElement(group, tuple(simplify(col[k * n + g]) for g in range(n)))
    return out


def _perm_actions(group: FiniteGroup, rank: int) -> list[list[int]]:
    """perm[g][idx] = index of g.(basis vector idx) in Q[G]^rank."""
    n = group.order
    return [[(idx // n) * n + group.mul(g, idx % n) for idx in range(rank * n)] for g in range(n)]


def stable_complement(sub: list, ambient: list, group: FiniteGroup, rank: int) -> list:
    """G-stable complement of span(sub) inside G-stable span(ambient) in Q[G]^rank."""
    if not ambient:
        return []
    extra = la.complement_columns(sub, ambient) if sub else la.column_space(ambient)
    if not extra:
        return []
    if not sub:
        return la.column_space(ambient)
    dim = len(ambient[0])
    full = la.from_columns(sub + extra)
    # coordinates: solve full * c = v via a left inverse on pivot rows
    _, piv = la.rref(la.transpose(full))
    rows = piv[: len(sub) + len(extra)]
    square = [full[r] for r in rows]
    sq_inv = la.inverse(square)
    # projection onto span(sub) along span(extra): P v = full[:, :s] * (sq_inv * v[rows])[:s]
    s = len(sub)
    coeff_rows = sq_inv[:s]  # s x |rows|
    proj = la.zeros(dim, dim)
    for a in range(dim):
        for t, r in enumerate(rows):
            val = Fraction(0)
            for k in range(s):
                if sub[k][a] and coeff_rows[k][t]:
                    val += sub[k][a] * coeff_rows[k][t]
            proj[a][r] = val
    perms = _perm_actions(group, rank)
    avg = la.zeros(dim, dim)
    for p in perms:
        for a in range(dim):
            pa = p[a]
            row = proj[a]
            target = avg[pa]
            for b in range(dim):
                if row[b]:
                    target[p[b]] += row[b]
    n = group.order
    comp = [[(Fraction(1) if a == b else Fraction(0)) - avg[a][b] / n for b in range(dim)] for a in range(dim)]
    vecs = [la.mat_vec(comp, v) for v in extra]
    return la.column_space(vecs)


@dataclass
class PerfectGComplex:
    group: FiniteGroup
    lo: int
    ranks: list[int]
    boundaries: list  # boundaries[k]: GAMatrix of shape ranks[k] x ranks[k+1]
    lambdas: dict = field(default_factory=dict)  # degree -> invertible GAMatrix

    def __post_init__(self):
        if len(self.boundaries) != max(len(self.ranks) - 1, 0):
            raise ComplexError("need one boundary between consecutive terms")
        for k, m in enumerate(self.boundaries):
            r0, r1 = self.ranks[k], self.ranks[k + 1]
            if r0 and r1 and (len(m) != r0 or any(len(row) != r1 for row in m)):
                raise ComplexError(f"boundary at degree {self.lo + k} has wrong shape", self.lo + k)
        for k in range(len(self.boundaries) - 1):
            if self.ranks[k] and self.ranks[k + 1] and self.ranks[k + 2]:
                prod = ga_matmul(self.boundaries[k], self.boundaries[k + 1], self.group)
                if not ga_is_zero(prod):
                    raise ComplexError(f"boundary composition nonzero at degree {self.lo + k}", self.lo + k)

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def rank(self, i: int) -> int:
        return self.ranks[i - self.lo] if self.lo <= i <= self.hi else 0

    def boundary(self, i: int) -> GAMatrix | None:
        if self.lo <= i < self.hi and self.rank(i) and self.rank(i + 1):
            return self.boundaries[i - self.lo]
        return None

    @property
    def euler_rank(self) -> int:
        return sum((-1) ** (i % 2) * self.rank(i) for i in self.degrees)

    @cached_property
    def rational(self) -> ComplexOverField:
        n = self.group.order
        dims = [r * n for r in self.ranks]
        bds = []
        for i in range(self.lo, self.hi):
            m = self.boundary(i)
            if m is None:
                bds.append(la.zeros(dims[i + 1 - self.lo], dims[i - self.lo]))
            else:
                bds.append(regular_right_matrix(self.group, m, self.rank(i), self.rank(i + 1)))
        return ComplexOverField(self.lo, dims, bds)

    @cached_property
    def splitting(self) -> BHUSplitting:
        """Canonical G-stable B/H/U splitting of the rationalized complex."""
        c = self.rational
        sp = BHUSplitting()
        prev_u: list = []
        for i in self.degrees:
            r = self.rank(i)
            dim = c.dim(i)
            d_prev = c.boundary(i - 1)
            b = [la.mat_vec(d_prev, u) for u in prev_u] if (d_prev is not None and prev_u) else []
            z = cycles(c, i)
            h = stable_complement(b, z, self.group, r)
            std = la.columns(la.identity(dim)) if dim else []
            u = stable_complement(z, std, self.group, r) if z else std
            sp.B[i], sp.H[i], sp.U[i] = b, h, u
            prev_u = u
        return sp

    def cohomology_dims(self) -> dict[int, int]:
        return {i: len(self.splitting.H[i]) for i in self.degrees}

    def action_on(self, i: int, vectors: list) -> list[la.Matrix]:
        """Matrices of the G-action on a G-stable subspace of P^i with the given basis."""
        perms = _perm_actions(self.group, self.rank(i))
        out = []
        for p in perms:
            cols = []
            for v in vectors:
                moved = [Fraction(0)] * len(v)
                for a, x in enumerate(v):
                    moved[p[a]] = x
                coords = la.solve_in_span(vectors, moved)
                if coords is None:
                    raise ComplexError("subspace is not G-stable", i)
                cols.append(coords)
            out.append(la.from_columns(cols, len(vectors)) if vectors else [])
        return out

    def cohomology_action(self, degrees: Sequence[int]) -> list[la.Matrix]:
        """Block-diagonal action on the concatenated canonical H bases of ``degrees``."""
        cache = self.__dict__.setdefault("_h_action", {})
        for i in degrees:
            if i not in cache and self.splitting.H.get(i):
                cache[i] = self.action_on(i, self.splitting.H[i])
        blocks = {i: cache[i] for i in degrees if i in cache}
        out = []
        for g in range(self.group.order):
            out.append(la.block_diag([blocks[i][g] for i in degrees if i in blocks]))
        return out

    def h_projection(self, i: int) -> la.Matrix:
        """Rows: coordinates along the canonical H^i basis of the projection P^i -> H^i along B + U."""
        cache = self.__dict__.setdefault("_h_proj", {})
        if i not in cache:
            sp = self.splitting
            inv = la.inverse(sp.basis_matrix(i))
            nb = len(sp.B[i])
            cache[i] = inv[nb: nb + len(sp.H[i])]
        return cache[i]

    def reduced(self, mats) -> ComplexOverField:
        """(P (x) V)^G on the basis r_G(e_j (x) v_n); block (k, j) of the boundary is rho(iota M_jk)."""
        d = len(mats[0])
        from .groups import apply_rep

        dims = [r * d for r in self.ranks]
        bds = []
        for i in range(self.lo, self.hi):
            r0, r1 = self.rank(i), self.rank(i + 1)
            m = self.boundary(i)
            if m is None:
                bds.append(la.zeros(r1 * d, r0 * d))
                continue
            blocks = [[apply_rep(mats, m[j][k].inversion()) for j in range(r0)] for k in range(r1)]
            bds.append(la.block_matrix(blocks))
        return ComplexOverField(self.lo, dims, bds)

    def to_json(self) -> dict:
        from .serialize import complex_to_json

        return complex_to_json(self)


def even_odd_degrees(p: PerfectGComplex) -> tuple[list[int], list[int]]:
    order = upsilon_order(list(p.degrees))
    return [i for i in order if i % 2 == 0], [i for i in order if i % 2]


# ---------------------------------------------------------------------------
# Constructions


def direct_sum(p1: PerfectGComplex, p2: PerfectGComplex) -> PerfectGComplex:
    g = p1.group
    lo, hi = min(p1.lo, p2.lo), max(p1.hi, p2.hi)
    ranks = [p1.rank(i) + p2.rank(i) for i in range(lo, hi + 1)]
    bds = []
    for i in range(lo, hi):
        m = ga_zero_matrix(g, ranks[i - lo], ranks[i + 1 - lo])
        for p, (ro, co) in ((p1, (0, 0)), (p2, (p1.rank(i), p1.rank(i + 1)))):
            b = p.boundary(i)
            if b is None:
                continue
            for a in range(len(b)):
                for c in range(len(b[0])):
                    m[ro + a][co + c] = b[a][c]
        bds.append(m)
    lambdas = {}
    for i in range(lo, hi + 1):
        if i in p1.lambdas or i in p2.lambdas:
            blocks = [p.lambdas.get(i, ga_identity(g, p.rank(i))) for p in (p1, p2)]
            lam = ga_zero_matrix(g, ranks[i - lo], ranks[i - lo])
            off = 0
            for bl in blocks:
                for a in range(len(bl)):
                    for c in range(len(bl)):
                        lam[off + a][off + c] = bl[a][c]
                off += len(bl)
            lambdas[i] = lam
    return PerfectGComplex(g, lo, ranks, bds, lambdas)


def dual_complex(p: PerfectGComplex) -> PerfectGComplex:
    """Degree i term is the dual of P^{-i}; boundary (iota M^{-i-1})^T."""
    g = p.group
    lo, hi = -p.hi, -p.lo
    ranks = [p.rank(-i) for i in range(lo, hi + 1)]
    bds = []
    for i in range(lo, hi):
        m = p.boundary(-i - 1)
        bds.append(ga_involution_transpose(m) if m is not None else ga_zero_matrix(g, ranks[i - lo], ranks[i + 1 - lo]))
    return PerfectGComplex(g, lo, ranks, bds)


def acyclic_piece(group: FiniteGroup, degree: int, rank: int, matrix: GAMatrix | None = None) -> PerfectGComplex:
    """Q[G]^rank --(matrix)--> Q[G]^rank in degrees (degree, degree+1)."""
    m = matrix if matrix is not None else ga_identity(group, rank)
    return PerfectGComplex(group, degree, [rank, rank], [m])


def change_basis(p: PerfectGComplex, transforms: dict) -> PerfectGComplex:
    """New bases a'_j = sum_k A_jk a_k: boundaries become A_i M_i A_{i+1}^{-1}."""
    g = p.group
    bds = []
    for i in range(p.lo, p.hi):
        m = p.boundary(i)
        if m is None:
            bds.append(ga_zero_matrix(g, p.rank(i), p.rank(i + 1)))
            continue
        a = transforms.get(i)
        b = transforms.get(i + 1)
        if a is not None:
            m = ga_matmul(a, m, g)
        if b is not None:
            m = ga_matmul(m, ga_inverse(g, b), g)
        bds.append(m)
    return PerfectGComplex(g, p.lo, list(p.ranks), bds, dict(p.lambdas))


def chain_map_basis_change(p: PerfectGComplex, transforms: dict) -> dict:
    """Q-matrices (column convention) sending new-basis coordinates to old ones."""
    out = {}
    for i in p.degrees:
        r = p.rank(i)
        a = transforms.get(i, ga_identity(p.group, r))
        out[i] = regular_right_matrix(p.group, a, r, r)
    return out


# ---------------------------------------------------------------------------
# Random data


def _random_element(group: FiniteGroup, rng: random.Random) -> GroupAlgebraElement:
    n = group.order
    kind = rng.random()
    if kind < 0.35:
        return GroupAlgebraElement.zero(group)
    g = rng.randrange(n)
    if kind < 0.55:
        return GroupAlgebraElement.basis(group, g, rng.choice((1, -1, 2)))
    if kind < 0.7:
        return GroupAlgebraElement.one(group) - GroupAlgebraElement.basis(group, g)
    if kind < 0.85:
        k = group.element_order(g)
        return GroupAlgebraElement.from_dict(group, {group.power(g, t): 1 for t in range(k)})
    return GroupAlgebraElement(group, tuple(Fraction(rng.choice((0, 0, 1, -1))) for _ in range(n)))


def _random_ga_matrix(group: FiniteGroup, rows: int, cols: int, rng: random.Random) -> GAMatrix:
    return [[_random_element(group, rng) for _ in range(cols)] for _ in range(rows)]


def _annihilator_space(group: FiniteGroup, m: GAMatrix, rows: int, cols: int) -> list[list]:
    """Q-basis of {N (rows x cols) : m N = 0}, as flattened coefficient vectors."""
    n = group.order
    r_prev = len(m)
    columns = []
    for k in range(rows):
        for l in range(cols):
            for h in range(n):
                vec = [Fraction(0)] * (r_prev * cols * n)
                for j in range(r_prev):
                    for g, c in enumerate(m[j][k].coeffs):
                        if c:
                            vec[(j * cols + l) * n + group.mul(g, h)] += c
                columns.append(vec)
    mat = la.from_columns(columns)
    return la.nullspace(mat, rows * cols * n)


def random_complex(group: FiniteGroup, rng: random.Random, lo: int = -2, hi: int = 2,
                   rank_max: int = 2, min_total: int = 1) -> PerfectGComplex:
    n = group.order
    while True:
        ranks = [rng.randint(0, rank_max) for _ in range(lo, hi + 1)]
        if sum(ranks) >= min_total:
            break
    bds = []
    prev = None
    for k in range(len(ranks) - 1):
        r0, r1 = ranks[k], ranks[k + 1]
        if r0 == 0 or r1 == 0:
            bds.append(ga_zero_matrix(group, r0, r1))
            prev = bds[-1]
            continue
        if prev is None or ranks[k - 1] == 0 or ga_is_zero(prev):
            m = _random_ga_matrix(group, r0, r1, rng)
        else:
            space = _annihilator_space(group, prev, r0, r1)
            if not space:
                m = ga_zero_matrix(group, r0, r1)
            else:
                vec = [Fraction(0)] * (r0 * r1 * n)
                picks = rng.sample(range(len(space)), min(len(space), rng.randint(1, 3)))
                for s in picks:
                    t = rng.choice((1, -1, 2))
                    vec = [a + t * b for a, b in zip(vec, space[s])]
                den = lcm(*(x.denominator for x in vec)) if vec else 1
                vec = [x * den for x in vec]
                m = [[GroupAlgebraElement(group, tuple(vec[(a * r1 + b) * n: (a * r1 + b + 1) * n])) for b in range(r1)]
                     for a in range(r0)]
        bds.append(m)
        prev = m
    return PerfectGComplex(group, lo, ranks, bds)


def random_symmetric_complex(group: FiniteGroup, rng: random.Random, depth: int = 2,
                             rank_max: int = 1) -> PerfectGComplex:
    """C + C^dual for a random C supported in [-depth, depth]; H^i and H^{-i} are isomorphic."""
    c = random_complex(group, rng, -depth, depth, rank_max)
    return direct_sum(c, dual_complex(c))


def random_unimodular(group: FiniteGroup, r: int, rng: random.Random, steps: int = 3) -> GAMatrix:
    """Product of elementary matrices and signed group-element diagonals (invertible over Z[G])."""
    a = ga_identity(group, r)
    for _ in range(steps):
        if r > 1 and rng.random() < 0.6:
            j, k = rng.sample(range(r), 2)
            e = ga_identity(group, r)
            e[j][k] = _random_element(group, rng)
            a = ga_matmul(a, e, group)
        else:
            d = ga_identity(group, r)
            j = rng.randrange(r)
            d[j][j] = GroupAlgebraElement.basis(group, rng.randrange(group.order), rng.choice((1, -1)))
            a = ga_matmul(a, d, group)
    return a
