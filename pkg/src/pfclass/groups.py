"""Finite groups by multiplication table, group algebras, catalog representations,
Frobenius-Schur classification and the basis of symplectic characters.

Canonical element orderings (frozen):

* ``C_n``: index k is g^k.
* ``D_n`` (order 2n): index k + n*e is r^k s^e.
* ``S3``: permutations of (0, 1, 2) in ``itertools.permutations`` order,
  composed as (p*q)(x) = p(q(x)).
* ``Q8``: 1, -1, i, -i, j, -j, k, -k.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import linalg as la
from .cyclo import CycloNumber, conj, is_zero, simplify, zeta


class GroupError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    name: str
    mult_table: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]
    generators: tuple[int, ...]

    def __post_init__(self):
        n = len(self.mult_table)
        if any(len(row) != n for row in self.mult_table):
            raise GroupError("multiplication table is not square")
        if len(self.labels) != n:
            raise GroupError("label count mismatch")
        t = self.mult_table
        e = self.identity
        for a in range(n):
            if sorted(t[a]) != list(range(n)):
                raise GroupError("table row is not a permutation")
        for a, b, c in itertools.product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise GroupError("multiplication is not associative")
        if any(t[e][a] != a or t[a][e] != a for a in range(n)):
            raise GroupError("identity check failed")

    @property
    def order(self) -> int:
        return len(self.mult_table)

    @cached_property
    def identity(self) -> int:
        n = len(self.mult_table)
        for e in range(n):
            if all(self.mult_table[e][a] == a for a in range(n)):
                return e
        raise GroupError("no identity element")

    def mul(self, a: int, b: int) -> int:
        return self.mult_table[a][b]

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        e = self.identity
        return tuple(next(b for b in range(self.order) if self.mult_table[a][b] == e) for a in range(self.order))

    @cached_property
    def conjugacy_classes(self) -> tuple[tuple[int, ...], ...]:
        seen: set[int] = set()
        classes = []
        for a in range(self.order):
            if a in seen:
                continue
            cls = sorted({self.mul(self.mul(h, a), self.inverse[h]) for h in range(self.order)})
            seen.update(cls)
            classes.append(tuple(cls))
        return tuple(classes)

    @cached_property
    def class_of(self) -> tuple[int, ...]:
        out = [0] * self.order
        for ci, cls in enumerate(self.conjugacy_classes):
            for a in cls:
                out[a] = ci
        return tuple(out)

    @cached_property
    def center(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.conjugacy_classes if len(c) == 1)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*(self.element_order(a) for a in range(self.order)))

    def power(self, a: int, k: int) -> int:
        x = self.identity
        for _ in range(k % self.element_order(a)):
            x = self.mul(x, a)
        return x

    def regular_matrices(self) -> list[la.Matrix]:
        """Left regular action on Q[G] in the element basis (column convention)."""
        mats = []
        for g in range(self.order):
            m = la.zeros(self.order, self.order)
            for h in range(self.order):
                m[self.mul(g, h)][h] = Fraction(1)
            mats.append(m)
        return mats

    def to_json(self) -> dict:
        return {"name": self.name, "order": self.order, "mult_table": [list(r) for r in self.mult_table]}

    @cached_property
    def irreducibles(self) -> tuple["Representation", ...]:
        return tuple(_catalog_irreducibles(self))

    @cached_property
    def characters(self) -> tuple["Character", ...]:
        return tuple(r.character for r in self.irreducibles)


# ---------------------------------------------------------------------------
# Representations and characters


@dataclass(frozen=True, eq=False)
class Representation:
    group: FiniteGroup
    matrices: tuple  # per element, list-of-rows matrix
    label: str = ""

    def __post_init__(self):
        g = self.group
        d = self.degree
        if not la.mat_eq(self.matrices[g.identity], la.identity(d)):
            raise GroupError(f"representation {self.label}: identity does not act trivially")
        for a in range(g.order):
            for b in range(g.order):
                if not la.mat_eq(la.mat_mul(self.matrices[a], self.matrices[b]), self.matrices[g.mul(a, b)]):
                    raise GroupError(f"representation {self.label} is not a homomorphism")

    @property
    def degree(self) -> int:
        return len(self.matrices[0])

    def __call__(self, g: int) -> la.Matrix:
        return self.matrices[g]

    @cached_property
    def character(self) -> "Character":
        vals = [simplify(sum((m[i][i] for i in range(self.degree)), Fraction(0))) for m in self.matrices]
        return Character(self.group, tuple(vals), self.label)

    def apply(self, a: "GroupAlgebraElement") -> la.Matrix:
        return apply_rep(self, a)

    def to_json(self) -> dict:
        from .serialize import matrix_to_json

        return {"label": self.label, "degree": self.degree, "matrices": [matrix_to_json(m) for m in self.matrices]}


def representation_from_generators(group: FiniteGroup, images: dict[int, la.Matrix], label: str = "") -> Representation:
    """Extend generator images to all elements by breadth-first products and verify."""
    known: dict[int, la.Matrix] = {group.identity: la.identity(len(next(iter(images.values()))))}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s, m in images.items():
                h = group.mul(g, s)
                if h not in known:
                    known[h] = [[simplify(x) for x in row] for row in la.mat_mul(known[g], m)]
                    nxt.append(h)
        frontier = nxt
    if len(known) != group.order:
        raise GroupError("generators do not generate the group")
    return Representation(group, tuple(known[g] for g in range(group.order)), label)


@dataclass(frozen=True, eq=False)
class Character:
    group: FiniteGroup
    values: tuple  # per element
    label: str = ""

    @property
    def degree(self) -> int:
        return int(Fraction(simplify(self.values[self.group.identity])))

    def __call__(self, g: int):
        return self.values[g]

    @property
    def class_values(self) -> tuple:
        return tuple(self.values[c[0]] for c in self.group.conjugacy_classes)

    def conjugate(self) -> "Character":
        return Character(self.group, tuple(simplify(conj(v)) for v in self.values), self.label + "bar")

    def is_real(self) -> bool:
        return all(is_zero(v - conj(v)) for v in self.values)

    def __add__(self, other: "Character") -> "Character":
        return Character(self.group, tuple(simplify(a + b) for a, b in zip(self.values, other.values)))

    def scale(self, k: int) -> "Character":
        return Character(self.group, tuple(simplify(k * a) for a in self.values))

    def equals(self, other: "Character") -> bool:
        return all(is_zero(a - b) for a, b in zip(self.values, other.values))


def inner_product(chi: Character, psi: Character):
    g = chi.group
    total = sum((chi(a) * conj(psi(a)) for a in range(g.order)), Fraction(0))
    return simplify(total / g.order)


def frobenius_schur(chi: Character) -> int:
    g = chi.group
    total = simplify(sum((chi(g.mul(a, a)) for a in range(g.order)), Fraction(0)) / g.order)
    value = Fraction(total) if not isinstance(total, CycloNumber) else total.to_fraction()
    if value not in (-1, 0, 1):
        raise GroupError(f"Frobenius-Schur indicator {value} for a non-irreducible character")
    return int(value)


# ---------------------------------------------------------------------------
# Group algebra


@dataclass(frozen=True, eq=False)
class GroupAlgebraElement:
    group: FiniteGroup
    coeffs: tuple

    @classmethod
    def basis(cls, group: FiniteGroup, g: int, coeff=1) -> "GroupAlgebraElement":
        c = [Fraction(0)] * group.order
        c[g] = simplify(coeff)
        return cls(group, tuple(c))

    @classmethod
    def zero(cls, group: FiniteGroup) -> "GroupAlgebraElement":
        return cls(group, (Fraction(0),) * group.order)

    @classmethod
    def one(cls, group: FiniteGroup) -> "GroupAlgebraElement":
        return cls.basis(group, group.identity)

    @classmethod
    def from_dict(cls, group: FiniteGroup, terms: dict) -> "GroupAlgebraElement":
        c = [Fraction(0)] * group.order
        for g, v in terms.items():
            c[g] = simplify(c[g] + v)
        return cls(group, tuple(c))

    def __add__(self, other):
        _check_same_group(self, other)
        return GroupAlgebraElement(self.group, tuple(simplify(a + b) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        _check_same_group(self, other)
        return GroupAlgebraElement(self.group, tuple(simplify(a - b) for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return GroupAlgebraElement(self.group, tuple(-a for a in self.coeffs))

    def scale(self, c) -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.group, tuple(simplify(c * a) for a in self.coeffs))

    def __mul__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return self.scale(other)
        return algebra_mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def is_zero(self) -> bool:
        return all(is_zero(a) for a in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return all(is_zero(a - b) for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None  # type: ignore[assignment]

    def involution(self) -> "GroupAlgebraElement":
        return algebra_involution(self)

    def inversion(self) -> "GroupAlgebraElement":
        """g -> g^{-1} without conjugating coefficients."""
        inv = self.group.inverse
        c = [Fraction(0)] * self.group.order
        for g, a in enumerate(self.coeffs):
            c[inv[g]] = a
        return GroupAlgebraElement(self.group, tuple(c))

    def __repr__(self):
        terms = [f"{a}*{self.group.labels[g]}" for g, a in enumerate(self.coeffs) if not is_zero(a)]
        return "GA(" + (" + ".join(terms) or "0") + ")"


def _check_same_group(a: GroupAlgebraElement, b: GroupAlgebraElement) -> None:
    if a.group is not b.group and a.group.mult_table != b.group.mult_table:
        raise GroupError(f"group mismatch: {a.group.name} vs {b.group.name}")


def algebra_mul(a: GroupAlgebraElement, b: GroupAlgebraElement) -> GroupAlgebraElement:
    _check_same_group(a, b)
    g = a.group
    c = [Fraction(0)] * g.order
    for x, ax in enumerate(a.coeffs):
        if is_zero(ax):
            continue
        row = g.mult_table[x]
        for y, by in enumerate(b.coeffs):
            if not is_zero(by):
                c[row[y]] = c[row[y]] + ax * by
    return GroupAlgebraElement(g, tuple(simplify(v) for v in c))


def algebra_involution(a: GroupAlgebraElement) -> GroupAlgebraElement:
    """sum a_g g  ->  sum conj(a_g) g^{-1}."""
    inv = a.group.inverse
    c = [Fraction(0)] * a.group.order
    for g, x in enumerate(a.coeffs):
        c[inv[g]] = simplify(conj(x))
    return GroupAlgebraElement(a.group, tuple(c))


def apply_rep(rep, a: GroupAlgebraElement) -> la.Matrix:
    """sum_g a_g rho(g); ``rep`` is a Representation or a per-element matrix list."""
    mats = rep.matrices if isinstance(rep, Representation) else rep
    d = len(mats[0])
    out = la.zeros(d, d)
    for g, coeff in enumerate(a.coeffs):
        if is_zero(coeff):
            continue
        m = mats[g]
        for i in range(d):
            for j in range(d):
                if not is_zero(m[i][j]):
                    out[i][j] = out[i][j] + coeff * m[i][j]
    return [[simplify(x) for x in row] for row in out]


# ---------------------------------------------------------------------------
# Catalog


def _cyclic(n: int) -> FiniteGroup:
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    labels = tuple("e" if k == 0 else (f"g^{k}" if k > 1 else "g") for k in range(n))
    return FiniteGroup(f"C{n}", table, labels, (1,) if n > 1 else (0,))


def _dihedral(n: int) -> FiniteGroup:
    def idx(k, e):
        return k % n + n * e

    table = []
    for e1 in range(2):
        for k1 in range(n):
            row = []
            for e2 in range(2):
                for k2 in range(n):
                    row.append(idx(k1 + (-1) ** e1 * k2, (e1 + e2) % 2))
            table.append(row)
    # rows above are ordered by (e1, k1) which matches index k + n*e
    labels = tuple((f"r^{k}" if k else "e") if e == 0 else (f"r^{k}s" if k else "s") for e in range(2) for k in range(n))
    return FiniteGroup(f"D{n}", tuple(tuple(r) for r in table), labels, (1, n))


def _symmetric3() -> FiniteGroup:
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(tuple(index[tuple(p[q[x]] for x in range(3))] for q in perms) for p in perms)
    labels = tuple("".join(map(str, p)) for p in perms)
    return FiniteGroup("S3", table, labels, (index[(1, 0, 2)], index[(1, 2, 0)]))


_Q8_LABELS = ("1", "-1", "i", "-i", "j", "-j", "k", "-k")


def _quaternion8() -> FiniteGroup:
    units = {"1": (1, 0, 0, 0), "i": (0, 1, 0, 0), "j": (0, 0, 1, 0), "k": (0, 0, 0, 1)}

    def vec(label):
        sign = -1 if label.startswith("-") else 1
        return tuple(sign * x for x in units[label.lstrip("-")])

    def qmul(a, b):
        a1, b1, c1, d1 = a
        a2, b2, c2, d2 = b
        return (
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    vecs = [vec(l) for l in _Q8_LABELS]
    index = {v: i for i, v in enumerate(vecs)}
    table = tuple(tuple(index[qmul(a, b)] for b in vecs) for a in vecs)
    return FiniteGroup("Q8", table, _Q8_LABELS, (2, 4))


def _parse_name(name: str, n: int | None) -> tuple[str, int | None]:
    m = re.fullmatch(r"([A-Za-z]+)_?(\d*)", name.strip())
    if not m:
        raise GroupError(f"unknown group {name!r}")
    kind, num = m.group(1).upper(), m.group(2)
    if num:
        n = int(num)
    return kind, n


def catalog_group(name: str, n: int | None = None) -> FiniteGroup:
    """C_n, D_n, Q8, S3 (and ``trivial`` = C1)."""
    kind, n = _parse_name(name, n)
    if kind == "TRIVIAL":
        return _cyclic(1)
    if kind == "C" and n:
        return _cyclic(n)
    if kind == "D" and n and n >= 3:
        return _dihedral(n)
    if kind == "S" and n == 3:
        return _symmetric3()
    if kind == "Q" and n == 8:
        return _quaternion8()
    raise GroupError(f"group {name!r} (n={n}) is not in the catalog")


def _mat(rows) -> la.Matrix:
    return [[simplify(x) for x in row] for row in rows]


def _catalog_irreducibles(group: FiniteGroup) -> list[Representation]:
    kind, n = _parse_name(group.name, None)
    N = group.exponent
    if kind == "C":
        reps = []
        for j in range(n):
            label = "1" if j == 0 else ("sgn" if n == 2 else f"chi{j}")
            z = zeta(N, j * (N // n)) if n > 1 else Fraction(1)
            reps.append(representation_from_generators(group, {group.generators[0]: _mat([[z]])}, label))
        return reps
    if kind == "D":
        r, s = group.generators
        lin = [("1", 1, 1), ("eps", 1, -1)]
        if n % 2 == 0:
            lin += [("delta", -1, 1), ("delta*eps", -1, -1)]
        reps = [representation_from_generators(group, {r: _mat([[a]]), s: _mat([[b]])}, lab) for lab, a, b in lin]
        for j in range(1, (n + 1) // 2):
            zr = zeta(N, j * (N // n))
            rho_r = _mat([[zr, 0], [0, zr.conjugate()]])
            rho_s = _mat([[0, 1], [1, 0]])
            reps.append(representation_from_generators(group, {r: rho_r, s: rho_s}, f"rho{j}"))
        return reps
    if kind == "S":
        perms = list(itertools.permutations(range(3)))
        reps = [Representation(group, tuple(_mat([[1]]) for _ in perms), "1")]

        def parity(p):
            return (-1) ** sum(1 for a in range(3) for b in range(a + 1, 3) if p[a] > p[b])

        reps.append(Representation(group, tuple(_mat([[parity(p)]]) for p in perms), "sgn"))
        # permutation action on the sum-zero plane with basis f1 = e0 - e1, f2 = e1 - e2
        basis = [[1, -1, 0], [0, 1, -1]]
        mats = []
        for p in perms:
            cols = []
            for f in basis:
                img = [0, 0, 0]
                for i, c in enumerate(f):
                    img[p[i]] += c
                # img = a f1 + b f2: a = img[0], b = img[0] + img[1]
                cols.append([img[0], img[0] + img[1]])
            mats.append(_mat([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]))
        reps.append(Representation(group, tuple(mats), "std"))
        return reps
    if kind == "Q":
        i_, j_ = group.generators
        lin = [("1", 1, 1), ("chi_i", 1, -1), ("chi_j", -1, 1), ("chi_k", -1, -1)]
        reps = [representation_from_generators(group, {i_: _mat([[a]]), j_: _mat([[b]])}, lab) for lab, a, b in lin]
        z4 = zeta(4)
        reps.append(
            representation_from_generators(
                group, {i_: _mat([[z4, 0], [0, -z4]]), j_: _mat([[0, -1], [1, 0]])}, "theta"
            )
        )
        return reps
    if kind == "TRIVIAL":
        return [Representation(group, (_mat([[1]]),), "1")]
    raise GroupError(f"no catalog representations for {group.name}")


# ---------------------------------------------------------------------------
# Symplectic character basis


@dataclass(frozen=True, eq=False)
class SymplecticBasisItem:
    """One W_m with invariant alternating form and hyperbolic basis.

    ``hyp_matrices`` and ``hyp_kappa`` express W_m in the coordinates of its
    hyperbolic basis, so that hyperbolic basis vectors are the standard ones.
    """

    label: str
    kind: str
    representation: Representation
    kappa_gram: la.Matrix
    hyperbolic_basis: tuple  # column vectors u_1, u_1', u_2, u_2', ...
    constituents: tuple[int, ...]  # irreducible indices with multiplicity

    @property
    def group(self) -> FiniteGroup:
        return self.representation.group

    @property
    def degree(self) -> int:
        return self.representation.degree

    @cached_property
    def character(self) -> Character:
        ch = self.representation.character
        return Character(ch.group, ch.values, self.label)

    @cached_property
    def change_of_basis(self) -> la.Matrix:
        return la.from_columns(list(self.hyperbolic_basis))

    @cached_property
    def hyp_matrices(self) -> tuple:
        s = self.change_of_basis
        s_inv = la.inverse(s)
        return tuple(
            [[simplify(x) for x in row] for row in la.mat_mul(s_inv, la.mat_mul(m, s))]
            for m in self.representation.matrices
        )

    @cached_property
    def hyp_kappa(self) -> la.Matrix:
        s = self.change_of_basis
        return la.mat_mul(la.transpose(s), la.mat_mul(self.kappa_gram, s))

    def with_kappa(self, kappa: la.Matrix) -> "SymplecticBasisItem":
        from .forms import hyperbolic_basis

        return SymplecticBasisItem(
            self.label, self.kind, self.representation, kappa, tuple(hyperbolic_basis(kappa)), self.constituents
        )


def _invariant_form(rep: Representation, alternating: bool, generators: Sequence[int]) -> la.Matrix:
    d = rep.degree
    if alternating:
        slots = [(a, b) for a in range(d) for b in range(a + 1, d)]
    else:
        slots = [(a, b) for a in range(d) for b in range(a, d)]

    def form_from(vec):
        k = la.zeros(d, d)
        for (a, b), v in zip(slots, vec):
            k[a][b] = v
            k[b][a] = -v if alternating else v
        return k

    rows = []
    for s in generators:
        m = rep(s)
        columns = []
        for idx in range(len(slots)):
            unit = [Fraction(0)] * len(slots)
            unit[idx] = Fraction(1)
            k = form_from(unit)
            diff = la.mat_sub(la.mat_mul(la.transpose(m), la.mat_mul(k, m)), k)
            columns.append([x for row in diff for x in row])
        rows.extend(la.from_columns(columns))
    null = la.nullspace(rows, len(slots))
    if not null:
        raise GroupError(f"no invariant {'alternating' if alternating else 'symmetric'} form on {rep.label}")
    return [[simplify(x) for x in row] for row in form_from(null[0])]


def _block(a, b, c, d) -> la.Matrix:
    return la.block_matrix([[a, b], [c, d]])


def symplectic_character_basis(group: FiniteGroup) -> list[SymplecticBasisItem]:
    from .forms import hyperbolic_basis

    irreps = group.irreducibles
    chars = [r.character for r in irreps]
    used: set[int] = set()
    items = []
    for idx, rep in enumerate(irreps):
        if idx in used:
            continue
        fs = frobenius_schur(chars[idx])
        d = rep.degree
        if fs == -1:
            kappa = _invariant_form(rep, True, group.generators)
            w_rep, kind, label, cons = rep, "symplectic-irreducible", rep.label, (idx,)
        elif fs == 1:
            b = _invariant_form(rep, False, group.generators)
            mats = tuple(la.block_diag([m, m]) for m in rep.matrices)
            w_rep = Representation(group, mats, f"2*{rep.label}")
            kappa = _block(la.zeros(d, d), b, la.mat_scale(-1, b), la.zeros(d, d))
            kind, label, cons = "doubled-orthogonal", f"2*{rep.label}", (idx, idx)
        else:
            bar = chars[idx].conjugate()
            partner = next(k for k, c in enumerate(chars) if c.equals(bar))
            used.add(partner)
            inv = group.inverse
            mats = tuple(
                la.block_diag([rep(g), [[simplify(x) for x in row] for row in la.transpose(rep(inv[g]))]])
                for g in range(group.order)
            )
            w_rep = Representation(group, mats, f"{rep.label}+{irreps[partner].label}")
            kappa = _block(la.zeros(d, d), la.identity(d), la.mat_scale(-1, la.identity(d)), la.zeros(d, d))
            kind, label, cons = "conjugate-pair", f"{rep.label}+{irreps[partner].label}", (idx, partner)
        used.add(idx)
        kappa = [[simplify(x) for x in row] for row in kappa]
        items.append(SymplecticBasisItem(label, kind, w_rep, kappa, tuple(hyperbolic_basis(kappa)), cons))
    return items


def character_degree_sum_ok(group: FiniteGroup) -> bool:
    return sum(r.degree ** 2 for r in group.irreducibles) == group.order


def field_conductor(group: FiniteGroup) -> int:
    return group.exponent
