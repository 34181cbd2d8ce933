"""Graded determinant lines, the determinant-of-cohomology isomorphism via
B/H/U splittings, and Pfaffian functionals on complexes.

Conventions
-----------
* ``det`` of a complex is the ordered tensor product over increasing degree
  of det(C^i)^{(-1)^i}.
* A splitting writes C^i = B^i + H^i + U^i with the B^i basis equal to the
  image of the U^{i-1} basis.  If the reference wedge r_i equals
  c_i * (x_B ^ x_H ^ x_U), then xi sends the tensor of r_i^{(-1)^i} to
  prod c_i^{(-1)^i} times the tensor of x_H^{(-1)^i}.  Pulling the H-factors
  to the front costs no sign, because everything they pass over pairs up
  as U^{i-1}, B^i with equal dimensions.
* The reordering to det(H^ev) (x) det(H^odd)^{-1} lists degrees in the order
  0, 2, -2, 4, -4, ... followed by 1, -1, 3, -3, ...; its sign is the Koszul
  sign of that permutation of graded lines.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .cyclo import is_zero, simplify
from .forms import pfaffian


class ComplexError(ValueError):
    def __init__(self, message: str, degree: int | None = None):
        super().__init__(message)
        self.degree = degree


@dataclass(frozen=True)
class GradedLineElement:
    scalar: object
    grade: int
    basis_tag: str = ""

    def tensor(self, other: "GradedLineElement") -> "GradedLineElement":
        return GradedLineElement(simplify(self.scalar * other.scalar), self.grade + other.grade,
                                 f"{self.basis_tag}*{other.basis_tag}")

    def inverse(self) -> "GradedLineElement":
        return GradedLineElement(simplify(1 / self.scalar), -self.grade, f"({self.basis_tag})^-1")


def koszul_reorder(x: GradedLineElement, y: GradedLineElement) -> int:
    """Sign of the swap x (x) y -> y (x) x."""
    return -1 if (x.grade * y.grade) % 2 else 1


@dataclass
class ComplexOverField:
    lo: int
    dims: list[int]
    boundaries: list  # boundaries[k]: C^{lo+k} -> C^{lo+k+1}, shape dims[k+1] x dims[k]

    def __post_init__(self):
        if len(self.boundaries) != max(len(self.dims) - 1, 0):
            raise ComplexError("need one boundary between consecutive terms")
        for k, m in enumerate(self.boundaries):
            rows, cols = len(m), (len(m[0]) if m else 0)
            if self.dims[k + 1] and self.dims[k] and (rows, cols) != (self.dims[k + 1], self.dims[k]):
                raise ComplexError(f"boundary at degree {self.lo + k} has wrong shape", self.lo + k)
        for k in range(len(self.boundaries) - 1):
            a, b = self.boundaries[k], self.boundaries[k + 1]
            if self.dims[k] and self.dims[k + 2] and not la.is_zero_matrix(la.mat_mul(b, a)):
                raise ComplexError(f"boundary composition nonzero at degree {self.lo + k}", self.lo + k)

    @property
    def hi(self) -> int:
        return self.lo + len(self.dims) - 1

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def dim(self, i: int) -> int:
        return self.dims[i - self.lo] if self.lo <= i <= self.hi else 0

    def boundary(self, i: int):
        """Matrix of C^i -> C^{i+1} (None if either side is zero/out of range)."""
        if self.lo <= i < self.hi and self.dims[i - self.lo] and self.dims[i + 1 - self.lo]:
            return self.boundaries[i - self.lo]
        return None

    def shifted(self, k: int) -> "ComplexOverField":
        return ComplexOverField(self.lo + k, list(self.dims), list(self.boundaries))

    def to_json(self) -> dict:
        from .serialize import matrix_to_json

        return {"lo": self.lo, "hi": self.hi, "ranks": list(self.dims),
                "boundaries": [matrix_to_json(m) for m in self.boundaries]}


def direct_sum(c1: ComplexOverField, c2: ComplexOverField) -> ComplexOverField:
    lo, hi = min(c1.lo, c2.lo), max(c1.hi, c2.hi)
    dims = [c1.dim(i) + c2.dim(i) for i in range(lo, hi + 1)]
    bds = []
    for i in range(lo, hi):
        m = la.zeros(dims[i + 1 - lo], dims[i - lo])
        r0 = c0 = 0
        for c in (c1, c2):
            b = c.boundary(i)
            if b is not None:
                for r, row in enumerate(b):
                    m[r0 + r][c0:c0 + len(row)] = row
            r0, c0 = r0 + c.dim(i + 1), c0 + c.dim(i)
        bds.append(m)
    return ComplexOverField(lo, dims, bds)


@dataclass
class BHUSplitting:
    B: dict = field(default_factory=dict)
    H: dict = field(default_factory=dict)
    U: dict = field(default_factory=dict)

    def basis_matrix(self, i: int) -> la.Matrix:
        return la.from_columns(self.B[i] + self.H[i] + self.U[i])


def _std_basis(n: int) -> list[list]:
    return la.columns(la.identity(n))


def cycles(c: ComplexOverField, i: int) -> list[list]:
    d = c.boundary(i)
    n = c.dim(i)
    if n == 0:
        return []
    if d is None:
        return _std_basis(n)
    return la.nullspace(d, n)


def bhu_splitting(c: ComplexOverField, rng: random.Random | None = None) -> BHUSplitting:
    """Deterministic splitting by row reduction; ``rng`` perturbs the choices of
    H and U inside their admissible cosets (for independence tests)."""
    sp = BHUSplitting()
    prev_u: list = []
    for i in c.degrees:
        n = c.dim(i)
        d_prev = c.boundary(i - 1)
        b = [la.mat_vec(d_prev, u) for u in prev_u] if (d_prev is not None and prev_u) else []
        b = [[simplify(x) for x in v] for v in b]
        z = cycles(c, i)
        h = la.complement_columns(b, z) if b else la.column_space(z)
        u = la.complement_columns(z, _std_basis(n)) if z else (_std_basis(n) if n else [])
        if rng is not None:
            h = _perturb(h, b, rng)
            u = _perturb(u, z, rng)
        sp.B[i], sp.H[i], sp.U[i] = b, h, u
        prev_u = u
    return sp


def _perturb(vectors: list, allowed: list, rng: random.Random) -> list:
    """Random invertible recombination of ``vectors`` plus random elements of span(allowed)."""
    if not vectors:
        return vectors
    k = len(vectors)
    while True:
        mix = [[Fraction(rng.randint(-3, 3)) for _ in range(k)] for _ in range(k)]
        if la.det(mix) != 0:
            break
    out = []
    for col in range(k):
        v = [Fraction(0)] * len(vectors[0])
        for r in range(k):
            if mix[r][col]:
                v = [x + mix[r][col] * y for x, y in zip(v, vectors[r])]
        for a in allowed:
            t = rng.randint(-2, 2)
            if t:
                v = [x + t * y for x, y in zip(v, a)]
        out.append([simplify(x) for x in v])
    return out


@dataclass
class XiResult:
    scalar: object
    splitting: BHUSplitting
    element: GradedLineElement

    @property
    def H(self) -> dict:
        return self.splitting.H


def xi_det_cohomology(c: ComplexOverField, wedges: dict | None = None,
                      splitting: BHUSplitting | None = None) -> XiResult:
    """Apply xi to the tensor of (wedge of ``wedges[i]``)^{(-1)^i}.

    ``wedges[i]`` is a list of column vectors forming a basis of C^i (default:
    the standard basis).  Returns the scalar relative to the H-bases of the
    splitting used.
    """
    sp = splitting if splitting is not None else bhu_splitting(c)
    scalar = Fraction(1)
    grade = 0
    for i in c.degrees:
        n = c.dim(i)
        if n == 0:
            continue
        w = la.from_columns(wedges[i]) if wedges and i in wedges else la.identity(n)
        s = sp.basis_matrix(i)
        if len(s) != n or (s and len(s[0]) != n):
            raise ComplexError(f"splitting at degree {i} is not a basis", i)
        ratio = simplify(la.det(w) / la.det(s))
        if is_zero(ratio):
            raise ComplexError(f"wedge at degree {i} is not a basis", i)
        scalar = simplify(scalar * ratio if i % 2 == 0 else scalar / ratio)
        grade += len(sp.H[i]) if i % 2 == 0 else -len(sp.H[i])
    return XiResult(scalar, sp, GradedLineElement(scalar, grade, "xH"))


def upsilon_order(degrees: Sequence[int]) -> list[int]:
    even = sorted((i for i in degrees if i % 2 == 0), key=lambda i: (abs(i), -i))
    odd = sorted((i for i in degrees if i % 2), key=lambda i: (abs(i), -i))
    return even + odd


def upsilon_reorder(dims: dict[int, int]) -> tuple[list[int], int]:
    """Target degree order and Koszul sign of reordering ascending-degree factors."""
    asc = sorted(dims)
    target = upsilon_order(asc)
    pos = {deg: k for k, deg in enumerate(target)}
    sign = 1
    for a_idx, a in enumerate(asc):
        for b in asc[a_idx + 1:]:
            if pos[a] > pos[b] and (dims[a] * dims[b]) % 2:
                sign = -sign
    return target, sign


def cohomology_coordinates(c: ComplexOverField, i: int, vectors: Sequence[Sequence],
                           reference: BHUSplitting) -> list[list]:
    """Coordinates (columns) of the classes of cycles in the reference H^i basis."""
    b, h = reference.B[i], reference.H[i]
    out = []
    for v in vectors:
        coords = la.solve_in_span(b + h, v)
        if coords is None:
            raise ComplexError(f"vector is not a cycle at degree {i}", i)
        out.append(coords[len(b):])
    return out


def pf_on_complex(c: ComplexOverField, h_ev: la.Matrix, h_odd: la.Matrix,
                  wedges: dict | None = None, splitting: BHUSplitting | None = None):
    """Pf_{h^ev} (x) Pf_{h^odd}^{-1} after upsilon and xi.

    ``h_ev``/``h_odd`` are alternating grams on the canonical cohomology bases
    (those of ``bhu_splitting(c)``) concatenated in upsilon order.
    """
    reference = bhu_splitting(c)
    xi = xi_det_cohomology(c, wedges, splitting)
    dims = {i: len(xi.H[i]) for i in c.degrees}
    order, sign = upsilon_reorder(dims)

    def block_coords(parity: int) -> la.Matrix:
        degs = [i for i in order if i % 2 == parity]
        total = sum(len(reference.H[i]) for i in degs)
        cols = []
        offset = 0
        for i in degs:
            coords = cohomology_coordinates(c, i, xi.H[i], reference)
            for v in coords:
                full = [Fraction(0)] * total
                full[offset:offset + len(v)] = v
                cols.append(full)
            offset += len(reference.H[i])
        return cols

    ev_cols, odd_cols = block_coords(0), block_coords(1)
    pf_ev = pfaffian(la.gram(h_ev, ev_cols)) if ev_cols else Fraction(1)
    pf_odd = pfaffian(la.gram(h_odd, odd_cols)) if odd_cols else Fraction(1)
    return simplify(sign * xi.scalar * pf_ev / pf_odd)
