"""Hermitian and Arakelov class representatives, the sign decomposition,
and the comparison with Pfaffians of lifted chain-level pairings."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .complexes import PerfectGComplex, even_odd_degrees
from .cyclo import abs_squared, conj, is_zero, sign_of_real, simplify
from .detlines import bhu_splitting, cohomology_coordinates, upsilon_reorder, xi_det_cohomology
from .equivariant import (
    IdealRep,
    block_rep,
    group_ring_form,
    hermitian_det_abs,
    random_invariant_form,
    two_sided_ideal,
)
from .forms import n_m_signature, pfaffian, pfaffian_selfadjoint
from .groups import SymplecticBasisItem, apply_rep, symplectic_character_basis


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Value types


def as_rational(x) -> Fraction:
    x = simplify(x)
    if not isinstance(x, (int, Fraction)):
        raise ValueError(f"{x!r} is not rational")
    return Fraction(x)


def _int_root(n: int, k: int) -> int | None:
    if n < 0:
        return None
    if n < 2:
        return n
    guess = round(math.exp(math.log(n) / k))
    for r in (guess - 1, guess, guess + 1):
        if r >= 0 and r ** k == n:
            return r
    return None


def rational_root(x: Fraction, k: int) -> Fraction | None:
    """Exact positive k-th root of a positive rational, or None."""
    num, den = _int_root(x.numerator, k), _int_root(x.denominator, k)
    return None if num is None or den is None else Fraction(num, den)


@dataclass(frozen=True)
class SignedMagnitude:
    """Sign and squared absolute value; the square may be None when only a power of it is rational-rooted."""

    sign: int
    magnitude_squared: Fraction | None

    def __post_init__(self):
        if self.sign not in (1, 0, -1):
            raise ValueError("sign must be +1, 0 or -1")
        if self.magnitude_squared is None:
            if self.sign == 0:
                raise ValueError("zero must carry its magnitude")
        elif self.magnitude_squared < 0 or (self.sign == 0) != (self.magnitude_squared == 0):
            raise ValueError("sign is zero exactly when the magnitude is zero")

    @classmethod
    def of(cls, value) -> "SignedMagnitude":
        return cls(sign_of_real(value), as_rational(value * value))


@dataclass(frozen=True)
class RootedMagnitude:
    """A positive real stored as ``power`` = (squared value)^root."""

    power: object
    root: int


@dataclass
class CharacterValue:
    label: str
    finite: Fraction
    arch: SignedMagnitude
    exact: object = None  # exact archimedean coordinate when it is algebraic
    rooted: RootedMagnitude | None = None

    def to_json(self) -> dict:
        from .serialize import fraction_str

        mag = self.arch.magnitude_squared
        out = {"character": self.label, "finite": fraction_str(self.finite), "arch_sign": self.arch.sign,
               "arch_mag_sq": None if mag is None else fraction_str(mag)}
        if self.rooted is not None and self.rooted.root != 1:
            out["arch_mag_sq_power"] = fraction_str(Fraction(self.rooted.power))
            out["arch_mag_sq_root"] = self.rooted.root
        return out


@dataclass
class ClassRepresentative:
    values: list[CharacterValue]

    def __getitem__(self, label: str) -> CharacterValue:
        return next(v for v in self.values if v.label == label)

    @property
    def labels(self) -> list[str]:
        return [v.label for v in self.values]

    def to_json(self) -> list[dict]:
        return [v.to_json() for v in self.values]


@dataclass
class SignClass:
    values: dict

    def __getitem__(self, label):
        return self.values[label]


@dataclass
class HClRepresentative:
    """Finite part and algebraic Pfaffian coordinate per symplectic character."""

    finite: dict
    pf_part: dict


@dataclass
class CohomologyPairingData:
    """Symmetric forms on the canonical H^ev / H^odd bases (upsilon order of degrees)."""

    sigma_ev: la.Matrix
    sigma_odd: la.Matrix

    def scaled(self, c) -> "CohomologyPairingData":
        return CohomologyPairingData(la.mat_scale(c, self.sigma_ev), la.mat_scale(c, self.sigma_odd))


# ---------------------------------------------------------------------------
# Shared pieces


def finite_part(p: PerfectGComplex, mats) -> Fraction:
    value = Fraction(1)
    for i, lam in sorted(p.lambdas.items()):
        d = la.det(block_rep(mats, lam))
        value = value * d if i % 2 == 0 else value / d
    return simplify(value)


def _check_pairing(p: PerfectGComplex, sigma: CohomologyPairingData):
    ev, odd = even_odd_degrees(p)
    dims = p.cohomology_dims()
    n_ev = sum(dims[i] for i in ev)
    n_odd = sum(dims[i] for i in odd)
    if len(sigma.sigma_ev) != n_ev or len(sigma.sigma_odd) != n_odd:
        raise PreconditionError(f"pairing sizes ({len(sigma.sigma_ev)}, {len(sigma.sigma_odd)}) "
                                f"do not match cohomology dimensions ({n_ev}, {n_odd})")
    for name, s, degs in (("even", sigma.sigma_ev, ev), ("odd", sigma.sigma_odd, odd)):
        if not s:
            continue
        if not la.is_symmetric(s):
            raise PreconditionError(f"{name} pairing is not symmetric")
        if la.det(s) == 0:
            raise PreconditionError(f"{name} pairing is degenerate")
        act = p.cohomology_action(degs)
        if not all(la.mat_eq(la.mat_mul(la.transpose(a), la.mat_mul(s, a)), s) for a in act):
            raise PreconditionError(f"{name} pairing is not G-invariant")


def _projection_stack(p: PerfectGComplex, degs: list[int]) -> la.Matrix:
    """Block-diagonal stack of H-projections for the given degrees (in that order)."""
    blocks = [p.h_projection(i) for i in degs if p.rank(i)]
    blocks = [b if b else [] for b in blocks]
    total_rows = sum(len(b) for b in blocks)
    total_cols = sum(p.rank(i) * p.group.order for i in degs if p.rank(i))
    out = la.zeros(total_rows, total_cols)
    r = c = 0
    for i in degs:
        if not p.rank(i):
            continue
        b = p.h_projection(i)
        width = p.rank(i) * p.group.order
        for a, row in enumerate(b):
            out[r + a][c:c + width] = row
        r += len(b)
        c += width
    return out


def _reduced_gram(p: PerfectGComplex, degs: list[int], sigma: la.Matrix, mats, kappa, hermitian: bool):
    """Gram on the reduced terms of ``degs`` for the chain-level lift of sigma.

    Block (j, k) is |G| K rho(s_jk) (bilinear case) or |G| N conj(rho(s_jk))
    (hermitian case) with s_jk = sum_h sigma^(e_j, h e_k) h.
    """
    total_rank = sum(p.rank(i) for i in degs)
    if total_rank == 0:
        return []
    pi = _projection_stack(p, degs)
    lifted = la.mat_mul(la.transpose(pi), la.mat_mul(sigma, pi)) if pi else la.zeros(
        total_rank * p.group.order, total_rank * p.group.order)
    lifted = [[simplify(x) for x in row] for row in lifted]
    s = group_ring_form(p.group, lifted, total_rank)
    n = p.group.order
    blocks = []
    for j in range(total_rank):
        row = []
        for k in range(total_rank):
            r = apply_rep(mats, s[j][k])
            if hermitian:
                r = la.mat_conj(r)
            row.append(la.mat_scale(n, la.mat_mul(kappa, r)))
        blocks.append(row)
    return la.block_matrix(blocks)


def _embed_h_vectors(p: PerfectGComplex, reduced_h: dict, degs: list[int], d: int) -> list[list]:
    """Concatenate reduced H vectors of ``degs`` into the direct sum of reduced terms."""
    sizes = [p.rank(i) * d for i in degs]
    total = sum(sizes)
    out = []
    offset = 0
    for i, size in zip(degs, sizes):
        for v in reduced_h.get(i, []):
            full = [Fraction(0)] * total
            full[offset:offset + size] = v
            out.append(full)
        offset += size
    return out


# ---------------------------------------------------------------------------
# Hermitian Euler characteristic


def hermitian_coordinate(p: PerfectGComplex, sigma: CohomologyPairingData, item: SymplecticBasisItem,
                         splitting_rng: random.Random | None = None, kappa_item: SymplecticBasisItem | None = None):
    """Pf of (sigma (x) kappa)^G applied to xi_m of the lexicographic r_G wedge."""
    it = kappa_item or item
    mats, kappa = it.hyp_matrices, it.hyp_kappa
    d = len(kappa)
    red = p.reduced(mats)
    xi = xi_det_cohomology(red, splitting=bhu_splitting(red, splitting_rng) if splitting_rng else None)
    dims = {i: len(xi.H[i]) for i in red.degrees}
    _, sign = upsilon_reorder(dims)
    ev, odd = even_odd_degrees(p)
    value = simplify(sign * xi.scalar)
    for degs, s, invert in ((ev, sigma.sigma_ev, False), (odd, sigma.sigma_odd, True)):
        vecs = _embed_h_vectors(p, xi.H, degs, d)
        if not vecs:
            continue
        gram = _reduced_gram(p, degs, s, mats, kappa, hermitian=False)
        pf = pfaffian(la.gram(gram, vecs))
        if is_zero(pf):
            raise PreconditionError("restricted form is degenerate")
        value = simplify(value / pf if invert else value * pf)
    return value


def chi_hermitian(p: PerfectGComplex, sigma: CohomologyPairingData, items: Sequence[SymplecticBasisItem] | None = None,
                  check: bool = True) -> ClassRepresentative:
    if check:
        _check_pairing(p, sigma)
    items = items if items is not None else symplectic_character_basis(p.group)
    out = []
    for it in items:
        v = hermitian_coordinate(p, sigma, it)
        out.append(CharacterValue(it.label, finite_part(p, it.hyp_matrices), SignedMagnitude.of(v), v,
                                  RootedMagnitude(simplify(v * v), 1)))
    return ClassRepresentative(out)


# ---------------------------------------------------------------------------
# Arakelov Euler characteristic


def arakelov_squared_metric(p: PerfectGComplex, sigma: CohomologyPairingData, ideal: IdealRep):
    """Squared metric of xi_r(tensor of wedges of c_js) for an orthonormal ideal basis.

    Computed on the ideal basis x_s and corrected by det(N)^{-euler rank}.
    """
    mats, nu = ideal.matrices, ideal.nu_gram
    d = ideal.dim
    red = p.reduced(mats)
    xi = xi_det_cohomology(red)
    ev, odd = even_odd_degrees(p)
    value = abs_squared(xi.scalar)
    for degs, s, invert in ((ev, sigma.sigma_ev, False), (odd, sigma.sigma_odd, True)):
        vecs = _embed_h_vectors(p, xi.H, degs, d)
        if not vecs:
            continue
        gram = _reduced_gram(p, degs, s, mats, nu, hermitian=True)
        h = la.gram(gram, vecs, [[conj(x) for x in v] for v in vecs])
        det = hermitian_det_abs(h)
        value = simplify(value / det if invert else value * det)
    return simplify(value / la.det(nu) ** p.euler_rank)


def chi_arakelov_irreducibles(p: PerfectGComplex, sigma: CohomologyPairingData) -> dict:
    """Per irreducible index r: squared metric value S_r on the two-sided ideal V_r."""
    return {r: arakelov_squared_metric(p, sigma, two_sided_ideal(p.group, r))
            for r in range(len(p.group.irreducibles))}


def chi_arakelov(p: PerfectGComplex, sigma: CohomologyPairingData,
                 items: Sequence[SymplecticBasisItem] | None = None, check: bool = True) -> ClassRepresentative:
    """Restriction to the symplectic basis; at theta the stored power is the product of S_r over
    its constituents, to be read with root chi_r(1)."""
    if check:
        _check_pairing(p, sigma)
    items = items if items is not None else symplectic_character_basis(p.group)
    per_irr = chi_arakelov_irreducibles(p, sigma)
    out = []
    for it in items:
        power = Fraction(1)
        for r in it.constituents:
            power = power * as_rational(per_irr[r])
        root = p.group.irreducibles[it.constituents[0]].degree
        arch = SignedMagnitude(1, rational_root(power, root))
        out.append(CharacterValue(it.label, finite_part(p, it.hyp_matrices), arch, None,
                                  RootedMagnitude(power, root)))
    return ClassRepresentative(out)


def decompose_sign(h: ClassRepresentative) -> tuple[ClassRepresentative, SignClass]:
    magnitudes = []
    signs = {}
    for v in h.values:
        signs[v.label] = v.arch.sign
        magnitudes.append(CharacterValue(v.label, v.finite, SignedMagnitude(1, v.arch.magnitude_squared),
                                         None, v.rooted))
    return ClassRepresentative(magnitudes), SignClass(signs)


def recombine(arakelov: ClassRepresentative, s: SignClass) -> ClassRepresentative:
    out = []
    for v in arakelov.values:
        sign = s[v.label]
        exact = None
        out.append(CharacterValue(v.label, v.finite, SignedMagnitude(sign, v.arch.magnitude_squared), exact, v.rooted))
    return ClassRepresentative(out)


def n_minus_cohomology(p: PerfectGComplex, sigma: CohomologyPairingData, item: SymplecticBasisItem) -> int:
    ev, odd = even_odd_degrees(p)
    total = 0
    for degs, s, sgn in ((ev, sigma.sigma_ev, 1), (odd, sigma.sigma_odd, -1)):
        if not s:
            continue
        _, nm = n_m_signature(p.cohomology_action(degs), s, item)
        total += sgn * nm
    return total


def sign_comparison_check(p: PerfectGComplex, sigma: CohomologyPairingData) -> list[dict]:
    """Compare the sign of hermitian / Arakelov with i^{n_m^-}, and the magnitudes."""
    items = symplectic_character_basis(p.group)
    herm = chi_hermitian(p, sigma, items)
    arak = chi_arakelov(p, sigma, items, check=False)
    out = []
    for it, hv, av in zip(items, herm.values, arak.values):
        nm = n_minus_cohomology(p, sigma, it)
        predicted = -1 if nm % 4 else 1
        ratio_sign = hv.arch.sign * av.arch.sign
        mag_ok = simplify(hv.rooted.power ** av.rooted.root - av.rooted.power) == 0
        out.append({"character": it.label, "n_minus": nm, "predicted": predicted, "sign": ratio_sign,
                    "magnitude_ok": mag_ok, "ok": nm % 2 == 0 and predicted == ratio_sign and mag_ok})
    return out


# ---------------------------------------------------------------------------
# Duality data


@dataclass
class DualityDatum:
    """Pairings sigma[(i, j)] : H^i(Omega^j) x H^{d-i}(Omega^{d-j}) -> Q on based spaces.

    ``actions`` optionally gives a group action (one matrix per element) on each space.
    """

    d: int
    dims: dict  # (i, j) -> dimension of H^i(Omega^j); only nonzero spaces are listed
    pairings: dict  # (i, j) -> matrix dims[(i,j)] x dims[(d-i,d-j)]
    actions: dict | None = None

    def check(self) -> None:
        d = self.d
        for key, n in self.dims.items():
            i, j = key
            partner = (d - i, d - j)
            if self.dims.get(partner) != n:
                raise PreconditionError(f"H{key} and H{partner} have different dimensions")
            m, other = self.pairings.get(key), self.pairings.get(partner)
            if m is None or other is None:
                raise PreconditionError(f"missing pairing for {key}")
            if la.shape(m) != (n, n):
                raise PreconditionError(f"pairing at {key} has wrong shape")
            sign = -1 if ((d + 1) * (i + j)) % 2 else 1
            if not la.mat_eq(m, la.mat_scale(sign, la.transpose(other))):
                raise PreconditionError(f"commutation rule fails at {key}")


@dataclass
class SymmetrizedPairing:
    """sigma^t for t <= 0 (the t and -t pieces share one symmetric form), with the piece order used."""

    d: int
    sigma_t: dict
    layout: dict
    pairing: CohomologyPairingData
    actions: dict | None = None  # t -> block-diagonal action on the pieces of layout[t]

    def half(self, t: int) -> int | None:
        """Dimension of the first half when sigma^t pairs its first half with its second, else None."""
        if t == 0 and self.d % 2 == 0:
            return None
        return len(self.sigma_t[t]) // 2


def _place(m, r0: int, c0: int, block) -> None:
    for a, row in enumerate(block):
        for b, x in enumerate(row):
            m[r0 + a][c0 + b] = x


def symmetrize_duality(dd: DualityDatum) -> SymmetrizedPairing:
    """Assemble the symmetric forms sigma^t from the duality pairings.

    Pieces of total degree t = i + j - d are ordered by increasing i; for t < 0 the
    space carries the t pieces followed by the -t pieces.  In total degree 0 the
    piece (i, d-i) pairs with (d-i, i) through sigma_{i,d-i} when i < d/2, through
    the symmetrised sigma' when i > d/2, and through itself in the middle.
    """
    dd.check()
    d = dd.d
    by_t: dict[int, list] = {}
    for key in sorted(dd.dims):
        by_t.setdefault(key[0] + key[1] - d, []).append(key)
    ts = sorted({-abs(t) for t in by_t}, reverse=True)

    sigma_t, layout, actions = {}, {}, {}
    for t in ts:
        pieces = by_t.get(t, []) + (by_t.get(-t, []) if t else [])
        offsets, total = {}, 0
        for key in pieces:
            offsets[key] = total
            total += dd.dims[key]
        m = la.zeros(total, total)
        for key in pieces:
            i, j = key
            partner = (d - i, d - j)
            own = i + j < d or (i + j == d and 2 * i <= d)
            block = dd.pairings[key] if own else la.transpose(dd.pairings[partner])
            _place(m, offsets[key], offsets[partner], block)
        if not la.is_symmetric(m):
            raise PreconditionError(f"assembled pairing in total degree {t} is not symmetric")
        sigma_t[t], layout[t] = m, pieces
        if dd.actions:
            n = len(next(iter(dd.actions.values())))
            actions[t] = [la.block_diag([dd.actions[k][g] for k in pieces]) for g in range(n)]

    ev = [t for t in ts if t % 2 == 0]
    odd = [t for t in ts if t % 2]
    pairing = CohomologyPairingData(la.block_diag([sigma_t[t] for t in ev]) if ev else [],
                                    la.block_diag([sigma_t[t] for t in odd]) if odd else [])
    return SymmetrizedPairing(d, sigma_t, layout, pairing, actions or None)


def hyperbolic_witness(m: la.Matrix, half: int) -> la.Matrix | None:
    """P with P^T m P = [[0, I], [I, 0]] when m = [[0, A], [A^T, 0]] with A invertible; else None."""
    n = len(m)
    if 2 * half != n:
        return None
    top = [row[:half] for row in m[:half]]
    bottom = [row[half:] for row in m[half:]]
    if not (la.is_zero_matrix(top) and la.is_zero_matrix(bottom)):
        return None
    a = [row[half:] for row in m[:half]]
    if half and la.det(a) == 0:
        return None
    p = la.block_diag([la.identity(half), la.inverse(a)]) if half else []
    target = la.block_matrix([[la.zeros(half, half), la.identity(half)],
                              [la.identity(half), la.zeros(half, half)]]) if half else []
    if half and not la.mat_eq(la.mat_mul(la.transpose(p), la.mat_mul(m, p)), target):
        return None
    return p


def duality_signature_check(sp: SymmetrizedPairing, dd: DualityDatum, items=None) -> dict:
    """Signatures of (sigma^ev, sigma^odd) against the middle piece sigma_{d/2,d/2}.

    Reports the plain signature and, when actions are present, n_m^+ - n_m^- per item.
    """
    from .forms import signature

    d = dd.d
    mid = (d // 2, d // 2)
    has_mid = d % 2 == 0 and mid in dd.dims

    def sig(m):
        if not m:
            return 0
        pos, neg = signature(m)
        return pos - neg

    lhs = sum((1 if t % 2 == 0 else -1) * sig(m) for t, m in sp.sigma_t.items())
    rhs = sig(dd.pairings[mid]) if has_mid else 0
    out = {"plain": (lhs, rhs), "ok": lhs == rhs, "hyperbolic": True, "symmetric": True, "items": {}}
    for t, m in sp.sigma_t.items():
        out["symmetric"] = out["symmetric"] and la.is_symmetric(m)
        h = sp.half(t)
        if t % 2 or h is not None:
            if hyperbolic_witness(m, h) is None:
                out["hyperbolic"] = False
    if sp.actions and items:
        for it in items:
            total = 0
            for t, m in sp.sigma_t.items():
                npos, nneg = n_m_signature(sp.actions[t], m, it)
                total += (1 if t % 2 == 0 else -1) * (npos - nneg)
            mid_val = 0
            if has_mid:
                npos, nneg = n_m_signature(dd.actions[mid], dd.pairings[mid], it)
                mid_val = npos - nneg
            out["items"][it.label] = (total, mid_val)
            out["ok"] = out["ok"] and total == mid_val
    out["ok"] = out["ok"] and out["hyperbolic"] and out["symmetric"]
    return out


def random_duality_datum(d: int, rng: random.Random, group=None, max_rank: int = 1,
                         density: float = 0.6) -> DualityDatum:
    """Random pairings satisfying the commutation rule; spaces are free Q[G]-modules when a group is given."""
    from .equivariant import free_module_action

    dims, pairings, actions = {}, {}, {}
    keys = [(i, j) for i in range(d + 1) for j in range(d + 1)]
    for key in keys:
        i, j = key
        partner = (d - i, d - j)
        if partner < key or rng.random() > density:
            continue
        r = rng.randint(1, max_rank)
        if group is not None:
            act = free_module_action(group, r)
        else:
            act = [la.identity(r)]
        n = len(act[0])
        sign = -1 if ((d + 1) * (i + j)) % 2 else 1
        if partner == key:
            if sign == 1:
                m = random_invariant_form(act, rng, symmetric=True)
            else:
                continue  # an alternating middle pairing cannot occur: (d+1) d is even
        else:
            m = random_invariant_form(act, rng, symmetric=False, right_action=act)
        dims[key] = dims[partner] = n
        pairings[key] = m
        pairings[partner] = la.mat_scale(sign, la.transpose(m))
        actions[key] = actions[partner] = act
    return DualityDatum(d, dims, pairings, actions if group is not None else None)


# ---------------------------------------------------------------------------
# Lifted chain-level pairings and their Pfaffians


def _u_pair_key(k: int) -> int:
    return k if k >= 0 else -k - 1


def _character_of(action: list) -> list:
    return [simplify(sum((m[i][i] for i in range(len(m))), Fraction(0))) if m else Fraction(0) for m in action]


def split_by_opposite_degrees(p: PerfectGComplex, sigma: CohomologyPairingData) -> dict:
    """Split sigma^ev / sigma^odd into sigma^i : H^i x H^{-i} (i >= 0); fails if other blocks are nonzero."""
    ev, odd = even_odd_degrees(p)
    dims = p.cohomology_dims()
    out = {}
    for degs, s in ((ev, sigma.sigma_ev), (odd, sigma.sigma_odd)):
        offs = {}
        o = 0
        for i in degs:
            offs[i] = o
            o += dims[i]
        for i in degs:
            for j in degs:
                block = [row[offs[j]:offs[j] + dims[j]] for row in s[offs[i]:offs[i] + dims[i]]]
                if j != -i and not la.is_zero_matrix(block):
                    raise PreconditionError(f"pairing links H^{i} with H^{j}; only H^i x H^-i allowed")
                if j == -i and i >= 0:
                    out[i] = block
    return out


def balance_check(p: PerfectGComplex) -> dict:
    """Character differences chi(U^k) - chi(U^{-k-1}) for k >= 0 (all zero when balanced)."""
    sp = p.splitting
    out = {}
    for k in range(0, max(abs(p.lo), abs(p.hi)) + 1):
        a = _character_of(p.action_on(k, sp.U.get(k, []))) if p.lo <= k <= p.hi and sp.U.get(k) else None
        b = _character_of(p.action_on(-k - 1, sp.U.get(-k - 1, []))) if p.lo <= -k - 1 <= p.hi and sp.U.get(-k - 1) else None
        za = a or [Fraction(0)] * p.group.order
        zb = b or [Fraction(0)] * p.group.order
        out[k] = [simplify(x - y) for x, y in zip(za, zb)]
    return out


def balance_with_acyclic(p: PerfectGComplex) -> PerfectGComplex:
    """Add free acyclic pieces Q[G]^a -> Q[G]^a so that U^k and U^{-k-1} become isomorphic."""
    from .complexes import acyclic_piece, direct_sum

    n = p.group.order
    q = p
    for k, diff in balance_check(p).items():
        if all(is_zero(x) for x in diff):
            continue
        # difference must be a multiple of the regular character
        m = Fraction(diff[p.group.identity]) / n
        if any(not is_zero(x) for g, x in enumerate(diff) if g != p.group.identity) or m.denominator != 1:
            raise PreconditionError("U-terms cannot be balanced by free acyclic summands")
        a = abs(int(m))
        deg = -k - 1 if m > 0 else k
        q = direct_sum(q, acyclic_piece(p.group, deg, a))
    return q


@dataclass
class Lifts:
    complex: PerfectGComplex
    forms: dict  # i >= 0 -> Q-matrix on P^i (+) P^{-i} (standard coordinates)
    sigma_pieces: dict  # i >= 0 -> symmetric form on H^i (+) H^{-i}


def build_lifts(p: PerfectGComplex, sigma: CohomologyPairingData, rng: random.Random | None = None,
                scale=1) -> Lifts:
    """Chain-level pairings p^i from sigma^i and invariant U-pairings beta_k."""
    rng = rng or random.Random(0)
    pieces = split_by_opposite_degrees(p, sigma)
    sp = p.splitting
    g = p.group
    for k, diff in balance_check(p).items():
        if not all(is_zero(x) for x in diff):
            raise PreconditionError(f"U^{k} and U^{-k - 1} are not isomorphic; add acyclic summands first")
    beta = {}
    for k in range(0, max(abs(p.lo), abs(p.hi)) + 1):
        uk, um = sp.U.get(k, []), sp.U.get(-k - 1, [])
        if not uk and not um:
            continue
        if len(uk) != len(um):
            raise PreconditionError(f"dim U^{k} != dim U^{-k - 1}")
        act_k = p.action_on(k, uk)
        act_m = p.action_on(-k - 1, um)
        beta[k] = random_invariant_form(act_k, rng, symmetric=False, right_action=act_m)

    def beta_of(k):  # U^k x U^{-k-1}
        if k >= 0:
            return beta.get(k)
        b = beta.get(-k - 1)
        return la.transpose(b) if b is not None else None

    forms = {}
    sig_pieces = {}
    for i in range(0, max(abs(p.lo), abs(p.hi)) + 1):
        ri, rm = p.rank(i), p.rank(-i)
        if ri == 0 and rm == 0:
            continue
        # Q^i : P^i x P^{-i} in split coordinates (B, H, U) x (B, H, U)
        nb, nh, nu = len(sp.B.get(i, [])), len(sp.H.get(i, [])), len(sp.U.get(i, []))
        mb, mh, mu = len(sp.B.get(-i, [])), len(sp.H.get(-i, [])), len(sp.U.get(-i, []))
        qsplit = la.zeros(nb + nh + nu, mb + mh + mu)

        def put(r0, c0, block):
            for a, row in enumerate(block or []):
                for b, x in enumerate(row):
                    qsplit[r0 + a][c0 + b] = x

        if nb:
            put(0, mb + mh, beta_of(i - 1))  # B^i x U^{-i}
        if nh:
            put(nb, mb, pieces.get(i) if i >= 0 else None)
        if nu:
            put(nb + nh, 0, beta_of(i))  # U^i x B^{-i}
        n = g.order
        dim_i, dim_m = ri * n, rm * n
        if i == 0:
            si_inv = la.inverse(sp.basis_matrix(0))
            qstd = la.mat_mul(la.transpose(si_inv), la.mat_mul(qsplit, si_inv))
            form = la.mat_scale(Fraction(1, 2), la.mat_add(qstd, la.transpose(qstd)))
            h0 = pieces.get(0, [])
            sig_pieces[0] = h0
        else:
            si_inv = la.inverse(sp.basis_matrix(i)) if dim_i else []
            sm_inv = la.inverse(sp.basis_matrix(-i)) if dim_m else []
            qstd = la.mat_mul(la.transpose(si_inv), la.mat_mul(qsplit, sm_inv)) if dim_i and dim_m else la.zeros(dim_i, dim_m)
            form = la.block_matrix([[la.zeros(dim_i, dim_i), qstd], [la.transpose(qstd), la.zeros(dim_m, dim_m)]]) \
                if dim_i and dim_m else la.zeros(dim_i + dim_m, dim_i + dim_m)
            s = pieces.get(i, [])
            if s:
                z1, z2 = la.zeros(len(s), len(s)), la.zeros(len(s[0]), len(s[0]))
                sig_pieces[i] = la.block_matrix([[z1, s], [la.transpose(s), z2]])
            else:
                sig_pieces[i] = []
        forms[i] = [[simplify(scale * x) for x in row] for row in form]
        sig_pieces[i] = la.mat_scale(scale, sig_pieces[i]) if sig_pieces[i] else []
    return Lifts(p, forms, sig_pieces)


def _lift_rank(p: PerfectGComplex, i: int) -> int:
    return p.rank(0) if i == 0 else p.rank(i) + p.rank(-i)


def lifted_pf(lifts: Lifts, item: SymplecticBasisItem, scale=1) -> object:
    """prod_{i >= 0} pf(T_m(scale * p~^i))^{(-1)^i}."""
    p = lifts.complex
    value = Fraction(1)
    for i, form in sorted(lifts.forms.items()):
        r = _lift_rank(p, i)
        if r == 0:
            continue
        t = group_ring_form(p.group, la.mat_scale(scale, form) if scale != 1 else form, r)
        kappa = la.block_diag([item.hyp_kappa] * r)
        pf = pfaffian_selfadjoint(block_rep(item.hyp_matrices, t), kappa)
        value = simplify(value * pf if i % 2 == 0 else value / pf)
    return value


def lifted_pairing_class(p: PerfectGComplex, sigma: CohomologyPairingData, rng: random.Random | None = None,
                     items=None) -> HClRepresentative:
    """Representative of d(P, sigma) mapped to the symplectic hermitian class group and inverted:
    finite part and prod pf(T_m(p~^i))^{(-1)^i}."""
    items = items if items is not None else symplectic_character_basis(p.group)
    lifts = build_lifts(p, sigma, rng)
    fin, pf = {}, {}
    for it in items:
        fin[it.label] = finite_part(p, it.hyp_matrices)
        pf[it.label] = lifted_pf(lifts, it)
    return HClRepresentative(fin, pf)


def phi(h: HClRepresentative) -> ClassRepresentative:
    """Keep the finite part on symplectic characters; invert the Pfaffian coordinate into the archimedean slot."""
    out = []
    for label, v in h.pf_part.items():
        inv = simplify(1 / v)
        out.append(CharacterValue(label, h.finite[label], SignedMagnitude.of(inv), inv,
                                  RootedMagnitude(simplify(inv * inv), 1)))
    return ClassRepresentative(out)


def invert(rep: ClassRepresentative) -> ClassRepresentative:
    out = []
    for v in rep.values:
        exact = simplify(1 / v.exact) if v.exact is not None else None
        rooted = RootedMagnitude(simplify(1 / v.rooted.power), v.rooted.root) if v.rooted else None
        out.append(CharacterValue(v.label, simplify(1 / v.finite), SignedMagnitude(
            v.arch.sign, None if v.arch.magnitude_squared is None else 1 / v.arch.magnitude_squared), exact, rooted))
    return ClassRepresentative(out)


def _lift_n_minus(p: PerfectGComplex, lifts: Lifts, item) -> tuple[int, int]:
    """(sum (-1)^i n_m^-(p^i), sum (-1)^i n_m^-(sigma^i)) over i >= 0."""
    from .equivariant import free_module_action

    lhs = rhs = 0
    for i, form in sorted(lifts.forms.items()):
        r = _lift_rank(p, i)
        sgn = -1 if i % 2 else 1
        if r:
            lhs += sgn * n_m_signature(free_module_action(p.group, r), form, item)[1]
        s = lifts.sigma_pieces.get(i)
        if s:
            degs = [0] if i == 0 else [i, -i]
            rhs += sgn * n_m_signature(p.cohomology_action(degs), s, item)[1]
    return lhs, rhs


def _lift_metric(p: PerfectGComplex, lifts: Lifts, ideal: IdealRep):
    """prod_{i >= 0} |det(|G| T_V(p~^i))|^{(-1)^i}; already relative to an orthonormal ideal basis."""
    value = Fraction(1)
    n = p.group.order
    for i, form in sorted(lifts.forms.items()):
        r = _lift_rank(p, i)
        if r == 0:
            continue
        t = group_ring_form(p.group, form, r)
        d = la.det(la.mat_scale(n, block_rep(ideal.matrices, t)))
        d = d if sign_of_real(d) > 0 else -d
        value = simplify(value * d if i % 2 == 0 else value / d)
    return value


def dual_route_check(p: PerfectGComplex, sigma: CohomologyPairingData, rng: random.Random | None = None) -> list[dict]:
    """Dual-route comparison plus the three lifted-pairing identities, per symplectic character.

    Route A is the hermitian coordinate of (P, sigma); route B is the class of the lifted pairings
    of |G| sigma, sent through phi and inverted.
    """
    _check_pairing(p, sigma)
    items = symplectic_character_basis(p.group)
    n = p.group.order
    seed = (rng or random.Random(0)).randrange(1 << 30)
    lifts = build_lifts(p, sigma, random.Random(seed))
    route_b = invert(phi(lifted_pairing_class(p, sigma.scaled(n), random.Random(seed), items)))
    out = []
    chi = p.euler_rank
    for it in items:
        route_a = hermitian_coordinate(p, sigma, it)
        b = route_b[it.label]
        main_ok = simplify(route_a - b.exact) == 0 and finite_part(p, it.hyp_matrices) == b.finite
        factor = Fraction(n) ** (chi * it.degree // 2)
        b_ok = simplify(route_a - factor * lifted_pf(lifts, it)) == 0
        a_lhs, a_rhs = _lift_n_minus(p, lifts, it)
        c_ok = all(simplify(arakelov_squared_metric(p, sigma, two_sided_ideal(p.group, r))
                            - _lift_metric(p, lifts, two_sided_ideal(p.group, r))) == 0
                   for r in sorted(set(it.constituents)))
        out.append({"character": it.label, "route_a": route_a, "route_b": b.exact, "euler_rank": chi,
                    "main": main_ok, "lift_signature": a_lhs == a_rhs, "lift_pf": b_ok, "lift_metric": c_ok,
                    "ok": main_ok and a_lhs == a_rhs and b_ok and c_ok})
    return out


# ---------------------------------------------------------------------------
# Random pairings on cohomology


def random_cohomology_pairing(p: PerfectGComplex, rng: random.Random) -> CohomologyPairingData:
    ev, odd = even_odd_degrees(p)
    out = []
    for degs in (ev, odd):
        if sum(len(p.splitting.H[i]) for i in degs) == 0:
            out.append([])
            continue
        act = p.cohomology_action(degs)
        out.append(random_invariant_form(act, rng))
    return CohomologyPairingData(out[0], out[1])


def random_opposite_degree_pairing(p: PerfectGComplex, rng: random.Random) -> CohomologyPairingData:
    """sigma^i : H^i x H^{-i} random invariant (sigma^0 symmetric), assembled in upsilon order."""
    dims = p.cohomology_dims()
    blocks = {}
    for i in sorted(dims):
        if i < 0 or not dims[i]:
            continue
        if dims.get(-i, 0) != dims[i]:
            raise PreconditionError(f"H^{i} and H^{-i} have different dimensions")
        act_i = p.action_on(i, p.splitting.H[i])
        if i == 0:
            blocks[0] = random_invariant_form(act_i, rng)
        else:
            act_m = p.action_on(-i, p.splitting.H[-i])
            blocks[i] = random_invariant_form(act_i, rng, symmetric=False, right_action=act_m)
    ev, odd = even_odd_degrees(p)
    mats = []
    for degs in (ev, odd):
        parts = []
        for i in degs:
            if i < 0 or not dims[i]:
                continue
            if i == 0:
                parts.append(blocks[0])
            else:
                s = blocks[i]
                z = la.zeros(len(s), len(s))
                parts.append(la.block_matrix([[z, s], [la.transpose(s), z]]))
        mats.append(la.block_diag(parts) if parts else [])
    return CohomologyPairingData(mats[0], mats[1])


# ---------------------------------------------------------------------------
# Transport of pairings along chain maps


def transport_pairing(src: PerfectGComplex, dst: PerfectGComplex, chain_map: dict,
                      sigma_dst: CohomologyPairingData) -> CohomologyPairingData:
    """Pull sigma back along a quasi-isomorphism given by Q-matrices chain_map[i] : src^i -> dst^i."""
    dst_c = dst.rational
    out = []
    for parity in (0, 1):
        src_degs = [i for i in even_odd_degrees(src)[parity]]
        dst_degs = [i for i in even_odd_degrees(dst)[parity]]
        s = sigma_dst.sigma_ev if parity == 0 else sigma_dst.sigma_odd
        dst_dims = {i: len(dst.splitting.H[i]) for i in dst.degrees}
        offsets, total = {}, 0
        for i in dst_degs:
            offsets[i] = total
            total += dst_dims[i]
        cols = []
        for i in src_degs:
            hs = src.splitting.H[i]
            if not hs:
                continue
            if dst.rank(i) == 0 or i not in chain_map:
                raise PreconditionError(f"chain map does not reach degree {i}")
            images = [la.mat_vec(chain_map[i], v) for v in hs]
            coords = cohomology_coordinates(dst_c, i, images, dst.splitting)
            for c in coords:
                full = [Fraction(0)] * total
                full[offsets[i]:offsets[i] + len(c)] = c
                cols.append(full)
        if not cols:
            out.append([])
            continue
        phi = la.from_columns(cols, total)
        if len(cols) != total or la.det(phi) == 0:
            raise PreconditionError("chain map is not a quasi-isomorphism")
        out.append([[simplify(x) for x in row] for row in la.mat_mul(la.transpose(phi), la.mat_mul(s, phi))])
    return CohomologyPairingData(out[0], out[1])


def projection_chain_map(p: PerfectGComplex, extra: PerfectGComplex) -> dict:
    """Q-matrices of the projection P (+) A -> P, for P (+) A built by ``direct_sum(p, extra)``."""
    n = p.group.order
    out = {}
    for i in p.degrees:
        a, b = p.rank(i) * n, extra.rank(i) * n
        out[i] = la.hstack([la.identity(a), la.zeros(a, b)]) if a else []
    return out


def basis_change_factor(p: PerfectGComplex, transforms: dict, item: SymplecticBasisItem):
    """prod_i Det(A_i)(theta)^{(-1)^i} for the group-ring basis changes A_i."""
    value = Fraction(1)
    for i, a in transforms.items():
        d = la.det(block_rep(item.hyp_matrices, a))
        value = simplify(value * d if i % 2 == 0 else value / d)
    return value
