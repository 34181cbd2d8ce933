"""End-to-end drivers: the trace form of a tame real/imaginary quadratic field,
and the free hyperbolic plane over Q[G]."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .classgroup import CohomologyPairingData, PreconditionError, chi_hermitian
from .complexes import PerfectGComplex
from .cyclo import sign_of_real, simplify
from .equivariant import free_module_action, is_invariant
from .groups import FiniteGroup, catalog_group, symplectic_character_basis


def degree_zero_complex(group: FiniteGroup, rank: int) -> PerfectGComplex:
    return PerfectGComplex(group, 0, [rank], [])


def pairing_on_degree_zero(p: PerfectGComplex, form: la.Matrix) -> CohomologyPairingData:
    """Restrict a chain-level form on P^0 to the canonical H^0 basis."""
    h = la.from_columns(p.splitting.H[0], len(form))
    return CohomologyPairingData(la.mat_mul(la.transpose(h), la.mat_mul(form, h)), [])


def is_squarefree(n: int) -> bool:
    n = abs(n)
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def tame_discriminants(bound: int) -> list[int]:
    return [d for d in range(-bound, bound + 1)
            if abs(d) > 1 and d % 4 == 1 and is_squarefree(d)]


def trace_gram(d: int) -> la.Matrix:
    """Trace form on the normal basis (alpha, conj alpha), alpha = (1 + sqrt d) / 2."""
    tr_sq = Fraction(d + 1, 2)  # alpha^2 = alpha + (d - 1)/4 and Tr(alpha) = 1
    tr_norm = Fraction(1 - d, 2)  # 2 N(alpha)
    return [[tr_sq, tr_norm], [tr_norm, tr_sq]]


@dataclass
class QuadraticReport:
    d: int
    coordinate: Fraction
    sign: int
    epsilon_inf: int
    normalization: Fraction

    @property
    def ok(self) -> bool:
        return self.sign == self.epsilon_inf

    def lines(self) -> list[str]:
        return [f"d = {self.d}",
                f"  coordinate at 2*sgn   : {self.coordinate}",
                f"  coordinate / d        : {self.normalization}",
                f"  sign                  : {self.sign:+d}",
                f"  eps_inf = sign(d)     : {self.epsilon_inf:+d}",
                f"  {'PASS' if self.ok else 'FAIL'}"]


def quadratic_trace_demo(d: int) -> QuadraticReport:
    if d % 4 != 1 or abs(d) <= 1 or not is_squarefree(d):
        raise PreconditionError(f"d = {d} must be squarefree, congruent to 1 mod 4 and different from 1")
    g = catalog_group("C2")
    form = trace_gram(d)
    if not is_invariant(free_module_action(g, 1), form):
        raise PreconditionError("trace form is not Galois invariant")
    p = degree_zero_complex(g, 1)
    rep = chi_hermitian(p, pairing_on_degree_zero(p, form))
    v = rep["2*sgn"].exact
    return QuadraticReport(d, v, sign_of_real(v), 1 if d > 0 else -1, simplify(v / d))


# ---------------------------------------------------------------------------


def evaluation_pairing(group: FiniteGroup) -> la.Matrix:
    """Hyp(Q[G]) on Q[G] u1 + Q[G] u2 with sigma(g u1, h u2) = [g = h]."""
    n = group.order
    m = la.zeros(2 * n, 2 * n)
    for g in range(n):
        m[g][n + g] = Fraction(1)
        m[n + g][g] = Fraction(1)
    return m


@dataclass
class HyperbolicRow:
    label: str
    degree: int
    central_involution_value: object
    unscaled: object
    scaled: object
    closed_sign: int
    closed_scaled: object

    @property
    def involution_sign(self) -> int | None:
        """(-1)^{theta(z)/2} for the central involution z, when there is exactly one."""
        if self.central_involution_value is None:
            return None
        return -1 if (int(self.central_involution_value) // 2) % 2 else 1

    @property
    def sign_ok(self) -> bool:
        return sign_of_real(self.scaled) == self.closed_sign

    @property
    def unit_ok(self) -> bool:
        return simplify(self.scaled - self.closed_sign) == 0

    @property
    def unscaled_ok(self) -> bool:
        return simplify(self.unscaled - self.closed_scaled) == 0


@dataclass
class HyperbolicReport:
    group: str
    order: int
    rows: list = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"group {self.group} (|G| = {self.order})",
               f"  {'theta':<12} {'deg':>3} {'(HP,s/|G|)':>12} {'(-1)^(d/2)':>11} {'(HP,s)':>10} "
               f"{'(-|G|)^(d/2)':>13} {'theta(z)/2 sign':>16}"]
        for r in self.rows:
            z = "n/a" if r.central_involution_value is None else f"{r.involution_sign:+d}"
            out.append(f"  {r.label:<12} {r.degree:>3} {str(r.scaled):>12} {r.closed_sign:>+11d} "
                       f"{str(r.unscaled):>10} {str(r.closed_scaled):>13} {z:>16}")
        return out


def central_involutions(group: FiniteGroup) -> list[int]:
    return [z for z in group.center if z != group.identity and group.element_order(z) == 2]


def hyperbolic_plane_demo(group: FiniteGroup) -> HyperbolicReport:
    """Both coordinates of the free hyperbolic plane, straight through the generic pipeline."""
    p = degree_zero_complex(group, 2)
    form = evaluation_pairing(group)
    n = group.order
    plain = chi_hermitian(p, pairing_on_degree_zero(p, form))
    scaled = chi_hermitian(p, pairing_on_degree_zero(p, la.mat_scale(Fraction(1, n), form)))
    invol = central_involutions(group)
    rep = HyperbolicReport(group.name, n)
    for it, a, b in zip(symplectic_character_basis(group), plain.values, scaled.values):
        deg = it.degree
        z_val = it.character(invol[0]) if len(invol) == 1 else None
        rep.rows.append(HyperbolicRow(it.label, deg, z_val, a.exact, b.exact,
                                      (-1) ** (deg // 2), Fraction(-n) ** (deg // 2)))
    return rep
