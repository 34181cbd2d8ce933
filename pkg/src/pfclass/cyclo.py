"""Exact arithmetic in cyclotomic fields Q(zeta_N) = Q[x]/Phi_N(x).

Elements are stored as an integer numerator vector over a common positive
denominator, in the power basis 1, x, ..., x^(phi(N)-1).  Plain ``int`` and
``Fraction`` values interoperate freely and are treated as conductor 1.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from mpmath import iv

Scalar = Union[int, Fraction, "CycloNumber"]

DEFAULT_CONDUCTOR_CEILING = 64
CEILING_ENV_VAR = "PFCLASS_CONDUCTOR_CEILING"


class ConductorTooLarge(ValueError):
    pass


def conductor_ceiling() -> int:
    raw = os.environ.get(CEILING_ENV_VAR)
    return int(raw) if raw else DEFAULT_CONDUCTOR_CEILING


def _check_conductor(n: int) -> None:
    if n < 1:
        raise ValueError(f"conductor must be positive, got {n}")
    if n > conductor_ceiling():
        raise ConductorTooLarge(
            f"conductor {n} exceeds ceiling {conductor_ceiling()} (set {CEILING_ENV_VAR})"
        )


def _mobius(n: int) -> int:
    result, p, m = 1, 2, n
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    return -result if m > 1 else result


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # den is monic
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for k in range(len(q) - 1, -1, -1):
        c = num[k + len(den) - 1]
        q[k] = c
        if c:
            for j, d in enumerate(den):
                num[k + j] -= c * d
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first (Moebius product)."""
    num, den = [1], [1]
    for d in range(1, n + 1):
        if n % d:
            continue
        mu = _mobius(n // d)
        factor = [-1] + [0] * (d - 1) + [1]
        if mu == 1:
            num = _poly_mul(num, factor)
        elif mu == -1:
            den = _poly_mul(den, factor)
    # dividing by (x^d - 1) factors: make the divisor monic-positive
    return tuple(_poly_divexact(num, den))


def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row e = reduced integer coordinates of x^e, for 0 <= e < 2n + 2*phi(n)."""
    phi_poly = cyclotomic_polynomial(n)
    deg = len(phi_poly) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(2 * n + 2 * deg):
        rows.append(tuple(cur))
        # multiply by x
        top = cur[-1]
        nxt = [0] + cur[:-1]
        if top:
            for j in range(deg):
                nxt[j] -= top * phi_poly[j]
        cur = nxt
    return tuple(rows)


@lru_cache(maxsize=None)
def _conj_table(n: int) -> tuple[tuple[int, ...], ...]:
    table = _power_table(n)
    return tuple(table[(-k) % n] for k in range(euler_phi(n)))


@lru_cache(maxsize=None)
def _embed_table(src: int, dst: int) -> tuple[tuple[int, ...], ...]:
    step = dst // src
    table = _power_table(dst)
    return tuple(table[(k * step) % dst] for k in range(euler_phi(src)))


def _apply_table(nums: Sequence[int], table, width: int) -> list[int]:
    out = [0] * width
    for c, row in zip(nums, table):
        if c:
            for j, r in enumerate(row):
                if r:
                    out[j] += c * r
    return out


class CycloNumber:
    """Immutable element of Q(zeta_N) in the power basis of Q[x]/Phi_N."""

    __slots__ = ("conductor", "_nums", "_den")

    def __init__(self, conductor: int, coeffs: Iterable = (), *, _raw=None):
        if _raw is not None:
            self.conductor = conductor
            self._nums, self._den = _raw
            return
        _check_conductor(conductor)
        deg = euler_phi(conductor)
        fr = [Fraction(c) for c in coeffs]
        if len(fr) > deg:
            raise ValueError("too many coefficients for conductor")
        fr += [Fraction(0)] * (deg - len(fr))
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        nums = [c.numerator * (den // c.denominator) for c in fr]
        self.conductor = conductor
        self._nums, self._den = _normalize(nums, den)

    # construction helpers -------------------------------------------------
    @classmethod
    def _make(cls, conductor: int, nums: list[int], den: int) -> "CycloNumber":
        return cls(conductor, _raw=_normalize(nums, den))

    @classmethod
    def from_scalar(cls, value, conductor: int) -> "CycloNumber":
        if isinstance(value, CycloNumber):
            return value.embed(conductor)
        value = Fraction(value)
        _check_conductor(conductor)
        nums = [0] * euler_phi(conductor)
        nums[0] = value.numerator
        return cls._make(conductor, nums, value.denominator)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self._den) for c in self._nums)

    def is_zero(self) -> bool:
        return not any(self._nums)

    def is_rational(self) -> bool:
        return not any(self._nums[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self._nums[0], self._den)

    def embed(self, conductor: int) -> "CycloNumber":
        if conductor == self.conductor:
            return self
        if conductor % self.conductor:
            raise ValueError(f"cannot embed conductor {self.conductor} into {conductor}")
        _check_conductor(conductor)
        out = _apply_table(self._nums, _embed_table(self.conductor, conductor), euler_phi(conductor))
        return CycloNumber._make(conductor, out, self._den)

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> tuple["CycloNumber", "CycloNumber"]:
        if isinstance(other, CycloNumber):
            if other.conductor == self.conductor:
                return self, other
            n = math.lcm(self.conductor, other.conductor)
            return self.embed(n), other.embed(n)
        if isinstance(other, (int, Fraction)):
            return self, CycloNumber.from_scalar(other, self.conductor)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        den = a._den * b._den // math.gcd(a._den, b._den)
        fa, fb = den // a._den, den // b._den
        return CycloNumber._make(a.conductor, [x * fa + y * fb for x, y in zip(a._nums, b._nums)], den)

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.conductor, _raw=([-x for x in self._nums], self._den))

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return pair[0] + (-pair[1])

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return pair[1] + (-pair[0])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return CycloNumber._make(
                self.conductor, [x * other.numerator for x in self._nums], self._den * other.denominator
            )
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        deg = len(a._nums)
        if deg == 1:
            return CycloNumber._make(a.conductor, [a._nums[0] * b._nums[0]], a._den * b._den)
        prod = _poly_mul(a._nums, b._nums)
        out = _apply_table(prod, _power_table(a.conductor), deg)
        return CycloNumber._make(a.conductor, out, a._den * b._den)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        deg = len(self._nums)
        if deg == 1:
            return CycloNumber._make(self.conductor, [self._den], self._nums[0])
        # columns: coordinates of self * x^k; solve M y = e_0
        table = _power_table(self.conductor)
        cols = []
        for k in range(deg):
            shifted = [0] * k + list(self._nums)
            cols.append(_apply_table(shifted, table, deg))
        m = [[Fraction(cols[k][r], self._den) for k in range(deg)] for r in range(deg)]
        rhs = [Fraction(1)] + [Fraction(0)] * (deg - 1)
        sol = _solve_square(m, rhs)
        return CycloNumber(self.conductor, sol)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / other)
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return pair[0] * pair[1].inverse()

    def __rtruediv__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return pair[1] * pair[0].inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CycloNumber.from_scalar(1, self.conductor)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "CycloNumber":
        deg = len(self._nums)
        if deg == 1:
            return self
        out = _apply_table(self._nums, _conj_table(self.conductor), deg)
        return CycloNumber._make(self.conductor, out, self._den)

    # comparison -------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self._nums[0], self._den) == other
        if isinstance(other, CycloNumber):
            a, b = self._coerce(other)
            return a._nums == b._nums and a._den == b._den
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(Fraction(self._nums[0], self._den))
        return hash((self.conductor, tuple(self._nums), self._den))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.is_rational():
            return f"Cyclo[{self.conductor}]({Fraction(self._nums[0], self._den)})"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*z^{k}")
        return f"Cyclo[{self.conductor}](" + " + ".join(terms) + ")"

    def to_json(self) -> dict:
        return {"conductor": self.conductor, "coeffs": [_frac_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "CycloNumber":
        return cls(int(data["conductor"]), [parse_fraction(c) for c in data["coeffs"]])


def _normalize(nums: list[int], den: int) -> tuple[list[int], int]:
    if den < 0:
        nums, den = [-x for x in nums], -den
    g = den
    for x in nums:
        if x:
            g = math.gcd(g, x)
            if g == 1:
                break
    if not any(nums):
        return [0] * len(nums), 1
    if g > 1:
        nums = [x // g for x in nums]
        den //= g
    return nums, den


def _solve_square(m: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(m)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def _frac_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def parse_fraction(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text))


# ---------------------------------------------------------------------------
# Scalar helpers working uniformly on int, Fraction and CycloNumber


def zeta(n: int, k: int = 1) -> CycloNumber:
    """The root of unity zeta_n^k as an element of Q(zeta_n)."""
    _check_conductor(n)
    nums = list(_power_table(n)[k % n])
    return CycloNumber._make(n, nums, 1)


def conj(x: Scalar) -> Scalar:
    if isinstance(x, CycloNumber):
        return x.conjugate()
    return x


def is_zero(x: Scalar) -> bool:
    if isinstance(x, CycloNumber):
        return x.is_zero()
    return x == 0


def simplify(x: Scalar) -> Scalar:
    """Collapse a rational CycloNumber to Fraction; leave other values alone."""
    if isinstance(x, CycloNumber) and x.is_rational():
        return x.to_fraction()
    if isinstance(x, int):
        return Fraction(x)
    return x


def cyclo_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    ops = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    return ops[op]()


def is_real(x: Scalar) -> bool:
    return not isinstance(x, CycloNumber) or x == x.conjugate()


def sign_of_real(x: Scalar) -> int:
    """Sign of a real element; exact zero test, then interval refinement."""
    if not isinstance(x, CycloNumber):
        f = Fraction(x)
        return (f > 0) - (f < 0)
    if x.is_zero():
        return 0
    if x.is_rational():
        f = x.to_fraction()
        return (f > 0) - (f < 0)
    if not is_real(x):
        raise ValueError(f"sign_of_real called on non-real value {x}")
    n = x.conductor
    coeffs = x.coeffs
    prec = 64
    saved = iv.prec
    try:
        while True:
            iv.prec = prec
            total = iv.mpf(0)
            for k, c in enumerate(coeffs):
                if c:
                    cosk = iv.cos(2 * iv.pi * k / n) if k else iv.mpf(1)
                    total += cosk * iv.mpf(c.numerator) / c.denominator
            if total > 0:
                return 1
            if total < 0:
                return -1
            prec *= 2
            if prec > 1 << 20:
                raise ArithmeticError("sign refinement did not converge")
    finally:
        iv.prec = saved



def abs_squared(x: Scalar) -> Scalar:
    return simplify(x * conj(x))
