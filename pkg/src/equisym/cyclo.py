"""Exact arithmetic in the cyclotomic field Q(zeta_p), p an odd prime.

Elements are coefficient vectors of length p-1 over the basis
1, zeta, ..., zeta^(p-2), reduced modulo the minimal polynomial
Phi_p = 1 + X + ... + X^(p-1).  All coefficients are exact rationals; no
floating point enters any certification path.

Q(zeta_2p) = Q(zeta_p) for odd p: zeta_2p = -zeta_p^((p+1)/2) has order 2p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Cyclo:
    p: int
    coeffs: tuple[Fraction, ...]  # length p-1

    def __post_init__(self):
        if len(self.coeffs) != self.p - 1:
            raise ValueError("coefficient vector must have length p-1")

    # -- constructors --------------------------------------------------

    @staticmethod
    def from_rational(p: int, value) -> "Cyclo":
        coeffs = [Fraction(0)] * (p - 1)
        coeffs[0] = Fraction(value)
        return Cyclo(p, tuple(coeffs))

    @staticmethod
    def zeta_power(p: int, k: int, scale=1) -> "Cyclo":
        """scale * zeta_p^k, reduced."""
        k %= p
        coeffs = [Fraction(0)] * (p - 1)
        if k < p - 1:
            coeffs[k] = Fraction(scale)
        else:  # zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2))
            for i in range(p - 1):
                coeffs[i] = -Fraction(scale)
        return Cyclo(p, tuple(coeffs))

    # -- ring operations ------------------------------------------------

    def _check(self, other: "Cyclo"):
        if self.p != other.p:
            raise ValueError("mixed cyclotomic fields")

    def __add__(self, other: "Cyclo") -> "Cyclo":
        self._check(other)
        return Cyclo(
            self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __sub__(self, other: "Cyclo") -> "Cyclo":
        self._check(other)
        return Cyclo(
            self.p, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __neg__(self) -> "Cyclo":
        return Cyclo(self.p, tuple(-a for a in self.coeffs))

    def __mul__(self, other) -> "Cyclo":
        if isinstance(other, (int, Fraction)):
            return Cyclo(self.p, tuple(a * other for a in self.coeffs))
        self._check(other)
        p = self.p
        conv = [Fraction(0)] * (2 * p - 3)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    conv[i + j] += a * b
        # fold exponents >= p via zeta^p = 1, then kill the zeta^(p-1) slot
        folded = [Fraction(0)] * p
        for e, c in enumerate(conv):
            folded[e % p] += c
        top = folded[p - 1]
        return Cyclo(p, tuple(folded[i] - top for i in range(p - 1)))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def inverse(self) -> "Cyclo":
        """Field inverse by the extended Euclid algorithm modulo Phi_p."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_p)")
        p = self.p
        phi = [Fraction(1)] * p  # 1 + X + ... + X^(p-1)
        a = list(self.coeffs)
        g, u = _poly_ext_gcd(a, phi)
        if len(g) != 1 or g[0] == 0:
            raise ArithmeticError("element not invertible (Phi_p not coprime?)")
        scale = Fraction(1) / g[0]
        u = [c * scale for c in u]
        folded = [Fraction(0)] * p
        for e, c in enumerate(u):
            folded[e % p] += c
        top = folded[p - 1]
        return Cyclo(p, tuple(folded[i] - top for i in range(p - 1)))

    def __truediv__(self, other: "Cyclo") -> "Cyclo":
        return self * other.inverse()

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                base = "1" if i == 0 else ("z" if i == 1 else f"z^{i}")
                terms.append(f"{c}*{base}")
        return " + ".join(terms) if terms else "0"


def _poly_trim(a: list[Fraction]) -> list[Fraction]:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _poly_ext_gcd(a: list[Fraction], b: list[Fraction]):
    """(g, u) with u*a = g mod b, g the gcd of a and b (both nonzero)."""
    r0, r1 = _poly_trim(list(b)), _poly_trim(list(a))
    u0, u1 = [Fraction(0)], [Fraction(1)]
    while r1 != [Fraction(0)]:
        q, rem = _poly_divmod(r0, r1)
        r0, r1 = r1, _poly_trim(rem)
        u0, u1 = u1, _poly_trim(_poly_sub(u0, _poly_mul(q, u1)))
    return r0, u0


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and _poly_trim(list(a)) != [Fraction(0)]:
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(b)
        coef = a[-1] / b[-1]
        q[shift] = coef
        for i, c in enumerate(b):
            a[shift + i] -= coef * c
        a.pop()
    return q, a if a else [Fraction(0)]


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return out


def zeta(p: int) -> Cyclo:
    return Cyclo.zeta_power(p, 1)


def zeta_2p(p: int) -> Cyclo:
    """A primitive 2p-th root of unity inside Q(zeta_p): -zeta^((p+1)/2)."""
    return Cyclo.zeta_power(p, (p + 1) // 2, scale=-1)


def minimal_polynomial_value(p: int) -> Cyclo:
    """Phi_p evaluated at zeta_p; must be exactly zero."""
    total = Cyclo.from_rational(p, 0)
    for k in range(p):
        total = total + Cyclo.zeta_power(p, k)
    return total
