"""Exact arithmetic in the cyclotomic integers Z[zeta_n].

An element is a length-n integer list ``c`` standing for sum c[k] * zeta_n**k.
The representation is redundant; equality is decided by reducing modulo the
n-th cyclotomic polynomial.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # coefficient lists low degree first; den must be monic
    num = list(num)
    dq = len(den) - 1
    if len(num) - 1 < dq:
        return [0], num
    quot = [0] * (len(num) - dq)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        if c:
            quot[i - dq] = c
            for j in range(dq + 1):
                num[i - dq + j] -= c * den[j]
    rem = num[:dq] or [0]
    return quot, rem


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the n-th cyclotomic polynomial."""
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_poly(d)))
            assert not any(rem)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


class Cyclotomic:
    __slots__ = ("n", "c")

    def __init__(self, n: int, coeffs=None):
        self.n = n
        self.c = [0] * n if coeffs is None else list(coeffs)

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "Cyclotomic":
        out = cls(n)
        out.c[k % n] = 1
        return out

    @classmethod
    def integer(cls, n: int, value: int) -> "Cyclotomic":
        out = cls(n)
        out.c[0] = value
        return out

    def lift(self, m: int) -> "Cyclotomic":
        """Same element viewed in Z[zeta_m] for a multiple m of n."""
        if m % self.n:
            raise ValueError(f"{m} is not a multiple of {self.n}")
        step = m // self.n
        out = Cyclotomic(m)
        for k, v in enumerate(self.c):
            out.c[k * step] += v
        return out

    def _common(self, other: "Cyclotomic"):
        if self.n == other.n:
            return self, other
        m = self.n * other.n // gcd(self.n, other.n)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        a, b = self._common(other)
        return Cyclotomic(a.n, [x + y for x, y in zip(a.c, b.c)])

    def __sub__(self, other):
        a, b = self._common(other)
        return Cyclotomic(a.n, [x - y for x, y in zip(a.c, b.c)])

    def __neg__(self):
        return Cyclotomic(self.n, [-x for x in self.c])

    def __mul__(self, other):
        if isinstance(other, int):
            return Cyclotomic(self.n, [other * x for x in self.c])
        a, b = self._common(other)
        n = a.n
        out = [0] * n
        for i, x in enumerate(a.c):
            if x:
                for j, y in enumerate(b.c):
                    if y:
                        out[(i + j) % n] += x * y
        return Cyclotomic(n, out)

    __rmul__ = __mul__

    def conjugate(self) -> "Cyclotomic":
        out = Cyclotomic(self.n)
        for k, v in enumerate(self.c):
            out.c[(-k) % self.n] += v
        return out

    def reduced(self) -> list[int]:
        _, rem = _poly_divmod(self.c, list(cyclotomic_poly(self.n)))
        return rem

    def is_zero(self) -> bool:
        return not any(self.reduced())

    def __eq__(self, other):
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):  # pragma: no cover - elements are not meant as keys
        raise TypeError("Cyclotomic is unhashable")

    def __repr__(self):
        terms = [f"{v}*z{self.n}^{k}" for k, v in enumerate(self.c) if v]
        return " + ".join(terms) or "0"


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def sqrt_element(n: int) -> Cyclotomic:
    """sqrt(n) for a positive integer n as an element of some Z[zeta_m].

    sqrt(2) = zeta_8 + zeta_8^-1; for odd p the quadratic Gauss sum gives
    sqrt(p) (p = 1 mod 4) or i*sqrt(p) (p = 3 mod 4).
    """
    if n < 1:
        raise ValueError("need a positive integer")
    out = Cyclotomic.integer(1, 1)
    for p, e in _factor(n).items():
        out = out * (p ** (e // 2))
        if e % 2 == 0:
            continue
        if p == 2:
            root = Cyclotomic.zeta(8, 1) + Cyclotomic.zeta(8, -1)
        else:
            g = Cyclotomic(p)
            for a in range(1, p):
                g.c[a] = _legendre(a, p)
            root = g if p % 4 == 1 else -(Cyclotomic.zeta(4, 1) * g)
        out = out * root
    return out
