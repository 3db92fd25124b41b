"""Finite quadratic forms (A, q, b) with q valued in Q/2Z and b in Q/Z.

A form is stored on a product of cyclic groups Z/d_1 x ... x Z/d_k through the
values q(g_i) and b(g_i, g_j) on the standard generators.  The orders need not
form a divisibility chain, so orthogonal sums of blocks are stored as given.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm, prod
from typing import Sequence

import numpy as np

from . import linalg as la
from .cyclotomic import Cyclotomic, sqrt_element
from .lattice import DiscriminantGroup, Lattice, LatticeError, discriminant_group

SEARCH_CEILING = 4096


class FormError(ValueError):
    pass


class FormTooLarge(FormError):
    pass


def _mod(x, m) -> Fraction:
    x = Fraction(x)
    return x - m * (x // m)


def _fmt(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class FiniteQuadraticForm:
    orders: tuple[int, ...]
    q: tuple[Fraction, ...]
    b: tuple[tuple[Fraction, ...], ...]

    def __init__(self, orders: Sequence[int], q: Sequence, b: Sequence[Sequence] | None = None):
        k = len(orders)
        qs = tuple(_mod(x, 2) for x in q)
        if b is None:
            b = [[0] * k for _ in range(k)]
        bs = [[_mod(b[i][j], 1) for j in range(k)] for i in range(k)]
        for i in range(k):
            bs[i][i] = _mod(qs[i], 1)
        object.__setattr__(self, "orders", tuple(int(d) for d in orders))
        object.__setattr__(self, "q", qs)
        object.__setattr__(self, "b", tuple(tuple(r) for r in bs))
        self._validate()

    def _validate(self):
        k = len(self.orders)
        if len(self.q) != k:
            raise FormError("one q value per generator is required")
        for i, d in enumerate(self.orders):
            if d < 1:
                raise FormError("cyclic orders must be positive")
            if _mod(d * d * self.q[i], 2) != 0 or (d % 2 and _mod(d * self.q[i], 2) != 0):
                raise FormError(f"q value {self.q[i]} is incompatible with order {d}")
            for j in range(k):
                if self.b[i][j] != self.b[j][i]:
                    raise FormError("bilinear values must be symmetric")
                if _mod(d * self.b[i][j], 1) != 0:
                    raise FormError(f"b(g{i},g{j}) incompatible with order {d}")

    # -- basic data ----------------------------------------------------------

    @property
    def size(self) -> int:
        return prod(self.orders)

    @cached_property
    def denominator(self) -> int:
        """Common denominator E: q lies in (1/E)Z / 2Z and b in (1/E)Z / Z."""
        e = 1
        for x in self.q:
            e = lcm(e, x.denominator)
        for row in self.b:
            for x in row:
                e = lcm(e, x.denominator)
        return e

    def invariant_factors(self) -> list[int]:
        if not self.orders:
            return []
        k = len(self.orders)
        diag = [[self.orders[i] if i == j else 0 for j in range(k)] for i in range(k)]
        return [d for d in la.invariant_factors(diag) if d > 1]

    def value(self, x: Sequence[int]) -> Fraction:
        k = len(self.orders)
        s = Fraction(0)
        for i in range(k):
            s += x[i] * x[i] * self.q[i]
            for j in range(i + 1, k):
                s += 2 * x[i] * x[j] * self.b[i][j]
        return _mod(s, 2)

    def pairing(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        k = len(self.orders)
        return _mod(sum(x[i] * y[j] * self.b[i][j] for i in range(k) for j in range(k)), 1)

    def elements(self):
        return itertools.product(*(range(d) for d in self.orders))

    def negate(self) -> "FiniteQuadraticForm":
        return FiniteQuadraticForm(self.orders, [-x for x in self.q], [[-x for x in r] for r in self.b])

    def __neg__(self):
        return self.negate()

    def __add__(self, other: "FiniteQuadraticForm") -> "FiniteQuadraticForm":
        return direct_sum(self, other)

    def is_trivial(self) -> bool:
        return self.size == 1

    def __str__(self) -> str:
        group = ",".join(str(d) for d in self.orders)
        qs = ",".join(_fmt(x) for x in self.q)
        bs = ",".join("[" + ",".join(_fmt(x) for x in row) + "]" for row in self.b)
        return f"group=[{group}]; q=[{qs}]; b=[{bs}]"

    # -- vectorized tables -----------------------------------------------------

    def _check_size(self):
        if self.size > SEARCH_CEILING:
            raise FormTooLarge(f"group of order {self.size} exceeds the search ceiling {SEARCH_CEILING}")

    def table(self, denom: int | None = None) -> "_Table":
        self._check_size()
        return _Table(self, denom or self.denominator)

    def q_histogram(self) -> Counter:
        t = self.table()
        return Counter(Fraction(int(v), t.e) for v in t.qnum)

    def q_image(self) -> set[Fraction]:
        return set(self.q_histogram())

    def is_nondegenerate(self) -> bool:
        t = self.table()
        # radical of b: elements pairing trivially with every generator
        gens_b = t.bnum_gen
        return int(np.count_nonzero(~gens_b.any(axis=1))) == 1


class _Table:
    """All elements of a form with q and b data as integers over a denominator e."""

    def __init__(self, f: FiniteQuadraticForm, e: int):
        if e % f.denominator:
            e = lcm(e, f.denominator)
        self.form = f
        self.e = e
        k = len(f.orders)
        if k:
            grids = np.meshgrid(*(np.arange(d, dtype=np.int64) for d in f.orders), indexing="ij")
            coords = np.stack([g.ravel() for g in grids], axis=1)
        else:
            coords = np.zeros((1, 0), dtype=np.int64)
        self.coords = coords
        self.radix = np.array([prod(f.orders[i + 1:]) for i in range(k)], dtype=np.int64)
        qn = np.array([int(x * e) for x in f.q], dtype=np.int64)
        bn = np.array([[int(x * e) for x in row] for row in f.b], dtype=np.int64).reshape(k, k)
        self.bmat = bn
        if k:
            sq = (coords * coords) @ qn
            cross = np.einsum("ni,ij,nj->n", coords, np.triu(bn, 1), coords)
            self.qnum = (sq + 2 * cross) % (2 * e)
            self.bnum_gen = (coords @ bn) % e  # b(x, g_j)
        else:
            self.qnum = np.zeros(1, dtype=np.int64)
            self.bnum_gen = np.zeros((1, 0), dtype=np.int64)
        self.order = self._orders()

    def _orders(self) -> np.ndarray:
        out = np.ones(len(self.coords), dtype=np.int64)
        for i, d in enumerate(self.form.orders):
            g = np.gcd(self.coords[:, i], d)
            out = np.lcm(out, d // g)
        return out

    def index(self, x) -> int:
        return int(np.dot(np.asarray(x, dtype=np.int64) % np.array(self.form.orders, dtype=np.int64), self.radix)) if len(self.radix) else 0

    def add(self, i: int, j: int, times: int = 1) -> int:
        x = (self.coords[i] + times * self.coords[j]) % np.array(self.form.orders, dtype=np.int64)
        return int(np.dot(x, self.radix))

    def pair(self, i: int, j: int) -> int:
        return int(np.dot(self.bnum_gen[i], self.coords[j]) % self.e)


# -- constructors ----------------------------------------------------------------


def trivial() -> FiniteQuadraticForm:
    return FiniteQuadraticForm((), (), ())


def direct_sum(*forms: FiniteQuadraticForm) -> FiniteQuadraticForm:
    orders, qs = [], []
    for f in forms:
        orders += f.orders
        qs += f.q
    n = len(orders)
    b = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for f in forms:
        k = len(f.orders)
        for i in range(k):
            for j in range(k):
                b[off + i][off + j] = f.b[i][j]
        off += k
    return FiniteQuadraticForm(orders, qs, b)


def _two_power(k: int) -> int:
    if k < 1:
        raise FormError("block exponent k must be at least 1")
    return 2 ** k


def block_u(k: int) -> FiniteQuadraticForm:
    d = _two_power(k)
    return FiniteQuadraticForm((d, d), (0, 0), [[0, Fraction(1, d)], [Fraction(1, d), 0]])


def block_v(k: int) -> FiniteQuadraticForm:
    d = _two_power(k)
    return FiniteQuadraticForm((d, d), (Fraction(2, d), Fraction(2, d)), [[0, Fraction(1, d)], [Fraction(1, d), 0]])


def block_q2(a: int, k: int) -> FiniteQuadraticForm:
    """<a/2^k> on Z/2^k, a odd."""
    d = _two_power(k)
    if a % 2 == 0:
        raise FormError("a must be odd in <a/2^k>")
    return FiniteQuadraticForm((d,), (Fraction(a, d),))


def block_qp(a: int, p: int, k: int) -> FiniteQuadraticForm:
    """<2a/p^k> on Z/p^k for an odd prime p and a prime to p."""
    if p < 3 or any(p % r == 0 for r in range(2, int(p ** 0.5) + 1)):
        raise FormError(f"{p} is not an odd prime")
    if k < 1:
        raise FormError("block exponent k must be at least 1")
    if a % p == 0:
        raise FormError("a must be prime to p")
    d = p ** k
    return FiniteQuadraticForm((d,), (Fraction(2 * a, d),))


_POW = r"(\d+)(?:\^(\d+))?"
_BLOCK_RE = re.compile(
    rf"^(?:(?P<uv>[uv])\({_POW}\)|q2\((?P<qa>[+-]?\d+)/{_POW}\)|qp\((?P<pn>[+-]?\d+)/{_POW}\))$"
)


def _split_power(base: str, exp: str | None) -> tuple[int, int]:
    """Return (prime, exponent) for text like '2^3' or '8'."""
    b = int(base)
    if exp is not None:
        return b, int(exp)
    if b < 2:
        raise FormError(f"{b} is not a prime power")
    p = next(r for r in range(2, b + 1) if b % r == 0)
    k = 0
    while b % p == 0:
        b //= p
        k += 1
    if b != 1:
        raise FormError(f"{base} is not a prime power")
    return p, k


def block(symbol: str) -> FiniteQuadraticForm:
    """Parse a block symbol or a '+'-separated sum of them.

    Accepted blocks: u(2^k), v(2^k), q2(a/2^k), qp(2a/p^k); plain integers may
    replace the power notation, e.g. u(4) or qp(-2/3).
    """
    text = "".join(symbol.split())
    if text in ("0", "trivial"):
        return trivial()
    parts = []
    for piece in text.split("+"):
        m = _BLOCK_RE.match(piece)
        if not m:
            raise FormError(f"invalid block symbol {piece!r}")
        g = m.groups()
        if m.group("uv"):
            p, k = _split_power(g[1], g[2])
            if p != 2:
                raise FormError("u and v blocks live on 2-groups")
            parts.append(block_u(k) if m.group("uv") == "u" else block_v(k))
        elif m.group("qa") is not None:
            p, k = _split_power(g[4], g[5])
            if p != 2:
                raise FormError("q2 blocks need a power of 2 in the denominator")
            parts.append(block_q2(int(m.group("qa")), k))
        else:
            num = int(m.group("pn"))
            p, k = _split_power(g[7], g[8])
            if p == 2:
                raise FormError("qp blocks need an odd prime")
            if num % 2:
                raise FormError("qp numerator must be even (2a)")
            parts.append(block_qp(num // 2, p, k))
    return direct_sum(*parts)


# -- lattices --------------------------------------------------------------------


def discriminant_data(l: Lattice) -> tuple[FiniteQuadraticForm, DiscriminantGroup]:
    if not l.is_even:
        raise LatticeError("discriminant form needs an even lattice")
    grp = discriminant_group(l)
    k = len(grp.orders)
    qs = [l.norm(g) for g in grp.generators]
    b = [[l.pair(grp.generators[i], grp.generators[j]) for j in range(k)] for i in range(k)]
    return FiniteQuadraticForm(grp.orders, qs, b), grp


def discriminant_form(l: Lattice) -> FiniteQuadraticForm:
    return discriminant_data(l)[0]


# -- invariants --------------------------------------------------------------------


def gauss_sum(f: FiniteQuadraticForm) -> Cyclotomic:
    """sum over x of exp(pi i q(x)) as an element of Z[zeta_2E]."""
    t = f.table()
    n = 2 * t.e
    counts = np.bincount(t.qnum, minlength=n)
    return Cyclotomic(n, [int(c) for c in counts])


def milgram_signature(f: FiniteQuadraticForm) -> int:
    s = gauss_sum(f)
    root = sqrt_element(f.size)
    for sigma in range(8):
        if s == root * Cyclotomic.zeta(8, sigma):
            return sigma
    raise FormError("degenerate form: Gauss sum has the wrong absolute value")


def _histogram_key(t: _Table) -> Counter:
    return Counter(zip(t.order.tolist(), t.qnum.tolist()))


def is_isomorphic(f: FiniteQuadraticForm, g: FiniteQuadraticForm) -> bool:
    return find_isomorphism(f, g) is not None


def find_isomorphism(f: FiniteQuadraticForm, g: FiniteQuadraticForm) -> list[tuple[int, ...]] | None:
    """Images of the generators of f in g under some isometry, or None."""
    if f.size != g.size:
        return None
    f._check_size()
    g._check_size()
    if f.invariant_factors() != g.invariant_factors():
        return None
    if f == g:
        return [tuple(1 if i == j else 0 for j in range(len(f.orders))) for i in range(len(f.orders))]
    e = lcm(f.denominator, g.denominator)
    tf, tg = f.table(e), g.table(e)
    if _histogram_key(tf) != _histogram_key(tg):
        return None
    k = len(f.orders)
    if k == 0:
        return []
    # generator data of f in the common denominator
    fq = [int(x * e) % (2 * e) for x in f.q]
    fb = [[int(x * e) % e for x in row] for row in f.b]
    candidates = []
    for i, d in enumerate(f.orders):
        mask = (tg.order == d) & (tg.qnum == fq[i])
        candidates.append(np.nonzero(mask)[0].tolist())
    # most constrained generators first
    order = sorted(range(k), key=lambda i: len(candidates[i]))
    chosen: dict[int, int] = {}

    def extend(pos: int, span: set[int]) -> bool:
        if pos == k:
            return True
        i = order[pos]
        d = f.orders[i]
        for h in candidates[i]:
            if any(tg.pair(h, chosen[j]) != fb[i][j] for j in chosen):
                continue
            multiples = [h]
            for _ in range(d - 2):
                multiples.append(tg.add(multiples[-1], h))
            if any(m in span for m in multiples):
                continue
            new_span = set(span)
            for s in span:
                for m in multiples:
                    new_span.add(tg.add(s, m))
            chosen[i] = h
            if extend(pos + 1, new_span):
                return True
            del chosen[i]
        return False

    zero = tg.index([0] * len(g.orders))
    if not extend(0, {zero}):
        return None
    return [tuple(int(c) for c in tg.coords[chosen[i]]) for i in range(k)]


# -- isotropic subgroups and overlattices ---------------------------------------------


@dataclass(frozen=True)
class IsotropicSubgroup:
    ambient: FiniteQuadraticForm
    generators: tuple[tuple[int, ...], ...]
    elements: frozenset

    @property
    def order(self) -> int:
        return len(self.elements)


def _span(t: _Table, gens: list[int]) -> frozenset:
    zero = t.index([0] * len(t.form.orders))
    span = {zero}
    for h in gens:
        frontier = set(span)
        while True:
            nxt = {t.add(s, h) for s in frontier} - span
            if not nxt:
                break
            span |= nxt
            frontier = nxt
    return frozenset(span)


def subgroup_from_generators(f: FiniteQuadraticForm, gens: Sequence[Sequence[int]]) -> IsotropicSubgroup:
    t = f.table()
    idx = [t.index(g) for g in gens]
    elems = _span(t, idx)
    sub = IsotropicSubgroup(f, tuple(tuple(int(c) % d for c, d in zip(g, f.orders)) for g in gens), elems)
    if not is_isotropic(f, sub):
        raise FormError("subgroup is not isotropic")
    return sub


def is_isotropic(f: FiniteQuadraticForm, sub: IsotropicSubgroup) -> bool:
    t = f.table()
    if any(t.qnum[i] != 0 for i in sub.elements):
        return False
    gens = [t.index(g) for g in sub.generators]
    return all(t.pair(a, c) == 0 for a in gens for c in gens)


def isotropic_subgroups(f: FiniteQuadraticForm) -> list[IsotropicSubgroup]:
    """Every isotropic subgroup, the trivial one included, in order of size."""
    t = f.table()
    iso = [i for i in range(len(t.qnum)) if t.qnum[i] == 0]
    zero = t.index([0] * len(f.orders))
    seen: dict[frozenset, list[int]] = {frozenset([zero]): []}
    frontier = [frozenset([zero])]
    while frontier:
        nxt = []
        for sub in frontier:
            gens = seen[sub]
            for x in iso:
                if x in sub:
                    continue
                if any(t.pair(x, s) != 0 for s in gens):
                    continue
                bigger = _span(t, gens + [x])
                if bigger not in seen:
                    seen[bigger] = gens + [x]
                    nxt.append(bigger)
        frontier = nxt
    out = []
    for elems, gens in sorted(seen.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
        out.append(IsotropicSubgroup(f, tuple(tuple(int(c) for c in t.coords[g]) for g in gens), elems))
    return out


def overlattice_basis(l: Lattice, sub: IsotropicSubgroup) -> la.Matrix:
    form, grp = discriminant_data(l)
    if form != sub.ambient:
        raise FormError("subgroup does not live in the discriminant form of this lattice")
    if not is_isotropic(form, sub):
        raise FormError("subgroup is not isotropic")
    rows = la.identity(l.rank) + [grp.lift(g) for g in sub.generators]
    return la.lattice_basis(rows)


def overlattice(l: Lattice, sub: IsotropicSubgroup) -> Lattice:
    basis = overlattice_basis(l, sub)
    gram = la.matmul(la.matmul(basis, l.gram), la.transpose(basis))
    return Lattice(gram)


# -- lattice comparisons ------------------------------------------------------------


def glue_check(k: Lattice, l: Lattice) -> bool:
    """True iff q(K) is isomorphic to -q(L)."""
    return is_isomorphic(discriminant_form(k), discriminant_form(l).negate())


def genus_equal(a: Lattice, b: Lattice) -> bool:
    if a.rank != b.rank or a.signature != b.signature:
        return False
    if abs(a.det) != abs(b.det):
        return False
    return is_isomorphic(discriminant_form(a), discriminant_form(b))


def genus_determines_class(expr) -> bool:
    """Whether the one-class criterion applies: rank >= 3 with a U(n) summand.

    ``expr`` is a parsed lattice expression.
    """
    return expr.lattice().rank >= 3 and expr.has_scaled_hyperbolic()
