"""Integral lattices given by Gram matrices, and sublattices of them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from . import linalg as la


class LatticeError(ValueError):
    pass


def _freeze(m: Sequence[Sequence]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in m)


@dataclass(frozen=True)
class Lattice:
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        g = self.gram
        for row in g:
            for x in row:
                if Fraction(x).denominator != 1:
                    raise LatticeError("Gram matrix must be integral")
        object.__setattr__(self, "gram", _freeze(g))
        if not la.is_symmetric(self.gram):
            raise LatticeError("Gram matrix must be square and symmetric")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        return la.det(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def is_degenerate(self) -> bool:
        return self.det == 0

    @property
    def signature(self) -> tuple[int, int]:
        return signature(self.gram)

    def dual_gram(self) -> la.Matrix:
        if self.is_degenerate:
            raise LatticeError("degenerate lattice has no dual")
        return la.inverse(self.gram)

    def rescale(self, n: int) -> "Lattice":
        return rescale(self, n)

    def __add__(self, other: "Lattice") -> "Lattice":
        return direct_sum(self, other)

    def norm(self, v: Sequence) -> Fraction:
        return la.bilinear(v, self.gram, v)

    def pair(self, u: Sequence, v: Sequence) -> Fraction:
        return la.bilinear(u, self.gram, v)

    def scale(self) -> int:
        """gcd of all Gram entries (the lattice is L'(scale) with L' primitive)."""
        from math import gcd
        g = 0
        for row in self.gram:
            for x in row:
                g = gcd(g, x)
        return g


def direct_sum(*parts: Lattice) -> Lattice:
    return Lattice(la.block_diag(*(p.gram for p in parts)))


def rescale(l: Lattice, n: int) -> Lattice:
    if n == 0:
        raise LatticeError("rescaling factor must be nonzero")
    return Lattice(la.scalar_mul(n, l.gram))


def signature(gram: Sequence[Sequence]) -> tuple[int, int]:
    """(t+, t-) of a non-degenerate symmetric matrix by congruence diagonalization."""
    a = [[Fraction(x) for x in row] for row in gram]
    n = len(a)
    pos = neg = 0
    for i in range(n):
        if a[i][i] == 0:
            j = next((j for j in range(i + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[i], a[j] = a[j], a[i]
                for row in a:
                    row[i], row[j] = row[j], row[i]
            else:
                j = next((j for j in range(i + 1, n) if a[i][j] != 0), None)
                if j is None:
                    raise LatticeError("degenerate Gram matrix")
                # x_i -> x_i + x_j makes the pivot 2 a_ij
                a[i] = [x + y for x, y in zip(a[i], a[j])]
                for row in a:
                    row[i] += row[j]
        p = a[i][i]
        for k in range(i + 1, n):
            f = a[k][i] / p
            if f:
                a[k] = [x - f * y for x, y in zip(a[k], a[i])]
                for row in a:
                    row[k] -= f * row[i]
        if p > 0:
            pos += 1
        else:
            neg += 1
    return pos, neg


# -- named lattices ----------------------------------------------------------


def _dynkin(n: int, edges: list[tuple[int, int]]) -> list[list[int]]:
    g = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in edges:
        g[i][j] = g[j][i] = -1
    return g


def hyperbolic() -> Lattice:
    return Lattice([[0, 1], [1, 0]])


def root_lattice(kind: str, n: int) -> Lattice:
    """Positive-definite Cartan lattice A_n, D_n or E_n."""
    if kind == "A":
        if n < 1:
            raise LatticeError("A_m requires m >= 1")
        return Lattice(_dynkin(n, [(i, i + 1) for i in range(n - 1)]))
    if kind == "D":
        if n < 4:
            raise LatticeError("D_n requires n >= 4")
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
        return Lattice(_dynkin(n, edges))
    if kind == "E":
        if n not in (6, 7, 8):
            raise LatticeError("E_n requires n in {6, 7, 8}")
        # chain 0-2-3-...-(n-1) with node 1 attached to node 3
        edges = [(0, 2), (1, 3)] + [(i, i + 1) for i in range(2, n - 1)]
        return Lattice(_dynkin(n, edges))
    raise LatticeError(f"unknown root system {kind!r}")


def diagonal(*entries: int) -> Lattice:
    return Lattice([[e if i == j else 0 for j in range(len(entries))] for i, e in enumerate(entries)])


def k3_lattice() -> Lattice:
    u = hyperbolic()
    e8 = rescale(root_lattice("E", 8), -1)
    return direct_sum(u, u, u, e8, e8)


# -- sublattices ----------------------------------------------------------------


@dataclass(frozen=True)
class Sublattice:
    ambient: Lattice
    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        b = _freeze(self.basis)
        object.__setattr__(self, "basis", b)
        if b:
            if any(len(row) != self.ambient.rank for row in b):
                raise LatticeError("basis rows must live in the ambient lattice")
            if la.rank(b) != len(b):
                raise LatticeError("basis rows must be linearly independent")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def gram(self) -> la.Matrix:
        if not self.basis:
            return []
        return la.matmul(la.matmul(self.basis, self.ambient.gram), la.transpose(self.basis))

    def lattice(self) -> Lattice:
        return Lattice(self.gram())

    def orthogonal_complement(self) -> "Sublattice":
        return orthogonal_complement(self)

    def primitive_closure(self) -> "Sublattice":
        return primitive_closure(self)

    def contains(self, v: Sequence) -> bool:
        if not self.basis:
            return all(x == 0 for x in v)
        return la.in_lattice(self.basis, v)


def orthogonal_complement(m: Sublattice) -> Sublattice:
    amb = m.ambient
    if not m.basis:
        return Sublattice(amb, la.identity(amb.rank))
    pairing = la.matmul(amb.gram, la.transpose(m.basis))  # x . pairing = 0
    return Sublattice(amb, la.left_kernel(pairing))


def primitive_closure(m: Sublattice) -> Sublattice:
    if not m.basis:
        return m
    return Sublattice(m.ambient, la.saturation(m.basis))


def is_primitive(m: Sublattice) -> bool:
    return all(m.contains(row) for row in primitive_closure(m).basis)


# -- discriminant group ---------------------------------------------------------


@dataclass(frozen=True)
class DiscriminantGroup:
    orders: tuple[int, ...]
    generators: tuple[tuple[Fraction, ...], ...]  # in L (x) Q coordinates
    _gram: tuple
    _v: tuple

    def coordinates(self, x: Sequence) -> tuple[int, ...]:
        """Group coordinates of a dual vector x."""
        y = la.vecmat(la.vecmat(x, self._gram), self._v)
        ofs = len(y) - len(self.orders)
        out = []
        for i, d in enumerate(self.orders):
            yi = Fraction(y[ofs + i])
            if yi.denominator != 1:
                raise LatticeError("vector is not in the dual lattice")
            out.append(int(yi) % d)
        return tuple(out)

    def lift(self, coords: Sequence[int]) -> list[Fraction]:
        n = len(self._gram)
        v = [Fraction(0)] * n
        for c, g in zip(coords, self.generators):
            for k in range(n):
                v[k] += c * g[k]
        return v


def discriminant_group(l: Lattice) -> DiscriminantGroup:
    if l.rank and l.is_degenerate:
        raise LatticeError("degenerate lattice")
    if l.rank == 0:
        return DiscriminantGroup((), (), (), ())
    d, u, v = la.smith_normal_form(l.gram)
    orders, gens = [], []
    first = None
    for i in range(l.rank):
        if d[i][i] > 1:
            if first is None:
                first = i
            orders.append(d[i][i])
            gens.append(tuple(Fraction(x, d[i][i]) for x in u[i]))
    # unit factors come first in the Smith form, so the non-trivial block is a suffix
    return DiscriminantGroup(tuple(orders), tuple(gens), l.gram, _freeze(v))


# -- witness search ---------------------------------------------------------------


def _box_values(bound: int) -> list[int]:
    vals = []
    for k in range(1, bound + 1):
        vals += [k, -k]
    return vals


def iter_vectors(l: Lattice, target_norm, dual: bool, coeff_bound: int) -> Iterator[list]:
    """Vectors of the given norm, small supports first.

    Coordinates are integers in [-coeff_bound, coeff_bound] relative to the basis
    of L, or of the dual basis when ``dual`` is set.  Yields vectors in L (x) Q
    coordinates.  Exhausting the box proves nothing outside it.
    """
    if coeff_bound < 1:
        raise LatticeError("coeff_bound must be at least 1")
    target = Fraction(target_norm)
    form = l.dual_gram() if dual else [[Fraction(x) for x in row] for row in l.gram]
    n = l.rank
    vals = _box_values(coeff_bound)
    if target == 0:
        yield [0] * n
    for size in range(1, n + 1):
        for support in itertools.combinations(range(n), size):
            for choice in itertools.product(vals, repeat=size):
                c = [0] * n
                for idx, val in zip(support, choice):
                    c[idx] = val
                if la.bilinear(c, form, c) == target:
                    yield la.vecmat(c, form) if dual else c


def vectors_in_box(l: Lattice, target_norm, dual: bool, coeff_bound: int) -> list[list]:
    return list(iter_vectors(l, target_norm, dual, coeff_bound))


def find_vector(l: Lattice, target_norm, dual: bool, coeff_bound: int) -> list | None:
    return next(iter_vectors(l, target_norm, dual, coeff_bound), None)
