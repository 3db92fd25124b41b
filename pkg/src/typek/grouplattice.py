"""Finite groups of isometries acting on a lattice.

Matrices act on column vectors in the lattice basis, so an isometry g
satisfies g^T G g = G.  Sublattice bases are stored as rows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

from . import linalg as la
from .expr import parse_lattice
from .lattice import Lattice, LatticeError, Sublattice, k3_lattice, orthogonal_complement
from .quadforms import genus_equal

CLOSURE_LIMIT = 10_000

Mat = tuple[tuple[int, ...], ...]


class ActionError(ValueError):
    pass


def _freeze(m) -> Mat:
    return tuple(tuple(int(x) for x in row) for row in m)


def preserves_form(l: Lattice, g: Sequence[Sequence[int]]) -> bool:
    return la.matmul(la.matmul(la.transpose(g), l.gram), g) == [list(r) for r in l.gram]


@dataclass(frozen=True)
class LatticeGroupAction:
    lattice: Lattice
    generators: tuple[Mat, ...]
    elements: tuple[Mat, ...]
    labels: tuple[str, ...] = field(default=())

    @property
    def order(self) -> int:
        return len(self.elements)

    def invariant_lattice(self, subgroup: Sequence | None = None) -> Sublattice:
        return invariant_lattice(self, subgroup)

    def coinvariant_lattice(self, subgroup: Sequence | None = None) -> Sublattice:
        return coinvariant_lattice(self, subgroup)


def group_closure(lattice: Lattice, gens: Sequence[Sequence[Sequence[int]]], labels: Sequence[str] = ()) -> LatticeGroupAction:
    n = lattice.rank
    frozen = []
    for g in gens:
        if len(g) != n or any(len(r) != n for r in g):
            raise ActionError("generator has the wrong size")
        if not preserves_form(lattice, g):
            raise ActionError("generator does not preserve the Gram matrix")
        frozen.append(_freeze(g))
    ident = _freeze(la.identity(n))
    seen = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in frozen:
                y = _freeze(la.matmul(g, x))
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    nxt.append(y)
                    if len(seen) > CLOSURE_LIMIT:
                        raise ActionError(f"group exceeds {CLOSURE_LIMIT} elements")
        frontier = nxt
    return LatticeGroupAction(lattice, tuple(frozen), tuple(order), tuple(labels))


def invariant_lattice(action: LatticeGroupAction, subgroup: Sequence | None = None) -> Sublattice:
    """Primitive sublattice of vectors fixed by every element of ``subgroup``."""
    elems = action.elements if subgroup is None else subgroup
    n = action.lattice.rank
    ident = la.identity(n)
    blocks = [la.transpose(la.sub(g, ident)) for g in elems if _freeze(g) != _freeze(ident)]
    if not blocks:
        return Sublattice(action.lattice, ident)
    stacked = [sum((list(b[i]) for b in blocks), []) for i in range(n)]
    return Sublattice(action.lattice, la.left_kernel(stacked))


def coinvariant_lattice(action: LatticeGroupAction, subgroup: Sequence | None = None) -> Sublattice:
    if action.lattice.is_degenerate:
        raise LatticeError("coinvariant lattice needs a non-degenerate ambient lattice")
    return orthogonal_complement(invariant_lattice(action, subgroup))


def involution_quotient_rank(l: Lattice, iota: Sequence[Sequence[int]]) -> int:
    """n with L / (L^iota + L_iota) = (Z/2)^n."""
    n = l.rank
    if la.matmul(iota, iota) != la.identity(n):
        raise ActionError("not an involution")
    action = group_closure(l, [iota])
    inv = invariant_lattice(action)
    co = coinvariant_lattice(action)
    rows = list(inv.basis) + list(co.basis)
    factors = la.invariant_factors(rows)
    if len(factors) != n or any(d not in (1, 2) for d in factors):
        raise ActionError(f"unexpected quotient invariants {factors}")
    k = factors.count(2)
    assert k <= min(inv.rank, co.rank)
    return k


ENRIQUES_INVARIANT = "U(2)+E8(-2)"
ENRIQUES_COINVARIANT = "U+U(2)+E8(-2)"


def is_enriques_action(iota: Sequence[Sequence[int]]) -> bool:
    l = k3_lattice()
    if len(iota) != l.rank:
        raise ActionError("an Enriques involution acts on the rank-22 K3 lattice")
    if la.matmul(iota, iota) != la.identity(l.rank):
        raise ActionError("not an involution")
    action = group_closure(l, [iota])
    inv = invariant_lattice(action)
    co = coinvariant_lattice(action)
    if inv.rank != 10:
        return False
    return genus_equal(inv.lattice(), parse_lattice(ENRIQUES_INVARIANT)) and genus_equal(
        co.lattice(), parse_lattice(ENRIQUES_COINVARIANT)
    )


def load_enriques_involution() -> list[list[int]]:
    raw = resources.files("typek").joinpath("data/enriques_involution.json").read_text()
    return json.loads(raw)["matrix"]
