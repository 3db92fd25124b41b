"""Affine automorphisms of real tori and fundamental-group bookkeeping.

A torus is R^d / L with L a full-rank lattice in Q^d containing Z^d.  Its
points are written in the coordinates of Z^d, so the product of elliptic
curves C/(Z + Z tau_i) uses the basis (1, tau_1, 1, tau_2, ...).  An affine
map z -> M z + t acts on column vectors.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Sequence

from . import linalg as la
from .keylemma import RANK_TABLE

ELEMENT_LIMIT = 10_000


class TorusError(ValueError):
    pass


def _vec(v) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in v)


@dataclass(frozen=True)
class Torus:
    """R^d modulo the lattice spanned by Z^d and the extra rational generators."""

    dim: int
    basis: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_generators(cls, dim: int, extra: Sequence[Sequence] = ()) -> "Torus":
        rows = [list(r) for r in la.identity(dim)] + [list(_vec(e)) for e in extra]
        basis = la.lattice_basis(rows)
        return cls(dim, tuple(_vec(r) for r in basis))

    def contains(self, v: Sequence) -> bool:
        return la.in_lattice(self.basis, list(_vec(v)))

    def reduce(self, v: Sequence) -> tuple[Fraction, ...]:
        """Canonical representative of v modulo the lattice."""
        c = la.solve_left(self.basis, list(_vec(v)))
        frac = [x - (x.numerator // x.denominator) for x in map(Fraction, c)]
        return _vec(la.vecmat(frac, self.basis))

    def stabilized_by(self, m: Sequence[Sequence]) -> bool:
        return all(self.contains(la.matvec(m, b)) for b in self.basis)


@dataclass(frozen=True)
class AffineMap:
    linear: tuple[tuple[Fraction, ...], ...]
    translation: tuple[Fraction, ...]

    @classmethod
    def make(cls, linear, translation) -> "AffineMap":
        return cls(tuple(_vec(r) for r in linear), _vec(translation))

    @classmethod
    def identity(cls, dim: int) -> "AffineMap":
        return cls.make(la.identity(dim), [0] * dim)

    @property
    def dim(self) -> int:
        return len(self.translation)

    def reduced(self, torus: Torus) -> "AffineMap":
        return AffineMap(self.linear, torus.reduce(self.translation))

    def apply(self, z: Sequence) -> tuple[Fraction, ...]:
        return _vec(x + y for x, y in zip(la.matvec(self.linear, z), self.translation))


def compose(f: AffineMap, g: AffineMap, torus: Torus | None = None) -> AffineMap:
    """f after g: (M1, t1)(M2, t2) = (M1 M2, M1 t2 + t1)."""
    if f.dim != g.dim:
        raise TorusError("maps act on different tori")
    lin = la.matmul(f.linear, g.linear)
    t = [a + b for a, b in zip(la.matvec(f.linear, g.translation), f.translation)]
    out = AffineMap.make(lin, t)
    return out.reduced(torus) if torus else out


def inverse(f: AffineMap, torus: Torus | None = None) -> AffineMap:
    inv = la.inverse(f.linear)
    out = AffineMap.make(inv, [-x for x in la.matvec(inv, f.translation)])
    return out.reduced(torus) if torus else out


def is_identity(f: AffineMap, torus: Torus) -> bool:
    return [list(r) for r in f.linear] == [list(map(Fraction, r)) for r in la.identity(f.dim)] and torus.contains(
        f.translation
    )


def has_fixed_point(f: AffineMap, torus: Torus) -> bool:
    """True iff M z + t = z + l has a real solution z for some lattice vector l.

    Equivalently -t lies in image(M - I) + L; both sides are projected by the
    rational left kernel K of (M - I) and membership is tested in K L.
    """
    a = la.sub(f.linear, la.identity(f.dim))
    k = la.left_kernel(a)
    if not k:
        return True
    target = la.matvec(k, [-x for x in f.translation])
    images = [la.matvec(k, b) for b in torus.basis]
    return la.in_lattice(la.lattice_basis(images), target)


def fixed_point_witness(f: AffineMap, torus: Torus, box: int = 1) -> tuple | None:
    """A point z and lattice vector l with M z + t = z + l, searched over small l."""
    a = la.sub(f.linear, la.identity(f.dim))
    at = la.transpose(a)
    for coeffs in itertools.product(range(-box, box + 1), repeat=len(torus.basis)):
        lam = la.vecmat(list(coeffs), torus.basis)
        z = la.solve_left(at, [x - y for x, y in zip(lam, f.translation)])
        if z is not None:
            return _vec(z), _vec(lam)
    return None


def closure(gens: Sequence[AffineMap], torus: Torus) -> list[AffineMap]:
    ident = AffineMap.identity(torus.dim).reduced(torus)
    seen = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(g, x, torus)
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    nxt.append(y)
                    if len(seen) > ELEMENT_LIMIT:
                        raise TorusError("generated group is not finite within the element limit")
        frontier = nxt
    return order


def evaluate_word(word: str, gens: dict[str, AffineMap], torus: Torus | None = None) -> AffineMap:
    """Product of the letters left to right; an upper-case letter is an inverse."""
    dim = next(iter(gens.values())).dim
    out = AffineMap.identity(dim)
    for letter in word:
        g = gens[letter.lower()]
        out = compose(out, inverse(g) if letter.isupper() else g)
    return out.reduced(torus) if torus else out


# -- type A catalog ----------------------------------------------------------------------


def load_catalog() -> dict:
    raw = resources.files("typek").joinpath("data/typea_families.json").read_text()
    return json.loads(raw)


def _complex_vector(entries) -> list[Fraction]:
    out = []
    for re, im in entries:
        out += [Fraction(re), Fraction(im)]
    return out


def real_linear(m: Sequence[Sequence[int]], equal_tau: Sequence[Sequence[int]]) -> list[list[int]]:
    """Real matrix of a signed permutation of the complex coordinates."""
    n = len(m)
    allowed = {frozenset(p) for p in equal_tau}
    out = la.zeros(2 * n, 2 * n)
    for j in range(n):
        for k in range(n):
            s = m[j][k]
            if not s:
                continue
            if j != k and frozenset((j + 1, k + 1)) not in allowed:
                raise TorusError(f"mixing z{k + 1} into z{j + 1} needs equal periods")
            out[2 * j][2 * k] = s
            out[2 * j + 1][2 * k + 1] = s
    return out


@dataclass
class FamilyReport:
    group: str
    torsion: str
    expected: str
    stabilizes: bool
    relations: dict
    order: int | None
    fixed_point_elements: list
    verdict: str

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _format_vec(v) -> list[str]:
    return [str(x) for x in v]


def verify_family(group: str, torsion: str, catalog: dict | None = None, expected: str = "PASS") -> FamilyReport:
    catalog = catalog or load_catalog()
    group_data = catalog["groups"][group]
    torus = Torus.from_generators(6, [_complex_vector(t) for t in catalog["torsion"][torsion]])
    gens = {
        name: AffineMap.make(real_linear(g["linear"], group_data["equal_tau"]), _complex_vector(g["translation"]))
        for name, g in group_data["generators"].items()
    }
    stabilizes = all(torus.stabilized_by(g.linear) for g in gens.values())
    relations = {}
    for word in group_data["relations"]:
        w = evaluate_word(word, gens)
        holds = is_identity(w, torus)
        relations[word] = {"holds": holds, "translation": _format_vec(torus.reduce(w.translation))}
    order = None
    bad: list = []
    if stabilizes:
        reduced = {k: g.reduced(torus) for k, g in gens.items()}
        elems = closure(list(reduced.values()), torus)
        order = len(elems)
        for e in elems[1:]:
            if has_fixed_point(e, torus):
                entry = {"linear": [_format_vec(r) for r in e.linear], "translation": _format_vec(e.translation)}
                witness = fixed_point_witness(e, torus)
                if witness:
                    entry["fixed_point"] = _format_vec(witness[0])
                    entry["lattice_shift"] = _format_vec(witness[1])
                bad.append(entry)
    ok = stabilizes and all(r["holds"] for r in relations.values()) and order == group_data["order"] and not bad
    return FamilyReport(group, torsion, expected, stabilizes, relations, order, bad, "PASS" if ok else "FAIL")


def verify_type_a(catalog: dict | None = None) -> dict:
    catalog = catalog or load_catalog()
    reports = [verify_family(f["group"], f["torsion"], catalog, f["expected"]) for f in catalog["families"]]
    passing = sum(1 for r in reports if r.verdict == "PASS")
    as_expected = all(r.verdict == r.expected for r in reports)
    status = "PASS" if as_expected and passing == 6 else "FAIL"
    return {"status": status, "passing": passing, "families": [r.as_dict() for r in reports]}


# -- type K fundamental group --------------------------------------------------------------


@dataclass(frozen=True)
class ExtensionData:
    """Lifts of the generators of G to affine maps z -> eps z + c of the elliptic curve's cover.

    Translations are in the basis (1, tau) of the period lattice Z^2.
    """

    generators: tuple[str, ...]
    eps: tuple[int, ...]
    shifts: tuple[tuple[Fraction, Fraction], ...]
    relators: tuple[str, ...]

    def maps(self) -> dict[str, AffineMap]:
        return {
            g: AffineMap.make([[e, 0], [0, e]], c) for g, e, c in zip(self.generators, self.eps, self.shifts)
        }

    def shifted(self, name: str, vector: Sequence[int]) -> "ExtensionData":
        k = self.generators.index(name)
        shifts = list(self.shifts)
        shifts[k] = (shifts[k][0] + vector[0], shifts[k][1] + vector[1])
        return ExtensionData(self.generators, self.eps, tuple(shifts), self.relators)


def semidirect_relators(n: int, m: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Generators and relators of (C_n x C_m) x| <i> with i acting by inversion."""
    gens = [g for g, k in (("a", n), ("b", m)) if k > 1] + ["i"]
    rels = ["a" * n] if n > 1 else []
    rels += ["b" * m] if m > 1 else []
    if n > 1 and m > 1:
        rels.append("abAB")
    rels.append("ii")
    rels += ["i" + g + "i" + g for g in gens if g != "i"]
    return tuple(gens), tuple(rels)


def extension_data(n: int, m: int, shift_a=(0, 0), shift_b=(0, 0), shift_i=(0, 0)) -> ExtensionData:
    gens, rels = semidirect_relators(n, m)
    table = {"a": (1, shift_a), "b": (1, shift_b), "i": (-1, shift_i)}
    return ExtensionData(
        gens,
        tuple(table[g][0] for g in gens),
        tuple(tuple(Fraction(x) for x in table[g][1]) for g in gens),
        rels,
    )


def _exponent_row(word: str, gens: Sequence[str]) -> list[int]:
    row = [0] * len(gens)
    for letter in word:
        row[gens.index(letter.lower())] += -1 if letter.isupper() else 1
    return row


def h1_extension_model(data: ExtensionData) -> tuple[list[int], int]:
    """Abelian invariants of the extension of G by Z^2 defined by the lifts."""
    gens = list(data.generators)
    if not gens:
        return [], 2
    maps = data.maps()
    torus = Torus.from_generators(2)
    rows = []
    for word in data.relators:
        w = evaluate_word(word, maps)
        if not is_identity(w, torus):
            raise TorusError(f"relator {word} does not lift to a lattice translation")
        lam = [int(x) for x in w.translation]
        rows.append([-lam[0], -lam[1]] + _exponent_row(word, gens))
    for e in data.eps:
        for i in range(2):
            row = [0] * (2 + len(gens))
            row[i] = 1 - e
            rows.append(row)
    return la.abelian_invariants(rows, 2 + len(gens))


def h1_split_model(group: str, catalog: dict | None = None) -> tuple[list[int], int]:
    """(Z^2)_G + G^ab with G acting on Z^2 through the sign of the involution coset."""
    catalog = catalog or load_catalog()
    if group not in catalog["type_k_groups"]:
        raise TorusError(f"unknown group {group!r}")
    n, m = catalog["type_k_groups"][group]
    gens, rels = semidirect_relators(n, m)
    rows = [[0, 0] + _exponent_row(w, gens) for w in rels]
    rows += [[2, 0] + [0] * len(gens), [0, 2] + [0] * len(gens)]
    return la.abelian_invariants(rows, 2 + len(gens))


def _torsion_points(k: int) -> list[tuple[Fraction, Fraction]]:
    """Points of exact order k in (1/k)Z^2 / Z^2."""
    out = []
    for x, y in itertools.product(range(k), repeat=2):
        p = (Fraction(x, k), Fraction(y, k))
        if _point_order(p) == k:
            out.append(p)
    return out


def _point_order(p) -> int:
    d = 1
    for x in p:
        d = d * x.denominator // __import__("math").gcd(d, x.denominator)
    return d


def _span_size(points) -> int:
    seen = {(Fraction(0), Fraction(0))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for s in frontier:
            for p in points:
                t = tuple((a + b) % 1 for a, b in zip(s, p))
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return len(seen)


def torsion_choices(n: int, m: int) -> list[tuple]:
    """Translation pairs (t_a, t_b) of orders n, m generating C_n x C_m."""
    zero = (Fraction(0), Fraction(0))
    choices_a = _torsion_points(n) if n > 1 else [zero]
    choices_b = _torsion_points(m) if m > 1 else [zero]
    return [(a, b) for a in choices_a for b in choices_b if _span_size([a, b]) == n * m]


def _format_invariants(inv: tuple[list[int], int]) -> str:
    torsion, free = inv
    parts = [f"Z/{d}" for d in torsion] + ["Z"] * free
    return " + ".join(parts) or "0"


def h1_report(group: str, catalog: dict | None = None) -> dict:
    catalog = catalog or load_catalog()
    n, m = catalog["type_k_groups"][group]
    split = h1_split_model(group, catalog)
    expected_n = catalog["h1_table"][group]
    split_ok = split == ([2] * expected_n, 0)
    results: dict[str, int] = {}
    for ta, tb in torsion_choices(n, m):
        inv = h1_extension_model(extension_data(n, m, ta, tb))
        key = _format_invariants(inv)
        results[key] = results.get(key, 0) + 1
    agree = set(results) == {_format_invariants(split)}
    return {
        "group": group,
        "split_model": _format_invariants(split),
        "split_matches_table": split_ok,
        "extension_model": dict(sorted(results.items())),
        "torsion_choices": sum(results.values()),
        "agreement": "agree" if agree else "DISAGREE",
    }


def h1_table(catalog: dict | None = None) -> dict:
    catalog = catalog or load_catalog()
    rows = [h1_report(g, catalog) for g in catalog["type_k_groups"]]
    ok = all(r["split_matches_table"] for r in rows)
    return {"status": "PASS" if ok else "FAIL", "rows": rows}


# -- Hodge numbers ---------------------------------------------------------------------------

GROUP_TO_CASE = {
    "C2": "C1", "C2xC2": "C2", "C2xC2xC2": "C2xC2", "D6": "C3",
    "D8": "C4", "D10": "C5", "D12": "C6", "C2xD8": "C2xC4",
}


def hodge_and_picard(group: str) -> tuple[int, int, int]:
    if group not in GROUP_TO_CASE:
        raise TorusError(f"unknown group {group!r}")
    r = RANK_TABLE[GROUP_TO_CASE[group]]
    rank_invariant = r // 2 - 1
    h11 = rank_invariant + 1
    h21 = (r // 2 + 1) - 1
    if h11 != h21:
        raise TorusError(f"h11 != h21 for {group}")
    return h11, h21, h11
