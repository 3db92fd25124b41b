"""Invariant polynomials under monomial group actions on products of P^1.

Each P^1 factor carries two variables.  A group element acts on the variable
vector by (g v)_k = zeta_N^{c_k} v_{pi(k)} and on polynomials by pullback,
(g F)(v) = F(g v).  Phases are exponents mod N, so every check is exact.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from importlib import resources
from math import lcm
from typing import Iterable, Sequence

from .cyclotomic import Cyclotomic

HORIKAWA_VARS = ("x", "y", "z", "w")
TRIPLE_VARS = ("s1", "t1", "s2", "t2", "s3", "t3")

Monomial = tuple[int, ...]


class ActionError(ValueError):
    pass


# -- group elements ------------------------------------------------------------------


@dataclass(frozen=True)
class MonomialMap:
    perm: tuple[int, ...]
    phase: tuple[int, ...]
    n: int

    def compose(self, other: "MonomialMap") -> "MonomialMap":
        """self after other: v -> self(other(v))."""
        # (self(other v))_k = z^{c_k} (other v)_{p(k)} = z^{c_k + d_{p(k)}} v_{q(p(k))}
        perm = tuple(other.perm[self.perm[k]] for k in range(len(self.perm)))
        phase = tuple((self.phase[k] + other.phase[self.perm[k]]) % self.n for k in range(len(self.perm)))
        return MonomialMap(perm, phase, self.n)

    def act(self, m: Monomial) -> tuple[Monomial, int]:
        """Pullback of a monomial: returns (monomial, phase exponent)."""
        out = [0] * len(m)
        ph = 0
        for k, e in enumerate(m):
            if e:
                out[self.perm[k]] += e
                ph += e * self.phase[k]
        return tuple(out), ph % self.n

    @property
    def is_diagonal(self) -> bool:
        return all(p == k for k, p in enumerate(self.perm))

    def factor_matrix(self, f: int) -> tuple[tuple[int | None, int | None], tuple[int | None, int | None]]:
        """2x2 matrix of factor f with entries as phase exponents (None for 0)."""
        rows = []
        for k in (2 * f, 2 * f + 1):
            row = [None, None]
            row[self.perm[k] - 2 * f] = self.phase[k]
            rows.append(tuple(row))
        return tuple(rows)


def identity_map(nvars: int, n: int) -> MonomialMap:
    return MonomialMap(tuple(range(nvars)), (0,) * nvars, n)


def _phase_exponent(a: Fraction, n: int) -> int:
    v = a * n
    if v.denominator != 1:
        raise ActionError(f"phase {a} is not a multiple of 1/{n}")
    return int(v) % n


def diagonal_map(angles: Sequence, n: int) -> MonomialMap:
    """M(a_1) x ... x M(a_k) with M(a) = diag(e(a), e(-a))."""
    phase = []
    for a in angles:
        p = _phase_exponent(Fraction(a), n)
        phase += [p, (-p) % n]
    return MonomialMap(tuple(range(2 * len(angles))), tuple(phase), n)


def swap_map(nfactors: int, n: int, scalars: Sequence[int] | None = None) -> MonomialMap:
    """The coordinate swap on every factor, optionally times zeta^s on factor i."""
    scalars = scalars or [0] * nfactors
    perm, phase = [], []
    for f in range(nfactors):
        perm += [2 * f + 1, 2 * f]
        phase += [scalars[f] % n, scalars[f] % n]
    return MonomialMap(tuple(perm), tuple(phase), n)


@dataclass(frozen=True)
class MonomialAction:
    nfactors: int
    n: int
    generators: tuple[MonomialMap, ...]
    labels: tuple[str, ...] = ()

    @cached_property
    def elements(self) -> tuple[MonomialMap, ...]:
        ident = identity_map(2 * self.nfactors, self.n)
        seen = {ident}
        order = [ident]
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = g.compose(x)
                    if y not in seen:
                        seen.add(y)
                        order.append(y)
                        nxt.append(y)
            if len(seen) > 100_000:
                raise ActionError("group too large")
            frontier = nxt
        return tuple(order)

    @property
    def order(self) -> int:
        return len(self.elements)

    def coset_elements(self) -> list[MonomialMap]:
        """Elements that swap coordinates (the non-symplectic coset)."""
        return [g for g in self.elements if not g.is_diagonal]


def phase_modulus(xi: Sequence[Sequence]) -> int:
    n = 2
    for row in xi:
        for a in row:
            n = lcm(n, Fraction(a).denominator)
    return n


def build_action(xi: Sequence[Sequence], nfactors: int, extra_modulus: int = 1) -> MonomialAction:
    """Group generated by M(a) x M(b) [x M(c)] for rows of xi, and the swap on every factor."""
    n = lcm(phase_modulus(xi), extra_modulus)
    gens = [diagonal_map(row, n) for row in xi]
    labels = [f"M{tuple(str(Fraction(a)) for a in row)}" for row in xi]
    gens.append(swap_map(nfactors, n))
    labels.append("iota")
    return MonomialAction(nfactors, n, tuple(gens), tuple(labels))


# -- monomials and polynomials ------------------------------------------------------------


def monomials(nfactors: int, degree: int) -> list[Monomial]:
    """All monomials of multidegree (degree, ..., degree)."""
    out = []
    for exps in itertools.product(range(degree + 1), repeat=nfactors):
        m = []
        for e in exps:
            m += [e, degree - e]
        out.append(tuple(m))
    return sorted(out, reverse=True)


def variables_for(nvars: int) -> tuple[str, ...]:
    return HORIKAWA_VARS if nvars == 4 else TRIPLE_VARS


def format_monomial(m: Monomial, names: Sequence[str] | None = None) -> str:
    names = names or variables_for(len(m))
    parts = []
    for name, e in zip(names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) or "1"


_VAR_RE = re.compile(r"(s[123]|t[123]|x|y|z|w)(?:\^(\d+))?")


def parse_monomial(text: str, names: Sequence[str]) -> Monomial:
    exps = [0] * len(names)
    pos = 0
    text = text.replace("*", "").replace(" ", "")
    while pos < len(text):
        m = _VAR_RE.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse monomial {text!r} at {pos}")
        exps[names.index(m.group(1))] += int(m.group(2) or 1)
        pos = m.end()
    return tuple(exps)


def parse_orbit_sum(text: str, names: Sequence[str]) -> frozenset[Monomial]:
    return frozenset(parse_monomial(t, names) for t in text.split("+"))


@dataclass(frozen=True)
class InvariantElement:
    """sum of zeta_N^{phase} * monomial over one monomial orbit."""

    terms: tuple[tuple[Monomial, int], ...]
    n: int

    @property
    def support(self) -> frozenset[Monomial]:
        return frozenset(m for m, _ in self.terms)

    def as_poly(self) -> dict[Monomial, Cyclotomic]:
        return {m: Cyclotomic.zeta(self.n, p) for m, p in self.terms}

    def text(self) -> str:
        names = variables_for(len(self.terms[0][0]))
        parts = []
        for m, p in sorted(self.terms, reverse=True):
            coeff = "" if p == 0 else f"z{self.n}^{p}*"
            parts.append(coeff + format_monomial(m, names))
        return " + ".join(parts)


def invariant_space(action: MonomialAction, degree: int) -> list[InvariantElement]:
    """Orbit-sum basis of the invariants of multidegree (degree, ..., degree)."""
    basis = []
    seen: set[Monomial] = set()
    for m in monomials(action.nfactors, degree):
        if m in seen:
            continue
        # coefficient of g.m relative to m is forced by invariance
        coeff = {m: 0}
        frontier = [m]
        consistent = True
        while frontier:
            nxt = []
            for u in frontier:
                for g in action.generators:
                    v, ph = g.act(u)
                    # F = sum a_u u invariant => a_v = a_u * zeta^ph
                    want = (coeff[u] + ph) % action.n
                    if v not in coeff:
                        coeff[v] = want
                        nxt.append(v)
                    elif coeff[v] != want:
                        consistent = False
            frontier = nxt
        seen.update(coeff)
        if consistent:
            basis.append(InvariantElement(tuple(sorted(coeff.items(), reverse=True)), action.n))
    return basis


def apply_to_poly(g: MonomialMap, poly: dict[Monomial, Cyclotomic]) -> dict[Monomial, Cyclotomic]:
    out: dict[Monomial, Cyclotomic] = {}
    for m, c in poly.items():
        v, ph = g.act(m)
        term = c * Cyclotomic.zeta(g.n, ph)
        out[v] = out[v] + term if v in out else term
    return out


def poly_equal(a: dict, b: dict) -> bool:
    keys = set(a) | set(b)
    zero = Cyclotomic.integer(1, 0)
    return all(a.get(k, zero) == b.get(k, zero) for k in keys)


def is_invariant(action: MonomialAction, element: InvariantElement) -> bool:
    poly = element.as_poly()
    return all(poly_equal(apply_to_poly(g, poly), poly) for g in action.generators)


def character_average(action: MonomialAction, degree: int) -> Fraction:
    """(1/|G|) * sum of traces on the monomial space, computed over Z[zeta_N]."""
    mons = monomials(action.nfactors, degree)
    total = Cyclotomic(action.n)
    for g in action.elements:
        for m in mons:
            v, ph = g.act(m)
            if v == m:
                total.c[ph] += 1
    # the average is rational; read it off after reduction
    red = total.reduced()
    if any(red[1:]):
        raise ActionError("character sum is not rational")
    return Fraction(red[0], action.order)


# -- exclusions ---------------------------------------------------------------------------


def divisible_by(element: InvariantElement, monomial: Monomial) -> bool:
    return all(all(e >= d for e, d in zip(m, monomial)) for m, _ in element.terms)


def vanishing_order(element: InvariantElement, vanishing_vars: Sequence[int]) -> int:
    """Order at the torus-fixed point where exactly the given variables vanish."""
    return min(sum(m[k] for k in vanishing_vars) for m, _ in element.terms)


def divisibility_exclusion(action: MonomialAction, monomial: Monomial, degree: int = 4) -> bool:
    basis = invariant_space(action, degree)
    return all(divisible_by(b, monomial) for b in basis)


def multiplicity_exclusion(action: MonomialAction, vanishing_vars: Sequence[int], order: int, degree: int = 4) -> bool:
    basis = invariant_space(action, degree)
    return all(vanishing_order(b, vanishing_vars) >= order for b in basis)


# -- catalog ---------------------------------------------------------------------------------


def load_rows() -> dict:
    raw = resources.files("typek").joinpath("data/invariant_rows.json").read_text()
    return json.loads(raw)


def row_action(row: dict, model: str) -> MonomialAction:
    return build_action(row["xi"], 2 if model == "44" else 3)


def _expected_from_condition(row: dict, nfactors: int, degree: int) -> set[frozenset]:
    """Orbit supports m + swap(m) over exponent tuples meeting the congruences."""
    out = set()
    for exps in itertools.product(range(degree + 1), repeat=nfactors):
        if all(sum(c * e for c, e in zip(coeffs, exps)) % mod == rhs % mod for coeffs, rhs, mod in row["condition"]):
            m, s = [], []
            for e in exps:
                m += [e, degree - e]
                s += [degree - e, e]
            out.add(frozenset([tuple(m), tuple(s)]))
    return out


def expected_supports(row: dict, model: str) -> set[frozenset]:
    nf, deg = (2, 4) if model == "44" else (3, 2)
    names = HORIKAWA_VARS if model == "44" else TRIPLE_VARS
    if "basis" in row:
        return {parse_orbit_sum(t, names) for t in row["basis"]}
    return _expected_from_condition(row, nf, deg)


def find_row(name: str, model: str = "44") -> dict:
    data = load_rows()
    keys = ["horikawa", "horikawa_excluded"] if model == "44" else ["triple"]
    for key in keys:
        for row in data[key]:
            if row["name"] == name:
                return row
    raise KeyError(f"no row {name!r} for model {model}")


def compute_row(row: dict, model: str) -> dict:
    action = row_action(row, model)
    degree = 4 if model == "44" else 2
    basis = invariant_space(action, degree)
    supports = {b.support for b in basis}
    expected = expected_supports(row, model)
    avg = character_average(action, degree)
    fixed = all(is_invariant(action, b) for b in basis)
    ok = supports == expected and len(basis) == row.get("count", len(expected)) and avg == len(basis) and fixed
    return {
        "row": row["name"],
        "model": model,
        "dimension": len(basis),
        "expected_count": row.get("count"),
        "character_average": str(avg),
        "basis": [b.text() for b in basis],
        "match": ok,
    }


def reproduce_tables() -> dict:
    data = load_rows()
    rows = [compute_row(r, "44") for r in data["horikawa"]]
    rows += [compute_row(r, "222") for r in data["triple"]]
    return {"status": "PASS" if all(r["match"] for r in rows) else "FAIL", "rows": rows}


def run_exclusion(row: dict) -> bool:
    action = row_action(row, "44")
    ex = row["exclusion"]
    if ex["type"] == "divisible":
        mono = parse_monomial(ex["monomial"], HORIKAWA_VARS)
        return divisibility_exclusion(action, mono)
    return multiplicity_exclusion(action, ex["vanishing"], ex["order"])


def exclusion_by_name(name: str, monomial: Sequence[int] | None = None) -> bool:
    row = find_row(name, "44")
    if monomial is not None:
        return divisibility_exclusion(row_action(row, "44"), tuple(monomial))
    return run_exclusion(row)


def verify_exclusions() -> dict:
    rows = []
    for row in load_rows()["horikawa_excluded"]:
        action = row_action(row, "44")
        basis = invariant_space(action, 4)
        entry = {"row": row["name"], "excluded": run_exclusion(row), "basis": [b.text() for b in basis]}
        if "basis" in row:
            entry["basis_match"] = {b.support for b in basis} == expected_supports(row, "44")
        rows.append(entry)
    ok = all(r["excluded"] and r.get("basis_match", True) for r in rows)
    return {"status": "PASS" if ok else "FAIL", "rows": rows}


# -- symplectic sign ---------------------------------------------------------------------------


def determinant_product(g: MonomialMap) -> Cyclotomic:
    """Product over factors of det of the 2x2 factor matrices."""
    out = Cyclotomic.integer(g.n, 1)
    for f in range(len(g.perm) // 2):
        (a, b), (c, d) = g.factor_matrix(f)
        if a is not None:
            det = Cyclotomic.zeta(g.n, a + d)
        else:
            det = -Cyclotomic.zeta(g.n, b + c)
        out = out * det
    return out


# -- phi map and dominance -------------------------------------------------------------------------


def phi_map(q: dict[Monomial, Fraction]) -> dict[Monomial, Fraction]:
    """Q = A s3^2 + B s3 t3 + C t3^2  ->  F = A C - B^2 / 4 on (s1, t1, s2, t2)."""
    parts: dict[int, dict] = {2: {}, 1: {}, 0: {}}
    for m, c in q.items():
        parts[m[4]][m[:4]] = parts[m[4]].get(m[:4], 0) + Fraction(c)
    a, b, c = parts[2], parts[1], parts[0]

    def mul(p, r):
        out: dict = {}
        for m1, c1 in p.items():
            for m2, c2 in r.items():
                k = tuple(x + y for x, y in zip(m1, m2))
                out[k] = out.get(k, 0) + c1 * c2
        return out

    out = mul(a, c)
    for k, v in mul(b, b).items():
        out[k] = out.get(k, 0) - v / 4
    return {k: v for k, v in out.items() if v != 0}


def in_span(poly: dict[Monomial, Fraction], basis: Sequence[InvariantElement]) -> bool:
    """Membership for orbit-sum bases with rational (phase 0 or N/2) coefficients."""
    remaining = dict(poly)
    for b in basis:
        terms = list(b.terms)
        m0, p0 = terms[0]
        scale = Fraction(remaining.get(m0, 0)) / _real_phase(p0, b.n)
        for m, p in terms:
            remaining[m] = remaining.get(m, 0) - scale * _real_phase(p, b.n)
    return all(v == 0 for v in remaining.values())


def _real_phase(p: int, n: int) -> int:
    if p % n == 0:
        return 1
    if 2 * p % n == 0:
        return -1
    raise ActionError("basis element has a non-real coefficient")


def _commutant_dimension(gens: Sequence[MonomialMap], factor: int) -> int:
    """Largest dimension of {M : M g_f = lam_g g_f M} over root-of-unity choices lam_g
    whose solution space contains an invertible matrix; g_f is the factor block."""
    n = gens[0].n
    mats = [g.factor_matrix(factor) for g in gens]
    best = 0
    for lams in itertools.product(range(n), repeat=len(gens)):
        dim = _solve_commutant(mats, lams, n)
        if dim is not None:
            best = max(best, dim)
    return best


def _solve_commutant(mats, lams, n) -> int | None:
    # unknowns M[r][s] indexed 2r+s; each equation says M_a = zeta^ph * M_b
    parent = list(range(4))
    offset = [0] * 4  # M_i = zeta^offset[i] * M_root
    dead = [False] * 4

    def find(i):
        if parent[i] == i:
            return i, 0
        root, off = find(parent[i])
        return root, (off + offset[i]) % n

    def link(a, b, ph):
        ra, oa = find(a)
        rb, ob = find(b)
        if ra == rb:
            if (oa - ob - ph) % n:
                dead[ra] = True
            return
        parent[ra] = rb
        offset[ra] = (ph + ob - oa) % n
        dead[rb] = dead[rb] or dead[ra]

    for (rows, lam) in zip(mats, lams):
        perm = [0 if rows[i][0] is not None else 1 for i in range(2)]
        ph = [rows[i][perm[i]] for i in range(2)]
        inv = [perm.index(s) for s in range(2)]
        for r in range(2):
            for s in range(2):
                # (M g)_{rs} = M_{r, inv(s)} z^{ph[inv(s)]};  (g M)_{rs} = z^{ph[r]} M_{perm(r), s}
                a = 2 * r + inv[s]
                b = 2 * perm[r] + s
                link(a, b, (lam + ph[r] - ph[inv[s]]) % n)
    roots = {}
    for i in range(4):
        r, off = find(i)
        if not dead[r]:
            roots[i] = (r, off)
    # generic determinant M00*M11 - M01*M10 must be nonzero
    det: dict[tuple, Cyclotomic] = {}
    for (i, j), sign in (((0, 3), 1), ((1, 2), -1)):
        if i in roots and j in roots:
            key = tuple(sorted((roots[i][0], roots[j][0])))
            term = Cyclotomic.zeta(n, roots[i][1] + roots[j][1]) * sign
            det[key] = det[key] + term if key in det else term
    if not any(not v.is_zero() for v in det.values()):
        return None
    return len({r for r, _ in roots.values()})


def dominance_row(row: dict) -> dict:
    xi3 = row["xi"]
    triple = build_action(xi3, 3)
    xi2 = [r[:2] for r in xi3]
    double = build_action(xi2, 2, triple.n)
    dim_v = len(invariant_space(triple, 2))
    dim_w = len(invariant_space(double, 4))
    dim_gamma = _commutant_dimension(list(triple.generators), 2) - 1
    computed = [dim_gamma, dim_v, dim_w]
    return {
        "row": row["name"],
        "dim_gamma": dim_gamma,
        "dim_v": dim_v,
        "dim_w": dim_w,
        "dominant": dim_gamma <= dim_v - dim_w,
        "match": computed == row["expected"],
    }


def dominance_table() -> dict:
    rows = [dominance_row(r) for r in load_rows()["dominance"]]
    ok = all(r["match"] and r["dominant"] for r in rows)
    return {"status": "PASS" if ok else "FAIL", "rows": rows}


def iter_rows(model: str) -> Iterable[dict]:
    data = load_rows()
    return data["horikawa"] if model == "44" else data["triple"]
