import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from typek import invariants as inv
from typek.cyclotomic import Cyclotomic

H = inv.HORIKAWA_VARS
T = inv.TRIPLE_VARS


def supports(basis):
    return {b.support for b in basis}


def test_c1_model_has_13_swap_orbits():
    action = inv.build_action([], 2)
    basis = inv.invariant_space(action, 4)
    assert len(basis) == 13
    for b in basis:
        (m, _), *rest = b.terms
        swapped = (m[1], m[0], m[3], m[2])
        assert b.support == {m, swapped}


def test_c4_row_matches_listed_basis():
    action = inv.build_action([["1/8", "1/8"]], 2)
    want = {inv.parse_orbit_sum(s, H) for s in ["x^4z^4+y^4w^4", "x^4w^4+y^4z^4", "x^3yzw^3+xy^3z^3w", "x^2y^2z^2w^2"]}
    assert supports(inv.invariant_space(action, 4)) == want


def test_c5_row_matches_listed_basis():
    row = inv.find_row("C5")
    want = {inv.parse_orbit_sum(s, H) for s in ["x^4zw^3+y^4z^3w", "x^3yz^4+xy^3w^4", "x^2y^2z^2w^2"]}
    assert supports(inv.invariant_space(inv.row_action(row, "44"), 4)) == want


def test_triple_c2xc2_condition():
    row = inv.find_row("C2xC2", "222")
    basis = inv.invariant_space(inv.row_action(row, "222"), 2)
    assert len(basis) == 5
    for b in basis:
        for m, _ in b.terms:
            i, j, k = m[0], m[2], m[4]
            assert (i + k) % 2 == 0 and (j + k) % 2 == 0


def test_reproduce_tables_and_exclusions():
    assert inv.reproduce_tables()["status"] == "PASS"
    assert inv.verify_exclusions()["status"] == "PASS"
    assert inv.exclusion_by_name("excluded (v)", (2, 2, 0, 0))
    c4 = inv.build_action([["1/8", "1/8"]], 2)
    assert not inv.divisibility_exclusion(c4, (2, 2, 0, 0))
    row = inv.find_row("excluded (1/5,1/5)")
    assert inv.multiplicity_exclusion(inv.row_action(row, "44"), [1, 3], 4)


def test_basis_elements_are_invariant_over_cyclotomics():
    for model in ("44", "222"):
        for row in inv.iter_rows(model):
            action = inv.row_action(row, model)
            for b in inv.invariant_space(action, 4 if model == "44" else 2):
                assert inv.is_invariant(action, b)


def test_character_average_counts_invariants():
    for row in inv.iter_rows("44"):
        action = inv.row_action(row, "44")
        assert inv.character_average(action, 4) == len(inv.invariant_space(action, 4))


def test_phi_map_examples():
    q = {(2, 0, 2, 0, 2, 0): 1, (0, 2, 0, 2, 0, 2): 1}
    assert inv.phi_map(q) == {(2, 2, 2, 2): 1}
    m = {(1, 1, 2, 0, 1, 1): 1}
    assert inv.phi_map(m) == {(2, 2, 4, 0): Fraction(-1, 4)}


def test_phi_lands_in_w_for_random_members():
    rng = random.Random(3)
    for row in inv.load_rows()["dominance"]:
        triple = inv.build_action(row["xi"], 3)
        double = inv.build_action([r[:2] for r in row["xi"]], 2, triple.n)
        basis = inv.invariant_space(triple, 2)
        w = inv.invariant_space(double, 4)
        for _ in range(3):
            q = {}
            for b in basis:
                c = rng.randint(-5, 5)
                for m, _ in b.terms:
                    q[m] = q.get(m, 0) + c
            assert inv.in_span(inv.phi_map(q), w)


def test_dominance_rows():
    table = inv.dominance_table()
    assert table["status"] == "PASS"
    rows = {r["row"]: (r["dim_gamma"], r["dim_v"], r["dim_w"]) for r in table["rows"]}
    assert rows["C1"] == (1, 14, 13)
    assert rows["C2 (1/4,0)"] == (0, 8, 8)
    assert rows["C2xC2"] == (0, 5, 5)


def test_symplectic_sign():
    action = inv.build_action([["1/4", "1/4"]], 2)
    for g in action.elements:
        sign = inv.determinant_product(g)
        if g.is_diagonal:
            assert sign == Cyclotomic.integer(1, 1)
    swap = inv.swap_map(2, 4, [1, 0])
    assert inv.determinant_product(swap) == Cyclotomic.integer(1, -1)


def test_monomial_formatting_round_trip():
    for m in inv.monomials(3, 2):
        text = inv.format_monomial(m, T)
        assert inv.parse_monomial(text, T) == m


maps = st.builds(
    lambda perm_bits, phases: inv.MonomialMap(
        tuple(sum(([2 * f + 1, 2 * f] if b else [2 * f, 2 * f + 1] for f, b in enumerate(perm_bits)), [])),
        tuple(phases),
        8,
    ),
    st.lists(st.booleans(), min_size=2, max_size=2),
    st.lists(st.integers(0, 7), min_size=4, max_size=4),
)


@settings(max_examples=100, deadline=None)
@given(maps, maps, maps)
def test_composition_is_associative(f, g, h):
    assert f.compose(g.compose(h)) == f.compose(g).compose(h)


@settings(max_examples=100, deadline=None)
@given(maps, maps, st.sampled_from(inv.monomials(2, 4)))
def test_pullback_is_an_action(f, g, m):
    # pullback is contravariant: (f g)^* = g^* f^*
    v1, p1 = f.act(m)
    v2, p2 = g.act(v1)
    assert f.compose(g).act(m) == (v2, (p1 + p2) % 8)
