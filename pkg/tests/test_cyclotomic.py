import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from typek.cyclotomic import Cyclotomic, cyclotomic_poly, sqrt_element


def numeric(x: Cyclotomic) -> complex:
    return sum(c * cmath.exp(2j * math.pi * k / x.n) for k, c in enumerate(x.c))


def test_cyclotomic_polys():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8, 12, 15, 20, 45, 1024])
def test_sqrt_element_is_positive_square_root(n):
    r = sqrt_element(n)
    assert r * r == Cyclotomic.integer(1, n)
    assert abs(numeric(r) - math.sqrt(n)) < 1e-9


@given(st.integers(2, 24), st.lists(st.integers(-3, 3), min_size=24, max_size=24))
def test_equality_agrees_with_numeric_value(n, coeffs):
    x = Cyclotomic(n, coeffs[:n])
    assert x.is_zero() == (abs(numeric(x)) < 1e-7)


def test_zeta_relations():
    z = Cyclotomic.zeta(6, 1)
    assert z * z * z == Cyclotomic.integer(6, -1)
    assert z.lift(12) == Cyclotomic.zeta(12, 2)
    assert (z + z.conjugate()) == Cyclotomic.integer(1, 1)
