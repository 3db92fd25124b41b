import itertools
from fractions import Fraction
from math import gcd

from hypothesis import given, settings
from hypothesis import strategies as st

from typek import linalg as la

small_int = st.integers(min_value=-6, max_value=6)


def matrices(rows=st.integers(1, 4), cols=st.integers(1, 4)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(small_int, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0])
    )


def square(n=st.integers(1, 4)):
    return n.flatmap(lambda k: st.lists(st.lists(small_int, min_size=k, max_size=k), min_size=k, max_size=k))


def leibniz_det(m):
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = (-1) ** inversions
        for i in range(n):
            term *= m[i][perm[i]]
        total += term
    return total


def minors_gcd(m, k):
    g = 0
    for rows in itertools.combinations(range(len(m)), k):
        for cols in itertools.combinations(range(len(m[0])), k):
            g = gcd(g, leibniz_det([[m[r][c] for c in cols] for r in rows]))
    return g


def test_snf_examples():
    assert la.smith_normal_form([[2, 0], [0, 2]])[0] == [[2, 0], [0, 2]]
    assert la.smith_normal_form([[2, 0], [-1, 2]])[0] == [[1, 0], [0, 4]]
    assert la.smith_normal_form([[0, 2], [2, 0]])[0] == [[2, 0], [0, 2]]
    assert la.invariant_factors([[2, -1], [-1, 2]]) == [1, 3]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_transform_and_chain(m):
    d, u, v = la.smith_normal_form(m)
    assert la.matmul(la.matmul(u, m), v) == d
    assert abs(la.det(u)) == 1 and abs(la.det(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    nz = [x for x in diag if x]
    assert all(x >= 0 for x in diag)
    assert diag[: len(nz)] == nz
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    for i in range(len(d)):
        for j in range(len(d[0])):
            if i != j:
                assert d[i][j] == 0


@settings(max_examples=80, deadline=None)
@given(matrices(st.integers(1, 3), st.integers(1, 3)))
def test_invariant_factors_match_minor_gcds(m):
    # d_1 ... d_k = gcd of k x k minors
    facs = la.invariant_factors(m)
    prod = 1
    for k, f in enumerate(facs, start=1):
        prod *= f
        assert minors_gcd(m, k) == prod


@settings(max_examples=100, deadline=None)
@given(square())
def test_det_matches_leibniz(m):
    assert la.det(m) == leibniz_det(m)


@settings(max_examples=80, deadline=None)
@given(square())
def test_inverse_round_trip(m):
    if la.det(m) == 0:
        return
    inv = la.inverse(m)
    assert la.matmul(m, inv) == la.identity(len(m))


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_left_kernel_is_primitive_kernel(m):
    k = la.left_kernel(m)
    assert len(k) == len(m) - la.rank(m)
    for row in k:
        assert all(x == 0 for x in la.vecmat(row, m))
    if k:
        assert la.saturation(k) and la.invariant_factors(k) == [1] * len(k)


def test_lattice_basis_and_membership():
    basis = la.lattice_basis([[1, 0], [0, 1], [Fraction(1, 2), Fraction(1, 2)]])
    assert abs(la.det(basis)) == Fraction(1, 2)
    assert la.in_lattice(basis, [Fraction(1, 2), Fraction(-1, 2)])
    assert not la.in_lattice(basis, [Fraction(1, 2), 0])


def test_abelian_invariants():
    assert la.abelian_invariants([[2, 0], [0, 4]], 2) == ([2, 4], 0)
    assert la.abelian_invariants([[6, 4]], 2) == ([2], 1)
    assert la.abelian_invariants([], 3) == ([], 3)


def test_solve_left():
    assert la.solve_left([[1, 0], [1, 1]], [3, 2]) == [1, 2]
    assert la.solve_left([[1, 1]], [1, 0]) is None
