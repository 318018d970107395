import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from syzlab import exactla as la


def _plain_rank(rows, p):
    # independent elimination on Python lists
    A = [[x % p for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(A[0]) if A else 0
    while rank < len(A) and col < ncols:
        piv = next((i for i in range(rank, len(A)) if A[i][col]), None)
        if piv is None:
            col += 1
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][col], -1, p)
        A[rank] = [x * inv % p for x in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][col]:
                c = A[i][col]
                A[i] = [(a - c * b) % p for a, b in zip(A[i], A[rank])]
        rank += 1
        col += 1
    return rank


primes = st.sampled_from([2, 3, 5, 7, 101, 32003])


@st.composite
def matrices(draw, max_side=12, square=False):
    p = draw(primes)
    r = draw(st.integers(0, max_side))
    c = r if square else draw(st.integers(0, max_side))
    entries = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return p, np.array(entries, dtype=np.int64).reshape(r, c)


def test_rref_examples():
    R, piv, rk = la.rref(la.identity(3), 7)
    assert np.array_equal(R, la.identity(3)) and piv == [0, 1, 2] and rk == 3
    R, piv, rk = la.rref(la.zeros(2, 4), 7)
    assert not R.any() and piv == [] and rk == 0
    R, piv, rk = la.rref(la.as_matrix([[2, 4], [1, 2]], 5), 5)
    assert R.tolist() == [[1, 2], [0, 0]] and rk == 1


def test_kernel_examples():
    assert la.kernel_basis(la.identity(3), 5).shape == (3, 0)
    assert np.array_equal(la.kernel_basis(la.zeros(3, 3), 5), la.identity(3))
    K = la.kernel_basis(la.as_matrix([[1, 2]], 5), 5)
    assert K.shape == (2, 1)
    v = K[:, 0] * pow(int(K[1, 0]), -1, 5) % 5
    assert v.tolist() == [3, 1]


def test_solve_examples():
    b = np.array([4, 1, 6])
    assert la.solve(la.identity(3), b, 7).tolist() == [4, 1, 6]
    assert la.solve(la.zeros(2, 2), np.array([1, 0]), 7) is None
    assert la.solve(la.as_matrix([[2]], 7), [3], 7).tolist() == [5]
    with pytest.raises(ValueError):
        la.solve(la.identity(2), [1, 2, 3], 7)


def test_char_poly_examples():
    assert la.char_poly(la.zeros(2, 2), 5) == (0, 0, 1)
    assert la.char_poly(la.identity(2), 5) == (1, 3, 1)  # (t-1)^2 = t^2 - 2t + 1
    assert la.char_poly(la.as_matrix([[0, 1], [0, 0]], 5), 5) == (0, 0, 1)
    with pytest.raises(ValueError):
        la.char_poly(la.zeros(2, 3), 5)


def test_factor_examples():
    assert la.factor((0, 0, 1), 7) == [((0, 1), 2)]
    f = la.poly_mul((4, 1), (3, 1), 5)  # (t-1)(t-2)
    assert la.factor(f, 5) == [((3, 1), 1), ((4, 1), 1)]
    assert la.factor((1, 0, 1), 3) == [((1, 0, 1), 1)]
    assert la.is_irreducible((1, 0, 1), 3)
    with pytest.raises(ValueError):
        la.factor((), 3)


def test_inverse_and_empty():
    assert la.inverse(la.zeros(0, 0), 7).shape == (0, 0)
    A = la.as_matrix([[1, 2], [3, 4]], 7)
    assert np.array_equal(la.matmul(A, la.inverse(A, 7), 7), la.identity(2))


def test_non_prime_field_rejected():
    with pytest.raises(ValueError):
        la.PrimeField(91)


@given(matrices())
def test_rank_nullity(pm):
    p, A = pm
    r, c = A.shape
    K = la.kernel_basis(A, p)
    assert K.shape == (c, c - la.rank(A, p))
    if r and c:
        assert not la.matmul(A, K, p).any()
    assert la.rank(A, p) == _plain_rank(A.tolist(), p)


@given(matrices(max_side=8), st.data())
def test_solve_consistency(pm, data):
    p, A = pm
    r, c = A.shape
    if r == 0:
        return
    b = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=r, max_size=r)), dtype=np.int64)
    x = la.solve(A, b, p)
    if x is None:
        assert la.rank(np.hstack([A, b.reshape(-1, 1)]), p) > la.rank(A, p)
    else:
        assert np.array_equal(la.matmul(A, x.reshape(-1, 1), p).reshape(-1), b % p)


@given(matrices(square=True))
def test_cayley_hamilton(pm):
    p, A = pm
    f = la.char_poly(A, p)
    assert len(f) == A.shape[0] + 1 and f[-1] == 1
    assert not la.poly_eval_matrix(f, A, p).any()


@given(matrices(max_side=6, square=True))
def test_char_poly_matches_integer_oracle(pm):
    p, A = pm
    n = A.shape[0]
    if n == 0:
        return
    t = sympy.Symbol("t")
    coeffs = sympy.Matrix(A.tolist()).charpoly(t).all_coeffs()[::-1]
    assert la.char_poly(A, p) == la.poly_trim([int(c) for c in coeffs], p)


@given(st.sampled_from([2, 3, 5, 7, 11]), st.lists(st.integers(0, 10), min_size=1, max_size=9))
def test_factor_multiplies_back(p, coeffs):
    f = la.poly_trim(coeffs, p)
    if not f:
        return
    prod = (1,)
    for g, e in la.factor(f, p):
        assert la.is_irreducible(g, p)
        prod = la.poly_mul(prod, la.poly_pow(g, e, p), p)
    assert prod == la.poly_monic(f, p)


def test_matmul_exact_for_largest_supported_prime():
    p = 1048573  # largest prime below 2^20
    assert la.is_prime(p) and p < la.MAX_PRIME
    rng = np.random.default_rng(0)
    A = rng.integers(0, p, (5, 40))
    B = rng.integers(0, p, (40, 3))
    want = [[sum(int(A[i, k]) * int(B[k, j]) for k in range(40)) % p for j in range(3)] for i in range(5)]
    assert la.matmul(A, B, p).tolist() == want


def test_oversized_modulus_refused():
    with pytest.raises(ValueError):
        la.matmul(la.identity(2), la.identity(2), 2147483629)
