import random

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from secmsr import _kernels
from secmsr.finite_field import (
    BitMatrix, FieldContext, FieldError, InconsistentSystemError, Matrix,
    UnderdeterminedSystemError, _kernel_row_basis, _py_row_basis, find_irreducible,
    is_irreducible, rank_mod_p, rowspace_contained,
)

X = sympy.symbols("x")


def sympy_irreducible(f: int) -> bool:
    coeffs = [int(b) for b in bin(f)[2:]]
    return sympy.Poly(coeffs, X, modulus=2).is_irreducible


def trial_division_irreducible(f: int) -> bool:
    deg = f.bit_length() - 1
    for g in range(2, 1 << (deg // 2 + 1)):
        # long division of f by g over GF(2)
        r = f
        while r.bit_length() >= g.bit_length():
            r ^= g << (r.bit_length() - g.bit_length())
        if r == 0 and g != f:
            return False
    return deg >= 1


def naive_mul(a: int, b: int, f: int) -> int:
    m = f.bit_length() - 1
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m & 1:
            a ^= f
    return out


# -- irreducible moduli -----------------------------------------------------

@pytest.mark.parametrize("m", range(1, 13))
def test_default_modulus_is_smallest_irreducible(m):
    f = find_irreducible(m)
    assert f.bit_length() - 1 == m
    assert trial_division_irreducible(f)
    assert not any(trial_division_irreducible(g) for g in range(1 << m, f))


@pytest.mark.parametrize("m", [16, 32, 64, 96])
def test_default_modulus_large_degrees(m):
    f = find_irreducible(m)
    assert sympy_irreducible(f)
    assert not any(sympy_irreducible(g) for g in range((1 << m) + 1, f, 2))


def test_known_moduli():
    assert FieldContext(8).modulus == 0x11B
    assert FieldContext(2).modulus == 0b111
    assert FieldContext(32).modulus_hex == "10000008d"
    low = find_irreducible(486) ^ (1 << 486)
    assert low == 0b11111001


@pytest.mark.parametrize("f", [0b111, 0b1011, 0b10011, 0x11B, 0x11D, (1 << 32) | 0x8D])
def test_rabin_matches_sympy(f):
    assert is_irreducible(f) == sympy_irreducible(f)


def test_rabin_rejects_reducible():
    for f in range(4, 1 << 9):
        assert is_irreducible(f) == trial_division_irreducible(f), f


def test_bad_moduli_rejected():
    with pytest.raises(FieldError):
        FieldContext(8, 0x11A)          # x^8 + ... reducible (divisible by x)
    with pytest.raises(FieldError):
        FieldContext(8, 0x1B)           # wrong degree
    with pytest.raises(FieldError):
        FieldContext(0)


# -- arithmetic ---------------------------------------------------------------

def test_gf4_table():
    F = FieldContext(2)
    x = 0b10
    assert F.mul(x, x) == 0b11
    assert F.mul(x, 0b11) == 1
    assert F.inv(x) == 0b11


def test_aes_field_vectors():
    F = FieldContext(8)
    assert F.mul(0x57, 0x83) == 0xC1
    assert F.mul(0x57, 0x13) == 0xFE
    assert F.inv(0x53) == 0xCA


@pytest.mark.parametrize("m", [1, 8, 33, 96, 486])
def test_mul_matches_naive(m):
    F = FieldContext(m)
    rng = random.Random(m)
    for _ in range(50):
        a, b = F.random(rng), F.random(rng)
        assert F.mul(a, b) == naive_mul(a, b, F.modulus)
        assert F.square(a) == F.mul(a, a)


@pytest.mark.parametrize("m", [8, 32, 96])
def test_inverse_and_frobenius(m):
    F = FieldContext(m)
    rng = random.Random(1)
    for _ in range(20):
        a = F.random(rng) or 1
        assert F.mul(a, F.inv(a)) == 1
        assert F.pow_q(a, m) == a
        assert F.pow(a, 2 ** m - 1) == 1
        assert F.pow_q(a, 3) == F.pow(a, 8)
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


@pytest.mark.parametrize("m", [5, 8, 32])
def test_trace_is_linear_onto_gf2(m):
    F = FieldContext(m)
    rng = random.Random(4)
    for _ in range(20):
        a, b = F.random(rng), F.random(rng)
        assert F.trace(a) in (0, 1)
        assert F.trace(a ^ b) == F.trace(a) ^ F.trace(b)
        # Tr(a) = a + a^2 + ... + a^(2^(m-1))
        t, y = 0, a
        for _ in range(m):
            t ^= y
            y = F.square(y)
        assert t == F.trace(a)


def test_hex_round_trip_and_padding():
    F = FieldContext(486)
    assert len(F.to_hex(1)) == 122
    assert F.from_hex(F.to_hex(12345)) == 12345
    with pytest.raises(FieldError):
        F.check(1 << 486)


def test_field_element_operators():
    F = FieldContext(8)
    a, b = F.element(0x57), F.element(0x83)
    assert (a * b).value == 0xC1
    assert (a + b).value == 0x57 ^ 0x83
    assert (a / b * b).value == 0x57
    assert (a ** 255).value == 1
    assert a.hex() == "57"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 96 - 1), st.integers(0, 2 ** 96 - 1), st.integers(0, 2 ** 96 - 1))
def test_field_axioms_96(a, b, c):
    F = FieldContext(96)
    assert F.mul(a, b) == F.mul(b, a)
    assert F.mul(a, F.mul(b, c)) == F.mul(F.mul(a, b), c)
    assert F.mul(a, b ^ c) == F.mul(a, b) ^ F.mul(a, c)
    if a:
        assert F.div(F.mul(a, b), a) == b


# -- matrices --------------------------------------------------------------------

def rand_matrix(F, r, c, rng, rank=None):
    if rank is None:
        return Matrix(F, [[F.random(rng) for _ in range(c)] for _ in range(r)], c)
    A = Matrix(F, [[F.random(rng) for _ in range(rank)] for _ in range(r)], rank)
    B = Matrix(F, [[F.random(rng) for _ in range(c)] for _ in range(rank)], c)
    return A @ B


@pytest.mark.parametrize("m", [8, 64])
def test_rank_and_transpose(m):
    F = FieldContext(m)
    rng = random.Random(2)
    for r, c, k in [(5, 7, 3), (8, 8, 8), (9, 4, 2), (6, 6, 0)]:
        A = rand_matrix(F, r, c, rng, k)
        assert A.rank() == k
        assert A.T.rank() == k


def test_solve_and_inverse():
    F = FieldContext(32)
    rng = random.Random(3)
    A = rand_matrix(F, 6, 6, rng)
    x = [F.random(rng) for _ in range(6)]
    assert A.solve(A.apply(x)) == x
    assert A @ A.inverse() == Matrix.identity(F, 6)
    S = rand_matrix(F, 6, 6, rng, 4)
    with pytest.raises(UnderdeterminedSystemError):
        S.solve(S.apply(x))
    # a right-hand side outside the column space
    T = Matrix(F, [[1, 0], [0, 0]], 2)
    with pytest.raises(InconsistentSystemError):
        T.solve([0, 1])


def test_kernel_matches_python_elimination():
    rng = random.Random(5)
    for m in (1, 8, 33, 65, 486):
        F = FieldContext(m)
        for r, c, k in [(12, 10, 6), (7, 15, 7), (10, 10, 10)]:
            A = rand_matrix(F, r, c, rng, k)
            assert _kernel_row_basis(F, A.rows, c) == _py_row_basis(F, A.rows)


def test_kernel_matmul_matches_python():
    rng = random.Random(6)
    F = FieldContext(96)
    A, B = rand_matrix(F, 9, 7, rng), rand_matrix(F, 7, 11, rng)
    W = _kernels.words_for(96)
    a = _kernels.ints_to_words((v for r in A.rows for v in r), W).reshape(9, 7, W)
    b = _kernels.ints_to_words((v for r in B.rows for v in r), W).reshape(7, 11, W)
    got = _kernels.words_to_ints(_kernels.matmul(a, b, 96, np.array(F.reduction_exponents, dtype=np.int64)))
    want = [F.dot(A.rows[i], B.column(j)) for i in range(9) for j in range(11)]
    assert got == want


def test_large_product_uses_consistent_results():
    rng = random.Random(7)
    F = FieldContext(486)
    A, B = rand_matrix(F, 30, 30, rng), rand_matrix(F, 30, 30, rng)
    C = A @ B
    for i, j in [(0, 0), (3, 17), (29, 29)]:
        assert C[i, j] == F.dot(A.rows[i], B.column(j))


def test_rowspace_contained():
    F = FieldContext(16)
    rng = random.Random(8)
    B = rand_matrix(F, 4, 9, rng)
    coeffs = rand_matrix(F, 3, 4, rng)
    assert rowspace_contained(coeffs @ B, B)
    assert not rowspace_contained(Matrix(F, [[1] + [0] * 8], 9), Matrix(F, [[0, 1] + [0] * 7], 9))


# -- 0-1 matrices --------------------------------------------------------------------

def test_bitmatrix_rank_against_numpy_gf2():
    rng = np.random.default_rng(0)
    for _ in range(20):
        A = rng.integers(0, 2, size=(7, 11))
        assert BitMatrix.from_lists(A.tolist()).rank() == rank_mod_p(A, 2)


def test_bitmatrix_embedding_preserves_rank():
    rng = np.random.default_rng(1)
    F = FieldContext(8)
    for _ in range(10):
        A = BitMatrix.from_lists(rng.integers(0, 2, size=(6, 9)).tolist())
        assert A.embed(F).rank() == A.rank()


def test_bitmatrix_shapes():
    B = BitMatrix.from_lists([[1, 0, 1], [0, 1, 1]])
    assert B.T.to_lists() == [[1, 0], [0, 1], [1, 1]]
    assert B.row_weights() == [2, 2] and B.col_weights() == [1, 1, 2]
    assert B.select_cols([2, 0]).to_lists() == [[1, 1], [1, 0]]
    assert B.to_ascii() == "1 0 1\n0 1 1"
    with pytest.raises(ValueError):
        BitMatrix([0b1000], 3)


def test_rank_mod_p_small_primes():
    A = np.array([[1, 1], [1, -1]])
    assert rank_mod_p(A, 2) == 1
    assert rank_mod_p(A, 3) == 2


def test_context_from_modulus_hex():
    F = FieldContext.from_modulus_hex("11b")
    assert F.m == 8 and F.modulus == 0x11B
    assert F.from_hex("ff") == 255
