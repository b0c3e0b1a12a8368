import random

import pytest

from secmsr.finite_field import FieldContext, FieldError, Matrix
from secmsr.gabidulin import (
    EvaluationSet, depcode, depcode_many, dual_basis, moore_inverse, moore_matrix, precode,
)


def evaluate_linearized(ctx, coeffs, y):
    """sum_i coeffs[i] * y^(2^i) by repeated squaring of y."""
    out, power = 0, y
    for c in coeffs:
        out ^= ctx.mul(c, power)
        power = ctx.square(power)
    return out


@pytest.mark.parametrize("m", [8, 32])
def test_precode_is_polynomial_evaluation(m):
    ctx = FieldContext(m)
    E = EvaluationSet.default(ctx)
    rng = random.Random(m)
    msg = [ctx.random(rng) for _ in range(m)]
    assert precode(msg, E) == [evaluate_linearized(ctx, msg, y) for y in E.points]


def test_moore_entries():
    ctx = FieldContext(8)
    E = EvaluationSet.default(ctx)
    V = moore_matrix(E)
    for i in range(8):
        for j in range(8):
            assert V[i, j] == ctx.pow(E.points[j], 2 ** i)


@pytest.mark.parametrize("m", [8, 32, 96])
def test_moore_full_rank_and_inverse(m):
    ctx = FieldContext(m)
    E = EvaluationSet.default(ctx)
    V = moore_matrix(E)
    assert V.rank() == m
    assert V @ moore_inverse(E) == Matrix.identity(ctx, m)


def test_dual_basis_trace_relation():
    ctx = FieldContext(16)
    rng = random.Random(3)
    # a random basis
    while True:
        pts = tuple(ctx.random(rng) for _ in range(16))
        try:
            E = EvaluationSet(ctx, pts)
            break
        except FieldError:
            pass
    z = dual_basis(E)
    for i, y in enumerate(E.points):
        for j, w in enumerate(z):
            assert ctx.trace(ctx.mul(y, w)) == int(i == j)


def test_round_trip_partial_basis():
    ctx = FieldContext(32)
    E = EvaluationSet.default(ctx, 20)
    rng = random.Random(9)
    msgs = [[ctx.random(rng) for _ in range(20)] for _ in range(5)]
    fs = [precode(m, E) for m in msgs]
    assert [depcode(f, E) for f in fs] == msgs
    assert depcode_many(fs, E) == msgs
    with pytest.raises(FieldError):
        dual_basis(E)


def test_dependent_points_rejected():
    ctx = FieldContext(8)
    with pytest.raises(FieldError):
        EvaluationSet(ctx, (1, 2, 3))
    with pytest.raises(FieldError):
        EvaluationSet.default(ctx, 9)


def test_linearity_over_gf2():
    ctx = FieldContext(32)
    E = EvaluationSet.default(ctx)
    rng = random.Random(1)
    a = [ctx.random(rng) for _ in range(32)]
    b = [ctx.random(rng) for _ in range(32)]
    assert precode([x ^ y for x, y in zip(a, b)], E) == [x ^ y for x, y in zip(precode(a, E), precode(b, E))]


def test_length_checked():
    ctx = FieldContext(8)
    E = EvaluationSet.default(ctx)
    with pytest.raises(ValueError):
        precode([1, 2], E)
    with pytest.raises(ValueError):
        depcode([1] * 7, E)
