"""Gabidulin pre-coding by linearized-polynomial evaluation.

A message ``(m_1, ..., m_M)`` defines ``p(x) = sum_i m_i x^(2^(i-1))`` and is
encoded as ``(p(y_1), ..., p(y_M))`` for points ``y_j`` linearly independent
over GF(2).  In matrix form this is ``m @ moore`` with
``moore[i][j] = y_j^(2^i)``, so decoding is one ``M x M`` solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .finite_field import BitMatrix, FieldContext, FieldError, Matrix


@dataclass(frozen=True)
class EvaluationSet:
    ctx: FieldContext
    points: tuple[int, ...]

    def __post_init__(self):
        for y in self.points:
            self.ctx.check(y)
        if BitMatrix(self.points, self.ctx.m).rank() != len(self.points):
            raise FieldError("evaluation points are not linearly independent over GF(2)")

    @classmethod
    def default(cls, ctx: FieldContext, size: int | None = None) -> "EvaluationSet":
        """Polynomial basis ``1, x, ..., x^(size-1)`` (needs ``size <= m``)."""
        size = ctx.m if size is None else size
        if size > ctx.m:
            raise FieldError(f"GF(2^{ctx.m}) holds at most {ctx.m} independent points, asked for {size}")
        return cls(ctx, tuple(1 << i for i in range(size)))

    def __len__(self):
        return len(self.points)


def moore_matrix(E: EvaluationSet) -> Matrix:
    ctx = E.ctx
    rows = [list(E.points)]
    for _ in range(1, len(E)):
        rows.append([ctx.square(v) for v in rows[-1]])
    return Matrix(ctx, rows, len(E))


def dual_basis(E: EvaluationSet) -> tuple[int, ...]:
    """Trace-dual basis ``z_j`` with ``Tr(y_i z_j) = [i == j]``.

    Only defined when the points form a basis of the field (``M == m``).
    """
    ctx = E.ctx
    M = len(E)
    if M != ctx.m:
        raise FieldError("the trace-dual basis needs exactly m points")
    tv = ctx.trace_vector()
    # Gram matrix of the trace form, augmented with the identity
    rows = []
    for i, yi in enumerate(E.points):
        g = sum(((ctx.mul(yi, yj) & tv).bit_count() & 1) << j for j, yj in enumerate(E.points))
        rows.append(g | (1 << (M + i)))
    # Gauss-Jordan over GF(2); the Gram matrix is symmetric and invertible
    for col in range(M):
        piv = next(r for r in range(col, M) if (rows[r] >> col) & 1)
        rows[col], rows[piv] = rows[piv], rows[col]
        for r in range(M):
            if r != col and (rows[r] >> col) & 1:
                rows[r] ^= rows[col]
    inv = [r >> M for r in rows]
    # z_j = sum_b inv[j][b] y_b
    out = []
    for j in range(M):
        z = 0
        for b in range(M):
            if (inv[j] >> b) & 1:
                z ^= E.points[b]
        out.append(z)
    return tuple(out)


def moore_inverse(E: EvaluationSet) -> Matrix:
    """``moore_matrix(E)^-1`` as the transposed Moore matrix of the dual basis."""
    return moore_matrix(EvaluationSet(E.ctx, dual_basis(E))).T


def _check_length(vec: Sequence[int], E: EvaluationSet, what: str):
    if len(vec) != len(E):
        raise ValueError(f"{what} has {len(vec)} symbols, evaluation set has {len(E)}")


def precode(message: Sequence[int], E: EvaluationSet, moore: Matrix | None = None) -> list[int]:
    _check_length(message, E, "message")
    for v in message:
        E.ctx.check(v)
    moore = moore_matrix(E) if moore is None else moore
    return moore.left_apply(message)


def depcode(f: Sequence[int], E: EvaluationSet, moore: Matrix | None = None,
            inverse: Matrix | None = None) -> list[int]:
    """Recover the message ``m`` with ``precode(m, E) == f``.

    Solves the Moore system unless a precomputed ``inverse`` is supplied.
    """
    _check_length(f, E, "codeword")
    if inverse is not None:
        return inverse.left_apply(list(f))
    moore = moore_matrix(E) if moore is None else moore
    return moore.T.solve(list(f))


def depcode_many(fs: Sequence[Sequence[int]], E: EvaluationSet, moore: Matrix | None = None) -> list[list[int]]:
    """Batch :func:`depcode` sharing a single elimination."""
    for f in fs:
        _check_length(f, E, "codeword")
    if not fs:
        return []
    moore = moore_matrix(E) if moore is None else moore
    rhs = Matrix(E.ctx, fs, len(E)).T
    return [list(col) for col in moore.T.solve(rhs).T.rows]
