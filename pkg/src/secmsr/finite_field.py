"""Binary extension fields GF(2^m) and dense linear algebra over them.

Field elements are plain Python ints: bit ``i`` is the coefficient of
``x^i`` in the polynomial basis.  A :class:`FieldContext` owns the modulus
and implements the arithmetic; :class:`FieldElement` is a thin immutable
wrapper for call sites that want operators and hex serialisation.

Two matrix types are provided.  :class:`Matrix` holds entries of one
context and eliminates either in pure Python or, for wide fields and large
shapes, through the compiled kernels in :mod:`secmsr._kernels`.
:class:`BitMatrix` holds 0-1 entries packed one row per int and is
eliminated over GF(2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels


class FieldError(ValueError):
    pass


class SingularSystemError(ArithmeticError):
    """A linear system has no unique solution."""


class InconsistentSystemError(SingularSystemError):
    pass


class UnderdeterminedSystemError(SingularSystemError):
    pass


# byte -> its bits spread to even positions (polynomial squaring over GF(2))
_SPREAD = [sum(((b >> i) & 1) << (2 * i) for i in range(8)) for b in range(256)]
_SPREAD_BYTES = [v.to_bytes(2, "little") for v in _SPREAD]


def _clmul(a: int, b: int) -> int:
    if a.bit_count() < b.bit_count():
        a, b = b, a
    if b.bit_count() <= 12:
        p = 0
        while b:
            low = b & -b
            p ^= a << (low.bit_length() - 1)
            b ^= low
        return p
    tab = [0] * 16
    tab[1] = a
    for t in range(2, 16):
        tab[t] = tab[t ^ 1] ^ a if t & 1 else tab[t >> 1] << 1
    p = 0
    shift = 0
    while b:
        p ^= tab[b & 15] << shift
        b >>= 4
        shift += 4
    return p


def _poly_square(a: int) -> int:
    raw = a.to_bytes((a.bit_length() + 7) // 8 or 1, "little")
    return int.from_bytes(b"".join(_SPREAD_BYTES[x] for x in raw), "little")


def _poly_mod(a: int, f: int) -> int:
    df = f.bit_length() - 1
    while a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def _frobenius_residue(f: int, times: int, start: int = 0b10) -> int:
    """``start^(2^times) mod f`` by repeated squaring."""
    r = start
    m = f.bit_length() - 1
    low = f ^ (1 << m)
    exps = [i for i in range(m) if (low >> i) & 1]
    for _ in range(times):
        r = _poly_square(r)
        while r.bit_length() > m:
            hi = r >> m
            r &= (1 << m) - 1
            for e in exps:
                r ^= hi << e
    return r


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


_SMALL_IRREDUCIBLES = [0b111, 0b1011, 0b1101, 0b10011, 0b11001, 0b11111]


def is_irreducible(f: int) -> bool:
    """Rabin's irreducibility test for a polynomial over GF(2)."""
    m = f.bit_length() - 1
    if m < 1:
        return False
    if m == 1:
        return True
    if not f & 1:
        return False
    for g in _SMALL_IRREDUCIBLES:
        if g.bit_length() - 1 < m and _poly_mod(f, g) == 0:
            return False
    if _frobenius_residue(f, m) != 0b10:
        return False
    for q in _prime_factors(m):
        h = _frobenius_residue(f, m // q) ^ 0b10
        if _poly_gcd(f, h) != 1:
            return False
    return True


def find_irreducible(m: int) -> int:
    """Lexicographically smallest irreducible polynomial of degree ``m``.

    The leading coefficient is fixed, so lexicographic order from the top
    coefficient down is plain integer order of the bit pattern.
    """
    if m < 1:
        raise FieldError(f"extension degree must be >= 1, got {m}")
    lead = 1 << m
    for low in range(lead):
        if is_irreducible(lead | low):
            return lead | low
    raise AssertionError("unreachable: irreducibles exist in every degree")


def poly_to_hex(f: int) -> str:
    m = f.bit_length() - 1
    return format(f, "x").zfill(-(-(m + 1) // 4))


class FieldContext:
    """The field GF(2^m) = GF(2)[x] / (modulus)."""

    __slots__ = ("m", "modulus", "_mask", "_rexp", "_nbytes", "_hexw")

    def __init__(self, m: int, modulus: int | None = None):
        if m < 1:
            raise FieldError(f"extension degree must be >= 1, got {m}")
        if modulus is None:
            modulus = find_irreducible(m)
        if modulus.bit_length() - 1 != m:
            raise FieldError(f"modulus {poly_to_hex(modulus)} does not have degree {m}")
        if not is_irreducible(modulus):
            raise FieldError(f"modulus {poly_to_hex(modulus)} is reducible over GF(2)")
        self.m = m
        self.modulus = modulus
        self._mask = (1 << m) - 1
        low = modulus ^ (1 << m)
        self._rexp = tuple(i for i in range(m) if (low >> i) & 1)
        self._nbytes = (m + 7) // 8
        self._hexw = -(-m // 4)

    @classmethod
    def from_modulus_hex(cls, modulus_hex: str) -> "FieldContext":
        f = int(modulus_hex, 16)
        return cls(f.bit_length() - 1, f)

    def __eq__(self, other):
        return isinstance(other, FieldContext) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("GF2m", self.modulus))

    def __repr__(self):
        return f"FieldContext(m={self.m}, modulus=0x{self.modulus_hex})"

    @property
    def order(self) -> int:
        return 1 << self.m

    @property
    def modulus_hex(self) -> str:
        return poly_to_hex(self.modulus)

    @property
    def reduction_exponents(self) -> tuple[int, ...]:
        return self._rexp

    # -- scalar arithmetic on ints -------------------------------------
    def check(self, a: int) -> int:
        if not 0 <= a <= self._mask:
            raise FieldError(f"{a:#x} is not an element of GF(2^{self.m})")
        return a

    def _reduce(self, p: int) -> int:
        m = self.m
        mask = self._mask
        exps = self._rexp
        while p >> m:
            hi = p >> m
            p &= mask
            for e in exps:
                p ^= hi << e
        return p

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        return self._reduce(_clmul(a, b))

    def square(self, a: int) -> int:
        return self._reduce(_poly_square(a)) if a else 0

    def pow_q(self, a: int, i: int) -> int:
        """Frobenius power ``a^(2^i)`` by ``i`` squarings."""
        if i < 0:
            raise FieldError("Frobenius exponent must be non-negative")
        for _ in range(i % self.m if a else 0):
            a = self.square(a)
        return a

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.square(a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(2^m)")
        # binary-field extended Euclid; g1 * a == u (mod modulus) throughout
        u, v = a, self.modulus
        g1, g2 = 1, 0
        while u != 1:
            j = u.bit_length() - v.bit_length()
            if j < 0:
                u, v = v, u
                g1, g2 = g2, g1
                j = -j
            u ^= v << j
            g1 ^= g2 << j
        return self._reduce(g1)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def dot(self, xs: Iterable[int], ys: Iterable[int]) -> int:
        acc = 0
        for x, y in zip(xs, ys):
            if x and y:
                acc ^= _clmul(x, y)
        return self._reduce(acc)

    def trace_vector(self) -> int:
        """Bit ``b`` is ``Tr(x^b)``; then ``Tr(a) = parity(a & trace_vector)``.

        Uses Newton's identities for the power sums of the modulus' roots.
        """
        m, f = self.m, self.modulus
        c = [(f >> t) & 1 for t in range(m)]
        p = [m & 1]
        for j in range(1, m):
            # p_j = sum_{t=1}^{j-1} c_{m-t} p_{j-t} + j c_{m-j}
            acc = (j & 1) & c[m - j]
            for t in range(1, j):
                acc ^= c[m - t] & p[j - t]
            p.append(acc)
        return sum(v << b for b, v in enumerate(p))

    def trace(self, a: int) -> int:
        return (a & self.trace_vector()).bit_count() & 1

    # -- conversion ------------------------------------------------------
    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, self.check(value))

    def to_hex(self, a: int) -> str:
        return format(a, "x").zfill(self._hexw)

    def from_hex(self, text: str) -> int:
        return self.check(int(text, 16))

    def random(self, rng) -> int:
        return rng.getrandbits(self.m)


@dataclass(frozen=True, slots=True)
class FieldElement:
    ctx: FieldContext
    value: int

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise FieldError("arithmetic between different fields")
            return other.value
        if isinstance(other, int):
            return self.ctx.check(other)
        return NotImplemented

    def __add__(self, other):
        return FieldElement(self.ctx, self.value ^ self._other(other))

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.ctx, self.ctx.div(self.value, self._other(other)))

    def __neg__(self):
        return self

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx.pow(self.value, e))

    def __bool__(self):
        return self.value != 0

    def inv(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.value))

    def pow_q(self, i: int) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.pow_q(self.value, i))

    def hex(self) -> str:
        return self.ctx.to_hex(self.value)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> i) & 1 for i in range(self.ctx.m))


# ---------------------------------------------------------------------------
# Dense elimination over GF(2^m)
# ---------------------------------------------------------------------------

# jobs of at least this many multiply-accumulates use the compiled path when
# the field is wider than half a machine word; smaller ones are cheaper in Python
KERNEL_MIN_WORK = 20_000
KERNEL_MIN_DEGREE = 33


def _py_row_basis(ctx: FieldContext, rows: Sequence[Sequence[int]]):
    """Pure-Python counterpart of :func:`_kernels.row_basis`."""
    basis: list[list[int]] = []
    pivots: list[int] = []
    profile: list[int] = []
    for src in rows:
        row = list(src)
        for b, p in zip(basis, pivots):
            f = src[p]
            if f:
                for c in range(p, len(row)):
                    if b[c]:
                        row[c] ^= _clmul(f, b[c])
        row = [ctx._reduce(v) for v in row]
        lead = next((c for c, v in enumerate(row) if v), -1)
        if lead >= 0:
            g = ctx.inv(row[lead])
            row = [ctx.mul(g, v) for v in row]
            for b in basis:
                f = b[lead]
                if f:
                    for c in range(lead, len(row)):
                        if row[c]:
                            b[c] ^= ctx.mul(f, row[c])
            basis.append(row)
            pivots.append(lead)
        profile.append(len(basis))
    return basis, pivots, profile


def _kernel_row_basis(ctx: FieldContext, rows: Sequence[Sequence[int]], ncols: int):
    W = _kernels.words_for(ctx.m)
    arr = _kernels.ints_to_words((v for r in rows for v in r), W).reshape(len(rows), ncols, W)
    rexp = np.array(ctx.reduction_exponents, dtype=np.int64)
    basis, pivots, profile = _kernels.row_basis(arr, ctx.m, rexp)
    nb = int(profile[-1]) if len(profile) else 0
    out = []
    for t in range(nb):
        out.append(_kernels.words_to_ints(basis[t]))
    return out, [int(p) for p in pivots[:nb]], [int(x) for x in profile]


class Matrix:
    """Immutable ``rows x cols`` matrix over one :class:`FieldContext`."""

    __slots__ = ("ctx", "nrows", "ncols", "_rows")

    def __init__(self, ctx: FieldContext, rows: Iterable[Iterable[int]], ncols: int | None = None):
        data = tuple(tuple(r) for r in rows)
        if ncols is None:
            if not data:
                raise ValueError("column count required for a matrix with no rows")
            ncols = len(data[0])
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        self.ctx = ctx
        self.nrows = len(data)
        self.ncols = ncols
        self._rows = data

    @classmethod
    def zeros(cls, ctx, nrows, ncols):
        return cls(ctx, [[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, ctx, n):
        return cls(ctx, [[int(i == j) for j in range(n)] for i in range(n)], n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and other.ctx == self.ctx
            and other.shape == self.shape
            and other._rows == self._rows
        )

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols} over GF(2^{self.ctx.m}))"

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._rows)

    def transpose(self) -> "Matrix":
        return Matrix(self.ctx, zip(*self._rows) if self.nrows else [], self.nrows)

    T = property(transpose)

    def _same_field(self, other: "Matrix"):
        if other.ctx != self.ctx:
            raise FieldError("matrices over different fields")

    def vstack(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if other.ncols != self.ncols:
            raise ValueError(f"column mismatch: {self.ncols} vs {other.ncols}")
        return Matrix(self.ctx, self._rows + other._rows, self.ncols)

    def hstack(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if other.nrows != self.nrows:
            raise ValueError(f"row mismatch: {self.nrows} vs {other.nrows}")
        return Matrix(self.ctx, (a + b for a, b in zip(self._rows, other._rows)),
                      self.ncols + other.ncols)

    def select_rows(self, idx: Iterable[int]) -> "Matrix":
        return Matrix(self.ctx, (self._rows[i] for i in idx), self.ncols)

    def select_cols(self, idx: Sequence[int]) -> "Matrix":
        idx = list(idx)
        return Matrix(self.ctx, ([r[j] for j in idx] for r in self._rows), len(idx))

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._rows)

    def _use_kernel(self, work: int) -> bool:
        return self.ctx.m >= KERNEL_MIN_DEGREE and work >= KERNEL_MIN_WORK

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        return Matrix(self.ctx, ([x ^ y for x, y in zip(a, b)] for a, b in zip(self._rows, other._rows)),
                      self.ncols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.ncols != other.nrows:
            raise ValueError(f"inner dimension mismatch: {self.ncols} vs {other.nrows}")
        ctx = self.ctx
        brows = [[(c, v) for c, v in enumerate(r) if v] for r in other._rows]
        # multiplications the sparse path would do
        work = sum(len(brows[j]) for r in self._rows for j, a in enumerate(r) if a)
        size = self.nrows * self.ncols + other.nrows * other.ncols
        if self._use_kernel(work) and 20 * work >= size:
            W = _kernels.words_for(ctx.m)
            A = _kernels.ints_to_words((v for r in self._rows for v in r), W).reshape(self.nrows, self.ncols, W)
            B = _kernels.ints_to_words((v for r in other._rows for v in r), W).reshape(other.nrows, other.ncols, W)
            out = _kernels.matmul(A, B, ctx.m, np.array(ctx.reduction_exponents, dtype=np.int64))
            flat = _kernels.words_to_ints(out)
            C = other.ncols
            return Matrix(ctx, (flat[i * C:(i + 1) * C] for i in range(self.nrows)), C)
        out = []
        for r in self._rows:
            acc = [0] * other.ncols
            for j, a in enumerate(r):
                if a:
                    for c, v in brows[j]:
                        acc[c] ^= _clmul(a, v)
            out.append([ctx._reduce(v) for v in acc])
        return Matrix(ctx, out, other.ncols)

    def apply(self, vec: Sequence[int]) -> list[int]:
        """Matrix-vector product ``self @ vec``."""
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return [self.ctx.dot(r, vec) for r in self._rows]

    def left_apply(self, vec: Sequence[int]) -> list[int]:
        """Row-vector product ``vec @ self``."""
        if len(vec) != self.nrows:
            raise ValueError("vector length mismatch")
        row = Matrix(self.ctx, [list(vec)], self.nrows)
        return list((row @ self).rows[0])

    # -- elimination -------------------------------------------------------
    def row_basis(self):
        """``(basis rows, pivot columns, rank profile)``; see :func:`_py_row_basis`."""
        if not self.nrows:
            return [], [], []
        if self._use_kernel(min(self.nrows, self.ncols) * self.nrows * self.ncols):
            return _kernel_row_basis(self.ctx, self._rows, self.ncols)
        return _py_row_basis(self.ctx, self._rows)

    def rank_profile(self) -> list[int]:
        return self.row_basis()[2]

    def rank(self) -> int:
        prof = self.rank_profile()
        return prof[-1] if prof else 0

    def rref(self) -> tuple["Matrix", list[int]]:
        basis, pivots, _ = self.row_basis()
        order = sorted(range(len(pivots)), key=pivots.__getitem__)
        return Matrix(self.ctx, (basis[t] for t in order), self.ncols), [pivots[t] for t in order]

    def solve(self, b: Sequence[int] | "Matrix") -> list[int] | "Matrix":
        """Unique solution of ``self @ x = b``.

        ``b`` may be a vector or a matrix of right-hand sides.  Raises
        :class:`InconsistentSystemError` when no solution exists and
        :class:`UnderdeterminedSystemError` when it is not unique.
        """
        single = not isinstance(b, Matrix)
        B = Matrix(self.ctx, [[v] for v in b], 1) if single else b
        if single:
            for v in b:
                self.ctx.check(v)
        else:
            self._same_field(B)
        if B.nrows != self.nrows:
            raise ValueError(f"right-hand side has {B.nrows} rows, expected {self.nrows}")
        n = self.ncols
        red, pivots = self.hstack(B).rref()
        if any(p >= n for p in pivots):
            raise InconsistentSystemError("system is inconsistent")
        if len(pivots) < n:
            raise UnderdeterminedSystemError(f"rank {len(pivots)} < {n} unknowns")
        X = Matrix(self.ctx, (r[n:] for r in red.rows), B.ncols)
        return [r[0] for r in X.rows] if single else X

    def inverse(self) -> "Matrix":
        if self.nrows != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        return self.solve(Matrix.identity(self.ctx, self.nrows))


def rank(M: "Matrix | BitMatrix") -> int:
    return M.rank()


def solve(A: Matrix, b):
    return A.solve(b)


def rowspace_contained(A: "Matrix | BitMatrix", B: "Matrix | BitMatrix") -> bool:
    """True iff every row of ``A`` lies in the row space of ``B``."""
    if A.ncols != B.ncols:
        raise ValueError(f"column mismatch: {A.ncols} vs {B.ncols}")
    prof = B.vstack(A).rank_profile()
    if not prof:
        return True
    return prof[-1] == (prof[B.nrows - 1] if B.nrows else 0)


# ---------------------------------------------------------------------------
# 0-1 matrices over GF(2)
# ---------------------------------------------------------------------------

class BitMatrix:
    """Immutable GF(2) matrix; row ``i`` is an int with bit ``j`` = entry (i, j)."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, rows: Iterable[int], ncols: int):
        data = tuple(rows)
        limit = 1 << ncols
        for r in data:
            if not 0 <= r < limit:
                raise ValueError("row has bits beyond the column count")
        self.nrows = len(data)
        self.ncols = ncols
        self._rows = data

    @classmethod
    def from_lists(cls, rows: Iterable[Iterable[int]]) -> "BitMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls((sum((v & 1) << j for j, v in enumerate(r)) for r in rows), ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls((1 << i for i in range(n)), n)

    @property
    def shape(self):
        return self.nrows, self.ncols

    @property
    def rows(self) -> tuple[int, ...]:
        return self._rows

    def __getitem__(self, ij):
        i, j = ij
        return (self._rows[i] >> j) & 1

    def __eq__(self, other):
        return isinstance(other, BitMatrix) and other.shape == self.shape and other._rows == self._rows

    def __repr__(self):
        return f"BitMatrix({self.nrows}x{self.ncols})"

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self._rows]

    def to_ascii(self, sep: str = " ") -> str:
        return "\n".join(sep.join(str((r >> j) & 1) for j in range(self.ncols)) for r in self._rows)

    def row_weights(self) -> list[int]:
        return [r.bit_count() for r in self._rows]

    def col_weights(self) -> list[int]:
        return [sum((r >> j) & 1 for r in self._rows) for j in range(self.ncols)]

    def support(self, i: int) -> list[int]:
        r = self._rows[i]
        return [j for j in range(self.ncols) if (r >> j) & 1]

    def transpose(self) -> "BitMatrix":
        cols = [0] * self.ncols
        for i, r in enumerate(self._rows):
            while r:
                low = r & -r
                cols[low.bit_length() - 1] |= 1 << i
                r ^= low
        return BitMatrix(cols, self.nrows)

    T = property(transpose)

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        if other.ncols != self.ncols:
            raise ValueError(f"column mismatch: {self.ncols} vs {other.ncols}")
        return BitMatrix(self._rows + other._rows, self.ncols)

    def select_rows(self, idx: Iterable[int]) -> "BitMatrix":
        return BitMatrix((self._rows[i] for i in idx), self.ncols)

    def select_cols(self, idx: Sequence[int]) -> "BitMatrix":
        idx = list(idx)
        return BitMatrix((sum(((r >> j) & 1) << t for t, j in enumerate(idx)) for r in self._rows), len(idx))

    def rank_profile(self) -> list[int]:
        pivots: dict[int, int] = {}
        profile = []
        for r in self._rows:
            while r:
                lead = (r & -r).bit_length() - 1
                b = pivots.get(lead)
                if b is None:
                    pivots[lead] = r
                    break
                r ^= b
            profile.append(len(pivots))
        return profile

    def rank(self) -> int:
        prof = self.rank_profile()
        return prof[-1] if prof else 0

    def embed(self, ctx: FieldContext) -> Matrix:
        """The same 0-1 matrix with entries read in ``ctx``."""
        return Matrix(ctx, self.to_lists(), self.ncols)


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    """Rank of an integer matrix reduced modulo the prime ``p``."""
    A = np.array(rows, dtype=np.int64) % p
    if A.size == 0:
        return 0
    nrows, ncols = A.shape
    r = 0
    for c in range(ncols):
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        if others.size:
            A[others] = (A[others] - np.outer(A[others, c], A[r])) % p
        r += 1
        if r == nrows:
            break
    return r
