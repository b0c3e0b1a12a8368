"""The d-optimal-repair MSR array code for any ``k + 1 <= d <= n - 1``.

Each node stores ``alpha = s^n`` symbols, ``s = d - k + 1``, indexed by the
integers ``a in [0, alpha)`` read as s-ary digit strings ``(a_n, ..., a_1)``
with ``a_1`` least significant.  Node ``i`` is tagged with ``s`` distinct
field elements ``lam[i][u]`` and the parity checks are, for every index
``a`` and every ``t < n - k``::

    sum_j lam[j][a_j]^t * c[j][a] == 0

so every index is an independent ``(n, k)`` Reed-Solomon-like code whose
evaluation point for node ``j`` is selected by digit ``a_j``.  To repair
node ``i`` a helper ``j`` sends, for each class of indices differing only
in digit ``i``, the sum of its ``s`` symbols in that class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .finite_field import FieldContext, FieldError, Matrix, SingularSystemError


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class SystemParams:
    n: int
    k: int
    d: int
    l: int = 0

    def __post_init__(self):
        n, k, d, l = self.n, self.k, self.d, self.l
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (n, k, d, l)):
            raise ParameterError("n, k, d, l must be integers")
        if not 2 <= k:
            raise ParameterError(f"need k >= 2, got k={k}")
        if not k < n:
            raise ParameterError(f"need k < n, got k={k}, n={n}")
        if not k + 1 <= d:
            raise ParameterError(f"need d >= k+1, got d={d}, k={k}")
        if not d <= n - 1:
            raise ParameterError(f"need d <= n-1, got d={d}, n={n}")
        if not 0 <= l < k:
            raise ParameterError(f"need 0 <= l < k, got l={l}, k={k}")

    @property
    def s(self) -> int:
        return self.d - self.k + 1

    @property
    def alpha(self) -> int:
        return self.s ** self.n

    @property
    def beta(self) -> int:
        return self.s ** (self.n - 1)

    @property
    def M(self) -> int:
        return self.k * self.alpha

    @property
    def secure_size(self) -> int:
        """``(k - l)(1 - 1/s)^l alpha`` in integer form."""
        s, l = self.s, self.l
        return (self.k - l) * (s - 1) ** l * s ** (self.n - l)

    @property
    def R(self) -> int:
        return self.M - self.secure_size

    def as_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "d": self.d, "l": self.l}

    def sheet(self) -> dict:
        return {
            **self.as_dict(),
            "s": self.s,
            "alpha": self.alpha,
            "beta": self.beta,
            "M": self.M,
            "M_s": self.secure_size,
            "R": self.R,
        }


# ---------------------------------------------------------------------------
# s-ary index arithmetic (positions are 1-based, position 1 least significant)

def digit(a: int, i: int, s: int) -> int:
    return (a // s ** (i - 1)) % s


def digits(a: int, s: int, n: int) -> tuple[int, ...]:
    """``(a_n, ..., a_1)``."""
    return tuple(digit(a, i, s) for i in range(n, 0, -1))


def substitute(a: int, i: int, u: int, s: int) -> int:
    """The index ``a(i, u)``: digit ``i`` of ``a`` replaced by ``u``."""
    w = s ** (i - 1)
    return a + (u - (a // w) % s) * w


def class_representatives(i: int, s: int, n: int) -> list[int]:
    """Indices with digit ``i`` equal to zero, ascending."""
    w = s ** (i - 1)
    return [a for a in range(s ** n) if (a // w) % s == 0]


def class_position(a: int, i: int, s: int) -> int:
    """Rank of the class of ``a`` (w.r.t. digit ``i``) among all classes."""
    w = s ** (i - 1)
    return a % w + (a // (w * s)) * w


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NodeContent:
    index: int
    symbols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))


@dataclass(frozen=True)
class RepairDownload:
    helper: int
    failed: int
    mu: tuple[int, ...]


@dataclass(frozen=True)
class Codeword:
    params: SystemParams
    ctx: FieldContext
    nodes: tuple[NodeContent, ...]

    def node(self, i: int) -> NodeContent:
        return self.nodes[i - 1]

    def vector(self) -> list[int]:
        return [v for nd in self.nodes for v in nd.symbols]

    def to_json(self) -> str:
        p = self.params
        doc = {
            "params": {"n": p.n, "k": p.k, "d": p.d, "l": p.l,
                       "m": self.ctx.m, "modulus_hex": self.ctx.modulus_hex},
            "nodes": [[self.ctx.to_hex(v) for v in nd.symbols] for nd in self.nodes],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Codeword":
        doc = json.loads(text)
        try:
            pp = doc["params"]
            params = SystemParams(pp["n"], pp["k"], pp["d"], pp["l"])
            ctx = FieldContext(pp["m"], int(pp["modulus_hex"], 16))
            nodes = doc["nodes"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed codeword file: {exc}") from None
        if len(nodes) != params.n or any(len(nd) != params.alpha for nd in nodes):
            raise ValueError("codeword file does not match its parameters")
        return cls(params, ctx, tuple(
            NodeContent(i + 1, tuple(ctx.from_hex(h) for h in nd)) for i, nd in enumerate(nodes)))


def lambda_assign(p: SystemParams, ctx: FieldContext) -> tuple[tuple[int, ...], ...]:
    """``lam[i-1][u]`` is the element whose bits spell ``(i-1)*s + u``."""
    s = p.s
    if ctx.order < s * p.n:
        raise FieldError(f"GF(2^{ctx.m}) has fewer than s*n = {s * p.n} elements")
    return tuple(tuple((i - 1) * s + u for u in range(s)) for i in range(1, p.n + 1))


def repair_download(node: NodeContent, failed: int, p: SystemParams) -> RepairDownload:
    """The ``beta`` class sums helper ``node`` sends towards ``failed``."""
    if node.index == failed:
        raise ValueError(f"node {failed} cannot help repair itself")
    if len(node.symbols) != p.alpha:
        raise ValueError("node content has the wrong length")
    s, c = p.s, node.symbols
    w = s ** (failed - 1)
    mu = []
    for a in class_representatives(failed, s, p.n):
        acc = 0
        for u in range(s):
            acc ^= c[a + u * w]
        mu.append(acc)
    return RepairDownload(node.index, failed, tuple(mu))


class MSRArrayCode:
    """Encoder, data collector and repair for one ``(n, k, d)`` instance."""

    def __init__(self, params: SystemParams, ctx: FieldContext,
                 lam: Sequence[Sequence[int]] | None = None, *, validate: bool = True):
        self.params = params
        self.ctx = ctx
        self.lam = lambda_assign(params, ctx) if lam is None else tuple(tuple(r) for r in lam)
        if len(self.lam) != params.n or any(len(r) != params.s for r in self.lam):
            raise ValueError("lambda table must be n x s")
        if validate and len({v for r in self.lam for v in r}) != params.s * params.n:
            raise FieldError("lambda values must be distinct")
        r = params.n - params.k
        # lam_pow[i-1][u][t] = lam[i-1][u]^t
        self._pow = tuple(
            tuple(tuple(ctx.pow(v, t) for t in range(r)) for v in row) for row in self.lam)

    @property
    def redundancy(self) -> int:
        return self.params.n - self.params.k

    def _col(self, j: int, a: int) -> tuple[int, ...]:
        """Column of the per-index check matrix for node ``j``."""
        return self._pow[j - 1][digit(a, j, self.params.s)]

    def _vandermonde_inverse(self, cols: Sequence[Sequence[int]]) -> Matrix:
        V = Matrix(self.ctx, zip(*cols), len(cols))
        try:
            return V.inverse()
        except SingularSystemError as exc:
            raise SingularSystemError(f"repair/decoding system is singular: {exc}") from None

    # -- structure -----------------------------------------------------------
    def parity_check_matrix(self) -> Matrix:
        p = self.params
        alpha, n = p.alpha, p.n
        rows = []
        for t in range(self.redundancy):
            for a in range(alpha):
                row = [0] * (n * alpha)
                for j in range(1, n + 1):
                    row[(j - 1) * alpha + a] = self._col(j, a)[t]
                rows.append(row)
        return Matrix(self.ctx, rows, n * alpha)

    def parity_coefficients(self, a: int, _cache: dict | None = None) -> Matrix:
        """``C`` with ``c_parity[a] = C @ c_message[a]`` at index ``a``."""
        p = self.params
        key = tuple(digit(a, j, p.s) for j in range(p.k + 1, p.n + 1))
        inv = None if _cache is None else _cache.get(key)
        if inv is None:
            inv = self._vandermonde_inverse([self._col(j, a) for j in range(p.k + 1, p.n + 1)])
            if _cache is not None:
                _cache[key] = inv
        V_msg = Matrix(self.ctx, zip(*[self._col(j, a) for j in range(1, p.k + 1)]), p.k)
        return inv @ V_msg

    def generator_matrix(self) -> Matrix:
        """Systematic ``k alpha x n alpha`` generator with ``G H^T = 0``."""
        p = self.params
        alpha = p.alpha
        rows = [[0] * (p.n * alpha) for _ in range(p.M)]
        cache: dict = {}
        for a in range(alpha):
            C = self.parity_coefficients(a, cache)
            for j in range(p.k):
                r = rows[j * alpha + a]
                r[j * alpha + a] = 1
                for q in range(self.redundancy):
                    r[(p.k + q) * alpha + a] = C[q, j]
        return Matrix(self.ctx, rows, p.n * alpha)

    # -- encode / decode -------------------------------------------------------
    def encode(self, message: Sequence[Sequence[int]] | Sequence[NodeContent]) -> Codeword:
        p = self.params
        data = [m.symbols if isinstance(m, NodeContent) else tuple(m) for m in message]
        if len(data) != p.k:
            raise ValueError(f"need {p.k} message nodes, got {len(data)}")
        for sym in data:
            if len(sym) != p.alpha:
                raise ValueError(f"message node has {len(sym)} symbols, expected {p.alpha}")
            for v in sym:
                self.ctx.check(v)
        parity = [[0] * p.alpha for _ in range(self.redundancy)]
        cache: dict = {}
        for a in range(p.alpha):
            msg = [sym[a] for sym in data]
            if not any(msg):
                continue
            for q, v in enumerate(self.parity_coefficients(a, cache).apply(msg)):
                parity[q][a] = v
        nodes = [NodeContent(j + 1, data[j]) for j in range(p.k)]
        nodes += [NodeContent(p.k + q + 1, tuple(parity[q])) for q in range(self.redundancy)]
        return Codeword(p, self.ctx, tuple(nodes))

    def encode_vector(self, f: Sequence[int]) -> Codeword:
        """Encode ``f`` of length ``k alpha``, node 1 filled first."""
        alpha = self.params.alpha
        if len(f) != self.params.M:
            raise ValueError(f"need {self.params.M} symbols, got {len(f)}")
        return self.encode([f[j * alpha:(j + 1) * alpha] for j in range(self.params.k)])

    def check_parity(self, cw: Codeword) -> bool:
        p = self.params
        ctx = self.ctx
        for a in range(p.alpha):
            for t in range(self.redundancy):
                acc = 0
                for j in range(1, p.n + 1):
                    acc ^= ctx.mul(self._col(j, a)[t], cw.node(j).symbols[a])
                if acc:
                    return False
        return True

    def collect(self, available: Iterable[NodeContent]) -> Codeword:
        """Rebuild all ``n`` nodes from any ``k`` of them."""
        p = self.params
        have: dict[int, NodeContent] = {}
        for nd in available:
            if not 1 <= nd.index <= p.n:
                raise ValueError(f"node index {nd.index} out of range")
            if len(nd.symbols) != p.alpha:
                raise ValueError(f"node {nd.index} has the wrong length")
            have.setdefault(nd.index, nd)
        if len(have) < p.k:
            raise ValueError(f"need {p.k} distinct nodes, got {len(have)}")
        known = sorted(have)[:p.k]
        lost = [j for j in range(1, p.n + 1) if j not in known]
        out = {j: list(have[j].symbols) for j in known}
        for j in lost:
            out[j] = [0] * p.alpha
        ctx = self.ctx
        cache: dict = {}
        for a in range(p.alpha):
            vals = [have[j].symbols[a] for j in known]
            if not any(vals):
                continue
            rhs = [0] * self.redundancy
            for j, v in zip(known, vals):
                if v:
                    for t, lp in enumerate(self._col(j, a)):
                        rhs[t] ^= ctx.mul(lp, v)
            key = tuple(digit(a, j, p.s) for j in lost)
            inv = cache.get(key)
            if inv is None:
                inv = cache[key] = self._vandermonde_inverse([self._col(j, a) for j in lost])
            for j, v in zip(lost, inv.apply(rhs)):
                out[j][a] = v
        return Codeword(p, ctx, tuple(NodeContent(j, tuple(out[j])) for j in range(1, p.n + 1)))

    # -- repair ----------------------------------------------------------------
    def repair_download(self, node: NodeContent, failed: int) -> RepairDownload:
        return repair_download(node, failed, self.params)

    def repair(self, failed: int, downloads: Sequence[RepairDownload]) -> NodeContent:
        """Exact repair of ``failed`` from ``d`` helpers' downloads.

        Summing the parity checks over a repair class leaves the ``s``
        symbols of the failed node, the observed class sums of the helpers
        and the unobserved class sums of the ``n - 1 - d`` other nodes:
        ``n - k`` unknowns in ``n - k`` Vandermonde equations.
        """
        p = self.params
        s, ctx = p.s, self.ctx
        if not 1 <= failed <= p.n:
            raise ValueError(f"node index {failed} out of range")
        helpers = [dl.helper for dl in downloads]
        if len(helpers) != p.d:
            raise ValueError(f"repair needs exactly d={p.d} helpers, got {len(helpers)}")
        if len(set(helpers)) != len(helpers):
            raise ValueError(f"duplicate helpers in {sorted(helpers)}")
        for dl in downloads:
            if dl.failed != failed or dl.helper == failed or not 1 <= dl.helper <= p.n:
                raise ValueError(f"download from {dl.helper} is not for node {failed}")
            if len(dl.mu) != p.beta:
                raise ValueError(f"download from {dl.helper} carries {len(dl.mu)} symbols, expected {p.beta}")
        absent = [j for j in range(1, p.n + 1) if j != failed and j not in helpers]
        own = [self._pow[failed - 1][u] for u in range(s)]
        w = s ** (failed - 1)
        out = [0] * p.alpha
        cache: dict = {}
        for pos, a in enumerate(class_representatives(failed, s, p.n)):
            rhs = [0] * self.redundancy
            for dl in downloads:
                v = dl.mu[pos]
                if v:
                    for t, lp in enumerate(self._col(dl.helper, a)):
                        rhs[t] ^= ctx.mul(lp, v)
            if not any(rhs):
                continue
            key = tuple(digit(a, j, s) for j in absent)
            inv = cache.get(key)
            if inv is None:
                inv = cache[key] = self._vandermonde_inverse(own + [self._col(j, a) for j in absent])
            sol = inv.apply(rhs)
            for u in range(s):
                out[a + u * w] = sol[u]
        return NodeContent(failed, tuple(out))


def random_message(params: SystemParams, ctx: FieldContext, rng) -> list[list[int]]:
    return [[ctx.random(rng) for _ in range(params.alpha)] for _ in range(params.k)]


def helper_subsets(params: SystemParams, failed: int):
    others = [j for j in range(1, params.n + 1) if j != failed]
    return combinations(others, params.d)


__all__ = [
    "Codeword", "NodeContent", "ParameterError", "RepairDownload", "SystemParams",
    "MSRArrayCode", "class_position", "class_representatives", "digit", "digits",
    "helper_subsets", "lambda_assign", "random_message", "repair_download", "substitute",
]
