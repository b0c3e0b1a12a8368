"""Exact secrecy analysis of the secure MSR construction.

Two independent checks live here.

* The combinatorial one: the 0-1 *symbol matrix* ``P`` maps a helper's
  ``alpha`` stored symbols to everything it sends into the eavesdropped set.
  ``P^T`` is the incidence matrix of a sub-hypergraph of ``G(s, n)`` that
  splits into ``s^(n-l)`` copies of ``G(s, l)``, each of rank
  ``s^l - (s-1)^l``, whence ``rank P = s^(n-l) (s^l - (s-1)^l)``.

* The algebraic one: Eve's observation is ``e = m @ T`` with ``T`` the
  ``M x w`` product of the pre-coder, the generator and a 0-1 selection
  matrix.  For uniform randomness the file is perfectly hidden iff the
  file rows of ``T`` lie in the row space of the randomness rows, i.e.
  ``rank T == rank T_r``.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .finite_field import BitMatrix, Matrix, rank_mod_p
from .msr import SystemParams, class_position, class_representatives, digit
from .pipeline import SecureMSRCode


# ---------------------------------------------------------------------------
# symbol matrix

def _check_eavesdropped(p: SystemParams, E: Sequence[int]) -> tuple[int, ...]:
    E = tuple(sorted(set(E)))
    if len(E) >= p.k:
        raise ValueError(f"eavesdropper must see fewer than k={p.k} nodes, got {len(E)}")
    if len(E) != p.l:
        raise ValueError(f"eavesdropped set has {len(E)} nodes but l={p.l}")
    if any(not 1 <= i <= p.n for i in E):
        raise ValueError(f"eavesdropped nodes {E} out of range 1..{p.n}")
    return E


def canonical_order(p: SystemParams, E: Sequence[int]) -> dict[int, int]:
    """Node relabelling sending ``E`` onto ``{n-l+1, ..., n}``, order-preserving on both parts."""
    E = sorted(E)
    rest = [j for j in range(1, p.n + 1) if j not in E]
    return {j: t + 1 for t, j in enumerate(rest + E)}


def _permute_index(a: int, perm: dict[int, int], s: int, n: int) -> int:
    return sum(digit(a, i, s) * s ** (perm[i] - 1) for i in range(1, n + 1))


@dataclass(frozen=True)
class SymbolMatrix:
    params: SystemParams
    eavesdropped: tuple[int, ...]          # block order, i.e. descending
    bits: BitMatrix
    row_labels: tuple[tuple[int, int], ...]  # (failed node, class representative)

    @property
    def P(self) -> BitMatrix:
        return self.bits

    def canonical(self):
        """``(P_c, row_map, col_map)`` with ``P[r, c] == P_c[row_map[r], col_map[c]]``."""
        p = self.params
        perm = canonical_order(p, self.eavesdropped)
        canon = symbol_matrix(p, range(p.n - p.l + 1, p.n + 1))
        s, n, beta = p.s, p.n, p.beta
        col_map = tuple(_permute_index(a, perm, s, n) for a in range(p.alpha))
        row_map = []
        for i, b in self.row_labels:
            ci = perm[i]
            row_map.append((n - ci) * beta + class_position(col_map[b], ci, s))
        return canon, tuple(row_map), col_map

    def to_ascii(self) -> str:
        return self.bits.to_ascii()


def symbol_rows(s: int, n: int, E: Sequence[int]) -> tuple[BitMatrix, list[tuple[int, int]]]:
    """Bare 0-1 matrix for any node set ``E``, blocks in descending node order."""
    rows, labels = [], []
    for i in sorted(set(E), reverse=True):
        w = s ** (i - 1)
        for b in class_representatives(i, s, n):
            rows.append(sum(1 << (b + u * w) for u in range(s)))
            labels.append((i, b))
    return BitMatrix(rows, s ** n), labels


def symbol_matrix(p: SystemParams, E: Sequence[int]) -> SymbolMatrix:
    E = _check_eavesdropped(p, E)
    bits, labels = symbol_rows(p.s, p.n, E)
    return SymbolMatrix(p, tuple(sorted(E, reverse=True)), bits, tuple(labels))


# ---------------------------------------------------------------------------
# hypergraphs

@dataclass(frozen=True)
class Hypergraph:
    """Vertex-by-edge 0-1 incidence matrix."""

    incidence: BitMatrix

    @property
    def num_vertices(self) -> int:
        return self.incidence.nrows

    @property
    def num_edges(self) -> int:
        return self.incidence.ncols

    @classmethod
    def from_symbol_matrix(cls, sm: SymbolMatrix | BitMatrix) -> "Hypergraph":
        bits = sm.bits if isinstance(sm, SymbolMatrix) else sm
        return cls(bits.T)

    def edge_vertices(self) -> list[list[int]]:
        return [self.incidence.T.support(e) for e in range(self.num_edges)]


def class_hypergraph(s: int, n: int) -> Hypergraph:
    """The regular hypergraph on ``s^n`` vertices; edge ``(i, b)`` joins the class of ``b`` along digit ``i``."""
    if s < 2 or n < 1:
        raise ValueError("need s >= 2 and n >= 1")
    edges = []
    for i in range(n, 0, -1):
        w = s ** (i - 1)
        for b in class_representatives(i, s, n):
            edges.append(sum(1 << (b + u * w) for u in range(s)))
    return Hypergraph(BitMatrix(edges, s ** n).T)


@dataclass(frozen=True)
class Component:
    vertices: tuple[int, ...]
    edges: tuple[int, ...]


def connected_components(h: Hypergraph) -> list[Component]:
    parent = list(range(h.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edge_sets = h.edge_vertices()
    for vs in edge_sets:
        for v in vs[1:]:
            ra, rb = find(vs[0]), find(v)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for v in range(h.num_vertices):
        groups.setdefault(find(v), []).append(v)
    edges_of: dict[int, list[int]] = {}
    for e, vs in enumerate(edge_sets):
        if vs:
            edges_of.setdefault(find(vs[0]), []).append(e)
    return [Component(tuple(vs), tuple(edges_of.get(root, ()))) for root, vs in sorted(groups.items())]


# ---------------------------------------------------------------------------
# product of single-parity-check codes

def product_code_parity(s: int, l: int) -> BitMatrix:
    """Parity checks of the l-fold product of the length-s parity code.

    Row ``(i, r)``, ``i`` from ``l`` down to 1, checks the line of cells
    that agree with ``r`` off coordinate ``i``.
    """
    if s < 2 or l < 1:
        raise ValueError("need s >= 2 and l >= 1")
    cells = list(itertools.product(range(s), repeat=l))  # (v_l, ..., v_1), lexicographic
    rows = []
    for i in range(l, 0, -1):
        pos = l - i
        for r in cells:
            if r[pos] != 0:
                continue
            key = r[:pos] + r[pos + 1:]
            rows.append(sum(1 << t for t, c in enumerate(cells) if c[:pos] + c[pos + 1:] == key))
    return BitMatrix(rows, s ** l)


def single_parity_generator(s: int) -> np.ndarray:
    return np.hstack([np.eye(s - 1, dtype=np.int64), -np.ones((s - 1, 1), dtype=np.int64)])


def product_code_generator(s: int, l: int) -> np.ndarray:
    """Integer Kronecker power of the ``[I | -1]`` generator (reduce mod p to use)."""
    G = np.ones((1, 1), dtype=np.int64)
    for _ in range(l):
        G = np.kron(G, single_parity_generator(s))
    return G


@dataclass(frozen=True)
class ProductCodeCheck:
    s: int
    l: int
    prime: int
    parity_equals_incidence: bool
    rank_H: int
    rank_G: int
    orthogonal: bool

    @property
    def expected_rank_H(self) -> int:
        return self.s ** self.l - (self.s - 1) ** self.l

    @property
    def expected_rank_G(self) -> int:
        return (self.s - 1) ** self.l

    @property
    def ok(self) -> bool:
        return (self.parity_equals_incidence and self.orthogonal
                and self.rank_H == self.expected_rank_H and self.rank_G == self.expected_rank_G)


def check_product_code(s: int, l: int, prime: int = 2) -> ProductCodeCheck:
    H = product_code_parity(s, l)
    same = H == class_hypergraph(s, l).incidence.T
    Hint = np.array(H.to_lists(), dtype=np.int64)
    G = product_code_generator(s, l)
    return ProductCodeCheck(
        s, l, prime, same,
        rank_mod_p(Hint, prime), rank_mod_p(G, prime),
        not np.any((G @ Hint.T) % prime),
    )


# ---------------------------------------------------------------------------
# rank of the symbol matrix

def rank_formula(s: int, n: int, l: int) -> int:
    return s ** (n - l) * (s ** l - (s - 1) ** l)


@dataclass(frozen=True)
class SymbolRank:
    direct: int
    formula: int
    component_ranks: tuple[int, ...]
    component_sizes: tuple[tuple[int, int], ...]   # (vertices, edges)

    @property
    def decomposed(self) -> int:
        return sum(self.component_ranks)

    @property
    def agrees(self) -> bool:
        return self.direct == self.formula == self.decomposed


def symbol_rank(p: SystemParams, E: Sequence[int]) -> SymbolRank:
    """Rank of ``P`` directly, and as a sum over hypergraph components."""
    if p.s < 2:
        raise ValueError("rank formula needs s >= 2")
    sm = symbol_matrix(p, E)
    direct = sm.bits.rank()
    canon, _, _ = sm.canonical()
    PT = canon.bits.T
    comps = connected_components(Hypergraph(PT))
    ranks = tuple(PT.select_rows(c.vertices).select_cols(c.edges).rank() for c in comps)
    sizes = tuple((len(c.vertices), len(c.edges)) for c in comps)
    return SymbolRank(direct, rank_formula(p.s, p.n, p.l), ranks, sizes)


# ---------------------------------------------------------------------------
# eavesdropper observation

@dataclass(frozen=True)
class EveMatrix:
    """Eve's view ``e = m @ T``; the first ``file_rows`` rows of ``T`` act on the file."""

    params: SystemParams
    eavesdropped: tuple[int, ...]
    T: Matrix
    file_rows: int
    labels: tuple[tuple, ...]
    # ``T = precoder @ observation`` with ``observation`` acting on the pre-coded
    # vector; kept when the precoder is known to be invertible
    observation: Matrix | None = None

    @property
    def width(self) -> int:
        return self.T.ncols

    @property
    def file_part(self) -> Matrix:
        return self.T.select_rows(range(self.file_rows))

    @property
    def randomness_part(self) -> Matrix:
        return self.T.select_rows(range(self.file_rows, self.T.nrows))

    def select(self, labels: Sequence[tuple]) -> "EveMatrix":
        """Restriction to the columns carrying ``labels`` (a sub-view)."""
        where = {lab: t for t, lab in enumerate(self.labels)}
        missing = [lab for lab in labels if lab not in where]
        if missing:
            raise KeyError(f"not part of the worst-case view: {missing[:3]}")
        idx = [where[lab] for lab in labels]
        obs = None if self.observation is None else self.observation.select_cols(idx)
        return EveMatrix(self.params, self.eavesdropped, self.T.select_cols(idx),
                         self.file_rows, tuple(labels), obs)


def eve_labels(p: SystemParams, E: Sequence[int]) -> list[tuple]:
    """Worst-case column labels: stored symbols of E, then every download into E from outside."""
    E = sorted(E)
    labels: list[tuple] = [("stored", i, a) for i in E for a in range(p.alpha)]
    for i in E:
        reps = class_representatives(i, p.s, p.n)
        for j in range(1, p.n + 1):
            if j not in E:
                labels.extend(("download", j, i, a) for a in reps)
    return labels


def selection_matrix(p: SystemParams, labels: Sequence[tuple]) -> BitMatrix:
    """``n alpha x w`` 0-1 matrix mapping a codeword vector to the labelled symbols."""
    alpha, s = p.alpha, p.s
    cols = []
    for lab in labels:
        if lab[0] == "stored":
            _, i, a = lab
            cols.append(1 << ((i - 1) * alpha + a))
        else:
            _, j, i, a = lab
            w = s ** (i - 1)
            cols.append(sum(1 << ((j - 1) * alpha + a + u * w) for u in range(s)))
    return BitMatrix(cols, p.n * alpha).T


def eve_matrix(code: SecureMSRCode, E: Sequence[int], *, precoded: bool = True,
               generator: Matrix | None = None, labels: Sequence[tuple] | None = None) -> EveMatrix:
    """Worst-case view of ``E``, or the sub-view carrying ``labels``."""
    p = code.params
    E = _check_eavesdropped(p, E)
    labels = eve_labels(p, E) if labels is None else list(labels)
    if not labels:
        empty = Matrix(code.ctx, [[] for _ in range(p.M)], 0)
        return EveMatrix(p, E, empty, p.secure_size, (), empty)
    G = code.msr.generator_matrix() if generator is None else generator
    Q = selection_matrix(p, labels).embed(code.ctx)
    X = G @ Q
    T = code.moore @ X if precoded else X
    return EveMatrix(p, E, T, p.secure_size, tuple(labels), X)


@dataclass(frozen=True)
class SecrecyCertificate:
    rank_T: int
    rank_Er: int
    R: int
    secret: bool
    H_e_le_H_r: bool
    r_recoverable: bool
    compressed_columns: int = field(default=0, compare=False)

    def as_dict(self) -> dict:
        return {
            "rank_T": self.rank_T,
            "rank_Er": self.rank_Er,
            "R": self.R,
            "secret": self.secret,
            "proof_route": {"H_e_le_H_r": self.H_e_le_H_r, "r_recoverable": self.r_recoverable},
        }

    @property
    def all_hold(self) -> bool:
        return self.secret and self.H_e_le_H_r and self.r_recoverable


def verify_secrecy(ev: EveMatrix, *, compress: bool = True) -> SecrecyCertificate:
    """Certify ``I(file; e) = 0`` as ``rank T == rank T_r``.

    With ``compress`` the check runs on a column basis ``S`` of ``T``, found
    on the sparse ``observation`` matrix when one is attached: file rows
    lie in the span of the randomness rows iff that holds on ``T[:, S]``.
    """
    T = ev.T
    R = T.nrows - ev.file_rows
    if T.ncols == 0:
        return SecrecyCertificate(0, 0, R, True, True, R == 0, 0)
    order = list(range(ev.file_rows, T.nrows)) + list(range(ev.file_rows))
    cols = list(range(T.ncols))
    if compress:
        src = ev.observation if ev.observation is not None else T
        _, pivots, _ = src.row_basis()
        cols = sorted(pivots)
    prof = T.select_cols(cols).select_rows(order).rank_profile()
    rank_T, rank_Er = prof[-1], (prof[R - 1] if R else 0)
    if len(cols) < T.ncols and rank_T != len(cols):
        # precoder turned out singular on these columns; do it uncompressed
        return verify_secrecy(ev, compress=False)
    secret = rank_T == rank_Er
    if rank_Er < R and len(cols) < T.ncols:
        rank_Er = ev.randomness_part.rank()
    return SecrecyCertificate(rank_T, rank_Er, R, secret, rank_T <= R, rank_Er == R, len(cols))


# ---------------------------------------------------------------------------
# reports

def eavesdropper_sets(p: SystemParams) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(1, p.n + 1), p.l))


def analyze(code: SecureMSRCode, E: Sequence[int], generator: Matrix | None = None,
            with_secrecy: bool = True) -> dict:
    p = code.params
    t0 = time.perf_counter()
    E = _check_eavesdropped(p, E)
    report: dict = {"params": p.as_dict(), "E": list(E)}
    if p.l:
        th = symbol_rank(p, E)
        report.update({
            "rank_P": th.direct,
            "formula": th.formula,
            "rank_P_decomposed": th.decomposed,
            "components": {"count": len(th.component_ranks),
                           "sizes": sorted(set(th.component_sizes))},
        })
    else:
        f0 = rank_formula(p.s, p.n, 0)
        report.update({"rank_P": 0, "formula": f0, "rank_P_decomposed": 0,
                       "components": {"count": 0, "sizes": []}})
    if with_secrecy:
        report["secrecy"] = verify_secrecy(eve_matrix(code, E, generator=generator)).as_dict()
    report["wall_time_ms"] = round((time.perf_counter() - t0) * 1000.0, 3)
    return report


def capacity_fraction(p: SystemParams):
    """``(k - l)(1 - 1/s)^l alpha`` evaluated with exact rationals."""
    from fractions import Fraction
    return (p.k - p.l) * (1 - Fraction(1, p.s)) ** p.l * p.alpha

