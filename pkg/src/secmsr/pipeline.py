"""Secure storage: pad the file with randomness, pre-code, MSR-encode.

The message ``m = (file, r)`` has ``M = k alpha`` symbols, ``r`` being
``R = M - M_s`` uniform field symbols.  ``f = m @ moore`` fills node 1
first, then node 2, and so on, and the MSR encoder adds the parity nodes.
All symbols live in ``GF(2^M)`` so that ``M`` points independent over
GF(2) exist.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .finite_field import FieldContext
from .gabidulin import EvaluationSet, depcode, moore_inverse, moore_matrix, precode
from .msr import Codeword, MSRArrayCode, NodeContent, SystemParams

RNG_NAME = "python-mt19937"
# seeds below zero select the all-zero randomness stream (tests only)
ZERO_RANDOMNESS_SEED = -1


def secrecy_capacity(p: SystemParams) -> int:
    return (p.k - p.l) * (p.s - 1) ** p.l * p.s ** (p.n - p.l)


def draw_randomness(ctx: FieldContext, count: int, seed: int) -> list[int]:
    if seed < 0:
        return [0] * count
    rng = random.Random(seed)
    return [ctx.random(rng) for _ in range(count)]


@dataclass(frozen=True)
class SecureFile:
    file: tuple[int, ...]
    seed: int

    def to_json(self, ctx: FieldContext) -> str:
        return json.dumps({"file": [ctx.to_hex(v) for v in self.file], "seed": self.seed}, indent=1)

    @classmethod
    def from_json(cls, text: str, ctx: FieldContext) -> "SecureFile":
        doc = json.loads(text)
        if not isinstance(doc, dict) or "file" not in doc:
            raise ValueError("secure file must be an object with a 'file' list")
        return cls(tuple(ctx.from_hex(h) for h in doc["file"]), int(doc.get("seed", 0)))


class SecureMSRCode:
    def __init__(self, params: SystemParams, modulus: int | None = None,
                 lam: Sequence[Sequence[int]] | None = None, *, validate: bool = True):
        self.params = params
        self.ctx = FieldContext(params.M, modulus)
        self.points = EvaluationSet.default(self.ctx, params.M)
        self.msr = MSRArrayCode(params, self.ctx, lam, validate=validate)

    @cached_property
    def moore(self):
        return moore_matrix(self.points)

    @cached_property
    def moore_inv(self):
        return moore_inverse(self.points)

    def describe(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "m": self.ctx.m,
            "modulus_hex": self.ctx.modulus_hex,
            "rng": RNG_NAME,
        }

    def encode_message(self, file: Sequence[int], randomness: Sequence[int]) -> Codeword:
        """Encode with explicit randomness (the linear map behind :meth:`store`)."""
        p = self.params
        if len(file) != p.secure_size:
            raise ValueError(f"file must have M_s = {p.secure_size} symbols, got {len(file)}")
        if len(randomness) != p.R:
            raise ValueError(f"randomness must have R = {p.R} symbols, got {len(randomness)}")
        f = precode(list(file) + list(randomness), self.points, self.moore)
        return self.msr.encode_vector(f)

    def store(self, file: Sequence[int], seed: int) -> Codeword:
        if len(file) != self.params.secure_size:
            raise ValueError(f"file must have M_s = {self.params.secure_size} symbols, got {len(file)}")
        return self.encode_message(file, draw_randomness(self.ctx, self.params.R, seed))

    def recover_message(self, nodes: Iterable[NodeContent]) -> list[int]:
        cw = self.msr.collect(nodes)
        f = [v for j in range(1, self.params.k + 1) for v in cw.node(j).symbols]
        return depcode(f, self.points, inverse=self.moore_inv)

    def retrieve(self, nodes: Iterable[NodeContent]) -> list[int]:
        return self.recover_message(nodes)[:self.params.secure_size]
