"""Staged fail-and-repair lifecycle with a passive eavesdropper.

Each stage fails one node, picks ``d`` helpers (explicitly or by policy),
repairs the node from their downloads and puts it back.  Eve keeps
everything stored on her nodes and every download entering them from
outside.  At the end the run checks that repairs were exact, that
helpers always sent the same symbols to the same failed node, and that
Eve's realized view is a column subset of the worst case.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .finite_field import Matrix
from .msr import NodeContent, SystemParams, class_representatives
from .pipeline import SecureMSRCode, draw_randomness
from .secrecy import EveMatrix, eve_labels, eve_matrix, verify_secrecy

POLICIES = ("random", "round-robin")


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Stage:
    fail: int
    helpers: tuple[int, ...] | None = None
    policy: str | None = None

    def as_dict(self) -> dict:
        return {"fail": self.fail, "helpers": list(self.helpers)} if self.helpers is not None \
            else {"fail": self.fail, "policy": self.policy}


@dataclass(frozen=True)
class Scenario:
    params: SystemParams
    E: tuple[int, ...]
    seed: int = 0
    stages: tuple[Stage, ...] = ()
    payload: tuple[int, ...] | None = None

    def validate(self):
        p = self.params
        if len(set(self.E)) != len(self.E) or any(not 1 <= i <= p.n for i in self.E):
            raise ScenarioError(f"bad eavesdropped set {list(self.E)}")
        if len(self.E) != p.l:
            raise ScenarioError(f"eavesdropped set has {len(self.E)} nodes but l={p.l}")
        for t, st in enumerate(self.stages):
            if not 1 <= st.fail <= p.n:
                raise ScenarioError(f"stage {t}: failed node {st.fail} out of range")
            if st.helpers is None:
                if st.policy not in POLICIES:
                    raise ScenarioError(f"stage {t}: unknown helper policy {st.policy!r}")
                continue
            hs = st.helpers
            if st.fail in hs:
                raise ScenarioError(f"stage {t}: failed node {st.fail} listed as its own helper")
            if len(set(hs)) != len(hs) or len(hs) != p.d:
                raise ScenarioError(f"stage {t}: need {p.d} distinct helpers, got {list(hs)}")
            if any(not 1 <= j <= p.n for j in hs):
                raise ScenarioError(f"stage {t}: helper out of range in {list(hs)}")

    @classmethod
    def from_dict(cls, doc: dict) -> "Scenario":
        try:
            pp = doc["params"]
            params = SystemParams(pp["n"], pp["k"], pp["d"], pp.get("l", 0))
            stages = []
            for st in doc.get("stages", []):
                if "helpers" in st:
                    stages.append(Stage(int(st["fail"]), tuple(int(j) for j in st["helpers"])))
                else:
                    stages.append(Stage(int(st["fail"]), policy=st.get("policy", "round-robin")))
            scn = cls(params, tuple(int(i) for i in doc.get("E", [])), int(doc.get("seed", 0)),
                      tuple(stages), None)
        except (KeyError, TypeError, AttributeError) as exc:
            raise ScenarioError(f"malformed scenario: {exc}") from None
        if doc.get("payload") is not None:
            scn = Scenario(scn.params, scn.E, scn.seed, scn.stages,
                           tuple(int(h, 16) for h in doc["payload"]))
        scn.validate()
        return scn

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        doc = {"params": {"n": self.params.n, "k": self.params.k, "d": self.params.d, "l": self.params.l},
               "E": list(self.E), "seed": self.seed, "stages": [st.as_dict() for st in self.stages]}
        if self.payload is not None:
            doc["payload"] = [format(v, "x") for v in self.payload]
        return doc


@dataclass
class EveLedger:
    E: tuple[int, ...]
    stored: dict[int, tuple[int, ...]] = field(default_factory=dict)
    downloads: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)
    provenance: dict[tuple[int, int], list[int]] = field(default_factory=dict)

    def see_node(self, nd: NodeContent):
        if nd.index in self.E:
            self.stored.setdefault(nd.index, nd.symbols)

    def see_download(self, stage: int, helper: int, failed: int, mu: tuple[int, ...]):
        if failed not in self.E or helper in self.E:
            return
        key = (helper, failed)
        self.downloads.setdefault(key, mu)
        self.provenance.setdefault(key, []).append(stage)

    def labels(self, p: SystemParams) -> list[tuple]:
        out: list[tuple] = [("stored", i, a) for i in sorted(self.stored) for a in range(p.alpha)]
        for j, i in sorted(self.downloads, key=lambda ji: (ji[1], ji[0])):
            out.extend(("download", j, i, a) for a in class_representatives(i, p.s, p.n))
        return out

    def values(self) -> list[int]:
        out = [v for i in sorted(self.stored) for v in self.stored[i]]
        for key in sorted(self.downloads, key=lambda ji: (ji[1], ji[0])):
            out.extend(self.downloads[key])
        return out

    def summary(self) -> dict:
        return {
            "stored_nodes": sorted(self.stored),
            "download_pairs": [[j, i] for j, i in sorted(self.downloads, key=lambda ji: (ji[1], ji[0]))],
            "observed_symbols": len(self.values()),
        }


def eve_view_matrix(ledger: EveLedger, code: SecureMSRCode, generator: Matrix | None = None) -> EveMatrix:
    """Linear functionals (over the message) behind everything in the ledger."""
    return eve_matrix(code, ledger.E, generator=generator, labels=ledger.labels(code.params))


@dataclass
class SimReport:
    scenario: Scenario
    modulus_hex: str
    per_stage: list[dict]
    ledger: EveLedger
    stable: bool
    instability: list[list[int]]
    subset_of_worst_case: bool
    view_consistent: bool
    certificate: dict

    @property
    def repairs_ok(self) -> bool:
        return all(st["repair_ok"] for st in self.per_stage)

    @property
    def ok(self) -> bool:
        return (self.repairs_ok and self.stable and self.subset_of_worst_case
                and self.view_consistent and self.certificate["secret"])

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "modulus_hex": self.modulus_hex,
            "per_stage": self.per_stage,
            "ledger_summary": self.ledger.summary(),
            "stable": self.stable,
            "unstable_pairs": self.instability,
            "subset_of_worst_case": self.subset_of_worst_case,
            "view_consistent": self.view_consistent,
            "secrecy_certificate": self.certificate,
            "ok": self.ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)


def _file_for(scn: SecureMSRCode, scenario: Scenario) -> list[int]:
    ctx, p = scn.ctx, scn.params
    if scenario.payload is not None:
        if len(scenario.payload) != p.secure_size:
            raise ScenarioError(f"payload must have {p.secure_size} symbols")
        return [ctx.check(v) for v in scenario.payload]
    rng = random.Random(f"file:{scenario.seed}")
    return [ctx.random(rng) for _ in range(p.secure_size)]


def run(scenario: Scenario, code: SecureMSRCode | None = None) -> SimReport:
    scenario.validate()
    p = scenario.params
    code = SecureMSRCode(p) if code is None else code
    ctx = code.ctx
    file = _file_for(code, scenario)
    randomness = draw_randomness(ctx, p.R, scenario.seed)
    original = code.encode_message(file, randomness)
    live = {j: original.node(j) for j in range(1, p.n + 1)}

    ledger = EveLedger(tuple(sorted(scenario.E)))
    for i in ledger.E:
        ledger.see_node(live[i])

    policy_rng = random.Random(f"helpers:{scenario.seed}")
    cursor = 0
    seen: dict[tuple[int, int], set[tuple[int, ...]]] = {}
    per_stage = []
    symbol_bytes = math.ceil(ctx.m / 8)
    for t, st in enumerate(scenario.stages):
        others = [j for j in range(1, p.n + 1) if j != st.fail]
        if st.helpers is not None:
            helpers = list(st.helpers)
        elif st.policy == "random":
            helpers = sorted(policy_rng.sample(others, p.d))
        else:
            helpers = sorted(others[(cursor + q) % len(others)] for q in range(p.d))
            cursor += 1
        del live[st.fail]
        downloads = [code.msr.repair_download(live[j], st.fail) for j in helpers]
        try:
            repaired = code.msr.repair(st.fail, downloads)
            ok = repaired == original.node(st.fail)
        except ArithmeticError:
            repaired, ok = original.node(st.fail), False
        live[st.fail] = repaired
        for dl in downloads:
            seen.setdefault((dl.helper, st.fail), set()).add(dl.mu)
            ledger.see_download(t, dl.helper, st.fail, dl.mu)
        ledger.see_node(repaired)
        per_stage.append({
            "stage": t, "fail": st.fail, "helpers": helpers, "repair_ok": ok,
            "bytes_downloaded": p.d * p.beta * symbol_bytes,
        })

    unstable = sorted([j, i] for (j, i), mus in seen.items() if len(mus) > 1)
    labels = ledger.labels(p)
    subset = set(labels) <= set(eve_labels(p, ledger.E))
    view = eve_view_matrix(ledger, code)
    # the observed symbols must be exactly the message times the view matrix
    message = file + randomness
    consistent = (view.T.left_apply(message) if view.width else []) == ledger.values()
    cert = verify_secrecy(view).as_dict()
    return SimReport(scenario, ctx.modulus_hex, per_stage, ledger, not unstable, unstable,
                     subset, consistent, cert)


def worst_case_scenario(p: SystemParams, E: Sequence[int], seed: int = 0) -> Scenario:
    """Fail every node of ``E`` once; with ``d = n-1`` Eve sees every download into ``E``."""
    stages = []
    for i in sorted(E):
        others = [j for j in range(1, p.n + 1) if j != i]
        if p.d == p.n - 1:
            stages.append(Stage(i, tuple(others)))
        else:
            # cover every outside helper by sliding the helper window
            for start in range(0, len(others), p.d):
                stages.append(Stage(i, tuple(sorted(others[(start + q) % len(others)] for q in range(p.d)))))
    return Scenario(p, tuple(sorted(E)), seed, tuple(stages))


def repeated_failure_scenario(p: SystemParams, E: Sequence[int], nodes: Sequence[int] | None = None,
                              rounds: int = 2, seed: int = 0) -> Scenario:
    """Fail each of ``nodes`` once per helper group, ``rounds`` times over, interleaved."""
    from itertools import combinations
    nodes = range(1, p.n + 1) if nodes is None else nodes
    stages = []
    for _ in range(rounds):
        for i in nodes:
            others = [j for j in range(1, p.n + 1) if j != i]
            stages.extend(Stage(i, hs) for hs in combinations(others, p.d))
    return Scenario(p, tuple(sorted(E)), seed, tuple(stages))
