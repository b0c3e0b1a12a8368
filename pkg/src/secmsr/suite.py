"""Invariant suite run by ``secmsr verify``.

Every suite is exact and deterministic; reports carry no timings so two
runs with the same configuration are byte-identical.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import combinations

from .gabidulin import depcode, precode
from .msr import SystemParams, helper_subsets
from .pipeline import SecureMSRCode
from .secrecy import eavesdropper_sets, eve_matrix, symbol_rank, verify_secrecy
from .sim import repeated_failure_scenario, run

FAULTS = ("duplicate-lambda",)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checks: int
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checks": self.checks, "detail": self.detail}


def faulty_lambda(code: SecureMSRCode) -> list[list[int]]:
    """The default table with ``lam[n][1]`` overwritten by ``lam[n][0]``."""
    lam = [list(r) for r in code.msr.lam]
    lam[-1][1] = lam[-1][0]
    return lam


def build_code(p: SystemParams, modulus: int | None = None, fault: str | None = None) -> SecureMSRCode:
    code = SecureMSRCode(p, modulus)
    if fault is None:
        return code
    if fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    return SecureMSRCode(p, code.ctx.modulus, faulty_lambda(code), validate=False)


def _mds(code, rng) -> SuiteResult:
    p, ctx = code.params, code.ctx
    msg = [[ctx.random(rng) for _ in range(p.alpha)] for _ in range(p.k)]
    cw = code.msr.encode(msg)
    n_ok = n = 0
    for sub in combinations(range(1, p.n + 1), p.k):
        n += 1
        n_ok += code.msr.collect([cw.node(j) for j in sub]) == cw
    ok = n_ok == n and code.msr.check_parity(cw)
    return SuiteResult("mds", ok, n, f"{n_ok}/{n} k-subsets collected")


def _repair(code, rng) -> SuiteResult:
    p, ctx = code.params, code.ctx
    msg = [[ctx.random(rng) for _ in range(p.alpha)] for _ in range(p.k)]
    cw = code.msr.encode(msg)
    n_ok = n = 0
    for i in range(1, p.n + 1):
        for hs in helper_subsets(p, i):
            n += 1
            dls = [code.msr.repair_download(cw.node(j), i) for j in hs]
            try:
                good = all(len(dl.mu) == p.beta for dl in dls) and code.msr.repair(i, dls) == cw.node(i)
            except ArithmeticError:
                good = False
            n_ok += good
    return SuiteResult("repair", n_ok == n, n, f"{n_ok}/{n} (failed node, helper set) pairs repaired")


def _stability(code, rng) -> SuiteResult:
    p = code.params
    E = tuple(range(p.n - p.l + 1, p.n + 1))
    rep = run(repeated_failure_scenario(p, E, seed=rng.randrange(1 << 30)), code)
    ok = rep.stable and rep.repairs_ok and rep.subset_of_worst_case and rep.view_consistent
    return SuiteResult("stability", ok, len(rep.per_stage),
                       f"unstable pairs {rep.instability}; repairs ok {rep.repairs_ok}")


def _gabidulin(code, rng, trials: int = 10) -> SuiteResult:
    ctx, p = code.ctx, code.params
    ok = code.moore.rank() == p.M
    for _ in range(trials):
        m = [ctx.random(rng) for _ in range(p.M)]
        f = precode(m, code.points, code.moore)
        ok &= depcode(f, code.points, code.moore) == m
        ok &= depcode(f, code.points, inverse=code.moore_inv) == m
    return SuiteResult("gabidulin", bool(ok), trials, "moore full rank and round trips")


def _rank(code) -> SuiteResult:
    p = code.params
    bad = []
    sets = eavesdropper_sets(p) if p.l else []
    for E in sets:
        if not symbol_rank(p, E).agrees:
            bad.append(list(E))
    return SuiteResult("rank", not bad, len(sets), f"mismatched sets {bad}" if bad else "")


def _secrecy(code) -> SuiteResult:
    p = code.params
    G = code.msr.generator_matrix()
    bad = []
    sets = eavesdropper_sets(p)
    for E in sets:
        if not verify_secrecy(eve_matrix(code, E, generator=G)).all_hold:
            bad.append(list(E))
    checks = len(sets)
    detail = f"not secret {bad}" if bad else ""
    if p.l:
        # without pre-coding node 1 holds file symbols in the clear
        neg = verify_secrecy(eve_matrix(code, (1,) + tuple(range(p.n - p.l + 2, p.n + 1)),
                                        precoded=False, generator=G))
        checks += 1
        if neg.secret:
            bad.append("negative control")
            detail = f"not secret {bad[:-1]}; negative control passed unexpectedly"
    return SuiteResult("secrecy", not bad, checks, detail)


def run_suite(p: SystemParams, seed: int = 0, modulus: int | None = None,
              fault: str | None = None) -> dict:
    code = build_code(p, modulus, fault)
    rng = random.Random(seed)
    results = []
    for name, fn in (("mds", lambda: _mds(code, rng)), ("repair", lambda: _repair(code, rng)),
                     ("stability", lambda: _stability(code, rng)),
                     ("gabidulin", lambda: _gabidulin(code, rng)),
                     ("rank", lambda: _rank(code)), ("secrecy", lambda: _secrecy(code))):
        try:
            results.append(fn())
        except (ArithmeticError, ValueError) as exc:
            results.append(SuiteResult(name, False, 0, f"{type(exc).__name__}: {exc}"))
    return {
        "config": {**code.describe(), "seed": seed, "fault": fault},
        "suites": [r.as_dict() for r in results],
        "passed": all(r.passed for r in results),
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True)


def report_text(report: dict) -> str:
    cfg = report["config"]
    pp = cfg["params"]
    lines = [f"verify n={pp['n']} k={pp['k']} d={pp['d']} l={pp['l']} "
             f"GF(2^{cfg['m']}) modulus={cfg['modulus_hex']} seed={cfg['seed']}"
             + (f" fault={cfg['fault']}" if cfg["fault"] else "")]
    for s in report["suites"]:
        lines.append(f"  {s['name']:<10} {'PASS' if s['passed'] else 'FAIL'}  checks={s['checks']}"
                     + (f"  {s['detail']}" if s["detail"] else ""))
    lines.append("overall " + ("PASS" if report["passed"] else "FAIL"))
    return "\n".join(lines)

