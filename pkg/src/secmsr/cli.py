"""Command line entry point.

Exit codes: 0 success, 1 invalid input, 2 a check failed, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .finite_field import FieldContext, FieldError
from .msr import Codeword, NodeContent, SystemParams
from .pipeline import SecureMSRCode, SecureFile
from .secrecy import analyze, eavesdropper_sets
from .sim import Scenario, ScenarioError, run
from .suite import FAULTS, report_json, report_text, run_suite

EXIT_OK, EXIT_INVALID, EXIT_FAILED, EXIT_IO = 0, 1, 2, 3


def _parse_nodes(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise ValueError(f"bad node list {text!r}, expected e.g. 1,3") from None


def _params(args) -> SystemParams:
    return SystemParams(args.n, args.k, args.d, args.l)


def _modulus(args) -> int | None:
    if args.modulus is None:
        return None
    try:
        return int(args.modulus, 16)
    except ValueError:
        raise FieldError(f"modulus must be hex, got {args.modulus!r}") from None


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def _read(path: str) -> str:
    return Path(path).read_text()


# ---------------------------------------------------------------------------

def cmd_params(args) -> int:
    p = _params(args)
    ctx = FieldContext(p.M, _modulus(args))
    sheet = {**p.sheet(), "field_degree": ctx.m, "modulus_hex": ctx.modulus_hex}
    if args.format == "json":
        _emit(args, json.dumps(sheet, indent=1))
    else:
        _emit(args, "\n".join(f"{k:<13}{v}" for k, v in sheet.items()))
    return EXIT_OK


def _load_file(text: str, code: SecureMSRCode) -> list[int]:
    doc = json.loads(text)
    if isinstance(doc, list):
        return [code.ctx.from_hex(h) for h in doc]
    return list(SecureFile.from_json(text, code.ctx).file)


def cmd_encode(args) -> int:
    code = SecureMSRCode(_params(args), _modulus(args))
    file = _load_file(_read(args.file), code)
    cw = code.store(file, args.seed)
    ok = code.msr.check_parity(cw)
    _emit(args, cw.to_json())
    print(f"parity check: {'ok' if ok else 'FAILED'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_retrieve(args) -> int:
    cw = Codeword.from_json(_read(args.codeword))
    p = cw.params
    code = SecureMSRCode(p, cw.ctx.modulus)
    subset = _parse_nodes(args.subset) if args.subset else list(range(1, p.k + 1))
    if len(set(subset)) < p.k:
        raise ValueError(f"need at least k={p.k} distinct nodes, got {sorted(set(subset))}")
    for j in subset:
        if not 1 <= j <= p.n:
            raise ValueError(f"node {j} out of range 1..{p.n}")
    nodes: list[NodeContent] = [cw.node(j) for j in subset]
    file = code.retrieve(nodes)
    _emit(args, json.dumps([code.ctx.to_hex(v) for v in file], indent=1))
    return EXIT_OK


def cmd_simulate(args) -> int:
    scn = Scenario.from_json(_read(args.scenario))
    rep = run(scn)
    _emit(args, rep.to_json())
    return EXIT_OK if rep.ok else EXIT_FAILED


def cmd_analyze(args) -> int:
    p = _params(args)
    code = SecureMSRCode(p, _modulus(args))
    sets = [tuple(sorted(_parse_nodes(args.subset)))] if args.subset else eavesdropper_sets(p)
    G = code.msr.generator_matrix()
    reports = [analyze(code, E, generator=G) for E in sets]
    good = all(r["rank_P"] == r["formula"] == r["rank_P_decomposed"] and r["secrecy"]["secret"]
               for r in reports)
    if args.format == "json":
        _emit(args, json.dumps({"params": p.as_dict(), "modulus_hex": code.ctx.modulus_hex,
                                "reports": reports, "passed": good}, indent=1))
    else:
        lines = [f"analyze n={p.n} k={p.k} d={p.d} l={p.l} GF(2^{code.ctx.m})"]
        for r in reports:
            c = r["secrecy"]
            lines.append(f"  E={r['E']} rank_P={r['rank_P']} formula={r['formula']} "
                         f"components={r['components']['count']} rank_T={c['rank_T']} "
                         f"rank_Er={c['rank_Er']} R={c['R']} secret={c['secret']}")
        lines.append("overall " + ("PASS" if good else "FAIL"))
        _emit(args, "\n".join(lines))
    return EXIT_OK if good else EXIT_FAILED


def cmd_verify(args) -> int:
    report = run_suite(_params(args), args.seed, _modulus(args), args.fault)
    _emit(args, report_json(report) if args.format == "json" else report_text(report))
    return EXIT_OK if report["passed"] else EXIT_FAILED


# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors, not failed checks
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="secmsr", description="Secure MSR storage codes: encode, repair, analyze.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, params=True, seed=False):
        if params:
            sp.add_argument("--n", type=int, required=True)
            sp.add_argument("--k", type=int, required=True)
            sp.add_argument("--d", type=int, required=True)
            sp.add_argument("--l", type=int, default=0)
            sp.add_argument("--modulus", help="irreducible modulus of degree M, in hex")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write the result here instead of stdout")
        sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = sub.add_parser("params", help="print the parameter sheet")
    common(sp)
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("encode", help="encode a file of M_s hex symbols")
    common(sp, seed=True)
    sp.add_argument("file")
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("retrieve", help="recover the file from a codeword")
    common(sp, params=False)
    sp.add_argument("codeword")
    sp.add_argument("--subset", help="comma separated node indices (default 1..k)")
    sp.set_defaults(func=cmd_retrieve)

    sp = sub.add_parser("simulate", help="run a fail/repair scenario")
    common(sp, params=False)
    sp.add_argument("--scenario", required=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("analyze", help="rank and secrecy certificates for eavesdropped sets")
    common(sp)
    sp.add_argument("--subset", help="one eavesdropped set, e.g. 1,4 (default: all)")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("verify", help="run the invariant suite")
    common(sp, seed=True)
    sp.add_argument("--fault", choices=FAULTS, help="inject a fault (testing)")
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ScenarioError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
