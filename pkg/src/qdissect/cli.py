"""Command-line interface: ``qdissect <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from .catalog import NAMES, canonical_name, coeffs
from .dsl import eval_monomials, eval_series
from .errors import QDissectError
from .manifest import IdentityRecord, Report, load, run_all
from .prover import normalize_identity, prove
from .series import QSeries, dissect
from .walkthrough import b2_walkthrough


def _frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _series_lines(s: QSeries) -> list[str]:
    return [f"{_frac(c)} * q^{n}" for n, c in s.terms()]


def _series_json(s: QSeries) -> dict:
    return {"precision": s.prec, "terms": [[n, _frac(c)] for n, c in s.terms()]}


def _emit(args, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=1))
    else:
        for line in lines:
            print(line)


def cmd_expand(args) -> int:
    s = eval_series(args.expr, args.order)
    _emit(args, {"expr": args.expr, **_series_json(s)}, _series_lines(s) or ["0"])
    return 0


def cmd_dissect(args) -> int:
    if args.res < 0 or args.res >= args.mod:
        raise QDissectError(f"residue must lie in [0, {args.mod})")
    s = dissect(eval_series(args.expr, args.mod * args.order + args.res), args.mod, args.res)
    payload = {"expr": args.expr, "mod": args.mod, "res": args.res, **_series_json(s)}
    _emit(args, payload, _series_lines(s) or ["0"])
    return 0


def cmd_catalog(args) -> int:
    if args.name is None:
        _emit(args, {"names": list(NAMES)}, list(NAMES))
        return 0
    name = canonical_name(args.name)
    cs = coeffs(name, args.count, args.method)
    _emit(args, {"name": name, "coefficients": [_frac(c) for c in cs]}, [" ".join(_frac(c) for c in cs)])
    return 0


def cmd_verify(args) -> int:
    mode = "prove" if args.prove else "series" if args.series else args.mode
    if mode == "prove":
        if args.level is None:
            raise QDissectError("--level is required to prove an identity")
        inst = normalize_identity(eval_monomials(args.lhs), eval_monomials(args.rhs), args.level)
        cert = prove(inst, check_through=args.order)
        lines = [
            f"level {cert.level}, {len(cert.cusps)} cusps",
            f"B = {_frac(cert.B)}, required order {cert.required_order}",
            f"status {cert.status}, verified through q^{cert.verified_order}",
        ]
        if cert.first_failure is not None:
            lines.append(f"first nonzero coefficient at q^{cert.first_failure}")
        _emit(args, cert.to_json(), lines)
        return 0 if cert.status == "proved" else 1
    order = args.order or 120
    res = eval_series(args.lhs, order) - eval_series(args.rhs, order)
    first = res.first_nonzero()
    payload = {"status": "proved" if first is None else "expansion_failed", "order": order, "first_failure": first}
    _emit(args, payload, [f"pass through q^{order - 1}" if first is None else f"FAIL: first difference at q^{first}"])
    return 0 if first is None else 1


def _record_lines(rep: Report) -> list[str]:
    mark = "ok  " if rep.ok else "FAIL"
    head = f"{mark} {rep.label}: {rep.status}"
    if rep.first_failure is not None:
        head += f" (first failure q^{rep.first_failure})"
    if rep.expect != "proved":
        head += f" [expected {rep.expect}]"
    out = [head]
    if rep.message:
        out.append(f"     {rep.message}")
    if rep.corrected is not None:
        out += ["     corrected: " + line.strip() for line in _record_lines(rep.corrected)]
    return out


def _select(manifest, labels) -> list[IdentityRecord]:
    if not labels:
        return list(manifest.records)
    missing = [l for l in labels if l not in manifest.labels()]
    if missing:
        raise QDissectError(f"unknown labels: {', '.join(missing)}")
    return [manifest[l] for l in labels]


def cmd_run(args) -> int:
    manifest = load(args.manifest)
    records = _select(manifest, args.label)
    if args.mode:
        records = [r for r in records if r.mode == args.mode]
    reports = run_all(records, order=args.order, jobs=args.jobs)
    good = sum(r.ok for r in reports)
    lines = [line for rep in reports for line in _record_lines(rep)]
    lines.append(f"{good}/{len(reports)} records as expected")
    _emit(args, {"reports": [r.to_json() for r in reports], "ok": good == len(reports)}, lines)
    return 0 if good == len(reports) else 1


def appendix_row(record: IdentityRecord, rep: Report) -> dict:
    """One appendix row: the printed form, or its correction when the printed form is a known typo."""
    used = rep.corrected if rep.corrected is not None else rep
    cert = used.certificate
    row = {"label": record.label, "level": record.level, "listed_minus_B": record.minus_B, "listed_m": record.m,
           "form": "corrected" if rep.corrected is not None else "printed", "printed_status": rep.status,
           "printed_first_failure": rep.first_failure}
    if cert is None:
        row.update(match=False, status=used.status, message=used.message)
        return row
    vanishes = cert.status == "proved" and (record.m is None or cert.verified_order >= record.m)
    b_ok = record.minus_B is None or cert.minus_B == record.minus_B
    row.update(
        computed_minus_B=_frac(cert.minus_B),
        required_order=cert.required_order,
        verified_order=cert.verified_order,
        status=cert.status,
        match=bool(vanishes and b_ok),
    )
    if not row["match"]:
        row["certificate"] = cert.to_json()
    return row


def cmd_appendix(args) -> int:
    manifest = load(args.manifest)
    records = [r for r in manifest.records if r.mode == "prover" and r.minus_B is not None]
    if args.label:
        records = [r for r in records if r.label in set(args.label)]
    reports = run_all(records, order=args.order, jobs=args.jobs)
    rows = [appendix_row(r, rep) for r, rep in zip(records, reports)]
    lines = [f"{'label':24} {'N':>4} {'-B listed':>9} {'-B found':>9} {'m':>5} {'verified':>8}  result"]
    for row in rows:
        lines.append(
            f"{row['label']:24} {row['level']:>4} {row['listed_minus_B']:>9} {row.get('computed_minus_B', '-'):>9} "
            f"{row['listed_m'] or '-':>5} {row.get('verified_order', '-'):>8}  "
            + ("match" if row["match"] else "MISMATCH") + (" (corrected form)" if row["form"] == "corrected" else "")
        )
        if not row["match"] and "certificate" in row:
            cert = row["certificate"]
            cusps = " ".join(f"{c['a']}/{c['c']}" if c["c"] else "oo" for c in cert["cusps"])
            lines.append(f"    cusps: {cusps}")
            for i, ords in enumerate(cert["ord_table"]):
                lines.append(f"    F{i + 1}: " + " ".join(ords))
    good = sum(r["match"] for r in rows)
    lines.append(f"{good}/{len(rows)} rows reproduced")
    _emit(args, {"rows": rows, "ok": good == len(rows)}, lines)
    return 0 if good == len(rows) else 1


def cmd_walkthrough(args) -> int:
    w = b2_walkthrough(args.order)
    lines = []
    for s in w.steps:
        lines.append(f"Step {s.number}: {s.title} [{'checked' if s.ok else 'FAILED'} to q^{s.checked_order - 1}]")
        lines.append(f"  B2(q) = {s.text}")
    _emit(args, w.to_json(), lines)
    return 0 if w.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdissect", description="Dissections of mock theta functions and theta identities.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, order_default):
        sp.add_argument("--order", type=int, default=order_default, help="number of q-powers to compute")
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("expand", help="expand an expression as a q-series")
    sp.add_argument("expr")
    common(sp, 20)
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("dissect", help="extract the coefficients along an arithmetic progression")
    sp.add_argument("expr")
    sp.add_argument("--mod", type=int, required=True)
    sp.add_argument("--res", type=int, required=True)
    common(sp, 20)
    sp.set_defaults(func=cmd_dissect)

    sp = sub.add_parser("catalog", help="coefficients of a catalog function (no name: list them)")
    sp.add_argument("name", nargs="?")
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--method", choices=("eulerian", "al"), default="eulerian")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("verify", help="check lhs = rhs by series comparison or prove it")
    sp.add_argument("--lhs", required=True)
    sp.add_argument("--rhs", required=True)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--prove", action="store_true", help="valence-formula proof (needs --level)")
    group.add_argument("--series", action="store_true", help="series comparison (default)")
    sp.add_argument("--mode", choices=("series", "prove"), default="series")
    sp.add_argument("--level", type=int)
    common(sp, None)
    sp.set_defaults(func=cmd_verify)

    for name, func, helptext in (
        ("run", cmd_run, "verify manifest records"),
        ("appendix", cmd_appendix, "reproduce the level / bound / verification table"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--manifest", help="manifest path (default: the bundled corpus)")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--label", action="append", help="restrict to this label (repeatable)")
        if name == "run":
            sp.add_argument("--mode", choices=("prover", "series", "residue_series"))
        common(sp, None)
        sp.set_defaults(func=func)

    sp = sub.add_parser("walkthrough", help="derive the 3-dissection of B2 step by step")
    common(sp, 150)
    sp.set_defaults(func=cmd_walkthrough)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QDissectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
