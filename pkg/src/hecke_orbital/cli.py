"""Command line driver: ``hecke-orbital {analyze,eval,table,verify,corpus}``.

Exit codes: 0 success, 1 internal error, 2 reducible or degenerate input,
3 witness/root search failure, 4 malformed input, 5 unsupported
characteristic, 6 mismatch against oracle or golden file, 7 oracle budget
or precision exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from .closed_form import GEOMETRIC, QUOTIENT, admissible_types, as_type, so_hecke
from .corpus import (
    CaseFile,
    Query,
    bless,
    dumps,
    evaluate_case,
    oracle_mismatches,
    run_corpus,
)
from .errors import MalformedInput, OrbitalError
from .profile import RAMIFIED, UNRAMIFIED, build_profile, profile_from_serre, symbolic_profile
from .qvalue import ZERO

log = logging.getLogger("hecke_orbital")

EXIT_MISMATCH = 6


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def parse_k(text: str) -> tuple:
    try:
        k = tuple(int(x) for x in text.replace(" ", "").strip("()").split(","))
    except ValueError as exc:
        raise MalformedInput(f"bad type {text!r}") from exc
    try:
        as_type(k)
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc
    return k


def parse_precision(text):
    if text is None or text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError as exc:
        raise MalformedInput(f"precision must be an integer or 'auto', got {text!r}") from exc


def _chi_from_text(text: str):
    text = text.strip()
    if text.startswith("["):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"bad chi {text!r}") from exc
    return [x for x in text.split(",") if x]


def load_case(args) -> CaseFile:
    if getattr(args, "case", None):
        case = CaseFile.load(args.case)
    elif getattr(args, "chi", None):
        raw = _chi_from_text(args.chi)
        data = {"field": {"kind": args.kind, "p": args.p}, "n": len(raw), "chi": raw,
                "queries": [], "oracle": {"enabled": False, "precision": "auto"}}
        case = CaseFile.from_json(data)
    else:
        raise MalformedInput("give a case file or --chi")
    k = getattr(args, "k", None)
    measure = getattr(args, "measure", None)
    if k:
        kt = parse_k(k)
        if len(kt) != case.n:
            raise MalformedInput(f"type {kt} does not have length n={case.n}")
        case = CaseFile(case.fs, case.chi, (Query(kt, measure or "both"),),
                        case.oracle_enabled, case.oracle_precision)
    elif measure and case.queries:
        case = CaseFile(case.fs, case.chi, tuple(Query(q.k, measure) for q in case.queries),
                        case.oracle_enabled, case.oracle_precision)
    if not case.queries:
        profile = build_profile(case.chi)
        case = CaseFile(case.fs, case.chi,
                        tuple(Query(t.k, measure or "both")
                              for t in admissible_types(case.n, profile.d)),
                        case.oracle_enabled, case.oracle_precision)
    prec = getattr(args, "precision", None)
    if prec is not None:
        case = CaseFile(case.fs, case.chi, case.queries, case.oracle_enabled, parse_precision(prec))
    return case


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render_rows(rows: list, columns: list, fmt: str, footer=None) -> str:
    if fmt == "json":
        payload = {"rows": rows}
        if footer is not None:
            payload["footer"] = footer
        return dumps(payload)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([r.get(c, "") for c in columns])
        if footer is not None:
            for key, val in footer.items():
                w.writerow([f"# {key}", val])
        return buf.getvalue()
    cells = [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    for row in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
    if footer is not None:
        for key, val in footer.items():
            lines.append(f"# {key}: {val}")
    return "\n".join(lines) + "\n"


def _ktext(k) -> str:
    return "(" + ",".join(str(x) for x in k) + ")"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    case = load_case(args)
    profile = build_profile(case.chi)
    snap = profile.to_json()
    if args.format == "json":
        sys.stdout.write(dumps(snap))
    else:
        flat = [{"key": key, "value": json.dumps(v) if isinstance(v, (dict, list)) else v}
                for key, v in snap.items()]
        sys.stdout.write(render_rows(flat, ["key", "value"], args.format))
    return 0


def cmd_eval(args) -> int:
    case = load_case(args)
    profile = build_profile(case.chi)
    rows = []
    for query in case.queries:
        for m in query.measures():
            value = so_hecke(profile, query.k, m)
            rows.append({"k": _ktext(query.k), "measure": m, "qvalue": str(value),
                         "value": str(value.eval(profile.q))})
    sys.stdout.write(render_rows(rows, ["k", "measure", "qvalue", "value"], args.format))
    return 0


def cmd_verify(args) -> int:
    case = load_case(args)
    case = CaseFile(case.fs, case.chi, case.queries, True, case.oracle_precision)
    record = evaluate_case(case, oracle=True)
    rows = []
    for entry in record.get("queries", []):
        for m in (GEOMETRIC, QUOTIENT):
            part = entry.get(m)
            if not part:
                continue
            orc = part.get("oracle", {})
            got = orc.get("volume", orc.get("count", orc.get("error", orc.get("skipped", ""))))
            status = "pass" if str(got) == part.get("value") else "fail"
            if "skipped" in orc or "value" not in part:
                status = "skip"
            if orc.get("error") in ("BudgetExceeded", "PrecisionTooLow", "WindowUnstable"):
                status = "budget"
            rows.append({"k": _ktext(entry["k"]), "measure": m,
                         "expected": part.get("value", part.get("error")), "oracle": str(got),
                         "N": orc.get("N", ""), "status": status})
    mism = oracle_mismatches(record)
    footer = {"mismatches": len(mism)}
    sys.stdout.write(render_rows(rows, ["k", "measure", "expected", "oracle", "N", "status"],
                                 args.format, footer))
    if any(r["status"] == "fail" for r in rows):
        return EXIT_MISMATCH
    if any(r["status"] == "budget" for r in rows):
        return 7
    return 0


def _table_profile(args):
    if getattr(args, "case", None) or getattr(args, "chi", None):
        return build_profile(load_case_for_table(args).chi)
    if args.n is None or args.d is None:
        raise MalformedInput("table needs a case file, --chi, or --n and --d")
    ram = args.ram or UNRAMIFIED
    if args.S is not None:
        return profile_from_serre(args.n, args.d, ram, args.S, q=args.q)
    return symbolic_profile(args.n, args.d, ram, witness_da=args.da, q=args.q)


def load_case_for_table(args) -> CaseFile:
    if args.case:
        return CaseFile.load(args.case)
    raw = _chi_from_text(args.chi)
    return CaseFile.from_json({"field": {"kind": args.kind, "p": args.p}, "n": len(raw),
                               "chi": raw, "queries": []})


def cmd_table(args) -> int:
    profile = _table_profile(args)
    q = profile.q
    rows = []
    qsum = ZERO
    quotient_ok = True
    for k in admissible_types(profile.n, profile.d, args.k1_min):
        row = {"k": _ktext(k.k)}
        g = so_hecke(profile, k, GEOMETRIC)
        row["geometric"] = str(g) if q is None else str(g.eval(q))
        try:
            qv = so_hecke(profile, k, QUOTIENT)
            row["quotient"] = str(qv) if q is None else str(qv.eval(q))
            qsum = qsum + qv
        except OrbitalError as exc:
            row["quotient"] = type(exc).__name__
            quotient_ok = False
        rows.append(row)
    footer = {}
    if quotient_ok:
        if q is None:
            integral = qsum.is_polynomial()
            footer["quotient_sum"] = str(qsum)
        else:
            val = qsum.eval(q)
            integral = val.denominator == 1
            footer["quotient_sum"] = str(val)
        footer["quotient_sum_integral"] = integral
        if not integral:
            sys.stdout.write(render_rows(rows, ["k", "geometric", "quotient"], args.format, footer))
            log.error("quotient column does not sum to an integer")
            return 1
    sys.stdout.write(render_rows(rows, ["k", "geometric", "quotient"], args.format,
                                 footer or None))
    return 0


def cmd_corpus_run(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        raise MalformedInput(f"{directory} is not a directory")
    results, timing = run_corpus(directory, jobs=args.jobs)
    if results["total"] == 0:
        log.warning("corpus %s contains no cases", directory)
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.json").write_text(dumps(results))
        (out / "timing.json").write_text(dumps(timing))
    if args.format == "json":
        sys.stdout.write(dumps(results))
    else:
        rows = [{"id": c["id"], "status": c["status"], "diffs": "; ".join(c["diffs"])}
                for c in results["cases"]]
        footer = {"passed": results["passed"], "failed": results["failed"]}
        sys.stdout.write(render_rows(rows, ["id", "status", "diffs"], args.format, footer))
    return 0 if results["failed"] == 0 else EXIT_MISMATCH


def cmd_corpus_bless(args) -> int:
    n = bless(args.directory)
    sys.stdout.write(f"blessed {n} case(s)\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_input(p):
    p.add_argument("case", nargs="?", help="case file (JSON)")
    p.add_argument("--chi", help="coefficients c1,...,cn (or a JSON list for laurent fields)")
    p.add_argument("--kind", default="p-adic", choices=["p-adic", "laurent"])
    p.add_argument("--p", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hecke-orbital", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=["json", "text", "csv"], default="text")

    p = sub.add_parser("analyze", help="invariants of a characteristic polynomial")
    _add_input(p)
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("eval", help="closed-form orbital integrals")
    _add_input(p)
    p.add_argument("--k", help='type "k1,k2[,k3]"')
    p.add_argument("--measure", choices=[GEOMETRIC, QUOTIENT, "both"])
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="compare closed forms with the counting oracle")
    _add_input(p)
    p.add_argument("--k", help='type "k1,k2[,k3]"')
    p.add_argument("--measure", choices=[GEOMETRIC, QUOTIENT, "both"])
    p.add_argument("--precision", help="N or 'auto'")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="all admissible types with both measures")
    _add_input(p)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--ram", choices=[UNRAMIFIED, RAMIFIED])
    p.add_argument("--S", type=int, help="Serre invariant (symbolic profiles)")
    p.add_argument("--da", type=int, help="witness d_a (symbolic profiles)")
    p.add_argument("--q", type=int, help="evaluate at this q")
    p.add_argument("--k1-min", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("corpus", help="golden-file corpus")
    csub = p.add_subparsers(dest="corpus_command", required=True)
    r = csub.add_parser("run", help="re-evaluate and diff against golden files")
    r.add_argument("directory")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--out", help="write results.json and timing.json here")
    common(r)
    r.set_defaults(func=cmd_corpus_run)
    b = csub.add_parser("bless", help="(re)write golden files from the current code")
    b.add_argument("directory")
    b.set_defaults(func=cmd_corpus_bless)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except OrbitalError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    except BrokenPipeError:
        return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
