"""Command-line front end: ``logarith <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import iwalab, mirror, scanner, seo
from .logarith import CONVENTIONS, DEFAULT_CONVENTION, MAX_PREC, log_class_group, log_unit_certificate
from .quadfield import field_init

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json",
                        help="output format (default: json)")
    common.add_argument("--strict", action="store_true", help="exit 1 on unstable results")
    common.add_argument("--max-prec", type=int, default=MAX_PREC,
                        help=f"precision cap for escalation (default: {MAX_PREC})")
    common.add_argument("--convention", choices=CONVENTIONS, default=DEFAULT_CONVENTION,
                        help="degree normalization (default: std)")
    common.add_argument("--workers", type=int, default=1, help="worker processes for scans (default: 1)")
    common.add_argument("--cache", default=None,
                        help="record cache path (default: $LOGARITH_CACHE or ~/.cache/logarith/records.jsonl)")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the record cache")
    common.add_argument("--force", action="store_true", help="recompute cached records")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="logarith", description="ell-adic logarithmic class groups of quadratic fields")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", parents=[common], help="one logarithmic class group")
    c.add_argument("-d", type=int, required=True)
    c.add_argument("-l", "--ell", type=int, required=True)

    s = sub.add_parser("scan", parents=[common], help="scan primes ell for one field")
    s.add_argument("-d", type=int, required=True)
    s.add_argument("--min", type=int, default=2)
    s.add_argument("--max", type=int, required=True)
    s.add_argument("--nontrivial", action="store_true", help="only print nontrivial records")

    t = sub.add_parser("table", parents=[common], help="reproduction tables")
    t.add_argument("--preset", choices=scanner.PRESETS, required=True)
    t.add_argument("--bound", type=int, default=None)

    m = sub.add_parser("smallest", parents=[common], help="smallest ell with nontrivial group")
    m.add_argument("-d", type=int, required=True)
    m.add_argument("--bound", type=int, required=True)
    m.add_argument("--coprime-to-h", action="store_true", help="skip ell dividing the class number")

    lam = sub.add_parser("lambda-check", parents=[common], help="capitulation check on finite Lambda-modules")
    lam.add_argument("--blocks", required=True, help='e.g. "F:3^2;XL:3"')
    lam.add_argument("--depth", type=int, default=4)

    w = sub.add_parser("wildkernel", parents=[common], help="wild kernel quotient at ell = 3")
    w.add_argument("-d", type=int, required=True)
    w.add_argument("-i", type=int, required=True)

    e = sub.add_parser("seo", parents=[common], help="norm index of 3-units of Q(sqrt 257, cos 2pi/9)")
    e.add_argument("--units", default=None, help="unit data JSON (default: shipped dataset)")

    r = sub.add_parser("certificate", parents=[common], help="logarithmic unit rank report")
    r.add_argument("-d", type=int, required=True)
    r.add_argument("-l", "--ell", type=int, required=True)
    return p


# ---------------------------------------------------------------------------
# rendering


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    if v is None:
        return ""
    return str(v)


def render(rows: list[dict], fmt: str, columns=None, text=None) -> str:
    if fmt == "json":
        payload = rows[0] if len(rows) == 1 and columns is None else rows
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"
    if fmt == "csv":
        cols = list(columns) if columns else sorted({k for r in rows for k in r})
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(cols)
        for r in rows:
            wr.writerow([_cell(r.get(c)) for c in cols])
        return buf.getvalue()
    if text is not None:
        return text
    return "".join("  ".join(f"{k}={_cell(v)}" for k, v in sorted(r.items())) + "\n" for r in rows)


def _group_text(rec: dict) -> str:
    inv = rec["invariants"]
    ell = rec["ell"]
    grp = " x ".join(f"Z/{ell}^{e}" if e > 1 else f"Z/{ell}" for e in inv) or "1"
    flag = "" if rec["stable"] else "  [unstable]"
    return f"d = {rec['d']:>8}  ell = {rec['ell']:>7}  Cl~ = {grp}  (order {rec['order']}){flag}"


def _scan_row(rec: scanner.ScanRecord) -> dict:
    row = rec.to_dict()
    row.pop("elapsed_ms")
    return row


# ---------------------------------------------------------------------------
# commands


def _cache(args):
    if args.no_cache:
        return None
    path = Path(args.cache) if args.cache else scanner.default_cache_path()
    return scanner.ResultCache(path)


def cmd_compute(args):
    G = log_class_group(field_init(args.d), args.ell, convention=args.convention, cap=args.max_prec)
    rec = G.to_record()
    return [rec], None, _group_text(rec) + "\n", not G.stable


def cmd_certificate(args):
    cert = log_unit_certificate(field_init(args.d), args.ell, cap=args.max_prec)
    rec = {"d": args.d, "ell": args.ell, **cert.to_record()}
    return [rec], None, None, False


def cmd_scan(args):
    recs = scanner.scan(args.d, args.min, args.max, args.convention, args.workers, _cache(args),
                        args.force, cap=args.max_prec)
    if args.nontrivial:
        recs = [r for r in recs if r.nontrivial or r.error]
    rows = [_scan_row(r) for r in recs]
    text = "".join(_group_text(r) + (f"  error: {r['error']}" if r["error"] else "") + "\n" for r in rows)
    unstable = any(not r.stable for r in recs)
    cols = ("d", "ell", "order", "invariants", "stable", "certified_at", "convention", "error")
    return rows, cols, text, unstable


def cmd_table(args):
    doc = scanner.table(args.preset, args.bound, args.workers, _cache(args))
    if args.format == "json":
        return [doc], None, None, False
    lines = [f"# {doc['preset']} (bound {doc['bound']}): {doc['column']}\n"]
    for r in doc["rows"]:
        cav = f"   [{r['caveat']}]" if r["caveat"] else ""
        lines.append(f"K = Q(sqrt {r['d']}):  ell = {r['ell']:>7}  order {r['order']:>7}  {r['order_check']}{cav}\n")
    return doc["rows"], scanner.CSV_COLUMNS + ("order_check",), "".join(lines), False


def cmd_smallest(args):
    rec = scanner.smallest_nontrivial(args.d, args.bound, coprime_to_h=args.coprime_to_h,
                                      convention=args.convention, workers=args.workers, cache=_cache(args))
    if rec is None:
        row = {"d": args.d, "bound": args.bound, "ell": None, "found": False}
        return [row], None, "NotFound\n", False
    row = {"d": args.d, "bound": args.bound, "ell": rec.ell, "found": True,
           "order": rec.order, "invariants": list(rec.invariants)}
    return [row], None, f"{rec.ell}\n", False


def cmd_lambda(args):
    rep = iwalab.check_cap_theorem(args.blocks, depth=args.depth).to_dict()
    text = f"verdict: {rep['verdict']}  n0={rep['n0']}  s={rep['s']}\n"
    for note in rep["notes"]:
        text += f"  {note}\n"
    failed = rep["verdict"] == "fail"
    return [rep], None, text, failed


def cmd_wildkernel(args):
    q = mirror.wild_kernel_quotient(args.d, args.i)
    rec = q.to_record()
    grp = " x ".join(f"Z/3^{e}" if e > 1 else "Z/3" for e in q.group) or "1"
    return [rec], None, f"W_{2 * args.i}(Q(sqrt {args.d})) / 3^m  =  {grp}   (from Q(sqrt {q.source_field}))\n", False


def cmd_seo(args):
    path = args.units or seo.SEO_DATASET
    data = seo.SexticUnitData.load(path)
    rep = seo.norm_index(data).to_dict()
    rec = {
        "d": data.d,
        "log_unit": seo.verify_log_unit(data.d),
        "saturated_at_3": seo.saturation_certificate(data),
        **rep,
    }
    verdict = "eps is not the norm of a 3-unit" if rep["divisible_by_3"] else "no obstruction found"
    text = f"index {rep['index']}: {verdict}\n" + "".join(f"  warning: {w}\n" for w in rep["warnings"])
    return [rec], None, text, False


COMMANDS = {
    "compute": cmd_compute,
    "certificate": cmd_certificate,
    "scan": cmd_scan,
    "table": cmd_table,
    "smallest": cmd_smallest,
    "lambda-check": cmd_lambda,
    "wildkernel": cmd_wildkernel,
    "seo": cmd_seo,
}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        rows, cols, text, unstable = COMMANDS[args.command](args)
    except (ValueError, UsageError) as exc:
        print(f"logarith: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - reported as exit code 1
        print(f"logarith: computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    out.write(render(rows, args.format, cols, text))
    if unstable and args.strict:
        print("logarith: unstable result", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
