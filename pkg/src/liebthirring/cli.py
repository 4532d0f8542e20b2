"""Command-line front end.

``sphere:<m>`` takes the *ambient* dimension: ``sphere:3`` is the 2-sphere
S^2. Exit codes: 0 success, 1 computational error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .constants import Source, analytic_constant, table1
from .engine import derive_constant
from .errors import CertificationError, DomainError, LiebThirringError
from .spectra import ManifoldId, Measure, build_spectrum
from .verify import DEFAULT_FAMILIES, DEFAULT_SAMPLES, default_manifolds, parse_families, sweep

TABLE1_COLUMNS = ["m", "theorem1", "ilyin", "ilyin_laptev", "pan"]


def _manifold(args) -> ManifoldId:
    return ManifoldId.parse(args.manifold, args.measure)


def _envelope(args, payload: dict) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "json", "csv", "out")}
    return {"tool": "liebthirring", "version": __version__, "config": config, **payload}


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(path: str | None, text: str):
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE1_COLUMNS)
    for r in rows:
        lit = r.literature
        w.writerow([r.m, r.rounded, lit["ilyin"], lit["ilyin_laptev"], lit["pan"]])
    return buf.getvalue()


def _cmd_constants(args) -> int:
    if args.format == "csv":
        sys.stdout.write(_table_csv(table1()))
        return 0
    mans = [_manifold(args)] if args.manifold else default_manifolds() + [
        ManifoldId.sphere(m, Measure.NORMALIZED) for m in range(3, 7)
    ]
    reports = [analytic_constant(m) for m in mans]
    _write(args.json, _dump_json(_envelope(args, {"constants": [r.to_dict() for r in reports]})))
    for r in reports:
        print(f"{r.manifold.label:<9} {r.measure.value:<10} {r.name:<6} {r.value:.{args.precision}g}  = {r.exact_form}")
    return 0


def _cmd_table1(args) -> int:
    rows = table1()
    if args.format == "csv":
        text = _table_csv(rows)
    else:
        text = _dump_json(_envelope(args, {"rows": [r.to_dict() for r in rows]}))
    _write(args.out or "-", text)
    if args.out:
        print(f"table1: {len(rows)} rows written to {args.out}")
    return 0


def _cmd_spectrum(args) -> int:
    spec = build_spectrum(_manifold(args), args.cutoff)
    payload = _envelope(args, {"spectrum": spec.to_dict(), "total_count": spec.total_count})
    _write(args.json, _dump_json(payload))
    print(
        f"{spec.manifold.label}: {len(spec.levels)} levels below {args.cutoff:g}, "
        f"{spec.total_count} eigenvalues with multiplicity"
    )
    return 0


def _cmd_derive(args) -> int:
    man = _manifold(args)
    bound = derive_constant(man, args.mode, cutoff=args.cutoff, points=args.points)
    _write(args.json, _dump_json(_envelope(args, {"bound": bound.to_dict()})))
    where = "rho -> inf" if bound.argmin_at_infinity else f"rho = {bound.argmin_rho:.6g}"
    print(
        f"{man.label} ({man.measure.value}, {args.mode}): constant {bound.constant:.{args.precision}g} "
        f"[{bound.method.value}, infimum at {where}]"
    )
    return 0


def _csv_reports(summary) -> str:
    buf = io.StringIO()
    cols = ["family", "lhs", "lhs_stderr", "lhs_method", "rhs_energy", "ratio", "constant", "certified"]
    w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in summary.reports:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.to_dict().items()})
    return buf.getvalue()


def _cmd_verify(args) -> int:
    man = _manifold(args)
    spec = args.families or DEFAULT_FAMILIES[man.label]
    families = parse_families(man, spec, args.seed)
    try:
        summary = sweep(
            man, families, args.constant_source, cutoff=args.cutoff,
            samples=args.samples, seed=args.seed,
        )
    except CertificationError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        _write(args.json, _dump_json(_envelope(args, {"error": str(exc), "reports": [r.to_dict() for r in exc.reports or []]})))
        return 1
    _write(args.json, _dump_json(_envelope(args, {"summary": summary.to_dict()})))
    _write(args.csv, _csv_reports(summary))
    print(
        f"{man.label} ({man.measure.value}): {len(summary.reports)} families certified; "
        f"max ratio {summary.max_ratio:.{args.precision}g} ({summary.best_family}) "
        f"<= constant {summary.constant.value:.{args.precision}g}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="liebthirring",
        description="Lieb-Thirring constants on spheres, SU(2) and SO(3).",
        epilog="sphere:<m> uses the ambient dimension m: sphere:3 is the 2-sphere.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, manifold_required=True):
        sp.add_argument("--manifold", required=manifold_required,
                        help="sphere:<m> (ambient dimension m), so3 or su2")
        sp.add_argument("--measure", choices=[m.value for m in Measure], default=None,
                        help="default: geometric, normalized for so3")
        sp.add_argument("--precision", type=int, default=10, help="significant digits printed")
        sp.add_argument("--json", metavar="PATH", help="write JSON report ('-' for stdout)")

    sp = sub.add_parser("constants", help="analytic constants")
    common(sp, manifold_required=False)
    sp.add_argument("--format", choices=["text", "csv"], default="text",
                    help="csv prints the sphere comparison table instead")
    sp.set_defaults(func=_cmd_constants)

    sp = sub.add_parser("table1", help="sphere constants next to literature values")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    sp.set_defaults(func=_cmd_table1)

    sp = sub.add_parser("spectrum", help="Laplacian eigenvalues and multiplicities")
    common(sp)
    sp.add_argument("--cutoff", type=float, default=100.0)
    sp.set_defaults(func=_cmd_spectrum)

    sp = sub.add_parser("derive", help="derive a constant from a counting function")
    common(sp)
    sp.add_argument("--mode", choices=["envelope", "exact"], default="envelope")
    sp.add_argument("--cutoff", type=float, default=1e6, help="spectral cutoff for --mode exact")
    sp.add_argument("--points", type=int, default=512, help="log-grid points in rho")
    sp.set_defaults(func=_cmd_derive)

    sp = sub.add_parser("verify", help="certify the inequality on trial families")
    common(sp)
    sp.add_argument("--families", help="e.g. 'shells:1..4,single:2:1,mix:1..2:4:3'")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="Monte Carlo samples (m >= 5)")
    sp.add_argument("--constant-source", choices=[s.value for s in Source], default=Source.ANALYTIC.value)
    sp.add_argument("--cutoff", type=float, default=1e6, help="cutoff for numeric_infimum constants")
    sp.add_argument("--csv", metavar="PATH", help="write per-family CSV ('-' for stdout)")
    sp.set_defaults(func=_cmd_verify)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "manifold", None):
            _manifold(args)
    except DomainError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (LiebThirringError, OSError) as exc:
        print(f"{parser.prog}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
