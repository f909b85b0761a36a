"""Command-line entry point: ``bqke compute|table|verify|scan``.

Exit codes: 0 success, 1 verification mismatch or failed computation,
2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from concurrent.futures import ProcessPoolExecutor

import mpmath

from . import verify
from .cyclotomic import default_digits, embed, format_exact
from .groups import FAMILIES, CapExceeded, GroupSpec, InvalidGroupSpec
from .obstruction import c_float, compute_c
from .series import DEFAULT_SERIES_CAP, LaurentStructureError

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

REPORT_FIELDS = (
    "family", "params", "group_order", "phi0", "c_exact", "c_float_re", "c_float_im",
    "c1", "c2", "parity_720c", "parity_odd", "verdict", "paper_hypothesis_met",
)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Validated settings for one invocation; ``args`` keeps subcommand extras."""

    command: str
    spec: GroupSpec | None
    mode: str
    digits: int
    fmt: str | None
    out: str | None
    element_cap: int
    series_cap: int
    args: argparse.Namespace

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        if args.element_cap < 1 or args.series_cap < 1:
            raise UsageError("caps must be positive")
        return cls(
            command=args.command,
            spec=None if args.command == "scan" else _spec_from(args, required=args.command == "compute"),
            mode=args.mode,
            digits=_digits(args),
            fmt=args.fmt,
            out=args.out,
            element_cap=args.element_cap,
            series_cap=args.series_cap,
            args=args,
        )


# -- formatting -------------------------------------------------------------


def _float_str(x, digits: int) -> str:
    """Decimal string with ``digits`` significant digits and no exponent."""
    if not x:
        return "0"
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(mpmath.mpf(x), digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)


def report_record(spec: GroupSpec, mode: str, digits: int, element_cap: int) -> dict:
    """One report as a flat dict of JSON-safe values (exact values as strings)."""
    if mode == "float":
        z = c_float(spec, digits, element_cap)
        rec = dict.fromkeys(REPORT_FIELDS)
        rec.update(family=spec.family, params=spec.params(), group_order=spec.order,
                   c_float_re=_float_str(z.real, digits), c_float_im=_float_str(z.imag, digits))
        return rec
    r = compute_c(spec, element_cap=element_cap, digits=digits)
    with mpmath.workdps(digits + 10):
        z = embed(r.c_exact, digits)
    return {
        "family": spec.family,
        "params": spec.params(),
        "group_order": spec.order,
        "phi0": format_exact(r.phi0),
        "c_exact": format_exact(r.c_exact),
        "c_float_re": _float_str(z.real, digits),
        "c_float_im": _float_str(z.imag, digits),
        "c1": format_exact(r.c1),
        "c2": format_exact(r.c2),
        "parity_720c": str(r.parity.value_720c) if r.parity else None,
        "parity_odd": r.parity.odd if r.parity else None,
        "verdict": r.verdict,
        "paper_hypothesis_met": r.paper_hypothesis_met,
    }


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _flat(rec: dict) -> dict:
    out = dict(rec)
    if isinstance(out.get("params"), dict):
        out["params"] = ";".join(f"{k}={v}" for k, v in out["params"].items())
    return {k: ("" if v is None else v) for k, v in out.items()}


def dumps_csv(rows: list[dict], fields: list[str] | tuple[str, ...]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(_flat(row))
    return buf.getvalue()


def dumps_text(rows: list[dict]) -> str:
    blocks = []
    for row in rows:
        flat = _flat(row)
        width = max(len(k) for k in flat)
        blocks.append("\n".join(f"{k.ljust(width)}  {v}" for k, v in flat.items()))
    return "\n\n".join(blocks) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def render(rows: list[dict], fmt: str, fields) -> str:
    if fmt == "json":
        return dumps_json(rows[0] if len(rows) == 1 else rows)
    if fmt == "csv":
        return dumps_csv(rows, fields)
    return dumps_text(rows)


# -- argument parsing ---------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _family(text: str) -> str:
    for f in FAMILIES:
        if f.lower() == text.lower():
            return f
    raise argparse.ArgumentTypeError(f"unknown family {text!r}; choose from {', '.join(FAMILIES)}")


def _add_common(p: argparse.ArgumentParser, group_args: bool = True) -> None:
    if group_args:
        p.add_argument("--family", type=_family, help="trivial, Q, D, P48, P120 or Pprime")
        p.add_argument("--n", type=int, default=1)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--p", type=int, default=1, help="order of the cyclic scalar factor")
        p.add_argument("--root-a", type=int, default=1)
        p.add_argument("--root-b", type=int, default=1)
        p.add_argument("--root-u", type=int, default=1)
        p.add_argument("--root-beta", type=int, default=1)
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--digits", type=int, default=None, help="float precision (default from BQKE_DIGITS or 30)")
    p.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default=None)
    p.add_argument("--out", default=None, help="write output to this path")
    p.add_argument("--element-cap", type=int, default=10**6)
    p.add_argument("--series-cap", type=int, default=DEFAULT_SERIES_CAP)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bqke", description="Exact Kaehler-Einstein obstruction for ball quotients.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute C and the verdict for one group")
    _add_common(p)

    p = sub.add_parser("table", help="recompute a reference table")
    p.add_argument("selector", choices=("p48", "p120", "pprime"))
    _add_common(p, group_args=False)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=("groups", "f-identity", "laurent", "routes", "parity", "c2", "bounds",
                                     "nonvanishing", "tables", "all"))
    _add_common(p)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--pset", type=_int_list, default=None)

    p = sub.add_parser("scan", help="verdicts over a parameter grid")
    _add_common(p)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--mmax", type=int, default=None)
    p.add_argument("--pset", type=_int_list, default=None)
    p.add_argument("--workers", type=int, default=1)
    return parser


def _spec_from(args, required: bool = True) -> GroupSpec | None:
    if getattr(args, "family", None) is None:
        if required:
            raise UsageError("--family is required")
        return None
    m = args.m if args.m is not None else (2 if args.family == "D" else 1)
    return GroupSpec(args.family, n=args.n, m=m, p=args.p, root_a=args.root_a, root_b=args.root_b,
                     root_u=args.root_u, root_beta=args.root_beta)


def _digits(args) -> int:
    d = args.digits if args.digits is not None else default_digits()
    if d < 15:
        raise UsageError("--digits must be at least 15")
    return d


# -- commands -------------------------------------------------------------------


def cmd_compute(config: RunConfig) -> int:
    rec = report_record(config.spec, config.mode, config.digits, config.element_cap)
    emit(render([rec], config.fmt or "json", REPORT_FIELDS), config.out)
    return EXIT_OK


TABLE_FIELDS = ("m", "p", "C(Gamma)", "reference", "rel_err", "match")


def cmd_table(config: RunConfig) -> int:
    digits = config.digits
    rows = []
    for row in verify.recompute_table(config.args.selector):
        with mpmath.workdps(digits + 10):
            value = embed(row["exact"], digits).real
        rows.append({
            "m": row["m"],
            "p": row["p"],
            "C(Gamma)": _float_str(value, 16),
            "reference": row["reference"],
            "rel_err": f"{row['rel_err']:.3e}",
            "match": "yes" if row["match"] else "NO",
        })
    emit(render(rows, config.fmt or "csv", TABLE_FIELDS), config.out)
    bad = [r for r in rows if r["match"] != "yes"]
    for r in bad:
        print(f"mismatch: m={r['m'] or '-'} p={r['p']} computed {r['C(Gamma)']} table {r['reference']}",
              file=sys.stderr)
    return EXIT_MISMATCH if bad else EXIT_OK


def _suite_checks(name: str, config: RunConfig) -> list[verify.Check]:
    spec, args = config.spec, config.args
    if name == "f-identity":
        return verify.suite_f_identity(args.nmax or 60)
    if name == "laurent":
        return verify.suite_laurent([spec] if spec else None, series_cap=config.series_cap)
    if name == "routes":
        return verify.suite_three_routes([spec] if spec else None)
    if name == "groups":
        return verify.suite_groups([spec] if spec else None)
    if name == "parity":
        if spec and args.nmax is None:
            return verify.suite_parity([spec])
        nmax = args.nmax or 5
        pset = args.pset or list(verify.PARITY_PRIMES)
        grid = verify.parity_grid(nmax=nmax, pset=pset)
        if spec:
            grid = [s for s in grid if s.family == spec.family]
        return verify.suite_parity(grid)
    if name == "nonvanishing":
        return verify.suite_nonvanishing([spec] if spec else None)
    return verify.SUITES[name]()


def cmd_verify(config: RunConfig) -> int:
    suite = config.args.suite
    names = list(verify.SUITES) if suite == "all" else [suite]
    checks = []
    for name in names:
        checks += _suite_checks(name, config)
    fmt = config.fmt or "text"
    if fmt == "json":
        text = dumps_json({"passed": verify.passed(checks), "checks": [c.as_dict() for c in checks]})
    elif fmt == "csv":
        text = dumps_csv([c.as_dict() for c in checks], ("suite", "name", "ok", "detail"))
    else:
        lines = [f"{'PASS' if c.ok else 'FAIL'}  {c.suite:<13} {c.name:<22} {c.detail}" for c in checks]
        npass = sum(c.ok for c in checks)
        lines.append(f"{npass}/{len(checks)} checks passed")
        text = "\n".join(lines) + "\n"
    emit(text, config.out)
    return EXIT_OK if verify.passed(checks) else EXIT_MISMATCH


SCAN_FIELDS = ("family", "params", "group_order", "phi0", "c_exact", "c_float_re", "verdict")


def scan_grid(args) -> list[GroupSpec]:
    from .groups import iter_family_grid

    families = [args.family] if args.family else list(FAMILIES)
    nmax = args.nmax or max(args.n, 1)
    mmax = args.mmax or (args.m or 2)
    ns = range(1, nmax + 1) if args.nmax else [args.n]
    ms = range(1, mmax + 1) if args.mmax else [args.m if args.m is not None else (2 if args.family == "D" else 1)]
    ps = args.pset or [args.p]
    return list(iter_family_grid(families, ns, ms, ps))


def _scan_one(payload):
    spec, mode, digits, cap = payload
    return report_record(spec, mode, digits, cap)


def cmd_scan(config: RunConfig) -> int:
    specs = scan_grid(config.args)
    if not specs:
        raise UsageError("the grid contains no valid group")
    payloads = [(s, config.mode, config.digits, config.element_cap) for s in specs]
    if config.args.workers > 1:
        with ProcessPoolExecutor(max_workers=config.args.workers) as pool:
            rows = list(pool.map(_scan_one, payloads))
    else:
        rows = [_scan_one(p) for p in payloads]
    emit(render(rows, config.fmt or "csv", SCAN_FIELDS), config.out)
    if config.mode == "float":
        return EXIT_OK
    bad = [r for r, s in zip(rows, specs) if s.order > 1 and r["verdict"] == "KE_possible"]
    for r in bad:
        print(f"not obstructed: {r['family']} {r['params']}", file=sys.stderr)
    return EXIT_MISMATCH if bad else EXIT_OK


COMMANDS = {"compute": cmd_compute, "table": cmd_table, "verify": cmd_verify, "scan": cmd_scan}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        config = RunConfig.from_args(args)
        return COMMANDS[config.command](config)
    except (UsageError, InvalidGroupSpec, CapExceeded, ValueError) as exc:
        print(f"bqke: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, LaurentStructureError) as exc:
        print(f"bqke: verification failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except Exception as exc:  # keep the exit-code contract for anything unexpected
        print(f"bqke: internal error: {exc!r}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
