"""Command line: ``thresholds``, ``reproduce`` and ``certify``.

Exit codes are 0 on success, 1 on numeric or convergence failure (or a
reproduction mismatch) and 2 on usage errors.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .certifier import certify
from .engine import NEGLIGIBLE, OptimizerConfig, build_table
from .errors import ConvergenceFailure, InvalidMeasurementError, StellarRankError
from .families import WitnessFamily
from .reference import FOCK_KS, threshold_cells, fock_cells
from .tableio import RunManifest, read_json, write_csv, write_json

log = logging.getLogger("stellarank")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

# flag dest -> OptimizerConfig field
_OPT_FLAGS = {
    "grid": "grid",
    "lambda_grid": "lambda_grid",
    "refine": "refine_rounds",
    "starts": "starts",
    "zmax": "zmax",
    "rmax": "rmax",
    "dim_cap": "dim_cap",
    "tol": "tol",
    "threads": "threads",
}


class UsageError(Exception):
    pass


def _add_optimizer_flags(p):
    g = p.add_argument_group("optimizer")
    g.add_argument("--config", type=Path, help="JSON file with an 'optimizer' section")
    g.add_argument("--grid", type=int, help="grid points per Gaussian parameter")
    g.add_argument("--lambda-grid", type=int, help="grid points for the variance shift")
    g.add_argument("--refine", type=int, help="local refinement rounds")
    g.add_argument("--starts", type=int, help="grid incumbents to refine")
    g.add_argument("--zmax", type=float, help="bound on |Re z| and |Im z|")
    g.add_argument("--rmax", type=float, help="bound on |r|")
    g.add_argument("--dim-cap", type=int, help="largest truncation tried")
    g.add_argument("--tol", type=float, help="truncation convergence tolerance")
    g.add_argument("--threads", type=int, help="worker threads (default from STELLARANK_THREADS)")


def _add_family_flags(p, required=True):
    p.add_argument("--family", choices=("cubic", "gkp", "cat", "fock"), required=required)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--fx", type=float, default=None)
    p.add_argument("--fp", type=float, default=None)
    p.add_argument("--alpha", type=complex, default=2.0)
    p.add_argument("--parity", choices=("even", "odd"), default=None)
    p.add_argument("--k", type=int, default=None)


def config_from_args(args):
    """Flags override the config file, which overrides built-in defaults."""
    values = {}
    if getattr(args, "config", None) is not None:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        values.update(doc.get("optimizer", doc))
    for flag, name in _OPT_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[name] = v
    try:
        return OptimizerConfig.from_dict(values)
    except (StellarRankError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def family_from_args(args):
    try:
        if args.family == "cubic":
            return WitnessFamily.cubic(args.kappa)
        if args.family == "gkp":
            kw = {}
            if args.fx is not None:
                kw["fx"] = args.fx
            if args.fp is not None:
                kw["fp"] = args.fp
            return WitnessFamily.gkp(**kw)
        if args.family == "cat":
            return WitnessFamily.cat(args.alpha, -1 if args.parity == "odd" else 1)
        if args.k is None:
            raise UsageError("--family fock needs --k")
        return WitnessFamily.fock(args.k)
    except StellarRankError as exc:
        raise UsageError(str(exc)) from exc


def family_slug(family):
    if family.kind == "cubic":
        return f"cubic_kappa{family.kappa:g}"
    if family.kind == "gkp":
        return "gkp"
    if family.kind == "cat":
        par = "even" if family.parity_sign > 0 else "odd"
        return f"cat_{par}_alpha{abs(family.alpha):g}"
    return f"fock_k{family.k}"


def fmt(v):
    return f"{v:.4f}"


def render_table(table):
    q_raw, q_norm = ("V", "xi") if table.witness_kind == "variance" else ("W", "zeta")
    lines = [f"# {table.family.label}", f"{'m':>3}  {q_raw + '_m':>8}  {q_norm + '_m':>8}  conv  dim"]
    for e, raw, norm in zip(table.entries, table.raw, table.normalized):
        mark = "*" if e.negligible else " "
        lines.append(f"{e.m:>3}  {fmt(raw):>8}{mark} {fmt(norm):>8}  {'yes' if e.converged else 'NO ':>4}  {e.dim_used}")
    return "\n".join(lines)


def _progress(family):
    def report(m, value):
        log.info("%s m=%d %.6f", family.label, m, value)
    return report


def cmd_thresholds(args):
    family = family_from_args(args)
    cfg = config_from_args(args)
    table = build_table(family, args.mmax, cfg, progress=_progress(family))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = family_slug(family)
    paths = {"csv": str(out / f"{stem}.csv"), "json": str(out / f"{stem}.json")}
    manifest = RunManifest.for_table(table, cfg, paths)
    write_csv(table, paths["csv"])
    write_json(table, paths["json"], manifest)
    if args.json:
        print(json.dumps({"table": table.to_dict(), "outputs": paths}, indent=2))
    else:
        print(render_table(table))
        print(f"wrote {paths['csv']} and {paths['json']}")
    if not table.converged:
        log.error("truncation did not converge for some ranks; results flagged")
        return EXIT_NUMERIC
    return EXIT_OK


def reproduction_targets(args):
    """(label, family, m_max, reference cells as [(cell, scale)]) for the chosen subset."""
    targets = []
    want = args.family
    if want in (None, "cubic"):
        targets.append(("cubic", WitnessFamily.cubic(), 10, "cubic"))
    if want in (None, "gkp"):
        targets.append(("gkp", WitnessFamily.gkp(), 10, "gkp"))
    if want in (None, "cat"):
        for parity, sign in (("even", 1), ("odd", -1)):
            if args.parity in (None, parity):
                targets.append((f"cat_{parity}", WitnessFamily.cat(2.0, sign), 10, f"cat_{parity}"))
    if want in (None, "fock"):
        ks = FOCK_KS if args.k is None else (args.k,)
        for k in ks:
            targets.append((f"fock_k{k}", WitnessFamily.fock(k), 10, None))
    return targets


def compare_table(table, column, tolerance):
    """Rows ``(cell, computed, diff, ok)`` against the printed values."""
    rows = []
    if column is not None:
        checks = [(c, table.raw) for c in threshold_cells(column)]
        checks += [(c, table.normalized) for c in threshold_cells(column, normalized=True)]
    else:
        checks = [(c, table.raw) for c in fock_cells(table.family.k)]
    for cell, values in checks:
        got = values[cell.m]
        if cell.negligible:
            rows.append((cell, got, None, abs(got) < NEGLIGIBLE))
        else:
            diff = got - cell.value
            rows.append((cell, got, diff, abs(diff) <= tolerance))
    if column is None:
        for m in range(table.family.k, len(table.raw)):
            rows.append((None, table.raw[m], None, table.raw[m] == 0.0))
    return rows


def cmd_reproduce(args):
    cfg = config_from_args(args)
    if args.k is not None and args.k not in FOCK_KS:
        raise UsageError("--k must be between 1 and 10 for reproduction")
    report, failures = [], 0
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    for label, family, m_max, column in reproduction_targets(args):
        table = build_table(family, m_max, cfg, progress=_progress(family))
        if out:
            write_json(table, out / f"{label}.json", RunManifest.for_table(table, cfg))
            write_csv(table, out / f"{label}.csv")
        for cell, got, diff, ok in compare_table(table, column, args.tolerance):
            failures += not ok
            if cell is None:
                coord, ref, d = f"fock k={family.k} zero cell", "0", ""
            else:
                coord = cell.coordinate
                ref = "*" if cell.negligible else fmt(cell.value)
                d = "" if diff is None else f"{diff:+.4f}"
            report.append((coord, ref, fmt(got), d, "ok" if ok else "FAIL"))
            if not args.json:
                print(f"{coord:<40} reference={ref:>7} computed={fmt(got):>7} diff={d:>8} {report[-1][-1]}")
    if out:
        with (out / "reproduce_report.csv").open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("cell", "reference", "computed", "diff", "status"))
            w.writerows(report)
    if args.json:
        print(json.dumps([dict(zip(("cell", "reference", "computed", "diff", "status"), r)) for r in report], indent=2))
    else:
        print(f"{len(report) - failures}/{len(report)} cells within {args.tolerance}")
    return EXIT_NUMERIC if failures else EXIT_OK


def cmd_certify(args):
    if args.table is not None:
        path = Path(args.table)
        if not path.exists():
            log.error("table file %s not found", path)
            return EXIT_NUMERIC
        table, _ = read_json(path)
    elif args.family is not None:
        table = build_table(family_from_args(args), args.mmax, config_from_args(args))
    else:
        raise UsageError("certify needs --table or --family options")
    try:
        result = certify(args.value, table, args.scale)
    except InvalidMeasurementError as exc:
        raise UsageError(str(exc)) from exc
    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
    else:
        crossed = "none" if result.crossed_threshold is None else fmt(result.crossed_threshold)
        print(f"stellar rank >= {result.certified_min_rank}  "
              f"(value {result.witness_value:.4f}, crossed threshold {crossed}, scale {result.scale})")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="stellarank", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("thresholds", help="compute a threshold table for one family")
    _add_family_flags(t)
    t.add_argument("--mmax", type=int, default=10)
    t.add_argument("--out", default=".", help="directory for the CSV and JSON files")
    t.add_argument("--json", action="store_true")
    _add_optimizer_flags(t)
    t.set_defaults(func=cmd_thresholds)

    r = sub.add_parser("reproduce", help="recompute the published tables and diff them")
    r.add_argument("--family", choices=("cubic", "gkp", "cat", "fock"))
    r.add_argument("--parity", choices=("even", "odd"))
    r.add_argument("--k", type=int)
    r.add_argument("--tolerance", type=float, default=0.005)
    r.add_argument("--out", default=None)
    r.add_argument("--json", action="store_true")
    _add_optimizer_flags(r)
    r.set_defaults(func=cmd_reproduce)

    c = sub.add_parser("certify", help="certify a measured witness value")
    c.add_argument("--table", type=Path)
    _add_family_flags(c, required=False)
    c.add_argument("--mmax", type=int, default=10)
    c.add_argument("--value", type=float, required=True)
    c.add_argument("--scale", choices=("normalized", "raw"), default="normalized")
    c.add_argument("--json", action="store_true")
    _add_optimizer_flags(c)
    c.set_defaults(func=cmd_certify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"stellarank: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceFailure as exc:
        print(f"stellarank: convergence failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except StellarRankError as exc:
        print(f"stellarank: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
