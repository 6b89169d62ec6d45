"""Command-line front end.

Exit codes: 0 success, 1 usage or validation error, 2 a theorem check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from fractions import Fraction

from . import theorems as th
from .errors import ExhaustedStratum, StratError
from .exact import as_ratio, fmt_ratio
from .model import (
    CAP_ENV,
    Allocation,
    AllocationClass,
    Mode,
    RedDistribution,
    StratifiedPopulation,
    build_scenario,
    enumeration_cap,
    iter_populations,
)
from .oracle import best_allocation, minimax_value, worst_nature
from .simulate import SimConfig, estimate
from .variance import Kind, nature_relaxed_max, proportional_decomposition, report, var_strat_with

EXIT_OK, EXIT_USAGE, EXIT_PROPERTY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _ratio_list(text):
    return [x.strip() for x in text.split(",") if x.strip()]


def _ratio(x):
    d = {"exact": fmt_ratio(x), "decimal": float(x)}
    return d


def _show(x):
    if isinstance(x, dict) and set(x) == {"exact", "decimal"}:
        return f"{x['exact']} ({x['decimal']!r})"
    if isinstance(x, (list, dict)):
        return json.dumps(x, separators=(",", ":"))
    return str(x)


# ---------------------------------------------------------------- output


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _render(payload, fmt, rows=None, header=None):
    """``payload`` is the JSON document; ``rows``/``header`` the tabular view."""
    if fmt == "json":
        return dumps_json(payload)
    if rows is None:
        items = payload if isinstance(payload, list) else [payload]
        header = list(items[0].keys()) if items else []
        rows = [[_show(item.get(k)) for k in header] for item in items]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) for i, h in enumerate(header)] if rows else []
    lines = ["  ".join(str(h).ljust(wd) for h, wd in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * wd for wd in widths))
    for r in rows:
        lines.append("  ".join(str(c).ljust(wd) for c, wd in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- inputs


def _load_file(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read scenario file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("scenario file must hold a JSON object")
    unknown = set(data) - {"sizes", "reds", "alloc"}
    if unknown:
        raise UsageError(f"unknown scenario fields: {sorted(unknown)}")
    return data


def _inputs(args):
    data = _load_file(args.scenario) if getattr(args, "scenario", None) else {}
    for field in ("sizes", "reds", "alloc"):
        value = getattr(args, field, None)
        if value is not None:
            data[field] = value
    return data


def _need(data, field):
    if data.get(field) is None:
        raise UsageError(f"missing --{field} (or '{field}' in the scenario file)")
    return data[field]


def _scenario(args):
    data = _inputs(args)
    return build_scenario(_need(data, "sizes"), _need(data, "reds"), _need(data, "alloc"))


def _population(args):
    return StratifiedPopulation(tuple(_need(_inputs(args), "sizes")))


# ---------------------------------------------------------------- commands


def cmd_variance(args):
    sc = _scenario(args)
    kinds = list(Kind) if args.kind == "all" else [Kind(args.kind)]
    reports = [report(sc, k).to_dict() for k in kinds]
    inputs = reports[0]["inputs"]
    rows = [[json.dumps(inputs["sizes"]), json.dumps(inputs["reds"]), json.dumps(inputs["alloc"]),
             r["kind"], r["exact"], repr(r["decimal"])] for r in reports]
    payload = reports[0] if len(reports) == 1 else reports
    return _render(payload, args.format, rows, ["sizes", "reds", "alloc", "kind", "exact", "decimal"]), EXIT_OK


def cmd_decompose(args):
    sc = _scenario(args)
    simple, spread = proportional_decomposition(sc)
    payload = {
        "simple_with": _ratio(simple),
        "heterogeneity": _ratio(spread),
        "strat_with": _ratio(var_strat_with(sc)),
    }
    return _render(payload, args.format), EXIT_OK


def cmd_theorems(args):
    ids = th.THEOREM_IDS if args.id == ["all"] else args.id
    overrides = {
        "max_N": args.max_N, "min_N": args.min_N, "max_m": args.max_m, "min_m": args.min_m,
        "max_stratum": args.max_stratum, "adversarial": args.adversarial or None,
        "p_values": tuple(as_ratio(p) for p in args.p_values) if args.p_values else None,
    }
    reports = [th.check_theorem(i, overrides) for i in ids]
    docs = []
    for rep in reports:
        d = rep.to_dict()
        d["equality_cases"] = d["equality_cases"][: args.witnesses]
        d["probes"] = d["probes"][: args.witnesses]
        d["equality_count"] = len(rep.equality_cases)
        d["probe_count"] = len(rep.probes)
        docs.append(d)
    rows = [[d["theorem"], d["verdict"], d["instances"], d["failures"], d["equality_count"],
             d["probe_count"], _show(d["counterexample"]) if d["counterexample"] else "-"] for d in docs]
    header = ["theorem", "verdict", "instances", "failures", "equalities", "probes", "counterexample"]
    if args.format == "table":
        text = "".join(f"theorem {d['theorem']}: {d['verdict']}, {d['failures']} failures "
                       f"({d['instances']} instances)\n" for d in docs)
        text += _render(None, "table", rows, header)
    else:
        text = _render(docs if len(docs) > 1 else docs[0], args.format, rows, header)
    code = EXIT_PROPERTY if any(r.failures for r in reports) else EXIT_OK
    return text, code


def cmd_minimax(args):
    pop = _population(args)
    mm = minimax_value(pop, args.n, args.R, args.klass, cap=args.cap, workers=args.workers)
    return _render(mm.to_dict(), args.format), EXIT_OK


def cmd_worst_nature(args):
    pop = _population(args)
    alloc = Allocation(pop, tuple(_need(_inputs(args), "alloc")))
    res = worst_nature(pop, alloc, args.R, cap=args.cap)
    doc = res.to_dict()
    try:
        value, argmax = nature_relaxed_max(pop, alloc, Fraction(args.R, pop.N))
        doc["relaxed_max"] = _ratio(value)
        doc["relaxed_argmax"] = [fmt_ratio(x) for x in argmax]
    except ExhaustedStratum as exc:
        doc["relaxed_max"] = None
        doc["relaxed_argmax"] = str(exc)
    return _render(doc, args.format), EXIT_OK


def cmd_best_alloc(args):
    pop = _population(args)
    data = _inputs(args)
    reds = _need(data, "reds")
    mode = Mode.RATIONAL if any(isinstance(r, str) and "/" in r for r in reds) else Mode.INTEGER
    res = best_allocation(pop, RedDistribution(pop, tuple(reds), mode), args.n, args.klass, cap=args.cap)
    doc = res.to_dict()
    if mode is Mode.RATIONAL:
        doc["distribution"] = [fmt_ratio(x) for x in res.distribution.reds]
    return _render(doc, args.format), EXIT_OK


def cmd_simulate(args):
    sc = _scenario(args)
    res = estimate(SimConfig(sc, args.kind, args.trials, args.seed, args.workers))
    if args.format == "json":
        return dumps_json(res.to_dict()), EXIT_OK
    return _render(None, args.format, [res.csv_row()], list(res.CSV_HEADER)), EXIT_OK


def cmd_sweep(args):
    kinds = list(Kind) if args.kind == "all" else [Kind(args.kind)]
    pops = list(iter_populations(args.min_N, args.max_N, args.min_m, args.max_m))
    total = 0
    for pop in pops:
        a = b = 1
        for s in pop.sizes:
            a *= s
            b *= s + 1
        total += a * b * len(kinds)
    cap = enumeration_cap(args.cap)
    if total > cap:
        raise StratError(f"sweep of {total} rows exceeds cap {cap}")
    rows, docs = [], []
    for pop in pops:
        for alloc in itertools.product(*(range(1, s + 1) for s in pop.sizes)):
            for reds in itertools.product(*(range(s + 1) for s in pop.sizes)):
                sc = build_scenario(pop.sizes, reds, alloc)
                for k in kinds:
                    r = report(sc, k)
                    rows.append([json.dumps(list(pop.sizes)), json.dumps(list(reds)),
                                 json.dumps(list(alloc)), k.value, fmt_ratio(r.exact), repr(r.decimal)])
                    if args.format == "json":
                        docs.append(r.to_dict())
    return _render(docs, args.format, rows, ["sizes", "reds", "alloc", "kind", "exact", "decimal"]), EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "csv"))
    common.add_argument("--cap", type=int, help=f"enumeration cap (overrides ${CAP_ENV})")

    scen = _Parser(add_help=False)
    scen.add_argument("--scenario", help="JSON file with sizes, reds, alloc")
    scen.add_argument("--sizes", type=_int_list)
    scen.add_argument("--reds", type=_ratio_list, help="red counts, or num/den fractions")
    scen.add_argument("--alloc", type=_int_list)

    klass = _Parser(add_help=False)
    klass.add_argument("--class", dest="klass", choices=[c.value for c in AllocationClass])

    parser = _Parser(prog="stratvar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("variance", parents=[common, scen], help="exact estimator variances")
    p.add_argument("--kind", choices=["all"] + [k.value for k in Kind], default="all")
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("decompose", parents=[common, scen], help="proportional-allocation decomposition")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("theorems", parents=[common], help="exhaustive theorem checks")
    p.add_argument("--id", nargs="+", default=["all"], type=str.upper,
                   choices=["ALL", *th.THEOREM_IDS], metavar="ID")
    p.add_argument("--max-N", dest="max_N", type=int)
    p.add_argument("--min-N", dest="min_N", type=int)
    p.add_argument("--max-m", dest="max_m", type=int)
    p.add_argument("--min-m", dest="min_m", type=int)
    p.add_argument("--max-stratum", type=int)
    p.add_argument("--p-values", type=_ratio_list)
    p.add_argument("--adversarial", action="store_true", help="probe out-of-hypothesis instances")
    p.add_argument("--witnesses", type=int, default=20, help="max witnesses listed per report")
    p.set_defaults(func=cmd_theorems)

    p = sub.add_parser("minimax", parents=[common, scen, klass], help="Statistician-vs-Nature game value")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R", type=int, required=True, help="total red balls")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_minimax, default_class="admissible")

    p = sub.add_parser("worst-nature", parents=[common, scen], help="Nature's best reply to an allocation")
    p.add_argument("--R", type=int, required=True)
    p.set_defaults(func=cmd_worst_nature)

    p = sub.add_parser("best-alloc", parents=[common, scen, klass], help="Statistician's best allocation")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_best_alloc, default_class="all")

    p = sub.add_parser("simulate", parents=[common, scen], help="seeded Monte Carlo")
    p.add_argument("--kind", choices=[k.value for k in Kind], default="strat-without")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="variances over every small scenario")
    p.add_argument("--min-N", dest="min_N", type=int, default=4)
    p.add_argument("--max-N", dest="max_N", type=int, default=6)
    p.add_argument("--min-m", dest="min_m", type=int, default=2)
    p.add_argument("--max-m", dest="max_m", type=int, default=2)
    p.add_argument("--kind", choices=["all"] + [k.value for k in Kind], default="all")
    p.set_defaults(func=cmd_sweep, default_format="csv")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        # parent-parser actions are shared, so per-command defaults are applied here
        if args.format is None:
            args.format = getattr(args, "default_format", "table")
        if getattr(args, "klass", "") is None:
            args.klass = args.default_class
        if args.cap is not None:
            enumeration_cap(args.cap)
        text, code = args.func(args)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except (StratError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    stdout.write(text)
    return code


def main():  # pragma: no cover
    sys.exit(run())
