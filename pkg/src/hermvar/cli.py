"""Command-line interface: ``hermvar <subcommand> [options]``.

Exit status: 0 success, 1 usage or validation error, 2 runtime error.
Options can also come from an INI file (``--config``): keys in ``[defaults]``
apply to every subcommand, keys in a section named after the subcommand apply
to it alone; command-line flags win.  Keys are option names with dashes or
underscores (``h-fn = cube``, ``reps = 50``); list options take
comma-separated values.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, farima
from .errors import HermvarError, ValidationError
from .harness import (ExperimentConfig, SweepConfig, clt_sweep, default_threads, dumps,
                      run_table)
from .meyer import cached_weight_table
from .oracle import SUITES, run_suite
from .simulator import NORMALIZATIONS, HermiteParams, SimGrid, build_path
from .variations import (VariationConfig, centered_stat, modified_power_variation,
                         moment_mu, special_increments, weight_fn, weighted_variation)

class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).replace(",", " ").split()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in str(text).replace(",", " ").split()]


def _add_global(p):
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0, help="base seed (replication r uses seed XOR r)")
    g.add_argument("--threads", type=int, default=None,
                   help="worker processes across replications (default $HERMVAR_THREADS or 1)")
    g.add_argument("--out", default=None, help="output file (default: standard output)")
    g.add_argument("--format", choices=("csv", "json"), default=None)
    g.add_argument("--config", default=None, help="INI file with option defaults")
    g.add_argument("--log-level", default="WARNING")


def _add_process(p, hurst_list=False):
    if hurst_list:
        p.add_argument("--q", type=_ints, default=[1], help="chaos orders, e.g. 1,2,3")
        p.add_argument("--hurst", type=_floats, default=[0.6, 0.7, 0.8, 0.9])
    else:
        p.add_argument("--q", type=int, default=1)
        p.add_argument("--hurst", type=float, default=0.7)
    p.add_argument("--J", type=int, default=18)
    p.add_argument("--a", type=float, default=0.99)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--normalization", choices=NORMALIZATIONS, default="unit")


def _add_variation(p, stat=False):
    p.add_argument("--N", type=int, default=17)
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--h-fn", default="identity",
                   help="identity, cube, exp, sqrt, one or const:<c>")
    if stat:
        p.add_argument("--stat", choices=("S", "V", "U"), default="S")


def build_parser() -> Parser:
    parser = Parser(prog="hermvar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=Parser, required=True)

    p = sub.add_parser("simulate", help="simulate one path; rows t,value at the node times")
    _add_process(p)
    p.add_argument("--horizon", type=float, default=1.0)
    _add_global(p)

    p = sub.add_parser("dump-farima", help="one FARIMA(0,delta,0) draw as index,value")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--length", type=int, default=1024)
    p.add_argument("--start", type=int, default=0)
    _add_global(p)

    p = sub.add_parser("dump-weights", help="print the product-integral weight table")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--hurst", type=float, default=0.7)
    p.add_argument("--J", type=int, default=18)
    p.add_argument("--eps", type=float, default=1e-3)
    _add_global(p)

    p = sub.add_parser("variation", help="S, V or U statistic of one simulated path")
    _add_process(p)
    _add_variation(p, stat=True)
    _add_global(p)

    p = sub.add_parser("estimate-volatility", help="integrated volatility over replications")
    _add_process(p)
    _add_variation(p)
    p.add_argument("--reps", type=int, default=100)
    _add_global(p)

    p = sub.add_parser("mc-table", help="Monte Carlo table: rows q, columns H")
    _add_process(p, hurst_list=True)
    _add_variation(p)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--preset", choices=("full", "reduced"), default=None,
                   help="reduced sets J=14, N=13")
    p.add_argument("--json-sidecar", default=None,
                   help="JSON report path when writing CSV (default: <out>.json)")
    _add_global(p)

    p = sub.add_parser("clt-sweep", help="normality diagnostics of V or U across N")
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--hurst", type=float, default=0.7)
    p.add_argument("--N", type=_ints, default=[11, 13, 15])
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--stat", choices=("V", "U"), default="V")
    p.add_argument("--h-fn", default="identity")
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--J", type=int, default=None,
                   help="simulator resolution (q = 1 defaults to exact fBm paths)")
    _add_global(p)

    p = sub.add_parser("oracle-check", help="desk-scale chaos-oracle suites")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--hurst", type=float, default=0.7)
    p.add_argument("--reps", type=int, default=10_000)
    _add_global(p)
    return parser


# -- configuration file --------------------------------------------------------------

def _config_path(argv) -> str | None:
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if arg.startswith("--config="):
            return arg.split("=", 1)[1]
    return None


def apply_config(parser: Parser, argv, path: str) -> None:
    """Turn INI entries into parser defaults for the chosen subcommand."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if not cp.read(path):
        raise ValidationError(f"cannot read config file {path}")
    command = next((a for a in argv if not a.startswith("-")), None)
    sub = parser._subparsers._group_actions[0].choices.get(command)
    if sub is None:
        return
    actions = {a.dest: a for a in sub._actions}
    values = {}
    if cp.has_section("defaults"):
        # shared keys only apply where the subcommand has such an option
        values = {k: v for k, v in cp["defaults"].items() if k.replace("-", "_") in actions}
    if cp.has_section(command):
        values.update(cp[command])
    for key, raw in values.items():
        action = actions.get(key.replace("-", "_"))
        if action is None or key in ("config", "help"):
            raise ValidationError(f"unknown key {key!r} in section [{command}] of {path}")
        try:
            action.default = action.type(raw) if action.type else raw
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad value for {key!r} in {path}: {exc}") from None
        if action.choices and action.default not in action.choices:
            raise ValidationError(f"{key!r} must be one of {list(action.choices)}")


# -- output -------------------------------------------------------------------------

def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _threads(args) -> int:
    return args.threads if args.threads is not None else default_threads()


# -- subcommands ----------------------------------------------------------------------

def cmd_simulate(args) -> None:
    params = HermiteParams(args.q, args.hurst)
    grid = SimGrid(J=args.J, a=args.a, eps=args.eps, horizon=args.horizon)
    path = build_path(params, grid, args.seed, normalization=args.normalization)
    t, v = path.node_times, path.node_values
    if args.format == "json":
        _emit(args, dumps({"config": {"q": args.q, "hurst": args.hurst, "J": args.J, "a": args.a,
                                      "eps": args.eps, "horizon": args.horizon,
                                      "normalization": args.normalization},
                           "seed": args.seed, "t": t, "value": v}))
    else:
        _emit(args, _csv_text(["t", "value"], ([repr(float(a)), repr(float(b))]
                                               for a, b in zip(t, v))))


def cmd_dump_farima(args) -> None:
    seq = farima.generate(farima.FarimaParams(args.delta, args.length, args.seed), args.start)
    idx = np.arange(seq.start_index, seq.stop_index)
    if args.format == "json":
        _emit(args, dumps({"delta": args.delta, "seed": args.seed, "index": idx,
                           "value": seq.values}))
    else:
        _emit(args, _csv_text(["index", "value"], ([int(i), repr(float(x))]
                                                   for i, x in zip(idx, seq.values))))


def cmd_dump_weights(args) -> None:
    params = HermiteParams(args.q, args.hurst)
    max_diff = SimGrid(J=args.J, eps=args.eps).max_diff
    table = cached_weight_table(args.q, params.delta, max_diff)
    meta = {"q": table.q, "delta": table.delta, "ds": table.ds, "S": table.halfwidth,
            "max_diff": table.max_diff}
    if args.format == "json":
        _emit(args, dumps({**meta, "entries": [{"d": list(k), "weight": w}
                                               for k, w in sorted(table.entries.items())]}))
    else:
        head = "".join(f"# {k}={v!r}\n" for k, v in meta.items())
        cols = [f"d{i}" for i in range(2, table.q + 1)] + ["weight"]
        _emit(args, head + _csv_text(cols, ([*k, repr(float(w))]
                                            for k, w in sorted(table.entries.items()))))


def cmd_variation(args) -> None:
    params = HermiteParams(args.q, args.hurst)
    vc = VariationConfig(args.N, args.gamma, args.p)
    grid = SimGrid(J=args.J, a=args.a, eps=args.eps, horizon=vc.horizon)
    path = build_path(params, grid, args.seed, normalization=args.normalization)
    incs = special_increments(path, vc)
    S = modified_power_variation(incs, vc, args.hurst)
    config = {"q": args.q, "hurst": args.hurst, "J": args.J, "a": args.a, "eps": args.eps,
              "N": args.N, "gamma": args.gamma, "p": args.p, "stat": args.stat,
              "normalization": args.normalization}
    out = {"config": config, "seed": args.seed}
    if args.stat == "S":
        out["value"] = S
    else:
        mu, source = moment_mu(args.q, args.p, args.hurst)
        out["mu_p"], out["mu_source"] = mu, source
        if args.stat == "V":
            out["value"] = centered_stat(S, vc, mu)
        else:
            config["h_fn"] = args.h_fn
            out["value"] = weighted_variation(incs, vc, args.hurst, weight_fn(args.h_fn),
                                              mu)
    _emit(args, dumps(out))


def _experiment(args, qs, hs) -> ExperimentConfig:
    kw = dict(qs=tuple(qs), hs=tuple(hs), J=args.J, a=args.a, eps=args.eps, N=args.N,
              gamma=args.gamma, p=args.p, h=args.h_fn, reps=args.reps, base_seed=args.seed,
              normalization=args.normalization)
    if getattr(args, "preset", None) == "reduced":
        return ExperimentConfig.reduced(**{k: v for k, v in kw.items() if k not in ("J", "N")})
    if getattr(args, "preset", None) == "full":
        kw.update(J=18, N=17)
    return ExperimentConfig(**kw)


def _report_out(args, report) -> None:
    if args.format != "csv":
        _emit(args, dumps(report.payload()))
        return
    rows = report.table_rows()
    _emit(args, _csv_text(rows[0], rows[1:]))
    if args.out:
        sidecar = getattr(args, "json_sidecar", None) or Path(args.out).with_suffix(".json")
        report.write_json(sidecar)


def cmd_estimate_volatility(args) -> None:
    cfg = _experiment(args, [args.q], [args.hurst])
    _report_out(args, run_table(cfg, threads=_threads(args)))


def cmd_mc_table(args) -> None:
    cfg = _experiment(args, args.q, args.hurst)
    if args.format is None:
        args.format = "csv"
    _report_out(args, run_table(cfg, threads=_threads(args)))


def cmd_clt_sweep(args) -> None:
    cfg = SweepConfig(Ns=tuple(args.N), q=args.q, H=args.hurst, gamma=args.gamma, p=args.p,
                      stat=args.stat, h=args.h_fn, reps=args.reps, base_seed=args.seed, J=args.J)
    res = clt_sweep(cfg, threads=_threads(args))
    if args.format == "csv":
        keys = ["N", "L", "mean", "variance", "ks_stat", "wasserstein1", "w1_se", "n"]
        _emit(args, _csv_text(keys, ([r[k] for k in keys] for r in res["rows"])))
    else:
        _emit(args, dumps(res))


def cmd_oracle_check(args) -> None:
    _emit(args, dumps(run_suite(args.suite, seed=args.seed, reps=args.reps, q=args.q,
                                H=args.hurst)))


COMMANDS = {
    "simulate": cmd_simulate,
    "dump-farima": cmd_dump_farima,
    "dump-weights": cmd_dump_weights,
    "variation": cmd_variation,
    "estimate-volatility": cmd_estimate_volatility,
    "mc-table": cmd_mc_table,
    "clt-sweep": cmd_clt_sweep,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        path = _config_path(argv)
        if path:
            apply_config(parser, argv, path)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"hermvar: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"hermvar: {exc}", file=sys.stderr)
        return 1
    except (HermvarError, ArithmeticError, OSError) as exc:
        print(f"hermvar: runtime error: {exc}", file=sys.stderr)
        return 2
    return 0
