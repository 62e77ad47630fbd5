"""Command-line front end.

Subcommands:

* ``mean`` / ``restricted-mean`` -- mean set of a graph sample file
* ``variance`` -- just the optimal functional value of a graph sample
* ``enumerate`` -- list a full graph space in canonical order
* ``check-metric`` -- verify the metric axioms of a bundled space
* ``modulus`` -- modulus of continuity s(delta) of a bundled space
* ``simulate`` -- run an experiment config, write CSV + JSON reports

Text output for graph results is itself a valid graph sample file (metadata
rides in ``#`` comments), and every subcommand has a ``--format json`` /
``--format csv`` twin carrying the same numbers.  Output is byte-deterministic
given inputs, flags and seed.

Exit codes: 0 success, 2 parse/input error, 3 enumeration cap exceeded,
4 invalid experiment config.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .consistency_lab import (
    ConfigError,
    DEFAULT_CHECKPOINTS,
    ExperimentConfig,
    GraphSpec,
    GridSpec,
    LimitParams,
    build_space,
    build_summary,
    parse_point_label,
    resolve_event,
    run_consistency_experiment,
    summary_blocks,
    write_report_csv,
    write_summary_json,
)
from .frechet_solver import (
    restricted_sample_mean_set,
    sample_mean_set,
)
from .graph_space import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapError,
    GraphParseError,
    GraphSpaceConfig,
    enumerate_space,
    graph_subspace,
    read_graph_file,
)
from .metric_core import (
    DiscreteMeasure,
    Sample,
    check_metric_axioms,
    equicontinuity_bound,
    interval_grid,
    modulus_of_continuity,
    power_gamma,
)

__all__ = ["main", "load_config_file"]

CONFIG_SCHEMA = "experiment-config-v1"


def _err(message) -> None:
    print(f"error: {message}", file=sys.stderr)


def _order_arg(text: str):
    try:
        value = int(text)
    except ValueError:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"order r must be a number, got {text!r}")
        if not math.isfinite(value):
            raise argparse.ArgumentTypeError("order r must be finite")
        if value == int(value):
            value = int(value)
    if value < 1:
        raise argparse.ArgumentTypeError(f"order r must be >= 1, got {text}")
    return value


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational number, got {text!r}")


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _num(value) -> float:
    return float(value)


def _exact_str(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return None


def _optimum_lines(result, comment: bool = False) -> list[str]:
    prefix = "# " if comment else ""
    exact = _exact_str(result.optimum)
    lines = [f"{prefix}optimum: {exact or repr(result.optimum)}"]
    if exact is not None and "/" in exact:
        lines.append(f"# optimum as decimal: {float(result.optimum)!r}")
    return lines


def _csv_text(header: list, rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# mean / restricted-mean / variance
# ---------------------------------------------------------------------------


def _solve_sample(args, restricted: bool):
    graphs = read_graph_file(args.graph_file)
    nv = graphs[0].nv
    sample = Sample(tuple(graphs))
    if restricted:
        # candidates are the observed graphs; no need to enumerate the space
        space = graph_subspace(graphs)
        result = restricted_sample_mean_set(space, sample, args.r)
    else:
        cap = args.cap_override if args.cap_override else DEFAULT_ENUMERATION_CAP
        space = enumerate_space(GraphSpaceConfig(nv, cap))
        result = sample_mean_set(space, sample, args.r)
    return space, sample, result


def _subset_note(sample_points: frozenset, argmin: tuple) -> tuple[bool, bool]:
    mean_points = frozenset(argmin)
    subset = sample_points <= mean_points
    proper = subset and sample_points != mean_points
    return subset, proper


def cmd_mean(args, restricted: bool) -> int:
    space, sample, result = _solve_sample(args, restricted)
    subset, proper = _subset_note(frozenset(sample.distinct()), result.argmin)
    labels = [space.label(p) for p in result.argmin]
    if args.format == "json":
        payload = {
            "space": space.name,
            "points": len(space),
            "bound_M": _num(space.bound_M),
            "r": result.order_r,
            "domain": result.candidate_domain,
            "sample_size": sample.n,
            "sample_distinct": len(sample.distinct()),
            "optimum": _num(result.optimum),
            "optimum_exact": _exact_str(result.optimum),
            "exact": result.exact,
            "mean_set_size": result.size,
            "mean_set": labels,
            "sample_subset_of_mean": subset,
            "sample_proper_subset": proper,
        }
        _emit(args, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    elif args.format == "csv":
        rows = [[g, repr(_num(result.optimum)), result.order_r, str(result.exact).lower()] for g in labels]
        _emit(args, _csv_text(["graph", "optimum", "r", "exact"], rows))
    else:
        note = "true (proper)" if proper else ("true (equal)" if subset else "false")
        lines = [
            f"# space: {space.name}, {len(space)} points, M={space.bound_M}",
            f"# order r: {result.order_r}",
            f"# domain: {result.candidate_domain}",
            f"# sample: {sample.n} graphs, {len(sample.distinct())} distinct",
            f"# exact: {str(result.exact).lower()}",
            *_optimum_lines(result, comment=True),
            f"# mean set: {result.size} graphs",
            *labels,
            f"# sample ⊂ mean set: {note}",
        ]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_variance(args) -> int:
    space, sample, result = _solve_sample(args, args.restricted)
    if args.format == "json":
        payload = {
            "space": space.name,
            "r": result.order_r,
            "domain": result.candidate_domain,
            "optimum": _num(result.optimum),
            "optimum_exact": _exact_str(result.optimum),
            "exact": result.exact,
        }
        _emit(args, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    elif args.format == "csv":
        rows = [[repr(_num(result.optimum)), result.order_r, result.candidate_domain, str(result.exact).lower()]]
        _emit(args, _csv_text(["optimum", "r", "domain", "exact"], rows))
    else:
        lines = [
            f"# space: {space.name}, {len(space)} points, M={space.bound_M}",
            f"# order r: {result.order_r}",
            f"# domain: {result.candidate_domain}",
            f"# exact: {str(result.exact).lower()}",
            *_optimum_lines(result),
        ]
        _emit(args, "\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------------------
# enumerate / check-metric / modulus
# ---------------------------------------------------------------------------


def cmd_enumerate(args) -> int:
    cap = args.cap_override if args.cap_override else DEFAULT_ENUMERATION_CAP
    space = enumerate_space(GraphSpaceConfig(args.nv, cap))
    labels = [space.label(p) for p in space.points]
    if args.format == "json":
        payload = {"nv": args.nv, "count": len(space), "bound_M": _num(space.bound_M), "graphs": labels}
        _emit(args, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    elif args.format == "csv":
        _emit(args, _csv_text(["graph"], [[g] for g in labels]))
    else:
        lines = [f"# space: {space.name}, {len(space)} points, M={space.bound_M}", *labels]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _resolve_space(args):
    if args.grid is not None:
        start, end, step = args.grid
        return interval_grid(start, end, step)
    if args.nv is None:
        raise ConfigError("pass --nv NV for a graph space or --grid START END STEP")
    cap = args.cap_override if args.cap_override else DEFAULT_ENUMERATION_CAP
    return enumerate_space(GraphSpaceConfig(args.nv, cap))


def cmd_check_metric(args) -> int:
    space = _resolve_space(args)
    report = check_metric_axioms(space)
    if args.format == "json":
        payload = {
            "space": report.space_name,
            "points": report.n_points,
            "ok": report.ok,
            "violations": [
                {
                    "axiom": v.axiom,
                    "witness": [space.label(p) for p in v.witness],
                    "detail": v.detail,
                    "count": v.count,
                }
                for v in report.violations
            ],
        }
        _emit(args, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    elif args.format == "csv":
        rows = [
            [v.axiom, " ".join(space.label(p) for p in v.witness), v.detail, v.count]
            for v in report.violations
        ]
        _emit(args, _csv_text(["axiom", "witness", "detail", "count"], rows))
    else:
        _emit(args, report.summary() + "\n")
    return 0


def cmd_modulus(args) -> int:
    space = _resolve_space(args)
    value = modulus_of_continuity(space, space.points, args.delta, args.r)
    payload = {
        "space": space.name,
        "delta": _num(args.delta),
        "r": args.r,
        "s_delta": _num(value),
        "s_delta_exact": _exact_str(value),
    }
    if isinstance(args.r, int):
        payload["lipschitz_bound"] = _num(
            equicontinuity_bound(Fraction(space.bound_M), args.r, Fraction(str(args.delta)))
        )
        payload["gamma"] = power_gamma(args.r)
    if args.format == "json":
        _emit(args, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    elif args.format == "csv":
        header = sorted(payload)
        _emit(args, _csv_text(header, [[payload[k] for k in header]]))
    else:
        lines = [f"# space: {space.name}, {len(space)} points, M={space.bound_M}",
                 f"# delta: {_num(args.delta)!r}",
                 f"# order r: {args.r}"]
        if "gamma" in payload:
            lines.append(
                f"# bound (2^r-1) M^(r-1) delta: {payload['lipschitz_bound']!r} (gamma={payload['gamma']})"
            )
        lines.append(f"s_delta: {_exact_str(value) or repr(value)}")
        _emit(args, "\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "schema",
    "space",
    "nv",
    "enumeration_cap",
    "grid_start",
    "grid_end",
    "grid_step",
    "support",
    "weights",
    "r",
    "n_max",
    "checkpoints",
    "replications",
    "seed",
    "restricted",
    "limits",
    "epsilon",
    "burn_in",
    "min_visits",
    "events",
}


def load_config_file(path) -> ExperimentConfig:
    """Parse a flat JSON experiment config (schema ``experiment-config-v1``)."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    if raw.get("schema") != CONFIG_SCHEMA:
        raise ConfigError(f"config schema must be {CONFIG_SCHEMA!r}, got {raw.get('schema')!r}")

    def need(key):
        if key not in raw:
            raise ConfigError(f"config key {key!r} is required")
        return raw[key]

    kind = need("space")
    if kind == "graph":
        spec = GraphSpec(int(need("nv")), int(raw.get("enumeration_cap", DEFAULT_ENUMERATION_CAP)))
    elif kind == "grid":
        spec = GridSpec(
            str(raw.get("grid_start", "-1")),
            str(raw.get("grid_end", "1")),
            str(raw.get("grid_step", "0.01")),
        )
    else:
        raise ConfigError(f"space must be 'graph' or 'grid', got {kind!r}")

    support_labels = need("support")
    if not isinstance(support_labels, list) or not support_labels:
        raise ConfigError("support must be a non-empty list of point labels")
    try:
        support = [parse_point_label(spec, str(s)) for s in support_labels]
    except (ValueError, GraphParseError) as exc:
        raise ConfigError(f"bad support point: {exc}") from None
    weights_raw = raw.get("weights")
    try:
        if weights_raw is None:
            mu = DiscreteMeasure.uniform(support)
        else:
            weights = [Fraction(str(w)) for w in weights_raw]
            mu = DiscreteMeasure(tuple(support), tuple(weights))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad weights: {exc}") from None

    r = need("r")
    if isinstance(r, float) and r == int(r):
        r = int(r)
    n_max = int(need("n_max"))
    checkpoints = raw.get("checkpoints")
    if checkpoints is None:
        checkpoints = [c for c in DEFAULT_CHECKPOINTS if c <= n_max] or [n_max]
    elif not isinstance(checkpoints, list):
        raise ConfigError("checkpoints must be a list of sample sizes")

    if raw.get("limits", True):
        limit_params = LimitParams(
            epsilon=Fraction(str(raw.get("epsilon", "0"))),
            burn_in=raw.get("burn_in"),
            min_visits=int(raw.get("min_visits", 2)),
        )
    else:
        limit_params = None

    events = raw.get("events", [])
    if not isinstance(events, list):
        raise ConfigError("events must be a list of event names")

    return ExperimentConfig(
        space_spec=spec,
        mu=mu,
        r=r,
        n_max=n_max,
        checkpoints=tuple(int(c) for c in checkpoints),
        replications=int(raw.get("replications", 200)),
        seed=int(raw.get("seed", 0)),
        restricted=bool(raw.get("restricted", False)),
        limit_params=limit_params,
        events=tuple(str(e) for e in events),
    )


def cmd_simulate(args) -> int:
    import dataclasses

    cfg = load_config_file(args.config_file)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    overrides = {}
    if args.epsilon is not None:
        overrides["epsilon"] = args.epsilon
    if args.burn_in is not None:
        overrides["burn_in"] = args.burn_in
    if args.min_visits is not None:
        overrides["min_visits"] = args.min_visits
    if overrides:
        base = cfg.limit_params or LimitParams()
        cfg = dataclasses.replace(cfg, limit_params=dataclasses.replace(base, **overrides))

    space = build_space(cfg.space_spec)
    cfg = cfg.validated(space)
    for name in cfg.events:  # surface bad event names before the run
        resolve_event(name, space, cfg.space_spec)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "report.csv"
    json_path = out_dir / "summary.json"
    written = []
    try:
        result = run_consistency_experiment(cfg, space)
        summary = build_summary(result)
        write_report_csv(result, csv_path)
        written.append(csv_path)
        write_summary_json(result, json_path, summary)
        written.append(json_path)
    except BaseException:
        for p in written + [csv_path, json_path]:
            try:
                p.unlink(missing_ok=True)
            except OSError:
                pass
        raise

    rows = len(result.records) * len(cfg.checkpoints)
    print(f"wrote {csv_path} ({rows} rows)")
    print(f"wrote {json_path}")
    failures = 0
    for name, passed, detail in summary_blocks(result, summary):
        status = "PASS" if passed else "FAIL"
        failures += 0 if passed else 1
        print(f"[{name}] {status} - {detail}")
    print(f"{failures} failing assertion block(s)" if failures else "all assertion blocks passed")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["text", "json", "csv"], default="text")
    p.add_argument("--out", help="write the report to a file instead of stdout")


def _add_space_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nv", type=int, help="graph space on NV vertices")
    p.add_argument("--grid", nargs=3, metavar=("START", "END", "STEP"),
                   help="interval grid instead of a graph space")
    p.add_argument("--cap-override", type=int, default=None,
                   help="raise the graph enumeration cap (edge slots)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frechet-means",
        description="Exact Frechet mean sets over graph spaces and interval grids",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_mean = sub.add_parser("mean", help="mean set of a graph sample file")
    p_mean.add_argument("graph_file")
    p_mean.add_argument("--r", type=_order_arg, default=1)
    p_mean.add_argument("--restricted", action="store_true",
                        help="restrict candidates to the observed graphs")
    p_mean.add_argument("--cap-override", type=int, default=None)
    _add_format(p_mean)
    p_mean.set_defaults(func=lambda a: cmd_mean(a, a.restricted))

    p_rmean = sub.add_parser("restricted-mean", help="mean set restricted to the sample")
    p_rmean.add_argument("graph_file")
    p_rmean.add_argument("--r", type=_order_arg, default=1)
    p_rmean.add_argument("--cap-override", type=int, default=None)
    _add_format(p_rmean)
    p_rmean.set_defaults(func=lambda a: cmd_mean(a, True))

    p_var = sub.add_parser("variance", help="optimal functional value of a graph sample")
    p_var.add_argument("graph_file")
    p_var.add_argument("--r", type=_order_arg, default=1)
    p_var.add_argument("--restricted", action="store_true")
    p_var.add_argument("--cap-override", type=int, default=None)
    _add_format(p_var)
    p_var.set_defaults(func=cmd_variance)

    p_enum = sub.add_parser("enumerate", help="list a graph space in canonical order")
    p_enum.add_argument("--nv", type=int, required=True)
    p_enum.add_argument("--cap-override", type=int, default=None)
    _add_format(p_enum)
    p_enum.set_defaults(func=cmd_enumerate)

    p_check = sub.add_parser("check-metric", help="verify the metric axioms of a space")
    _add_space_args(p_check)
    _add_format(p_check)
    p_check.set_defaults(func=cmd_check_metric)

    p_mod = sub.add_parser("modulus", help="modulus of continuity s(delta)")
    _add_space_args(p_mod)
    p_mod.add_argument("--delta", type=_fraction_arg, required=True)
    p_mod.add_argument("--r", type=_order_arg, default=1)
    _add_format(p_mod)
    p_mod.set_defaults(func=cmd_modulus)

    p_sim = sub.add_parser("simulate", help="run an experiment config file")
    p_sim.add_argument("config_file")
    p_sim.add_argument("--out", required=True, help="output directory for report.csv/summary.json")
    p_sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_sim.add_argument("--epsilon", type=_fraction_arg, default=None)
    p_sim.add_argument("--burn-in", type=int, dest="burn_in", default=None)
    p_sim.add_argument("--min-visits", type=int, dest="min_visits", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EnumerationCapError as exc:
        _err(f"{exc} (use --cap-override {exc.required_cap})")
        return 3
    except GraphParseError as exc:
        _err(exc)
        return 2
    except OSError as exc:
        _err(exc)
        return 2
    except ConfigError as exc:
        _err(exc)
        return 4


if __name__ == "__main__":
    sys.exit(main())
