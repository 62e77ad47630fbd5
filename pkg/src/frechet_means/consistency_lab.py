"""Seeded Monte Carlo harness for mean-set convergence experiments.

An experiment repeatedly draws iid samples from a discrete measure on a
bounded space, computes sample mean sets and variances at checkpoint sample
sizes, evaluates the law-of-large-numbers diagnostics

    T_n(z)   = empirical functional at z - population functional at z
    T*_n     = sigma_hat_n - sigma          (and TR*_n for restricted runs)

together with the sandwich inequalities relating them, and estimates outer
limits of the checkpoint trajectory of mean sets.  Everything is driven by
a named, platform-independent PRNG (numpy PCG64): replication k draws from
``PCG64(SeedSequence([seed, k]))``, so runs are reproducible bit for bit
and replications are independent of execution order.

Reports are emitted as a CSV of per-replication, per-checkpoint rows plus a
JSON summary; both schemas are versioned (see ``CSV_SCHEMA`` and
``SUMMARY_SCHEMA``).
"""

from __future__ import annotations

import csv
import json
import statistics
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .frechet_solver import (
    FLOAT_TIE_RTOL,
    MeanSetResult,
    population_mean_set,
    restricted_population_mean_set,
)
from .graph_space import DEFAULT_ENUMERATION_CAP, GraphSpaceConfig, enumerate_space, parse_graph
from .metric_core import (
    DiscreteMeasure,
    MetricSpace,
    Sample,
    check_order,
    interval_grid,
    population_functional,
    sample_functional,
)
from .set_limits import (
    OuterLimitEstimate,
    SetTrajectory,
    default_burn_in,
    kuratowski_limsup,
    tail_limsup,
)

__all__ = [
    "ConfigError",
    "GraphSpec",
    "GridSpec",
    "LimitParams",
    "ExperimentConfig",
    "CheckpointStats",
    "TrajectoryRecord",
    "ExperimentResult",
    "OscillationTable",
    "build_space",
    "parse_point_label",
    "replication_rng",
    "sample_iid",
    "diagnostic_T",
    "run_consistency_experiment",
    "oscillation_stats",
    "event_full_space",
    "event_contains",
    "resolve_event",
    "summary_blocks",
    "build_summary",
    "write_report_csv",
    "write_summary_json",
    "CSV_SCHEMA",
    "SUMMARY_SCHEMA",
]

CSV_SCHEMA = "experiment-rows-v1"
SUMMARY_SCHEMA = "experiment-summary-v1"

DEFAULT_CHECKPOINTS = (10, 100, 1000, 10000)


class ConfigError(ValueError):
    """Invalid experiment configuration; raised before any computation."""


@dataclass(frozen=True)
class GraphSpec:
    nv: int
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    kind: str = field(default="graph", init=False)


@dataclass(frozen=True)
class GridSpec:
    start: str = "-1"
    end: str = "1"
    step: str = "0.01"
    kind: str = field(default="grid", init=False)


def build_space(spec) -> MetricSpace:
    if isinstance(spec, GraphSpec):
        return enumerate_space(GraphSpaceConfig(spec.nv, spec.enumeration_cap))
    if isinstance(spec, GridSpec):
        return interval_grid(spec.start, spec.end, spec.step)
    raise ConfigError(f"unknown space spec {spec!r}")


def parse_point_label(spec, label: str):
    """Parse a point written as text, per the space kind of ``spec``."""
    if isinstance(spec, GraphSpec):
        return parse_graph(label)
    if isinstance(spec, GridSpec):
        return Fraction(str(label))
    raise ConfigError(f"unknown space spec {spec!r}")


@dataclass(frozen=True)
class LimitParams:
    """Outer-limit estimator parameters over the checkpoint trajectory.

    ``burn_in`` is an index into the checkpoint list (None: half the
    trajectory); ``epsilon`` = 0 degenerates to exact-membership visits.
    """

    epsilon: Fraction | float = Fraction(0)
    burn_in: int | None = None
    min_visits: int = 2


@dataclass(frozen=True)
class ExperimentConfig:
    space_spec: GraphSpec | GridSpec
    mu: DiscreteMeasure
    r: int | float
    n_max: int
    checkpoints: tuple = DEFAULT_CHECKPOINTS
    replications: int = 200
    seed: int = 0
    restricted: bool = False
    limit_params: LimitParams | None = LimitParams()
    events: tuple = ()

    def validated(self, space: MetricSpace) -> "ExperimentConfig":
        try:
            check_order(self.r)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        checkpoints = tuple(int(c) for c in self.checkpoints)
        if not checkpoints:
            raise ConfigError("at least one checkpoint is required")
        if any(c < 1 for c in checkpoints) or list(checkpoints) != sorted(set(checkpoints)):
            raise ConfigError(f"checkpoints must be ascending positive integers, got {checkpoints}")
        if checkpoints[-1] > self.n_max:
            raise ConfigError(f"checkpoints exceed n_max={self.n_max}: {checkpoints}")
        if self.n_max < 1:
            raise ConfigError("n_max must be >= 1")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        for p in self.mu.support:
            if p not in space:
                raise ConfigError(f"measure support point {space.label(p) if p in space else p!r} "
                                  f"is not a point of {space.name}")
        if self.limit_params is not None:
            lp = self.limit_params
            if lp.epsilon < 0:
                raise ConfigError("epsilon must be >= 0")
            if lp.min_visits < 1:
                raise ConfigError("min_visits must be >= 1")
            burn = default_burn_in(len(checkpoints)) if lp.burn_in is None else lp.burn_in
            if not 0 <= burn < len(checkpoints):
                raise ConfigError(
                    f"burn_in must be a checkpoint index in [0, {len(checkpoints) - 1}], got {lp.burn_in}"
                )
        return replace(self, checkpoints=checkpoints)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    """The documented stream for one replication: PCG64(SeedSequence([seed, k]))."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, replication])))


def _draw_indices(mu: DiscreteMeasure, n: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws over the support in canonical order."""
    cum = np.cumsum(np.array([float(w) for w in mu.weights], dtype=np.float64))
    cum[-1] = 1.0  # guard against accumulated rounding in the last bin
    return np.searchsorted(cum, rng.random(n), side="right").astype(np.intp)


def sample_iid(mu: DiscreteMeasure, n: int, seed: int) -> Sample:
    """n iid draws from mu via inverse-CDF over PCG64(SeedSequence(seed))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    idx = _draw_indices(mu, n, rng)
    return Sample(tuple(mu.support[i] for i in idx))


def diagnostic_T(space: MetricSpace, mu: DiscreteMeasure, sample: Sample, z, r):
    """T_n(z): empirical minus population functional at z (exact when possible)."""
    return sample_functional(space, sample, z, r) - population_functional(space, mu, z, r)


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckpointStats:
    n: int
    sigma_hat: Fraction | float
    mean_set: tuple
    t_hat_max: Fraction | float
    t_star: Fraction | float
    t_theta_min: Fraction | float
    included_in_population: bool
    sigma_hat_res: Fraction | float | None = None
    mean_set_res: tuple | None = None
    tr_star: Fraction | float | None = None
    t_res_hat_max: Fraction | float | None = None
    t_res_upper: Fraction | float | None = None
    included_in_population_res: bool | None = None
    subset_of_sampled: bool | None = None


@dataclass(frozen=True)
class TrajectoryRecord:
    replication: int
    stats: tuple
    tail_estimate: frozenset | None = None
    tail_included: bool | None = None
    kuratowski: OuterLimitEstimate | None = None
    kuratowski_included: bool | None = None
    # worst distance from an estimate point to the population target
    # (0 for an empty estimate); the estimator's own budget is 2*epsilon
    # once the trajectory has settled within epsilon of the target
    kuratowski_target_gap: float | Fraction | None = None
    tail_estimate_res: frozenset | None = None
    tail_included_res: bool | None = None
    kuratowski_res: OuterLimitEstimate | None = None
    kuratowski_included_res: bool | None = None


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    space: MetricSpace
    population: MeanSetResult
    population_restricted: MeanSetResult | None
    records: tuple


# ---------------------------------------------------------------------------
# the experiment engine
# ---------------------------------------------------------------------------


class _Engine:
    """Precomputed distance-power blocks for one experiment configuration."""

    def __init__(self, space: MetricSpace, cfg: ExperimentConfig):
        self.space = space
        self.cfg = cfg
        mu, r = cfg.mu, cfg.r
        self.exact = space.exact and isinstance(r, int) and mu.is_rational
        self.sup_idx = space.indices(mu.support)
        self.population = population_mean_set(space, mu, r)
        self.sigma = self.population.optimum
        self.theta_idx = set(int(i) for i in space.indices(self.population.argmin))
        self.theta_set = frozenset(self.population.argmin)

        all_idx = np.arange(len(space), dtype=np.intp)
        if self.exact:
            self.scale_r = space.scale**r
            base = space.int_block(all_idx, self.sup_idx).astype(np.int64)
            if space.max_int_distance**r * cfg.n_max < 2**62:
                self.block = base**r
            else:
                self.block = (base.astype(object)) ** r  # big-int fallback
            # population functional at every point, exact
            weights = [Fraction(w) for w in mu.weights]
            self.pop_values = [
                sum(Fraction(int(base[i, j]) ** r) * weights[j] for j in range(len(weights)))
                * self.scale_r
                for i in range(len(space))
            ]
        else:
            self.scale_r = None
            self.block = space.float_block(all_idx, self.sup_idx) ** float(r)
            wf = np.array([float(w) for w in mu.weights])
            self.pop_values = self.block @ wf
        self.block_theta = self.block[sorted(self.theta_idx)]

        self.population_res = None
        if cfg.restricted:
            self.population_res = restricted_population_mean_set(space, mu, r)
            self.sigma_res = self.population_res.optimum
            self.theta_res_set = frozenset(self.population_res.argmin)
            support_pos = {p: j for j, p in enumerate(mu.support)}
            self.theta_res_pos = sorted(support_pos[p] for p in self.population_res.argmin)
            self.block_res = self.block[self.sup_idx]

    # -- per-checkpoint scores ---------------------------------------------

    def _normalize(self, value, n: int):
        if self.exact:
            return Fraction(int(value), n) * self.scale_r
        return float(value) / n

    def _min_ties(self, scores) -> tuple:
        if self.exact:
            if isinstance(scores, np.ndarray) and scores.dtype != object:
                best = int(scores.min())
                return best, [int(i) for i in np.nonzero(scores == best)[0]]
            best = min(int(v) for v in scores)
            return best, [i for i, v in enumerate(scores) if int(v) == best]
        best = float(scores.min())
        ties = np.nonzero(scores <= best * (1.0 + FLOAT_TIE_RTOL))[0]
        return best, [int(i) for i in ties]

    def checkpoint(self, counts: np.ndarray, n: int) -> CheckpointStats:
        scores = self.block @ counts
        best, ties = self._min_ties(scores)
        sigma_hat = self._normalize(best, n)
        mean_set = tuple(self.space.points[i] for i in ties)
        included = all(i in self.theta_idx for i in ties)
        t_star = sigma_hat - self.sigma
        if self.exact:
            pop_at_hat = min(self.pop_values[i] for i in ties)
            theta_best = min(int(v) for v in self.block_theta @ counts)
        else:
            pop_at_hat = float(min(self.pop_values[i] for i in ties))
            theta_best = float((self.block_theta @ counts).min())
        t_hat_max = sigma_hat - pop_at_hat
        t_theta_min = self._normalize(theta_best, n) - self.sigma

        extra = {}
        if self.cfg.restricted:
            res_scores = self.block_res @ counts
            observed = np.nonzero(counts > 0)[0]
            if self.exact:
                obs_vals = [int(res_scores[j]) for j in observed]
            else:
                obs_vals = [float(res_scores[j]) for j in observed]
            best_res = min(obs_vals)
            ties_pos = [int(j) for j, v in zip(observed, obs_vals) if self._res_tie(v, best_res)]
            sigma_hat_res = self._normalize(best_res, n)
            mean_set_res = tuple(self.cfg.mu.support[j] for j in ties_pos)
            tr_star = sigma_hat_res - self.sigma_res
            pop_at = min(self.pop_values[int(self.sup_idx[j])] for j in ties_pos)
            if not self.exact:
                pop_at = float(pop_at)
            # upper bound: min over theta* of T_n(theta*) + min_{x' observed} |Fhat(x') - Fhat(theta*)|
            upper = None
            for j_star in self.theta_res_pos:
                f_star = self._normalize(res_scores[j_star], n)
                t_theta_star = f_star - self.sigma_res
                gap = min(abs(self._normalize(v, n) - f_star) for v in obs_vals)
                cand = t_theta_star + gap
                upper = cand if upper is None or cand < upper else upper
            extra = dict(
                sigma_hat_res=sigma_hat_res,
                mean_set_res=mean_set_res,
                tr_star=tr_star,
                t_res_hat_max=sigma_hat_res - pop_at,
                t_res_upper=upper,
                included_in_population_res=set(mean_set_res) <= self.theta_res_set,
                subset_of_sampled=all(counts[j] > 0 for j in ties_pos),
            )
        return CheckpointStats(
            n=n,
            sigma_hat=sigma_hat,
            mean_set=mean_set,
            t_hat_max=t_hat_max,
            t_star=t_star,
            t_theta_min=t_theta_min,
            included_in_population=included,
            **extra,
        )

    def _res_tie(self, value, best) -> bool:
        if self.exact:
            return value == best
        return value <= best * (1.0 + FLOAT_TIE_RTOL)


def run_consistency_experiment(
    cfg: ExperimentConfig, space: MetricSpace | None = None
) -> ExperimentResult:
    """Run all replications of an experiment; deterministic given (cfg, seed).

    Per replication: one cumulative iid stream, mean sets and variances at
    every checkpoint, sandwich diagnostics, and (when ``limit_params`` is
    set) outer-limit estimates of the checkpoint trajectory with inclusion
    checks against the population (and restricted) mean sets.
    """
    if space is None:
        space = build_space(cfg.space_spec)
    cfg = cfg.validated(space)
    engine = _Engine(space, cfg)
    lp = cfg.limit_params
    burn = None
    if lp is not None:
        burn = default_burn_in(len(cfg.checkpoints)) if lp.burn_in is None else lp.burn_in

    records = []
    n_support = len(cfg.mu.support)
    for k in range(cfg.replications):
        rng = replication_rng(cfg.seed, k)
        idx = _draw_indices(cfg.mu, cfg.n_max, rng)
        stats = []
        for n in cfg.checkpoints:
            counts = np.bincount(idx[:n], minlength=n_support).astype(np.int64)
            stats.append(engine.checkpoint(counts, n))
        rec = dict(replication=k, stats=tuple(stats))
        if lp is not None:
            traj = SetTrajectory(space, tuple(frozenset(s.mean_set) for s in stats))
            tail = tail_limsup(traj, burn, lp.min_visits)
            kura = kuratowski_limsup(traj, lp.epsilon, burn, lp.min_visits)
            gap = max(
                (space.set_distance(p, engine.theta_set) for p in kura.points), default=0
            )
            rec.update(
                tail_estimate=tail,
                tail_included=tail <= engine.theta_set,
                kuratowski=kura,
                kuratowski_included=kura.points <= engine.theta_set,
                kuratowski_target_gap=gap,
            )
            if cfg.restricted:
                traj_res = SetTrajectory(space, tuple(frozenset(s.mean_set_res) for s in stats))
                tail_res = tail_limsup(traj_res, burn, lp.min_visits)
                kura_res = kuratowski_limsup(traj_res, lp.epsilon, burn, lp.min_visits)
                rec.update(
                    tail_estimate_res=tail_res,
                    tail_included_res=tail_res <= engine.theta_res_set,
                    kuratowski_res=kura_res,
                    kuratowski_included_res=kura_res.points <= engine.theta_res_set,
                )
        records.append(TrajectoryRecord(**rec))

    return ExperimentResult(
        config=cfg,
        space=space,
        population=engine.population,
        population_restricted=engine.population_res,
        records=tuple(records),
    )


# ---------------------------------------------------------------------------
# events and oscillation tables
# ---------------------------------------------------------------------------


def event_full_space(space: MetricSpace) -> Callable:
    size = len(space)
    return lambda mean_set: len(mean_set) == size


def event_contains(point) -> Callable:
    return lambda mean_set: point in mean_set


def resolve_event(name: str, space: MetricSpace, spec) -> Callable:
    """Map a config event string to a predicate on the mean set."""
    if name == "full_space":
        return event_full_space(space)
    if name.startswith("contains:"):
        return event_contains(parse_point_label(spec, name.split(":", 1)[1]))
    raise ConfigError(f"unknown event {name!r} (use 'full_space' or 'contains:<point>')")


@dataclass(frozen=True)
class OscillationTable:
    event: str
    rows: tuple  # (n, successes, replications, frequency, std_error)

    def as_dicts(self) -> list:
        return [
            dict(n=n, successes=s, replications=r, frequency=f, std_error=se)
            for n, s, r, f, se in self.rows
        ]


def oscillation_stats(records: Sequence[TrajectoryRecord], event: Callable, name: str = "event") -> OscillationTable:
    """Per-checkpoint frequency of an event across replications, with binomial SE."""
    records = list(records)
    if not records:
        raise ValueError("oscillation_stats needs at least one record")
    n_rep = len(records)
    rows = []
    for pos, stat in enumerate(records[0].stats):
        successes = sum(1 for rec in records if event(rec.stats[pos].mean_set))
        freq = successes / n_rep
        se = float(np.sqrt(freq * (1.0 - freq) / n_rep))
        rows.append((stat.n, successes, n_rep, freq, se))
    return OscillationTable(event=name, rows=tuple(rows))


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return repr(float(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _exact_str(value) -> str | None:
    return str(value) if isinstance(value, (Fraction, int)) else None


def _sandwich_ok(stat: CheckpointStats, exact: bool) -> bool:
    tol = 0 if exact else 1e-9 * max(1.0, abs(float(stat.t_star)))
    return stat.t_hat_max <= stat.t_star + tol and stat.t_star <= stat.t_theta_min + tol


def _sandwich_res_ok(stat: CheckpointStats, exact: bool) -> bool:
    if stat.tr_star is None:
        return True
    tol = 0 if exact else 1e-9 * max(1.0, abs(float(stat.tr_star)))
    return stat.t_res_hat_max <= stat.tr_star + tol and stat.tr_star <= stat.t_res_upper + tol


def write_report_csv(result: ExperimentResult, path) -> None:
    """One CSV row per replication x checkpoint (schema ``CSV_SCHEMA``)."""
    space = result.space
    restricted = result.config.restricted
    cols = [
        "replication",
        "n",
        "sigma_hat",
        "abs_error",
        "t_hat_max",
        "t_star",
        "t_theta_min",
        "mean_set_size",
        "included_in_population",
        "mean_set",
    ]
    if restricted:
        cols += [
            "sigma_hat_res",
            "abs_error_res",
            "t_res_hat_max",
            "tr_star",
            "t_res_upper",
            "mean_set_res_size",
            "included_in_population_res",
            "subset_of_sampled",
            "mean_set_res",
        ]
    sigma = result.population.optimum
    sigma_res = result.population_restricted.optimum if restricted else None
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for rec in result.records:
            for stat in rec.stats:
                row = [
                    rec.replication,
                    stat.n,
                    _fmt(stat.sigma_hat),
                    _fmt(abs(stat.sigma_hat - sigma)),
                    _fmt(stat.t_hat_max),
                    _fmt(stat.t_star),
                    _fmt(stat.t_theta_min),
                    len(stat.mean_set),
                    _fmt(stat.included_in_population),
                    ";".join(space.label(p) for p in stat.mean_set),
                ]
                if restricted:
                    row += [
                        _fmt(stat.sigma_hat_res),
                        _fmt(abs(stat.sigma_hat_res - sigma_res)),
                        _fmt(stat.t_res_hat_max),
                        _fmt(stat.tr_star),
                        _fmt(stat.t_res_upper),
                        len(stat.mean_set_res),
                        _fmt(stat.included_in_population_res),
                        _fmt(stat.subset_of_sampled),
                        ";".join(space.label(p) for p in stat.mean_set_res),
                    ]
                w.writerow(row)


def _config_dict(result: ExperimentResult) -> dict:
    cfg = result.config
    space = result.space
    spec = cfg.space_spec
    d = {
        "space": spec.kind,
        "r": cfg.r,
        "n_max": cfg.n_max,
        "checkpoints": list(cfg.checkpoints),
        "replications": cfg.replications,
        "seed": cfg.seed,
        "restricted": cfg.restricted,
        "support": [space.label(p) for p in cfg.mu.support],
        "weights": [str(w) for w in cfg.mu.weights],
        "events": list(cfg.events),
    }
    if isinstance(spec, GraphSpec):
        d["nv"] = spec.nv
        d["enumeration_cap"] = spec.enumeration_cap
    else:
        d["grid_start"], d["grid_end"], d["grid_step"] = spec.start, spec.end, spec.step
    if cfg.limit_params is None:
        d["limit_params"] = None
    else:
        lp = cfg.limit_params
        d["limit_params"] = {
            "epsilon": str(lp.epsilon),
            "burn_in": lp.burn_in,
            "min_visits": lp.min_visits,
        }
    return d


def _mean_set_block(result: MeanSetResult, space: MetricSpace) -> dict:
    return {
        "optimum": float(result.optimum),
        "optimum_exact": _exact_str(result.optimum),
        "exact": result.exact,
        "size": result.size,
        "mean_set": [space.label(p) for p in result.argmin],
        "candidate_domain": result.candidate_domain,
    }


def _rate(flags: Iterable) -> float | None:
    flags = [f for f in flags if f is not None]
    if not flags:
        return None
    return sum(1 for f in flags if f) / len(flags)


def build_summary(result: ExperimentResult) -> dict:
    cfg = result.config
    space = result.space
    exact = result.population.exact
    per_checkpoint = []
    sandwich_viol = 0
    sandwich_viol_res = 0
    for pos, n in enumerate(cfg.checkpoints):
        stats = [rec.stats[pos] for rec in result.records]
        errors = [abs(s.sigma_hat - result.population.optimum) for s in stats]
        entry = {
            "n": n,
            "median_abs_error": float(statistics.median(errors)),
            "max_abs_error": float(max(errors)),
            "inclusion_rate": _rate(s.included_in_population for s in stats),
            "mean_set_size_mean": float(np.mean([len(s.mean_set) for s in stats])),
        }
        sandwich_viol += sum(1 for s in stats if not _sandwich_ok(s, exact))
        if cfg.restricted:
            errors_res = [
                abs(s.sigma_hat_res - result.population_restricted.optimum) for s in stats
            ]
            entry["median_abs_error_res"] = float(statistics.median(errors_res))
            entry["inclusion_rate_res"] = _rate(s.included_in_population_res for s in stats)
            entry["subset_of_sampled_rate"] = _rate(s.subset_of_sampled for s in stats)
            sandwich_viol_res += sum(1 for s in stats if not _sandwich_res_ok(s, exact))
        per_checkpoint.append(entry)

    summary = {
        "schema_version": SUMMARY_SCHEMA,
        "csv_schema": CSV_SCHEMA,
        "config": _config_dict(result),
        "space": {
            "name": space.name,
            "points": len(space),
            "bound_M": float(space.bound_M),
            "exact": space.exact,
        },
        "population": _mean_set_block(result.population, space),
        "population_restricted": (
            _mean_set_block(result.population_restricted, space) if cfg.restricted else None
        ),
        "checkpoints": per_checkpoint,
        "sandwich": {
            "rows": len(result.records) * len(cfg.checkpoints),
            "violations": sandwich_viol,
            "violations_restricted": sandwich_viol_res if cfg.restricted else None,
        },
    }

    if cfg.limit_params is not None:
        gaps = [float(r.kuratowski_target_gap) for r in result.records]
        eps = float(cfg.limit_params.epsilon)
        block = {
            "tail_inclusion_rate": _rate(r.tail_included for r in result.records),
            "kuratowski_inclusion_rate": _rate(r.kuratowski_included for r in result.records),
            "kuratowski_median_target_gap": float(statistics.median(gaps)),
            "kuratowski_max_target_gap": float(max(gaps)),
            "kuratowski_gap_within_budget_rate": _rate(g <= 2 * eps for g in gaps),
            "mean_tail_size": float(np.mean([len(r.tail_estimate) for r in result.records])),
            "mean_kuratowski_size": float(
                np.mean([len(r.kuratowski.points) for r in result.records])
            ),
        }
        if cfg.restricted:
            block["tail_inclusion_rate_res"] = _rate(r.tail_included_res for r in result.records)
            block["kuratowski_inclusion_rate_res"] = _rate(
                r.kuratowski_included_res for r in result.records
            )
        summary["outer_limit"] = block
    else:
        summary["outer_limit"] = None

    if cfg.events:
        tables = {}
        for name in cfg.events:
            pred = resolve_event(name, space, cfg.space_spec)
            tables[name] = oscillation_stats(result.records, pred, name).as_dicts()
        summary["events"] = tables
    else:
        summary["events"] = {}
    return summary


def write_summary_json(result: ExperimentResult, path, summary: dict | None = None) -> None:
    if summary is None:
        summary = build_summary(result)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def summary_blocks(result: ExperimentResult, summary: dict | None = None) -> list:
    """Pass/fail assertion blocks printed by the simulate command.

    Returns (name, passed, detail) triples: sandwich identities must hold on
    every row; outer-limit estimates should land inside (or within epsilon
    of) the population target in at least 99% of replications; the variance
    error should not grow from the first to the last checkpoint.
    """
    if summary is None:
        summary = build_summary(result)
    cfg = result.config
    blocks = []

    s = summary["sandwich"]
    blocks.append(
        (
            "sandwich",
            s["violations"] == 0,
            f"{s['violations']} violation(s) in {s['rows']} checkpoint rows",
        )
    )
    if cfg.restricted:
        blocks.append(
            (
                "restricted-sandwich",
                s["violations_restricted"] == 0,
                f"{s['violations_restricted']} violation(s) in {s['rows']} checkpoint rows",
            )
        )

    if len(cfg.checkpoints) >= 2:
        first = summary["checkpoints"][0]["median_abs_error"]
        last = summary["checkpoints"][-1]["median_abs_error"]
        blocks.append(
            (
                "variance-trend",
                last <= first,
                f"median |sigma_hat - sigma|: {first:.6g} (n={cfg.checkpoints[0]}) -> "
                f"{last:.6g} (n={cfg.checkpoints[-1]})",
            )
        )
        if cfg.restricted:
            first = summary["checkpoints"][0]["median_abs_error_res"]
            last = summary["checkpoints"][-1]["median_abs_error_res"]
            blocks.append(
                (
                    "restricted-variance-trend",
                    last <= first,
                    f"median |sigma*_hat - sigma*|: {first:.6g} -> {last:.6g}",
                )
            )

    if summary["outer_limit"] is not None:
        ol = summary["outer_limit"]
        eps = float(cfg.limit_params.epsilon)
        if eps > 0:
            gap = ol["kuratowski_median_target_gap"]
            blocks.append(
                (
                    "outer-limit",
                    gap <= 2 * eps,
                    f"median worst estimate-to-target distance {gap:.6g} "
                    f"(budget 2*epsilon = {2 * eps:.6g})",
                )
            )
        else:
            rate = ol["kuratowski_inclusion_rate"]
            blocks.append(
                (
                    "outer-limit",
                    rate is not None and rate >= 0.99,
                    f"estimate subset of target in {rate:.2%} of replications",
                )
            )
        if cfg.restricted:
            rate = ol["kuratowski_inclusion_rate_res"]
            blocks.append(
                (
                    "restricted-outer-limit",
                    rate is not None and rate >= 0.99,
                    f"restricted estimate subset of restricted target in {rate:.2%} of replications",
                )
            )

    if cfg.restricted:
        rates = [c["subset_of_sampled_rate"] for c in summary["checkpoints"]]
        blocks.append(
            (
                "restricted-support",
                all(r == 1.0 for r in rates),
                "restricted mean sets drawn from sampled points at every checkpoint",
            )
        )
    return blocks
