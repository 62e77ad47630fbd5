"""Limit operators on finite sequences of finite subsets.

True set limits are statements about infinite sequences; a recorded
trajectory only supports finite-horizon *estimates*.  The surrogate used
throughout approximates "infinitely often" by "recurrently in the tail":
a point counts as recurrent when it is visited at least ``min_visits``
times at indices >= ``burn_in`` (defaults: burn_in = N/2, min_visits = 2).

Three estimators are provided:

* :func:`tail_limsup` -- recurrence of exact set membership, computed by
  direct visit counting (classical set-theoretic outer limit surrogate);
* :func:`ziezold_limcsup` -- the same object computed through closures of
  tail unions (the closed-tail-union outer limit); on a finite space the
  closure is the identity, so the two must agree exactly;
* :func:`kuratowski_limsup` -- metric recurrence: a visit is d(x, A_n) <
  epsilon, so points merely approached by the sets also qualify.  With
  epsilon = 0 a visit degenerates to zero-distance membership.

The convention d(x, {}) = +inf means an empty set never grants visits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .metric_core import MetricSpace, _strict_int_bound

__all__ = [
    "SetTrajectory",
    "OuterLimitEstimate",
    "InclusionReport",
    "default_burn_in",
    "tail_limsup",
    "ziezold_limcsup",
    "kuratowski_limsup",
    "inclusion_check",
]


@dataclass(frozen=True)
class SetTrajectory:
    """Indexed sequence of finite subsets of one space (indices 0..N-1)."""

    space: MetricSpace
    sets: tuple

    def __post_init__(self):
        sets = tuple(frozenset(s) for s in self.sets)
        if len(sets) == 0:
            raise ValueError("a trajectory needs at least one set")
        for k, s in enumerate(sets):
            for p in s:
                if p not in self.space:
                    raise ValueError(f"sets[{k}] contains {p!r}, not a point of {self.space.name}")
        object.__setattr__(self, "sets", sets)

    def __len__(self) -> int:
        return len(self.sets)


@dataclass(frozen=True)
class OuterLimitEstimate:
    """Points judged recurrent, together with the estimator parameters."""

    points: frozenset
    epsilon: float | Fraction
    burn_in: int
    min_visits: int


@dataclass(frozen=True)
class InclusionReport:
    included: bool
    violations: tuple  # (point, distance to target) for points outside the target

    def __bool__(self) -> bool:
        return self.included


def default_burn_in(n_sets: int) -> int:
    return n_sets // 2


def _check_burn_in(traj: SetTrajectory, burn_in: int) -> None:
    if not 0 <= burn_in < len(traj):
        raise ValueError(f"burn_in must lie in [0, {len(traj) - 1}], got {burn_in}")


def tail_limsup(traj: SetTrajectory, burn_in: int, min_visits: int = 2) -> frozenset:
    """Points appearing in at least ``min_visits`` tail sets (direct count)."""
    _check_burn_in(traj, burn_in)
    if min_visits < 1:
        raise ValueError("min_visits must be >= 1")
    counts: dict = {}
    for s in traj.sets[burn_in:]:
        for p in s:
            counts[p] = counts.get(p, 0) + 1
    return frozenset(p for p, c in counts.items() if c >= min_visits)


def ziezold_limcsup(traj: SetTrajectory, burn_in: int, min_visits: int = 2) -> frozenset:
    """Closed-tail-union route to the same recurrence set as :func:`tail_limsup`.

    Builds cl(union of sets[t:]) for every tail start t, then peels one
    visit per pass: a point has >= k visits in the tail iff it appears in
    some set whose own tail (strictly after it) still certifies k-1 visits.
    On finite spaces the closure is the identity map, so this must coincide
    with the direct count exactly -- that equivalence is asserted in the
    test suite, not here.
    """
    _check_burn_in(traj, burn_in)
    if min_visits < 1:
        raise ValueError("min_visits must be >= 1")
    n = len(traj)
    closure = frozenset  # finite subspace of a metric space is closed

    # tails[t] = cl( sets[t] | sets[t+1] | ... ), for t in [burn_in, n]
    tails = [frozenset()] * (n + 1)
    for t in range(n - 1, burn_in - 1, -1):
        tails[t] = closure(tails[t + 1] | traj.sets[t])

    certified = tails  # >= 1 visit at index >= t
    for _ in range(min_visits - 1):
        nxt = [frozenset()] * (n + 1)
        for t in range(n - 1, burn_in - 1, -1):
            nxt[t] = nxt[t + 1] | (traj.sets[t] & certified[t + 1])
        certified = nxt
    return certified[burn_in]


def kuratowski_limsup(
    traj: SetTrajectory, epsilon, burn_in: int, min_visits: int = 2
) -> OuterLimitEstimate:
    """Visit-count estimate of the Kuratowski outer limit.

    A point x is visited at index n when d(x, sets[n]) < epsilon (strict
    neighborhoods), with d(x, {}) = +inf.  ``epsilon = 0`` degenerates to
    zero-distance membership, which on a proper metric is plain membership.
    The estimate collects every space point with at least ``min_visits``
    visits in the tail.
    """
    _check_burn_in(traj, burn_in)
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if min_visits < 1:
        raise ValueError("min_visits must be >= 1")
    space = traj.space
    all_idx = np.arange(len(space), dtype=np.intp)
    visits = np.zeros(len(space), dtype=np.int64)
    exact = space.exact and isinstance(epsilon, (int, Fraction))
    if exact:
        eps_frac = Fraction(epsilon)
        thr = _strict_int_bound(eps_frac / space.scale) if eps_frac > 0 else 0
    for s in traj.sets[burn_in:]:
        if not s:
            continue  # d(x, {}) = +inf: no visits
        cols = space.indices(s)
        if exact:
            dmin = space.int_block(all_idx, cols).min(axis=1)
            visits += (dmin <= thr) if epsilon > 0 else (dmin == 0)
        else:
            dmin = space.float_block(all_idx, cols).min(axis=1)
            visits += (dmin < float(epsilon)) if epsilon > 0 else (dmin == 0.0)
    pts = frozenset(space.points[int(i)] for i in np.nonzero(visits >= min_visits)[0])
    return OuterLimitEstimate(points=pts, epsilon=epsilon, burn_in=burn_in, min_visits=min_visits)


def inclusion_check(space: MetricSpace, estimate, target) -> InclusionReport:
    """Is estimate a subset of target?  Violating points carry d(x, target).

    The empty estimate is included in anything; an empty target makes every
    estimate point a violation at distance +inf.
    """
    est = frozenset(estimate)
    tgt = frozenset(target)
    for p in est | tgt:
        space.index(p)
    outside = sorted(est - tgt, key=space.index)
    violations = tuple((p, space.set_distance(p, tgt)) for p in outside)
    return InclusionReport(included=not violations, violations=violations)
