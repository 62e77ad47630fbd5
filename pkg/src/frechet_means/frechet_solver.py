"""Exact Frechet mean sets and variances by exhaustive minimization.

Every operation returns the *full* argmin set in canonical space order --
ties are the object of study here, never collapsed to a representative.
On exact spaces (integer lattice distances, integer order, rational weights)
all comparisons happen on exact integers or Fractions, so tie sets are
bit-reproducible.  On float spaces, a candidate belongs to the tie set iff
its score is <= optimum * (1 + 1e-9); that tolerance is part of the contract.

Candidate evaluation is data-parallel over chunks; the reduction (min plus
tie collection) is order-independent, so results do not depend on the chunk
size.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .metric_core import (
    DiscreteMeasure,
    MetricSpace,
    Sample,
    _INT64_SAFE,
    _counts_from_sample,
    check_order,
    population_values,
)

__all__ = [
    "MeanSetResult",
    "FLOAT_TIE_RTOL",
    "sample_mean_set",
    "population_mean_set",
    "restricted_sample_mean_set",
    "restricted_population_mean_set",
]

FLOAT_TIE_RTOL = 1e-9

# Candidate chunk size for vectorized evaluation; any value gives identical
# results, this one just bounds the distance-block working set.
_DEFAULT_CHUNK = 65536


@dataclass(frozen=True)
class MeanSetResult:
    """Optimal functional value plus the full argmin set.

    ``optimum`` is a Fraction on the exact path and a float otherwise;
    ``argmin`` is in canonical space order; ``candidate_domain`` records
    which points were allowed to compete.
    """

    order_r: int | float
    optimum: Fraction | float
    argmin: tuple
    candidate_domain: str  # full_space | sample_support | measure_support
    exact: bool

    @property
    def size(self) -> int:
        return len(self.argmin)


def _exact_min_ties(
    space: MetricSpace,
    candidates_idx: np.ndarray,
    sup_idx: np.ndarray,
    weights: np.ndarray,
    r: int,
    chunk_size: int,
) -> tuple[int, list[int]]:
    """Minimum integer score and tie indices over the candidate set."""
    max_d = space.max_int_distance
    wsum = int(weights.sum())
    use_int64 = max_d**r * wsum < _INT64_SAFE
    best = None
    ties: list[int] = []
    for lo in range(0, len(candidates_idx), chunk_size):
        idx = candidates_idx[lo : lo + chunk_size]
        block = space.int_block(idx, sup_idx)
        if use_int64:
            scores = block.astype(np.int64) ** r @ weights
            chunk_min = int(scores.min())
            if best is None or chunk_min < best:
                best = chunk_min
                ties = []
            if chunk_min <= best:
                ties.extend(int(i) for i in idx[scores == best])
        else:
            wlist = [int(w) for w in weights]
            for row_pos, row in enumerate(block):
                score = sum(int(b) ** r * w for b, w in zip(row, wlist))
                if best is None or score < best:
                    best, ties = score, [int(idx[row_pos])]
                elif score == best:
                    ties.append(int(idx[row_pos]))
    return best, ties


def _float_min_ties(
    space: MetricSpace,
    candidates_idx: np.ndarray,
    sup_idx: np.ndarray,
    weights: np.ndarray,
    r: float,
    chunk_size: int,
) -> tuple[float, list[int]]:
    scores = np.empty(len(candidates_idx), dtype=np.float64)
    for lo in range(0, len(candidates_idx), chunk_size):
        idx = candidates_idx[lo : lo + chunk_size]
        block = space.float_block(idx, sup_idx) ** float(r)
        scores[lo : lo + len(idx)] = block @ weights
    best = float(scores.min())
    ties = [int(i) for i in candidates_idx[scores <= best * (1.0 + FLOAT_TIE_RTOL)]]
    return best, ties


def _solve(
    space: MetricSpace,
    sup_idx: np.ndarray,
    counts: np.ndarray,
    r,
    candidates_idx: np.ndarray,
    domain: str,
    normalizer: int,
    chunk_size: int = _DEFAULT_CHUNK,
) -> MeanSetResult:
    if len(candidates_idx) == 0:
        raise ValueError("candidate domain is empty; the argmin set would be undefined")
    if space.exact and isinstance(r, int):
        best, ties = _exact_min_ties(space, candidates_idx, sup_idx, counts, r, chunk_size)
        optimum = Fraction(best, normalizer) * space.scale**r
        exact = True
    else:
        w = counts.astype(np.float64) / normalizer
        best, ties = _float_min_ties(space, candidates_idx, sup_idx, w, r, chunk_size)
        optimum = best
        exact = False
    ties.sort()
    return MeanSetResult(
        order_r=r,
        optimum=optimum,
        argmin=tuple(space.points[i] for i in ties),
        candidate_domain=domain,
        exact=exact,
    )


def sample_mean_set(
    space: MetricSpace, sample: Sample, r, *, chunk_size: int = _DEFAULT_CHUNK
) -> MeanSetResult:
    """Argmin over the whole space of (1/n) sum_i d(X_i, x')^r, with all ties."""
    check_order(r)
    sup_idx, counts = _counts_from_sample(space, sample)
    candidates = np.arange(len(space), dtype=np.intp)
    return _solve(space, sup_idx, counts, r, candidates, "full_space", sample.n, chunk_size)


def restricted_sample_mean_set(
    space: MetricSpace, sample: Sample, r, *, chunk_size: int = _DEFAULT_CHUNK
) -> MeanSetResult:
    """Argmin restricted to the distinct points occurring in the sample.

    Never empty: the candidates always exist, no matter how large the
    ambient space is.
    """
    check_order(r)
    sup_idx, counts = _counts_from_sample(space, sample)
    return _solve(space, sup_idx, counts, r, sup_idx, "sample_support", sample.n, chunk_size)


def _measure_mean_set(
    space: MetricSpace, mu: DiscreteMeasure, r, candidates_idx: np.ndarray, domain: str
) -> MeanSetResult:
    check_order(r)
    values = population_values(space, mu, r, candidates_idx)
    if isinstance(values, list):  # exact Fractions
        best = min(values)
        ties = [int(candidates_idx[i]) for i, v in enumerate(values) if v == best]
        exact = True
    else:
        best = float(values.min())
        keep = values <= best * (1.0 + FLOAT_TIE_RTOL)
        ties = [int(i) for i in candidates_idx[keep]]
        exact = False
    ties.sort()
    return MeanSetResult(
        order_r=r,
        optimum=best,
        argmin=tuple(space.points[i] for i in ties),
        candidate_domain=domain,
        exact=exact,
    )


def population_mean_set(space: MetricSpace, mu: DiscreteMeasure, r) -> MeanSetResult:
    """Argmin over the whole space of sum_x d(x, x')^r mu(x), with all ties."""
    candidates = np.arange(len(space), dtype=np.intp)
    return _measure_mean_set(space, mu, r, candidates, "full_space")


def restricted_population_mean_set(space: MetricSpace, mu: DiscreteMeasure, r) -> MeanSetResult:
    """Argmin restricted to the support of the measure (closed, being finite)."""
    candidates = space.indices(mu.support)
    return _measure_mean_set(space, mu, r, candidates, "measure_support")
