"""Bounded (pseudo-)metric spaces over finite point sets.

A :class:`MetricSpace` couples an ordered finite point set with a distance
oracle, a certified upper bound ``M`` on all distances, and a pseudo-metric
flag.  Whenever the distances live on a rational lattice -- Hamming distances
on graphs, interval grids with a rational step -- the space keeps distances as
integers times a rational ``scale``, which lets every downstream functional
comparison run in exact arithmetic.  Spaces that cannot be expressed this way
fall back to floating point with documented tie tolerances.

On top of the space abstraction, this module provides the empirical and
population Frechet functionals, the modulus of continuity of the family of
exponentiated point functions, and the metric-axiom checker.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "MetricSpace",
    "DiscreteMeasure",
    "Sample",
    "AxiomViolation",
    "AxiomReport",
    "interval_grid",
    "check_metric_axioms",
    "check_order",
    "sample_functional",
    "population_functional",
    "modulus_of_continuity",
    "power_gamma",
    "equicontinuity_bound",
]

# Largest integer score guaranteed to survive an int64 matmul; anything
# bigger is recomputed with Python big ints.
_INT64_SAFE = 2**62


def _int_floor(q: Fraction) -> int:
    return q.numerator // q.denominator


def _strict_int_bound(q: Fraction) -> int:
    """Largest integer strictly below q (so k < q iff k <= bound for int k)."""
    return q.numerator // q.denominator - (1 if q.denominator == 1 else 0)


def check_order(r) -> None:
    """Validate a moment order: a finite real number with r >= 1.

    Integer orders unlock the exact-arithmetic path; any other finite
    ``r >= 1`` is evaluated in floating point.  Orders below one are
    rejected outright because the consistency guarantees computed by this
    package only cover ``r >= 1``.
    """
    if isinstance(r, bool) or not isinstance(r, (int, float)):
        raise ValueError(f"order r must be an int or float, got {type(r).__name__}")
    if not np.isfinite(float(r)):
        raise ValueError("order r must be finite")
    if r < 1:
        raise ValueError(f"order r must be >= 1, got {r}")


def power_gamma(r: int) -> int:
    """Lipschitz factor of x -> x^r on a bounded metric: 1 + sum_k C(r,k) = 2^r - 1."""
    if not isinstance(r, int) or r < 1:
        raise ValueError("power_gamma is defined for integer r >= 1")
    return 2**r - 1


def equicontinuity_bound(bound_m, r: int, dxy):
    """Upper bound (2^r - 1) * M^(r-1) * d(x,y) for |d(z,x)^r - d(z,y)^r|."""
    return power_gamma(r) * bound_m ** (r - 1) * dxy


class MetricSpace:
    """Finite point set with a bounded (pseudo-)metric.

    ``points`` is the canonical ordering of the space: mean sets, reports
    and argmin ties are always emitted in this order.  ``bound_M`` is a
    certified bound on all pairwise distances (it is not recomputed per
    call; ``check_metric_axioms`` verifies it on demand).

    Exact spaces additionally satisfy ``d(x, y) = int_distance(x, y) * scale``
    with integer lattice distances and a positive rational scale.
    """

    def __init__(
        self,
        points: Sequence,
        *,
        int_block: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
        float_block: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
        scale: Fraction = Fraction(1),
        bound_M,
        is_pseudo: bool = False,
        label: Callable | None = None,
        name: str = "",
    ):
        if len(points) == 0:
            raise ValueError("a metric space needs at least one point")
        if int_block is None and float_block is None:
            raise ValueError("a distance backend is required")
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.points = tuple(points)
        self.bound_M = bound_M
        self.is_pseudo = bool(is_pseudo)
        self.name = name or f"space({len(self.points)} points)"
        self.scale = Fraction(scale)
        self.exact = int_block is not None
        self._int_block_fn = int_block
        self._float_block_fn = float_block
        self._label_fn = label
        self._index = {p: i for i, p in enumerate(self.points)}
        if len(self._index) != len(self.points):
            raise ValueError("points must be distinct identifiers")

    # -- indexing ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, point) -> bool:
        return point in self._index

    def index(self, point) -> int:
        try:
            return self._index[point]
        except (KeyError, TypeError):
            raise ValueError(f"{point!r} is not a point of {self.name}") from None

    def indices(self, points: Iterable) -> np.ndarray:
        return np.array([self.index(p) for p in points], dtype=np.intp)

    def label(self, point) -> str:
        if self._label_fn is not None:
            return self._label_fn(point)
        return str(point)

    # -- distances --------------------------------------------------------

    @property
    def max_int_distance(self) -> int:
        """Smallest integer lattice bound compatible with bound_M (exact spaces)."""
        if not self.exact:
            raise ValueError("max_int_distance is only defined for exact spaces")
        q = Fraction(self.bound_M) / self.scale
        return int(q) if q.denominator == 1 else int(q) + 1

    def int_block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Integer lattice distances for rows x cols (exact spaces only)."""
        if not self.exact:
            raise ValueError(f"{self.name} has no exact integer distance lattice")
        return self._int_block_fn(np.asarray(rows, dtype=np.intp), np.asarray(cols, dtype=np.intp))

    def float_block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        if self._float_block_fn is not None:
            return self._float_block_fn(rows, cols)
        return self._int_block_fn(rows, cols).astype(np.float64) * float(self.scale)

    def distance(self, x, y):
        """Distance between two points; exact spaces return int or Fraction."""
        i, j = self.index(x), self.index(y)
        if self.exact:
            d = int(self.int_block(np.array([i]), np.array([j]))[0, 0])
            return d if self.scale == 1 else d * self.scale
        return float(self.float_block(np.array([i]), np.array([j]))[0, 0])

    def set_distance(self, x, points: Iterable):
        """d(x, A) = min over A, with the convention d(x, empty) = +inf."""
        pts = list(points)
        if not pts:
            return float("inf")
        i = self.index(x)
        cols = self.indices(pts)
        if self.exact:
            d = int(self.int_block(np.array([i]), cols).min())
            return d if self.scale == 1 else d * self.scale
        return float(self.float_block(np.array([i]), cols).min())

    def subspace(self, points: Sequence, name: str = "") -> "MetricSpace":
        """Restriction to a subset of points (canonical order induced)."""
        sub = sorted({self.index(p) for p in points})
        if not sub:
            raise ValueError("a subspace needs at least one point")
        base = np.array(sub, dtype=np.intp)
        int_fn = None
        if self.exact:
            int_fn = lambda r, c: self._int_block_fn(base[r], base[c])
        float_fn = None
        if self._float_block_fn is not None:
            float_fn = lambda r, c: self._float_block_fn(base[r], base[c])
        return MetricSpace(
            [self.points[i] for i in sub],
            int_block=int_fn,
            float_block=float_fn,
            scale=self.scale,
            bound_M=self.bound_M,
            is_pseudo=self.is_pseudo,
            label=self._label_fn,
            name=name or f"{self.name}|{len(sub)} points",
        )

    @classmethod
    def from_int_matrix(
        cls,
        points: Sequence,
        matrix,
        *,
        scale: Fraction = Fraction(1),
        bound_M=None,
        is_pseudo: bool = False,
        label=None,
        name: str = "",
    ) -> "MetricSpace":
        if len(points) == 0:
            raise ValueError("a metric space needs at least one point")
        m = np.asarray(matrix, dtype=np.int64)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(points):
            raise ValueError("distance matrix must be square and match the point count")
        scale = Fraction(scale)
        if bound_M is None:
            bound_M = int(m.max()) * scale if scale != 1 else int(m.max())
        return cls(
            points,
            int_block=lambda r, c: m[np.ix_(r, c)],
            scale=scale,
            bound_M=bound_M,
            is_pseudo=is_pseudo,
            label=label,
            name=name,
        )

    @classmethod
    def from_float_matrix(
        cls, points: Sequence, matrix, *, bound_M=None, is_pseudo: bool = False, label=None, name: str = ""
    ) -> "MetricSpace":
        if len(points) == 0:
            raise ValueError("a metric space needs at least one point")
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(points):
            raise ValueError("distance matrix must be square and match the point count")
        if bound_M is None:
            bound_M = float(m.max())
        return cls(
            points,
            float_block=lambda r, c: m[np.ix_(r, c)],
            bound_M=bound_M,
            is_pseudo=is_pseudo,
            label=label,
            name=name,
        )

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        return f"MetricSpace({self.name!r}, n={len(self.points)}, M={self.bound_M}, {kind})"


def _decimal_label(x: Fraction) -> str:
    """Exact decimal rendering when the denominator is 2^a * 5^b, else 'p/q'."""
    q = x.denominator
    for p in (2, 5):
        while q % p == 0:
            q //= p
    if q != 1:
        return str(x)
    f = float(x)
    if Fraction(str(f)) == x or Fraction(f) == x:
        return repr(f)
    return str(x)


def interval_grid(start="-1", end="1", step="0.01") -> MetricSpace:
    """Uniform rational grid on [start, end] with |x - y| as the metric.

    ``step`` must divide ``end - start`` exactly; points are Fractions so
    functionals over the grid stay in exact arithmetic.  bound_M is the
    interval length.
    """
    lo, hi, st = Fraction(str(start)), Fraction(str(end)), Fraction(str(step))
    if st <= 0:
        raise ValueError("step must be positive")
    if hi <= lo:
        raise ValueError("end must exceed start")
    span = (hi - lo) / st
    if span.denominator != 1:
        raise ValueError(f"step {st} does not divide the interval length {hi - lo}")
    count = int(span) + 1
    points = [lo + k * st for k in range(count)]
    idx = np.arange(count, dtype=np.int64)

    def block(rows, cols):
        return np.abs(idx[rows][:, None] - idx[cols][None, :])

    return MetricSpace(
        points,
        int_block=block,
        scale=st,
        bound_M=hi - lo,
        is_pseudo=False,
        label=_decimal_label,
        name=f"grid[{_decimal_label(lo)},{_decimal_label(hi)}]/{_decimal_label(st)}",
    )


# ---------------------------------------------------------------------------
# samples and measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sample:
    """Ordered multiset of observed points (duplicates allowed)."""

    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) == 0:
            raise ValueError("a sample must contain at least one item")

    @property
    def n(self) -> int:
        return len(self.items)

    def distinct(self) -> tuple:
        seen = dict.fromkeys(self.items)
        return tuple(seen)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure with finite support; weights are all positive.

    Support points are stored in canonical (sorted) order so inverse-CDF
    sampling is reproducible.  Rational weights keep the measure on the
    exact-arithmetic path; float weights must sum to 1 within 1e-12.
    """

    support: tuple
    weights: tuple

    def __post_init__(self):
        support = tuple(self.support)
        weights = tuple(self.weights)
        if len(support) == 0:
            raise ValueError("measure support must be non-empty")
        if len(support) != len(weights):
            raise ValueError("support and weights must have equal length")
        if len(set(support)) != len(support):
            raise ValueError("support points must be distinct")
        order = sorted(range(len(support)), key=lambda i: support[i])
        support = tuple(support[i] for i in order)
        weights = tuple(weights[i] for i in order)
        for w in weights:
            if w <= 0:
                raise ValueError(f"weights must be positive, got {w}")
        if all(isinstance(w, Rational) for w in weights):
            if sum(weights) != 1:
                raise ValueError(f"rational weights must sum to exactly 1, got {sum(weights)}")
        else:
            total = float(sum(float(w) for w in weights))
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"weights must sum to 1 within 1e-12, got {total}")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @property
    def is_rational(self) -> bool:
        return all(isinstance(w, Rational) for w in self.weights)

    @classmethod
    def uniform(cls, points: Iterable) -> "DiscreteMeasure":
        pts = tuple(points)
        return cls(pts, tuple(Fraction(1, len(pts)) for _ in pts))

    @classmethod
    def empirical(cls, sample: Sample) -> "DiscreteMeasure":
        counts: dict = {}
        for item in sample.items:
            counts[item] = counts.get(item, 0) + 1
        pts = tuple(counts)
        return cls(pts, tuple(Fraction(counts[p], sample.n) for p in pts))


# ---------------------------------------------------------------------------
# axiom checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    witness: tuple
    detail: str
    count: int = 1


@dataclass(frozen=True)
class AxiomReport:
    space_name: str
    n_points: int
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return f"all metric axioms hold on {self.space_name} ({self.n_points} points)"
        lines = [f"{len(self.violations)} axiom violation kind(s) on {self.space_name}:"]
        for v in self.violations:
            lines.append(f"  {v.axiom}: {v.detail} [witness {v.witness}, {v.count} case(s)]")
        return "\n".join(lines)


def check_metric_axioms(space: MetricSpace, max_points: int = 4096) -> AxiomReport:
    """Exhaustively verify the (pseudo-)metric axioms and the bound M.

    Violations are returned as data, one entry per violated axiom with a
    concrete witness and the total violation count.  The coincidence axiom
    (d(x,y)=0 implies x=y) is only checked when the space is not flagged
    pseudo.  The scan is O(n^2) in memory and O(n^3) in time, hence the
    ``max_points`` guard.
    """
    n = len(space)
    if n > max_points:
        raise ValueError(
            f"exhaustive axiom check on {n} points exceeds the {max_points}-point guard"
        )
    all_idx = np.arange(n, dtype=np.intp)
    if space.exact:
        d = space.int_block(all_idx, all_idx).astype(np.int64)
        m_units = Fraction(space.bound_M) / space.scale

        def dist_value(i, j):
            v = int(d[i, j])
            return v if space.scale == 1 else v * space.scale

        # d_int > M/scale as a pure integer comparison
        bound_exceeded = d > _int_floor(m_units)
    else:
        d = space.float_block(all_idx, all_idx)

        def dist_value(i, j):
            return float(d[i, j])

        bound_exceeded = d > float(space.bound_M)

    violations = []

    def add(axiom, mask_pairs, detail_fn):
        idx = np.argwhere(mask_pairs)
        if idx.size:
            wit = tuple(space.points[k] for k in idx[0])
            violations.append(
                AxiomViolation(axiom, wit, detail_fn(tuple(int(k) for k in idx[0])), len(idx))
            )

    add("non-negativity", d < 0, lambda w: f"d{w} = {dist_value(*w)} < 0")
    diag = np.diag(d)
    if np.any(diag != 0):
        i = int(np.nonzero(diag != 0)[0][0])
        violations.append(
            AxiomViolation(
                "identity",
                (space.points[i],),
                f"d(x,x) = {dist_value(i, i)} != 0",
                int(np.count_nonzero(diag != 0)),
            )
        )
    add("symmetry", d != d.T, lambda w: f"d{w} = {dist_value(*w)} != d(swapped) = {dist_value(w[1], w[0])}")
    add("boundedness", bound_exceeded, lambda w: f"d{w} = {dist_value(*w)} > M = {space.bound_M}")

    # Triangle inequality, chunked over the middle point to bound memory.
    # The float path gets an absolute 1e-12 * max(1, M) slack so rounding in
    # the sum d(x,y) + d(y,z) cannot manufacture violations.
    slack = 0 if space.exact else 1e-12 * max(1.0, float(space.bound_M))
    tri_count = 0
    tri_witness = None
    for k in range(n):
        viol = d > d[:, k][:, None] + d[k, :][None, :] + slack
        if np.any(viol):
            tri_count += int(np.count_nonzero(viol))
            if tri_witness is None:
                i, j = np.argwhere(viol)[0]
                tri_witness = (int(i), k, int(j))
    if tri_witness:
        i, k, j = tri_witness
        violations.append(
            AxiomViolation(
                "triangle",
                (space.points[i], space.points[k], space.points[j]),
                f"d(x,z) = {dist_value(i, j)} > d(x,y) + d(y,z) = {dist_value(i, k)} + {dist_value(k, j)}",
                tri_count,
            )
        )

    if not space.is_pseudo:
        off_zero = (d == 0) & ~np.eye(n, dtype=bool)
        add("coincidence", off_zero, lambda w: "d(x,y) = 0 for distinct points")

    return AxiomReport(space.name, n, tuple(violations))


# ---------------------------------------------------------------------------
# Frechet functionals
# ---------------------------------------------------------------------------


def _counts_from_sample(space: MetricSpace, sample: Sample) -> tuple[np.ndarray, np.ndarray]:
    """Distinct item indices and multiplicities, in canonical space order."""
    idx = space.indices(sample.items)
    distinct, counts = np.unique(idx, return_counts=True)
    return distinct.astype(np.intp), counts.astype(np.int64)


def sample_functional(space: MetricSpace, sample: Sample, candidate, r):
    """Empirical functional (1/n) * sum_i d(X_i, candidate)^r.

    On exact spaces with integer r the distance powers are accumulated as
    integers and divided once at the end, so the result is an exact
    Fraction; otherwise a float is returned.
    """
    check_order(r)
    c = space.index(candidate)
    sup_idx, counts = _counts_from_sample(space, sample)
    n = sample.n
    if space.exact and isinstance(r, int):
        block = space.int_block(np.array([c]), sup_idx)[0]
        total = sum(int(b) ** r * int(w) for b, w in zip(block, counts))
        return Fraction(total, n) * space.scale**r
    block = space.float_block(np.array([c]), sup_idx)[0]
    return float((block**float(r)) @ (counts.astype(np.float64) / n))


def population_values(space: MetricSpace, mu: DiscreteMeasure, r, candidates_idx: np.ndarray | None = None):
    """Population functional at every candidate (defaults to the whole space).

    Returns a list of Fractions on the exact path, else a float array.
    """
    check_order(r)
    sup_idx = space.indices(mu.support)
    if candidates_idx is None:
        candidates_idx = np.arange(len(space), dtype=np.intp)
    if space.exact and isinstance(r, int) and mu.is_rational:
        block = space.int_block(candidates_idx, sup_idx)
        scale_r = space.scale**r
        weights = [Fraction(w) for w in mu.weights]
        return [
            sum(Fraction(int(b) ** r) * w for b, w in zip(row, weights)) * scale_r
            for row in block
        ]
    block = space.float_block(candidates_idx, sup_idx) ** float(r)
    return block @ np.array([float(w) for w in mu.weights])


def population_functional(space: MetricSpace, mu: DiscreteMeasure, candidate, r):
    """Population functional sum_x d(x, candidate)^r * mu(x)."""
    c = space.index(candidate)
    vals = population_values(space, mu, r, np.array([c], dtype=np.intp))
    return vals[0] if isinstance(vals, list) else float(vals[0])


def modulus_of_continuity(space: MetricSpace, support: Iterable, delta, r):
    """Worst-case change of any exponentiated point function over close pairs.

    s(delta) = sup over z in support and pairs x, y in support with
    d(x, y) < delta of |d(z,x)^r - d(z,y)^r|, computed by exact enumeration
    of all qualifying triples.  Returns 0 when only identical pairs qualify.
    """
    check_order(r)
    sup = list(support)
    if not sup:
        raise ValueError("modulus_of_continuity needs a non-empty support")
    if delta <= 0:
        raise ValueError("delta must be positive")
    idx = space.indices(sup)
    if space.exact and isinstance(r, int):
        d = space.int_block(idx, idx).astype(np.int64)
        # d(x,y) < delta in lattice units: d_int < delta / scale
        thr = Fraction(str(delta)) if not isinstance(delta, (int, Fraction)) else Fraction(delta)
        close = d <= _strict_int_bound(thr / space.scale)
        powed = d**r if space.max_int_distance**r < _INT64_SAFE else None
        best = 0
        for zrow in range(len(idx)):
            p = powed[zrow] if powed is not None else np.array([int(v) ** r for v in d[zrow]], dtype=object)
            diff = np.abs(p[:, None] - p[None, :])
            masked = diff[close]
            if masked.size:
                best = max(best, int(masked.max()))
        return Fraction(best) * space.scale**r
    d = space.float_block(idx, idx)
    close = d < float(delta)
    powed = d ** float(r)
    best = 0.0
    for zrow in range(len(idx)):
        diff = np.abs(powed[zrow][:, None] - powed[zrow][None, :])
        masked = diff[close]
        if masked.size:
            best = max(best, float(masked.max()))
    return best
