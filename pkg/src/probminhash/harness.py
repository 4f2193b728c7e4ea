"""Statistical experiment harness: estimation error, timing, buffer sizes.

Three experiment families are provided, each fully deterministic given a
master seed: empirical-MSE grids with z-scores against the analytic
expectation, machine-relative timing of signature computation, and buffer
occupancy statistics for the interleaved variants.  Per-cell seeds are
derived from the master seed and the cell key, so cells are independent of
evaluation order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as _k
from .errors import InvalidParamsError
from .estimate import WeightPairMultiset, jaccard_p_exact
from .rng import RandomStream
from .sketch import WeightedSet

ALGORITHM_IDS = {
    "pminhash": _k.ALG_PMINHASH,
    "probminhash1": _k.ALG_PMH1,
    "probminhash1a": _k.ALG_PMH1A,
    "probminhash2": _k.ALG_PMH2,
    "probminhash3": _k.ALG_PMH3,
    "probminhash3a": _k.ALG_PMH3A,
    "probminhash4": _k.ALG_PMH4,
    "minhash": _k.ALG_MINHASH,
    "superminhash": _k.ALG_SUPERMINHASH,
    "oph": _k.ALG_OPH,
    "unweighted1": _k.ALG_UW1,
    "unweighted1a": _k.ALG_UW1A,
    "unweighted2": _k.ALG_UW2,
    "unweighted3": _k.ALG_UW3,
    "unweighted3a": _k.ALG_UW3A,
    "unweighted4": _k.ALG_UW4,
}

# algorithms whose estimand is the conventional Jaccard similarity; their
# fixtures must carry binary weights
UNWEIGHTED_ALGORITHMS = frozenset(
    a for a in ALGORITHM_IDS if ALGORITHM_IDS[a] >= 10)

# m >= 2 required by the correlated point construction
MIN_M2_ALGORITHMS = frozenset((
    "probminhash3", "probminhash3a", "probminhash4",
    "superminhash", "unweighted3", "unweighted3a", "unweighted4",
))


def _pareto_pairs(n: int, a: float):
    """Fixed skewed weight pairs: Pareto(1,a) quantiles at midpoints of a
    regular grid, with the B side visiting the quantiles in a shuffled
    (coprime-stride) order."""
    pairs = []
    for q in range(n):
        wa = ((q + 0.5) / n) ** (-1.0 / a)
        wb = (((q * 7 + 3) % n + 0.5) / n) ** (-1.0 / a)
        pairs.append((wa, wb))
    return pairs


FIXTURES = {
    # the two explicitly documented weight-pair multisets
    "skew2": WeightPairMultiset([(3, 20), (30, 7)]),
    "binary3": WeightPairMultiset([(0, 1), (1, 0), (1, 1)]),
    # boundary similarities
    "single1": WeightPairMultiset([(1, 1)]),
    "disjoint2": WeightPairMultiset([(1, 0), (0, 1)]),
    # small sets, n << m
    "inverse2": WeightPairMultiset([(1, 2), (2, 1)]),
    "half2": WeightPairMultiset([(1, 1), (1, 0)]),
    "skew4": WeightPairMultiset([(1, 10), (10, 1), (2, 2), (5, 5)]),
    # moderate binary sets with round similarities
    "tenth10": WeightPairMultiset(
        [(1, 1)] + [(1, 0)] * 5 + [(0, 1)] * 4),
    "ninety10": WeightPairMultiset([(1, 1)] * 9 + [(1, 0)]),
    "binary8": WeightPairMultiset(
        [(1, 1)] * 4 + [(1, 0)] * 2 + [(0, 1)] * 2),
    # n >> m regime (use with small m)
    "binary64": WeightPairMultiset(
        [(1, 1)] * 16 + [(1, 0)] * 24 + [(0, 1)] * 24),
    # larger skewed multiset with full overlap
    "pareto16": WeightPairMultiset(_pareto_pairs(16, 2.0)),
}


@dataclass(frozen=True)
class WeightDistributionSpec:
    """Weight model for synthetic input sets: unit weights or Pareto(1,a)
    via the inverse CDF (1-U)^(-1/a)."""

    kind: str = "unweighted"
    index: float = 2.0

    def __post_init__(self):
        if self.kind not in ("unweighted", "pareto"):
            raise InvalidParamsError(f"unknown weight distribution {self.kind!r}")
        if self.kind == "pareto" and not self.index > 0.0:
            raise InvalidParamsError("pareto tail index must be positive")

    @property
    def name(self) -> str:
        if self.kind == "unweighted":
            return "unweighted"
        return f"pareto(1,{self.index:g})"

    def sample(self, n: int, stream: RandomStream) -> np.ndarray:
        if self.kind == "unweighted":
            return np.ones(n, np.float64)
        u = stream.uniform01_batch(n)
        return (1.0 - u) ** (-1.0 / self.index)


@dataclass(frozen=True)
class ExperimentConfig:
    algorithms: tuple = ("pminhash", "probminhash1", "probminhash1a",
                         "probminhash2")
    m_values: tuple = (16, 64, 256)
    s: int = 2000
    seed: int = 0
    fixtures: tuple = tuple(FIXTURES)
    n_values: tuple = ()
    reps: int = 100
    distribution: WeightDistributionSpec = field(
        default_factory=WeightDistributionSpec)

    def __post_init__(self):
        if self.s < 1:
            raise InvalidParamsError("pair count must be >= 1")
        for m in self.m_values:
            if m < 1:
                raise InvalidParamsError("signature size must be >= 1")
        for a in self.algorithms:
            if a not in ALGORITHM_IDS:
                raise InvalidParamsError(f"unknown algorithm {a!r}")
        for f in self.fixtures:
            if f not in FIXTURES:
                raise InvalidParamsError(f"unknown fixture {f!r}")


@dataclass(frozen=True)
class MseRow:
    algorithm: str
    m: int
    fixture: str
    jp: float
    mse: float
    relative_mse: float
    zscore: float
    pairs: int


@dataclass(frozen=True)
class TimingRow:
    algorithm: str
    m: int
    n: int
    mean_ns: float


@dataclass(frozen=True)
class BufferRow:
    algorithm: str
    distribution: str
    n: int
    mean: float
    p005: float
    p995: float


@dataclass(frozen=True)
class EquivalenceReport:
    trials: int
    mismatches: int
    first_failure_seed: int | None

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def cell_seed(master: int, *key) -> int:
    """Derive an independent 64-bit per-cell seed from the master seed and a
    printable cell key."""
    text = "|".join(str(p) for p in key) + "|" + str(master)
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def generate_pair(V, stream: RandomStream):
    """Materialize one random set pair with exact similarity jaccard_p_exact(V):
    one fresh 64-bit id per weight pair, added to either side where its
    weight is positive."""
    if not isinstance(V, WeightPairMultiset):
        V = WeightPairMultiset(V)
    ids_a, w_a, ids_b, w_b = [], [], [], []
    for a, b in V.pairs:
        eid = stream.next_u64()
        if a > 0:
            ids_a.append(eid)
            w_a.append(a)
        if b > 0:
            ids_b.append(eid)
            w_b.append(b)
    A = WeightedSet.from_arrays(
        np.array(ids_a, np.uint64), np.array(w_a), validate=False)
    B = WeightedSet.from_arrays(
        np.array(ids_b, np.uint64), np.array(w_b), validate=False)
    return A, B


def pair_multiset(A: WeightedSet, B: WeightedSet) -> WeightPairMultiset:
    """Reconstruct the weight-pair multiset of a set pair (round-trip check
    for generate_pair)."""
    wa = {int(i): float(w) for i, w in zip(A.ids, A.weights)}
    wb = {int(i): float(w) for i, w in zip(B.ids, B.weights)}
    return WeightPairMultiset(
        [(wa.get(i, 0.0), wb.get(i, 0.0)) for i in sorted(set(wa) | set(wb))])


def mse_sampling_sd(jp: float, m: int, s: int) -> float:
    """Standard deviation of the empirical MSE over s pairs when each pair's
    match count is Binomial(m, jp)."""
    var = (jp ** 2 * (1.0 - jp) ** 2 / (m * m * s) * (2.0 - 6.0 / m)
           + jp * (1.0 - jp) / (m ** 3 * s))
    return math.sqrt(max(var, 0.0))


def mse_zscore(mse: float, jp: float, m: int, s: int) -> float:
    """Standardized deviation of an empirical MSE from its expectation
    jp(1-jp)/m.  Degenerate similarities (jp in {0,1}) admit only MSE 0."""
    expected = jp * (1.0 - jp) / m
    sd = mse_sampling_sd(jp, m, s)
    if sd == 0.0:
        return 0.0 if mse == expected else math.inf
    return (mse - expected) / sd


def _relative_mse(mse: float, jp: float, m: int) -> float:
    expected = jp * (1.0 - jp) / m
    if expected == 0.0:
        return 0.0 if mse == 0.0 else math.inf
    return mse / expected


def _check_cell(algorithm: str, m: int, fixture: str, V: WeightPairMultiset):
    if algorithm in MIN_M2_ALGORITHMS and m < 2:
        raise InvalidParamsError(f"{algorithm} requires m >= 2")
    if algorithm in UNWEIGHTED_ALGORITHMS:
        for a, b in V.pairs:
            if a not in (0.0, 1.0) or b not in (0.0, 1.0):
                raise InvalidParamsError(
                    f"{algorithm} estimates the conventional Jaccard "
                    f"similarity; fixture {fixture!r} must be binary")


def run_mse_cell(algorithm: str, m: int, fixture: str, s: int,
                 seed: int) -> MseRow:
    """One grid cell: s random pairs with the fixture's weight profile,
    sketched with one algorithm, squared estimation errors accumulated."""
    V = FIXTURES[fixture] if isinstance(fixture, str) else fixture
    _check_cell(algorithm, m, fixture, V)
    wa, wb = V.arrays()
    jp = jaccard_p_exact(V)
    cs = cell_seed(seed, "mse", algorithm, m, fixture)
    matches = _k._k_mse_cell(
        ALGORITHM_IDS[algorithm], m, wa, wb, np.uint64(cs), s)
    errors = matches / m - jp
    mse = float(np.mean(errors * errors))
    return MseRow(algorithm, m, fixture, jp, mse,
                  _relative_mse(mse, jp, m), mse_zscore(mse, jp, m, s), s)


def run_mse_experiment(cfg: ExperimentConfig) -> list:
    rows = []
    for fixture in cfg.fixtures:
        for algorithm in cfg.algorithms:
            for m in cfg.m_values:
                rows.append(run_mse_cell(algorithm, m, fixture, cfg.s,
                                         cfg.seed))
    return rows


def _random_input(n: int, dist: WeightDistributionSpec,
                  stream: RandomStream):
    ids = stream.u64_batch(n)
    return ids, dist.sample(n, stream)


def run_timing_experiment(cfg: ExperimentConfig) -> list:
    """Mean wall-clock time per signature over cfg.reps pre-generated sets
    per (algorithm, m, n) cell; one warm-up sketch is excluded."""
    if not cfg.n_values:
        raise InvalidParamsError("timing runs need n_values")
    rows = []
    for algorithm in cfg.algorithms:
        aid = ALGORITHM_IDS[algorithm]
        for m in cfg.m_values:
            if algorithm in MIN_M2_ALGORITHMS and m < 2:
                raise InvalidParamsError(f"{algorithm} requires m >= 2")
            for n in cfg.n_values:
                stream = RandomStream(
                    cell_seed(cfg.seed, "timing", algorithm, m, n))
                sets = [_random_input(n, cfg.distribution, stream)
                        for _ in range(cfg.reps)]
                _k._k_sketch_dispatch(aid, sets[0][0], sets[0][1], m)
                t0 = time.perf_counter_ns()
                for ids, w in sets:
                    _k._k_sketch_dispatch(aid, ids, w, m)
                t1 = time.perf_counter_ns()
                rows.append(TimingRow(algorithm, m, n, (t1 - t0) / cfg.reps))
    return rows


_BUFFERED_KERNELS = {
    "probminhash1a": _k._k_probminhash1a,
    "probminhash3a": _k._k_probminhash3a,
}


def run_buffer_experiment(cfg: ExperimentConfig) -> list:
    """Distribution of the maximum buffer occupancy of the interleaved
    variants: mean and the middle 99% band over cfg.s sketched sets per
    (n, weight distribution) cell."""
    if not cfg.n_values:
        raise InvalidParamsError("buffer runs need n_values")
    for algorithm in cfg.algorithms:
        if algorithm not in _BUFFERED_KERNELS:
            raise InvalidParamsError(
                f"buffer statistics require an interleaved variant, "
                f"got {algorithm!r}")
    rows = []
    for algorithm in cfg.algorithms:
        kern = _BUFFERED_KERNELS[algorithm]
        for m in cfg.m_values:
            for n in cfg.n_values:
                stream = RandomStream(cell_seed(
                    cfg.seed, "buffer", algorithm, cfg.distribution.name,
                    m, n))
                bufs = np.empty(cfg.s, np.int64)
                for t in range(cfg.s):
                    ids, w = _random_input(n, cfg.distribution, stream)
                    _, stats = kern(ids, w, m)
                    bufs[t] = stats[1]
                p005, p995 = np.quantile(bufs, [0.005, 0.995])
                rows.append(BufferRow(
                    algorithm, cfg.distribution.name, n,
                    float(bufs.mean()), float(p005), float(p995)))
    return rows


def run_equivalence_suite(seed: int, trials: int = 1000,
                          max_n: int = 10_000) -> EquivalenceReport:
    """Randomized bit-equivalence check of the interleaved variants against
    their single-pass counterparts, plus power-of-two weight-scale
    invariance.  Any mismatch is reported with the trial seed that
    reproduces it."""
    if trials < 1:
        raise InvalidParamsError("trials must be >= 1")
    master = RandomStream(cell_seed(seed, "equivalence"))
    m_choices = (2, 3, 16, 64)
    mismatches = 0
    first_failure = None
    for t in range(trials):
        tseed = master.next_u64()
        ts = RandomStream(tseed)
        n = max(1, int(math.exp(ts.next_uniform01() * math.log(max_n))))
        m = m_choices[ts.next_uniform_int(len(m_choices))]
        ids = ts.u64_batch(n)
        if t % 2 == 0:
            w = np.ones(n, np.float64)
        else:
            w = WeightDistributionSpec("pareto", 2.0).sample(n, ts)
        scale = 2.0 ** (ts.next_uniform_int(17) - 8)
        ok = True
        s1, _ = _k._k_probminhash1(ids, w, m)
        s1a, _ = _k._k_probminhash1a(ids, w, m)
        s3, _ = _k._k_probminhash3(ids, w, m)
        s3a, _ = _k._k_probminhash3a(ids, w, m)
        ok &= bool(np.array_equal(s1, s1a))
        ok &= bool(np.array_equal(s3, s3a))
        ws = w * scale
        ok &= bool(np.array_equal(s1, _k._k_probminhash1(ids, ws, m)[0]))
        ok &= bool(np.array_equal(s3, _k._k_probminhash3(ids, ws, m)[0]))
        if not ok:
            mismatches += 1
            if first_failure is None:
                first_failure = tseed
    return EquivalenceReport(trials, mismatches, first_failure)


def _write_csv(out, header, rows, fields):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([_fmt(getattr(r, f)) for f in fields])


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".12g")
    return v


MSE_COLUMNS = ("algorithm", "m", "fixture", "jp", "mse", "relative_mse",
               "zscore", "pairs")
TIMING_COLUMNS = ("algorithm", "m", "n", "mean_ns")
BUFFER_COLUMNS = ("algorithm", "distribution", "n", "mean", "p005", "p995")


def mse_csv(rows) -> str:
    out = io.StringIO()
    _write_csv(out, MSE_COLUMNS, rows, MSE_COLUMNS)
    return out.getvalue()


def timing_csv(rows) -> str:
    out = io.StringIO()
    _write_csv(out, TIMING_COLUMNS, rows, TIMING_COLUMNS)
    return out.getvalue()


def buffer_csv(rows) -> str:
    out = io.StringIO()
    _write_csv(out, BUFFER_COLUMNS, rows, BUFFER_COLUMNS)
    return out.getvalue()
