"""Bernoulli(1/2) sampling and the data-driven doubling construction.

The stream is xoshiro256** seeded through splitmix64 (see xoshiro).
Besides plain sequence sampling this module checks the summability
hypothesis on box growth, measures empirical block-frequency defects of
sampled sequences along a Folner spec, and runs the adversarial
doubling construction that hunts for all-zero added halves.
"""

from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import primes, xoshiro
from .folner import (
    STAIRCASE,
    DirectionSchedule,
    FolnerSpec,
    folner_size,
    nat_to_expvec,
)
from .seq import BitSeq, Block, PrefixError, normality_defect

MAX_SAMPLE = 1 << 30

# chosen by scanning small seeds for joint empirical criteria; see the
# seed-scan demo script for the exact selection procedure
DEFAULT_SEED = 41

_stream_cache: "OrderedDict[int, np.ndarray]" = OrderedDict()
_STREAM_CACHE_SEEDS = 3


def _stream(seed: int, N: int) -> np.ndarray:
    cached = _stream_cache.get(seed)
    if cached is None or cached.size < N:
        cached = xoshiro.bits(seed, N)
        _stream_cache[seed] = cached
        _stream_cache.move_to_end(seed)
        while len(_stream_cache) > _STREAM_CACHE_SEEDS:
            _stream_cache.popitem(last=False)
    return cached[:N]


def bernoulli_seq(seed: int, N: int) -> BitSeq:
    """First N Bernoulli(1/2) bits of the stream for this seed."""
    if not 1 <= N <= MAX_SAMPLE:
        raise ValueError(f"N out of range [1, 2**30]: {N}")
    return BitSeq(_stream(seed, N), provenance=f"bernoulli_seq(seed={seed}, N={N})")


# ------------------------------------------------------------- summability

@dataclass
class SummabilityReport:
    """Partial sums of alpha**|F_n| and the growth diagnostic."""

    sizes: List[int]
    strictly_increasing: bool
    partial_sums: Dict[float, List[float]]


def summability_check(
    spec: FolnerSpec, alphas: Sequence[float], n_max: int
) -> SummabilityReport:
    """Partial sums of alpha**|F_n| for n = 1..n_max per alpha, plus
    whether |F_n| strictly increases on the range (the sufficient
    condition for summability at every alpha in (0,1))."""
    for a in alphas:
        if not 0 < a < 1:
            raise ValueError(f"alpha must lie in (0,1): {a}")
    sizes = [folner_size(spec, n) for n in range(1, n_max + 1)]
    increasing = all(b > a for a, b in zip(sizes, sizes[1:]))
    sums: Dict[float, List[float]] = {}
    for a in alphas:
        acc = 0.0
        row = []
        for s in sizes:
            acc += a ** s
            row.append(acc)
        sums[float(a)] = row
    return SummabilityReport(sizes, increasing, sums)


# ------------------------------------------------------------- genericity

@dataclass
class GenericityRow:
    K: Tuple[int, ...]
    n: int
    size: int
    defect: Fraction


@dataclass
class GenericityReport:
    rows: List[GenericityRow]
    non_increasing: Dict[Tuple[int, ...], bool]

    def defect(self, K, n) -> Fraction:
        key = tuple(sorted(int(h) for h in K))
        for row in self.rows:
            if row.K == key and row.n == n:
                return row.defect
        raise KeyError((K, n))


def _direction_steps(schedule: DirectionSchedule, direction: int, count: int) -> list:
    """Global step indices of the first `count` doublings in `direction`."""
    out = []
    m = 1
    while len(out) < count:
        if m > 63:
            raise PrefixError(
                "rank weight exceeds 63 bits; the stream cannot index this cell"
            )
        try:
            d = schedule.direction(m)
        except ValueError:
            raise ValueError(
                f"schedule ends before direction {direction} doubles {count} times"
            ) from None
        if d == direction:
            out.append(m)
        m += 1
    return out


def _rank_table(schedule: DirectionSchedule, dim_index: int, vmax: int) -> np.ndarray:
    """rank contribution of coordinate dim_index, tabulated for 0..vmax.

    The doubling enumeration assigns the half added at global step s the
    rank offset 2**(s-1); coordinate bit t-1 of a cell corresponds to
    the t-th doubling in its direction.
    """
    need = max(int(vmax).bit_length(), 1)
    steps = _direction_steps(schedule, dim_index + 1, need)
    vals = np.arange(vmax + 1, dtype=np.int64)
    table = np.zeros(vmax + 1, dtype=np.int64)
    for t, s in enumerate(steps):
        table += ((vals >> t) & 1) * (1 << (s - 1))
    return table


def doubling_rank(spec: FolnerSpec, rows: np.ndarray) -> np.ndarray:
    """Enumeration rank of doubling-box cells (0 for the identity).

    Injective over the whole lattice and independent of the box index,
    so distinct cells always read distinct stream positions.
    """
    if spec.variant != "doubling":
        raise ValueError("rank enumeration is defined for doubling specs")
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    rank = np.zeros(rows.shape[0], dtype=np.int64)
    for i in range(rows.shape[1]):
        col = rows[:, i]
        top = int(col.max()) if col.size else 0
        rank += _rank_table(spec.schedule, i, top)[col]
    return rank


def _doubling_defect(x: BitSeq, spec: FolnerSpec, n: int, K: Sequence[int]) -> Fraction:
    """Block-frequency defect of the stream read along the doubling
    enumeration, over the cells of the box F_n."""
    sup = tuple(sorted(int(h) for h in K))
    if not sup or sup[0] < 1 or len(set(sup)) != len(sup):
        raise ValueError(f"bad block support {K}")
    if n > 24:
        raise ValueError(f"box 2**{n} too large to enumerate")
    box = spec.box(n)
    cells = box.rows()
    pattern = np.zeros(cells.shape[0], dtype=np.int64)
    for j, h in enumerate(sup):
        hv = nat_to_expvec(h)
        d = max(cells.shape[1], len(hv))
        shifted = np.zeros((cells.shape[0], d), dtype=np.int64)
        shifted[:, : cells.shape[1]] = cells
        shifted[:, : len(hv)] += np.asarray(hv, dtype=np.int64)
        rank = doubling_rank(spec, shifted)
        top = int(rank.max())
        if top + 1 > len(x):
            raise PrefixError(
                f"stream has {len(x)} bits; cell rank {top} needs bit {top + 1}"
            )
        bits = x.bits_at(rank + 1)
        pattern |= bits.astype(np.int64) << j
    counts = np.bincount(pattern, minlength=1 << len(sup))
    total = cells.shape[0]
    target = Fraction(1, 1 << len(sup))
    return max(abs(Fraction(int(c), total) - target) for c in counts)


def empirical_genericity(
    x: BitSeq,
    spec: FolnerSpec,
    K_family: Sequence[Sequence[int]],
    ns: Sequence[int],
) -> GenericityReport:
    """Normality defect of x per (K, n) along the spec.

    Additive specs read x at natural positions; doubling specs read the
    stream along the box enumeration rank (cells beyond 63-bit naturals
    keep well-defined i.i.d. bits that way).
    """
    rows = []
    trend: Dict[Tuple[int, ...], bool] = {}
    for K in K_family:
        key = tuple(sorted(int(h) for h in K))
        defects = []
        for n in ns:
            if spec.variant == "doubling":
                d = _doubling_defect(x, spec, n, key)
            else:
                d = normality_defect(x, spec, n, key)
            rows.append(GenericityRow(key, n, folner_size(spec, n), d))
            defects.append(d)
        trend[key] = all(b <= a for a, b in zip(defects, defects[1:]))
    return GenericityReport(rows, trend)


# ------------------------------------------------------------- adversarial

@dataclass
class TraceStep:
    """One construction step: sizes, zero counts, and how the direction
    was chosen.  Counts are None once the box outgrows the readable
    horizon."""

    step: int
    kind: str  # "seed", "staircase", "adversarial"
    direction: Optional[int]
    multiplier: Optional[int]
    fallback: bool
    added_zeros: Optional[int]
    size: int
    zeros: Optional[int]
    fraction: Optional[Fraction]


@dataclass
class AdversarialResult:
    spec: FolnerSpec
    trace: List[TraceStep]
    successes: int
    directions: Tuple[int, ...]


def _probe_adversarial(x: BitSeq, cells: np.ndarray, counts: Dict[int, int], L: int):
    """Least direction whose doubled half reads all zeros.

    Returns (direction, multiplier, probed_count); direction is None
    when every in-horizon candidate fails.  Candidates are enumerated
    while the doubled leading parameter stays within len(x); once a
    fresh direction overflows, all later ones do too.
    """
    horizon = len(x)
    probed = 0
    chunk_dirs: List[Tuple[int, int]] = []
    # scan in escalating batches so an early success stays cheap while a
    # full sweep stays vectorized; cap batch memory at ~1M read positions
    mem_cap = max(1, (1 << 20) // max(int(cells.size), 1))
    chunk_cap = min(64, mem_cap)

    def scan_chunk():
        nonlocal probed
        if not chunk_dirs:
            return None
        vals = np.concatenate([cells * v for _, v in chunk_dirs])
        bits = x.bits_at(vals).reshape(len(chunk_dirs), cells.size)
        probed += len(chunk_dirs)
        hit = np.flatnonzero(~bits.any(axis=1))
        if hit.size:
            return chunk_dirs[int(hit[0])]
        return None

    d = 1
    while True:
        c = counts.get(d, 0)
        try:
            p = primes.prime(d)
        except ValueError:
            break  # probe range exceeds the prime table; stop honestly
        v = p ** (1 << c)
        if L * v > horizon:
            if c == 0:
                break
            d += 1
            continue
        chunk_dirs.append((d, v))
        if len(chunk_dirs) >= chunk_cap:
            found = scan_chunk()
            if found:
                return found[0], found[1], probed
            chunk_dirs = []
            chunk_cap = min(chunk_cap * 2, mem_cap)
        d += 1
    found = scan_chunk()
    if found:
        return found[0], found[1], probed
    return None, None, probed


def adversarial_doubling(x: BitSeq, steps: int) -> AdversarialResult:
    """Doubling construction that hunts zeros: odd steps follow the
    staircase schedule, even steps double in the least direction whose
    added half is all zeros (falling back to the staircase prescription,
    flagged, when no in-horizon direction succeeds).

    Step 1 is the seed box {identity}; step n doubles to 2**(n-1) cells.
    The returned spec is indexed so its F_m is construction step m+1.
    """
    if steps < 2:
        raise ValueError("need at least one doubling step")
    horizon = len(x)
    if horizon < 2:
        raise ValueError("horizon exhausted: cannot probe any doubling")
    cells: Optional[np.ndarray] = np.array([1], dtype=np.int64)
    counts: Dict[int, int] = {}
    L = 1
    zeros: Optional[int] = int(x.get(1) == 0)
    trace = [TraceStep(1, "seed", None, None, False, None, 1, zeros, Fraction(zeros))]
    stair_ptr = 1
    directions: List[int] = []
    successes = 0
    for step in range(2, steps + 1):
        fallback = False
        if step % 2 == 0:
            kind = "adversarial"
            d = v = None
            if cells is not None:
                d, v, probed = _probe_adversarial(x, cells, counts, L)
                if step == 2 and probed == 0:
                    raise ValueError("horizon exhausted: cannot probe any doubling")
            if d is None:
                fallback = True
                d = STAIRCASE.direction(stair_ptr)
                stair_ptr += 1
                v = primes.prime(d) ** (1 << counts.get(d, 0))
            else:
                successes += 1
        else:
            kind = "staircase"
            d = STAIRCASE.direction(stair_ptr)
            stair_ptr += 1
            v = primes.prime(d) ** (1 << counts.get(d, 0))
        newL = L * v
        size = 1 << (step - 1)
        added_zeros = None
        if cells is not None and newL <= horizon:
            added = cells * v
            added_zeros = int((x.bits_at(added) == 0).sum())
            zeros = zeros + added_zeros if zeros is not None else None
            cells = np.concatenate([cells, added])
        else:
            cells = None
            zeros = None
        directions.append(d)
        counts[d] = counts.get(d, 0) + 1
        L = newL
        trace.append(
            TraceStep(
                step,
                kind,
                d,
                v,
                fallback,
                added_zeros,
                size,
                zeros,
                Fraction(zeros, size) if zeros is not None else None,
            )
        )
    spec = FolnerSpec.doubling(
        DirectionSchedule("explicit", directions=tuple(directions))
    )
    return AdversarialResult(spec, trace, successes, tuple(directions))


def guaranteed_zero_fraction(trace: List[TraceStep]) -> List[Tuple[int, Fraction]]:
    """Per-step lower bound on the zero fraction, from the trace alone:
    every successfully added adversarial half is all zeros by
    construction, so after step n at least (sum of successful half
    sizes) / 2**(n-1) of the box is zeros."""
    forced = 0
    out = []
    for t in trace:
        if t.step == 1:
            out.append((1, Fraction(0)))
            continue
        if t.kind == "adversarial" and not t.fallback:
            forced += t.size // 2
        out.append((t.step, Fraction(forced, t.size)))
    return out
