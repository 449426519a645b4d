"""Repetitive and balanced sequences, exact Liouville witnesses, and the
two normal-Liouville constructions (additive and multiplicative).

A repetitive sequence is the limit of words w_1 = u_1,
w_k = w_{k-1}^{R_k} u_k with R_k >= k-1.  When it is not eventually
periodic, the number it expands is Liouville: the w_k-periodic rational
p/q has q < 2^|w_k| while the limit agrees with it past position
k*|w_k|.  Balanced sequences take u_k = v_k^{r_k} with the copy words
v_k and make the non-v material vanish in density, which is what turns
normality of the v_k into normality of the limit.

All witness verification is exact integer arithmetic; gmpy2 is used for
the big multiplications when importable.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover
    mpz = int

from .folner import FolnerSpec, divisors
from .seq import BitSeq

MAX_WORD = 1 << 27


def _word_arr(word: str) -> np.ndarray:
    if not word or any(c not in "01" for c in word):
        raise ValueError(f"not a nonempty binary word: {word!r}")
    return np.frombuffer(word.encode(), dtype=np.uint8) - ord("0")


# ------------------------------------------------------------ repetitive

@dataclass(frozen=True)
class RepetitiveSpec:
    """Steps (u_k, R_k): w_1 = u_1, w_k = w_{k-1}^{R_k} u_k, R_k >= k-1.

    R_1 is ignored (there is no w_0).
    """

    steps: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        steps = tuple((str(u), int(r)) for u, r in self.steps)
        if not steps:
            raise ValueError("need at least one step")
        for k, (u, r) in enumerate(steps, start=1):
            if not u or any(c not in "01" for c in u):
                raise ValueError(f"u_{k} is not a nonempty binary word")
            if k > 1 and r < k - 1:
                raise ValueError(f"R_{k} = {r} violates R_k >= k-1")
        object.__setattr__(self, "steps", steps)

    @property
    def last(self) -> int:
        return len(self.steps)

    def w_lengths(self) -> List[int]:
        out = []
        for k, (u, r) in enumerate(self.steps, start=1):
            out.append(len(u) if k == 1 else r * out[-1] + len(u))
        return out

    def w_length(self, k: int) -> int:
        if not 1 <= k <= self.last:
            raise ValueError(f"step {k} outside 1..{self.last}")
        return self.w_lengths()[k - 1]

    def periodic_hint(self) -> bool:
        """True when the limit is eventually periodic for a structural
        reason: all u_k equal makes every w_k a power of u_1."""
        return len({u for u, _ in self.steps}) == 1

    def word_array(self, k: int) -> np.ndarray:
        if self.w_length(k) > MAX_WORD:
            raise ValueError(f"w_{k} has {self.w_length(k)} bits, over the cap")
        w = _word_arr(self.steps[0][0])
        for j in range(2, k + 1):
            u, r = self.steps[j - 1]
            w = np.concatenate([np.tile(w, r), _word_arr(u)])
        return w

    def word(self, k: int) -> str:
        return "".join("01"[b] for b in self.word_array(k))


def build_repetitive(spec: RepetitiveSpec, N: int) -> BitSeq:
    """First N bits of the limit sequence; errors if the declared steps
    do not reach length N."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    lengths = spec.w_lengths()
    if lengths[-1] < N:
        raise ValueError(
            f"declared steps reach {lengths[-1]} bits, {N} requested"
        )
    k = next(i + 1 for i, L in enumerate(lengths) if L >= N)
    return BitSeq(spec.word_array(k)[:N], provenance=f"repetitive w_{k} prefix")


# ---------------------------------------------------------------- balanced

@dataclass(frozen=True)
class BalancedSpec:
    """Balanced repetitive data: copy words v_k, per-k counts r_k of v_k
    inside u_k = v_k^{r_k}; w-copy counts are the minimal R_k = k-1.

    delta_k = max(|v_k|,|v_{k+1}|,|v_{k+2}|,|w_{k-1}|) / |w_k| and
    gamma_k = 1 - |u_k|/|w_k| must vanish; the constructed tables are
    validated for strict delta decrease and non-decreasing |u_k|/|w_k|
    (from k = 2 on), plus strictly decreasing eps_k = 2(delta_k+gamma_k).
    """

    v: Tuple[str, ...]
    reps: Tuple[int, ...]

    def __post_init__(self):
        v = tuple(str(x) for x in self.v)
        reps = tuple(int(r) for r in self.reps)
        if len(v) != len(reps) or not v:
            raise ValueError("need equally many copy words and counts")
        for k, (word, r) in enumerate(zip(v, reps), start=1):
            if not word or any(c not in "01" for c in word):
                raise ValueError(f"v_{k} is not a nonempty binary word")
            if r < 1:
                raise ValueError(f"r_{k} must be >= 1")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "reps", reps)
        deltas = [self.delta(k) for k in range(1, len(v) - 1)]
        if any(b >= a for a, b in zip(deltas, deltas[1:])):
            raise ValueError("delta_k must strictly decrease")
        shares = [1 - self.gamma(k) for k in range(2, len(v) + 1)]
        if any(b < a for a, b in zip(shares, shares[1:])):
            raise ValueError("|u_k|/|w_k| must not decrease from k = 2 on")
        epss = [self.eps(k) for k in range(2, len(v) - 1)]
        if any(b >= a for a, b in zip(epss, epss[1:])):
            raise ValueError("eps_k must strictly decrease")

    @property
    def last(self) -> int:
        return len(self.v)

    def to_repetitive(self) -> RepetitiveSpec:
        return RepetitiveSpec(
            tuple(
                (word * r, max(k - 1, 0))
                for k, (word, r) in enumerate(zip(self.v, self.reps), start=1)
            )
        )

    def w_lengths(self) -> List[int]:
        return self.to_repetitive().w_lengths()

    def delta(self, k: int) -> Fraction:
        if not 1 <= k <= self.last - 2:
            raise ValueError(f"delta_{k} needs v_{k+2} declared")
        W = self.w_lengths()
        prev = W[k - 2] if k >= 2 else 0
        top = max(len(self.v[k - 1]), len(self.v[k]), len(self.v[k + 1]), prev)
        return Fraction(top, W[k - 1])

    def gamma(self, k: int) -> Fraction:
        if not 1 <= k <= self.last:
            raise ValueError(f"gamma_{k} outside 1..{self.last}")
        W = self.w_lengths()
        if k == 1:
            return Fraction(0)
        return Fraction((k - 1) * W[k - 2], W[k - 1])

    def eps(self, k: int) -> Fraction:
        if k < 2:
            raise ValueError("eps_k is defined for k >= 2")
        return 2 * (self.delta(k) + self.gamma(k))


# ------------------------------------------------------------- witnesses

@dataclass
class Witness:
    """Exact Liouville witness: p/q is the w_order-periodic value, and
    verified means q^k < 2^agreement was checked on integers (the limit
    shares its first `agreement` bits with the periodic extension)."""

    k: int
    order: int
    p: int
    q: int
    agreement: int
    verified: bool


def _agreement_with_period(prefix: np.ndarray, period: np.ndarray) -> int:
    n = prefix.size
    reps = -(-n // period.size)
    tiled = np.tile(period, reps)[:n]
    diff = np.flatnonzero(prefix != tiled)
    return int(diff[0]) if diff.size else n


def liouville_witness(
    spec: RepetitiveSpec,
    k: int,
    prefix: Optional[BitSeq] = None,
    order: Optional[int] = None,
) -> Witness:
    """Witness for exponent k from the w_order-periodic rational.

    q is kept unreduced as 2^|w_order| - 1.  The certified agreement
    length comes from a literal prefix when available (the given one, or
    the longest constructible word) and otherwise from the repetition
    guarantee of the first undeclared step.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    j = order if order is not None else min(k, spec.last)
    if not 1 <= j <= spec.last:
        raise ValueError(f"order {j} outside 1..{spec.last}")
    wj = spec.word_array(j)
    L = wj.size
    p = int("".join("01"[b] for b in wj), 2)
    q = (1 << L) - 1
    if prefix is not None:
        if len(prefix) < L:
            raise ValueError(
                f"prefix has {len(prefix)} bits, the period word needs {L}"
            )
        agreement = _agreement_with_period(prefix.to_array(), wj)
    else:
        w_last = spec.word_array(spec.last)
        agreement = _agreement_with_period(w_last, wj)
        if agreement == w_last.size:
            # the undeclared next step repeats w_last at least `last`
            # times; if w_last is itself w_j-periodic the agreement
            # extends through those guaranteed copies
            if w_last.size % L == 0:
                agreement = spec.last * w_last.size
    verified = mpz(q) ** k < mpz(1) << agreement
    return Witness(k, j, p, q, agreement, bool(verified))


# ------------------------------------------------------ interval refine

def _merge_intervals(ivs: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    out: List[Tuple[int, int]] = []
    for a, b in sorted(ivs):
        if out and a <= out[-1][1] + 1:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _measure(ivs: Sequence[Tuple[int, int]]) -> int:
    return sum(b - a + 1 for a, b in ivs)


def _intersection(A, B) -> List[Tuple[int, int]]:
    out = []
    i = j = 0
    while i < len(A) and j < len(B):
        lo = max(A[i][0], B[j][0])
        hi = min(A[i][1], B[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    return out


def _spec_intervals(spec: FolnerSpec, n: int) -> List[Tuple[int, int]]:
    if spec.variant == "classical":
        return [(1, n)]
    if spec.variant == "interval_union":
        return _merge_intervals(spec.intervals[n - 1])
    raise ValueError("interval refinement needs an additive spec")


def _invariance_defect_intervals(F, ell: int) -> Fraction:
    """|K_ell F symdiff F| / |F| for K_ell = {1..ell}, on intervals."""
    KF = _merge_intervals([(a + 1, b + ell) for a, b in F])
    inter = _measure(_intersection(F, KF))
    return Fraction(_measure(F) + _measure(KF) - 2 * inter, _measure(F))


@dataclass
class RefinedFolner:
    """Interval refinement of an additive spec over a declared n-range.

    spec's index m corresponds to original index ns[m-1].  ell_actual
    holds the shortest component length per n (the quantity the
    construction thresholds on); ell_index the invariance level used to
    drop short components; defects the exact |F symdiff F'|/|F|.
    """

    spec: FolnerSpec
    ns: List[int]
    ell_index: List[int]
    ell_actual: List[int]
    defects: List[Fraction]


def interval_folner_refine(
    spec: FolnerSpec, n_range: Tuple[int, int]
) -> RefinedFolner:
    """Equivalent interval-union sequence whose components lengthen.

    For each invariance level ell, n_ell is the first index from which
    every F_n in the range is ({1..ell}, 1/(2 ell^2))-invariant; at
    level ell the refinement keeps, from each component [a, b] of
    length > ell, the interval [a+1, b].
    """
    n_lo, n_hi = int(n_range[0]), int(n_range[1])
    if not 1 <= n_lo <= n_hi:
        raise ValueError(f"bad n range {n_range}")
    ns = list(range(n_lo, n_hi + 1))
    F = {n: _spec_intervals(spec, n) for n in ns}

    thresholds: List[int] = []  # n_ell for ell = 1, 2, ...
    ell = 1
    while True:
        bound = Fraction(1, 2 * ell * ell)
        n_ell = None
        for n in reversed(ns):
            if _invariance_defect_intervals(F[n], ell) > bound:
                break
            n_ell = n
        if n_ell is None:
            break
        thresholds.append(n_ell)
        ell += 1

    out_intervals = []
    ell_index = []
    ell_actual = []
    defects = []
    for n in ns:
        lvl = 0
        for i, t in enumerate(thresholds, start=1):
            if n >= t:
                lvl = max(lvl, i)
        refined = (
            F[n]
            if lvl == 0
            else [(a + 1, b) for a, b in F[n] if b - a + 1 > lvl]
        )
        if not refined:
            raise ValueError(
                f"refinement empties F_{n}; range too coarse for level {lvl}"
            )
        out_intervals.append(refined)
        ell_index.append(lvl)
        ell_actual.append(min(b - a + 1 for a, b in refined))
        inter = _measure(_intersection(F[n], refined))
        defects.append(
            Fraction(_measure(F[n]) + _measure(refined) - 2 * inter, _measure(F[n]))
        )
    return RefinedFolner(
        FolnerSpec.interval_union(out_intervals), ns, ell_index, ell_actual, defects
    )


# ------------------------------------------------- additive construction

@dataclass
class AdditiveConstruction:
    x: BitSeq
    balanced: BalancedSpec
    repetitive: RepetitiveSpec
    w_lengths: List[int]
    t_used: Dict[int, int]
    refined: RefinedFolner


def _t_table(refined: RefinedFolner) -> Callable[[int], int]:
    """t_j = max element over boxes whose shortest component is < j,
    certified only up to the tail component length of the range."""
    ells = refined.ell_actual
    maxel = [
        max(b for _, b in refined.spec.intervals[m]) for m in range(len(refined.ns))
    ]
    tail = ells[-1]

    def t(j: int) -> int:
        if j > tail:
            raise ValueError(
                f"t_{j} is not certified by the declared range "
                f"(tail components have length {tail})"
            )
        return max((m for e, m in zip(ells, maxel) if e < j), default=0)

    return t


def additive_liouville_normal(
    spec: FolnerSpec,
    source: BitSeq,
    N: int,
    n_range: Optional[Tuple[int, int]] = None,
) -> AdditiveConstruction:
    """Balanced repetitive sequence over v_k = source prefix of length k.

    Repetition counts are minimal subject to delta_k <= 1/k,
    gamma_k <= 1/k, the monotonicity the balanced tables must satisfy,
    and w_k >= t(|w_{k-1}|) for k >= 3, with t computed from the
    refined spec over the declared range (never extrapolated).
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if n_range is None:
        n_range = (1, 40)
    refined = interval_folner_refine(spec, n_range)
    t = _t_table(refined)

    v: List[str] = []
    reps: List[int] = []
    W: List[int] = []
    deltas: List[Fraction] = []
    epss: List[Fraction] = []
    t_used: Dict[int, int] = {}
    k = 0
    while not W or W[-1] < N:
        k += 1
        if len(source) < k:
            raise ValueError(f"source has {len(source)} bits, v_{k} needs {k}")
        v.append(source.to01()[:k])
        base = (k - 1) * W[-1] if k >= 2 else 0
        # |w_k| must cover every active constraint; strict ones get +1
        need = k * max(k + 2, W[-1] if W else 0)  # delta_k <= 1/k
        if k >= 2:
            need = max(need, k * base)  # gamma_k <= 1/k
            d_top = max(k + 2, W[-1])
            prev_delta = deltas[-1]
            need = max(need, d_top * prev_delta.denominator // prev_delta.numerator + 1)
            if k >= 3:
                prev_gamma = Fraction((k - 2) * W[-2], W[-1])
                need = max(
                    need,
                    -(-base * prev_gamma.denominator // prev_gamma.numerator),
                )
                need = max(need, t(W[-1]))
                t_used[W[-1]] = t(W[-1])
            if epss:
                prev_eps = epss[-1]
                need = max(
                    need,
                    2 * (d_top + base) * prev_eps.denominator // prev_eps.numerator + 1,
                )
        r = max(1, -(-(need - base) // k))
        reps.append(r)
        W.append(base + r * k)
        deltas.append(Fraction(max(k + 2, W[-2] if k >= 2 else 0), W[-1]))
        if k >= 2:
            epss.append(2 * (deltas[-1] + Fraction(base, W[-1])))

    balanced = BalancedSpec(tuple(v), tuple(reps))
    rep = balanced.to_repetitive()
    x = build_repetitive(rep, N)
    return AdditiveConstruction(x, balanced, rep, W, t_used, refined)


# ------------------------------------------------------- lemma coverage

@dataclass
class CoverageReport:
    k: int
    eps: Fraction
    windows: int
    min_fraction: Fraction
    ok: bool


def kkk_min_coverage(balanced: BalancedSpec, k: int) -> CoverageReport:
    """Exhaustive check of the decomposition bound: every subword W of
    w_{k+2} with |W| >= |w_k| carries nonoverlapping full copies of
    v_k, v_{k+1}, v_{k+2} (from the canonical parse) covering at least
    (1 - eps_k)|W|.
    """
    if not 2 <= k <= balanced.last - 2:
        raise ValueError(f"need 2 <= k <= {balanced.last - 2}")
    W = balanced.w_lengths()
    eps = balanced.eps(k)
    span = W[k + 1] - W[k - 1] + 1
    n_windows = span * (span + 1) // 2
    if n_windows > 300_000_000:
        raise ValueError(
            f"{n_windows} windows exceed the exhaustive budget (3e8)"
        )

    # parse w_{k+2} into segments over {w_{k-1}, v_k, v_{k+1}, v_{k+2}}
    def expand(level: int) -> List[Tuple[int, bool]]:
        word_len = len(balanced.v[level - 1])
        r = balanced.reps[level - 1]
        if level == k:
            inner: List[Tuple[int, bool]] = [(W[k - 2], False)] * (k - 1)
        else:
            inner = expand(level - 1) * (level - 1)
        return inner + [(word_len, True)] * r

    segs = expand(k + 2)
    lens = np.array([s for s, _ in segs], dtype=np.int64)
    good = np.array([g for _, g in segs], dtype=bool)
    starts = np.concatenate([[0], np.cumsum(lens)[:-1]])
    total = int(lens.sum())
    assert total == W[k + 1]

    segidx = np.repeat(np.arange(len(segs)), lens)
    goodpref = np.concatenate([[0], np.cumsum(np.where(good, lens, 0))])
    at_boundary = np.zeros(total + 1, dtype=bool)
    at_boundary[starts] = True
    at_boundary[total] = True
    # first segment fully at or after position t
    first_full = np.where(
        at_boundary[:-1], segidx, np.minimum(segidx + 1, len(segs))
    )
    seg_after = np.concatenate([segidx, [len(segs)]])

    lo = W[k - 1]
    windows = 0
    worst_num, worst_den = 1, 1  # running min of covered/length
    den = eps.denominator
    num = eps.numerator
    ok = True
    for length in range(lo, total + 1):
        a = np.arange(0, total - length + 1)
        b = a + length
        covered = goodpref[seg_after[b]] - goodpref[first_full[a]]
        np.maximum(covered, 0, out=covered)
        windows += a.size
        if np.any(covered * den < (den - num) * length):
            ok = False
        i = int(np.argmin(covered))
        if covered[i] * worst_den < worst_num * length:
            worst_num, worst_den = int(covered[i]), length
    return CoverageReport(k, eps, windows, Fraction(worst_num, worst_den), ok)


# -------------------------------------------------- mult construction

def m_k_eps(k: int, eps) -> int:
    """p^r with p the least prime > k and r = ceil(1/eps); any multiple
    m of it confines, inside any divisor box containing m, the interval
    (m, (k+1)m] to at most an eps fraction of the divisors."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    e = Fraction(eps)
    if not 0 < e <= 1:
        raise ValueError(f"eps must lie in (0, 1]: {eps}")
    p = k + 1
    while True:
        for d in range(2, int(math.isqrt(p)) + 1):
            if p % d == 0:
                break
        else:
            break
        p += 1
    r = -(-e.denominator // e.numerator)
    return p ** r


@dataclass
class ZoneSchedule:
    """Splice zones {m_k+1, ..., (k+1)m_k}; the complement is where the
    output agrees with its base sequence."""

    m: List[int]
    anchors: List[int]  # m_{k,2^-k} values
    n_k: List[int]  # nice index whose predecessor entered the LCM

    def __post_init__(self):
        for k, (m, a) in enumerate(zip(self.m, self.anchors), start=1):
            if m % a != 0:
                raise ValueError(f"m_{k} must be a multiple of {a}")
            if k < len(self.m) and self.m[k] <= (k + 1) * m:
                raise ValueError("zones must be disjoint: m_{k+1} > (k+1) m_k")

    def zones(self) -> List[Tuple[int, int]]:
        return [(m + 1, (k + 1) * m) for k, m in enumerate(self.m, start=1)]

    def in_zone(self, values: np.ndarray) -> np.ndarray:
        vals = np.asarray(values, dtype=np.int64)
        hit = np.zeros(vals.shape, dtype=bool)
        for a, b in self.zones():
            hit |= (vals >= a) & (vals <= b)
        return hit


@dataclass
class MultConstruction:
    x: BitSeq
    schedule: ZoneSchedule
    repetitive: RepetitiveSpec


def mult_liouville_normal(
    spec: FolnerSpec, base: BitSeq, N: int
) -> MultConstruction:
    """Repetitive splice of a multiplicatively-normal base sequence.

    Zone anchors m_k are LCMs of m_{k,2^-k} with the preceding leading
    parameter, thinned (by advancing the nice index) until
    m_{k+1} > (k+1) m_k; the output differs from base only inside the
    zones, and every zone inside the horizon is spliced.
    """
    if spec.variant != "nice_boxes" or spec.L is None:
        raise ValueError("construction needs a nice_boxes spec with explicit L")
    if not 1 <= N <= len(base):
        raise ValueError(f"N must lie in 1..{len(base)}")
    Ls = spec.L
    m_list: List[int] = []
    anchors: List[int] = []
    nks: List[int] = []
    k = 0
    while True:
        k += 1
        anchor = m_k_eps(k, Fraction(1, 2 ** k))
        if anchor > N:
            break
        prev = m_list[-1] if m_list else 0
        found = None
        for n, L in enumerate(Ls, start=1):
            if L % anchor != 0:
                continue
            cand = math.lcm(anchor, Ls[n - 2] if n >= 2 else 1)
            if cand > (k + 1) * prev:
                found = (cand, n)
                break
        if found is None:
            raise ValueError(
                f"declared leading parameters exhausted before m_{k} "
                f"(anchor {anchor}) could be placed"
            )
        m, nk = found
        if m > N:
            break
        m_list.append(m)
        anchors.append(anchor)
        nks.append(nk)
    if not m_list:
        raise ValueError("horizon admits no splice zone")
    schedule = ZoneSchedule(m_list, anchors, nks)

    out = base.to_array()[:N].copy()
    steps: List[Tuple[str, int]] = []
    for k, m in enumerate(m_list, start=1):
        hi = min((k + 1) * m, N)
        if hi > m:
            out[m:hi] = np.tile(out[:m], k)[: hi - m]
        if k == 1:
            steps.append(("".join("01"[b] for b in out[:m]), 0))
        else:
            lo_u = (k) * m_list[k - 2]
            steps.append(("".join("01"[b] for b in out[lo_u:m]), k))
    x = BitSeq(out, provenance=f"liouville splice of {base.provenance or 'base'}")
    return MultConstruction(x, schedule, RepetitiveSpec(tuple(steps)))


# ----------------------------------------------------------- zone density

@dataclass
class ZoneDensityRow:
    n: int
    size: int
    density: Fraction
    bound_exact: Fraction  # the summable part of the bound
    ok: bool  # density < |F_n|^{-1/3} + bound_exact, checked on integers


def zone_density_report(
    spec: FolnerSpec, schedule: ZoneSchedule, ns: Sequence[int]
) -> List[ZoneDensityRow]:
    """Exact zone density along F_n against the proof's bound
    |F_n|^{-1/3} + sum of 2^-k over the middle-class ks."""
    rows = []
    for n in ns:
        L = spec.leading(n)
        F = divisors(L).to_naturals()
        size = F.size
        dens = Fraction(int(schedule.in_zone(F).sum()), size)
        tail = Fraction(0)
        for k, m in enumerate(schedule.m, start=1):
            small = (k * m) ** 3 <= size
            if not small and m < L:
                tail += Fraction(1, 2 ** k)
        gap = dens - tail
        ok = gap < 0 or gap ** 3 * size < 1
        rows.append(ZoneDensityRow(int(n), int(size), dens, tail, bool(ok)))
    return rows
