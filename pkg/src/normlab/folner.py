"""Semigroups (N,+) and (N,*), their Folner sequences, cores, densities.

The multiplicative naturals are viewed through the isomorphism with the
direct sum of countably many copies of (N,+): a natural maps to its
vector of prime exponents (index 1 is the exponent of 2, index 2 of 3,
and so on).  Finite sets are stored as sorted int64 arrays of naturals
whenever the values fit 63 bits, and as rows of exponent vectors when
they do not (large doubling boxes).  All ratios are exact Fractions.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from . import primes

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"

_MAX_NAT = (1 << 63) - 1

ExpVec = tuple  # exponent vector, no trailing zeros; () is the identity


def nat_to_expvec(m: int) -> ExpVec:
    """Exponent vector of m: nat_to_expvec(12) = (2, 1)."""
    fac = primes.factorize(m)  # validates range
    if not fac:
        return ()
    d = fac[-1][0]
    out = [0] * d
    for i, e in fac:
        out[i - 1] = e
    return tuple(out)


def expvec_to_nat(v: Sequence[int]) -> int:
    """Natural with the given prime exponents (exact, arbitrary size)."""
    m = 1
    for i, e in enumerate(v):
        if e < 0:
            raise ValueError(f"negative exponent at index {i + 1}: {e}")
        if e:
            m *= primes.prime(i + 1) ** e
    return m


def _trim(v: Sequence[int]) -> ExpVec:
    v = tuple(v)
    d = len(v)
    while d and v[d - 1] == 0:
        d -= 1
    return v[:d]


def _sort_rows(rows: np.ndarray) -> np.ndarray:
    """Rows in lexicographic order (first coordinate most significant)."""
    if rows.shape[0] <= 1:
        return rows
    order = np.lexsort(rows.T[::-1])
    return rows[order]


def _dedup_rows(rows: np.ndarray) -> np.ndarray:
    rows = _sort_rows(rows)
    if rows.shape[0] <= 1:
        return rows
    keep = np.ones(rows.shape[0], dtype=bool)
    keep[1:] = np.any(rows[1:] != rows[:-1], axis=1)
    return rows[keep]


class FiniteSet:
    """Strictly sorted, duplicate-free finite set of semigroup elements.

    values is a 1D int64 array of naturals, or a 2D int64 array whose
    rows are exponent vectors (all of one width, trailing all-zero
    columns trimmed).  Iteration yields ints in the first case and
    tuples in the second.
    """

    __slots__ = ("values",)

    def __init__(self, values: Union[np.ndarray, Iterable]) -> None:
        if isinstance(values, np.ndarray):
            arr = np.asarray(values, dtype=np.int64)
        else:
            lst = list(values)
            arr = np.asarray(lst, dtype=np.int64) if lst else np.empty(0, dtype=np.int64)
        if arr.ndim == 2:
            if np.any(arr < 0):
                raise ValueError("exponent vectors must be non-negative")
            arr = _dedup_rows(arr)
            while arr.shape[1] > 0 and not arr[:, -1].any():
                arr = arr[:, :-1]
            if arr.shape[1] == 0:
                # only the identity survives trimming
                arr = np.zeros((min(arr.shape[0], 1), 1), dtype=np.int64)
            self.values = arr
        elif arr.ndim == 1:
            arr = np.unique(arr)
            if arr.size and (arr[0] < 0 or arr[-1] > _MAX_NAT):
                raise ValueError("naturals must lie in [0, 2**63)")
            self.values = arr
        else:
            raise ValueError("values must be naturals or exponent-vector rows")

    @property
    def is_vector_mode(self) -> bool:
        return self.values.ndim == 2

    def __len__(self) -> int:
        return self.values.shape[0]

    def __iter__(self):
        if self.is_vector_mode:
            return (tuple(int(x) for x in row) for row in self.values)
        return (int(v) for v in self.values)

    def __contains__(self, item) -> bool:
        if self.is_vector_mode:
            v = _trim(item) if isinstance(item, tuple) else nat_to_expvec(int(item))
            d = self.values.shape[1]
            if len(v) > d:
                return False
            row = np.zeros(d, dtype=np.int64)
            row[: len(v)] = v
            i = np.searchsorted(self._keys(), self._key_of(row))
            return i < len(self) and bool(np.all(self.values[i] == row))
        i = int(np.searchsorted(self.values, int(item)))
        return i < len(self) and int(self.values[i]) == int(item)

    def _keys(self) -> np.ndarray:
        # void view for row-wise searchsorted; rows are already lex-sorted
        arr = np.ascontiguousarray(self.values)
        return arr.view([("", arr.dtype)] * arr.shape[1]).ravel()

    def _key_of(self, row: np.ndarray) -> np.ndarray:
        row = np.ascontiguousarray(row.reshape(1, -1))
        return row.view([("", row.dtype)] * row.shape[1]).ravel()[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteSet):
            return NotImplemented
        a, b = _common_arrays(self, other)
        return a.shape == b.shape and bool(np.array_equal(a, b))

    def __repr__(self) -> str:
        mode = "vectors" if self.is_vector_mode else "naturals"
        return f"FiniteSet(<{len(self)} {mode}>)"

    def to_naturals(self) -> np.ndarray:
        """Sorted naturals; errors if any element exceeds 63 bits."""
        if not self.is_vector_mode:
            return self.values
        nats = [expvec_to_nat(row) for row in self.values]
        if any(m > _MAX_NAT for m in nats):
            raise ValueError("element exceeds 63 bits; keep vector mode")
        return np.unique(np.asarray(nats, dtype=np.int64))


def _common_arrays(A: FiniteSet, B: FiniteSet):
    """The two value arrays, lifted to a common representation."""
    if A.is_vector_mode == B.is_vector_mode:
        a, b = A.values, B.values
        if A.is_vector_mode:
            d = max(a.shape[1], b.shape[1])
            a = _pad_cols(a, d)
            b = _pad_cols(b, d)
        return a, b
    vec, nat = (A, B) if A.is_vector_mode else (B, A)
    lifted = _naturals_to_rows(nat.values, vec.values.shape[1])
    if A.is_vector_mode:
        return _pad_cols(A.values, lifted.shape[1]), lifted
    return lifted, _pad_cols(B.values, lifted.shape[1])


def _pad_cols(rows: np.ndarray, d: int) -> np.ndarray:
    if rows.shape[1] >= d:
        return rows
    out = np.zeros((rows.shape[0], d), dtype=np.int64)
    out[:, : rows.shape[1]] = rows
    return out


def _naturals_to_rows(nats: np.ndarray, min_width: int) -> np.ndarray:
    vecs = [nat_to_expvec(int(m)) for m in nats]
    d = max([min_width, 1] + [len(v) for v in vecs])
    out = np.zeros((len(vecs), d), dtype=np.int64)
    for r, v in enumerate(vecs):
        out[r, : len(v)] = v
    return _sort_rows(out)


@dataclass(frozen=True)
class AnchoredBox:
    """Anchored rectangular box in the multiplicative exponent lattice.

    sizes (k_1, ..., k_d) with k_d > 0 describes
    {g : 0 <= g_i <= k_i for i <= d, g_i = 0 beyond}; the empty tuple is
    the origin box {identity}.  As naturals this is exactly the divisor
    set of the leading parameter prod p_i**k_i.
    """

    sizes: tuple

    def __post_init__(self):
        s = tuple(int(k) for k in self.sizes)
        if any(k < 0 for k in s):
            raise ValueError(f"box sizes must be non-negative: {s}")
        if s and s[-1] == 0:
            raise ValueError(f"trailing box size must be positive: {s}")
        object.__setattr__(self, "sizes", s)

    @property
    def dim(self) -> int:
        return len(self.sizes)

    def cardinality(self) -> int:
        n = 1
        for k in self.sizes:
            n *= k + 1
        return n

    def leading(self) -> int:
        """Leading parameter as an exact (possibly huge) int."""
        L = 1
        for i, k in enumerate(self.sizes):
            L *= primes.prime(i + 1) ** k
        return L

    def contains(self, v: Sequence[int]) -> bool:
        v = _trim(v)
        if len(v) > self.dim:
            return False
        return all(0 <= v[i] <= self.sizes[i] for i in range(len(v)))

    def rows(self) -> np.ndarray:
        """All cells as exponent-vector rows, lexicographic order."""
        if not self.sizes:
            return np.zeros((1, 1), dtype=np.int64)
        axes = [np.arange(k + 1, dtype=np.int64) for k in self.sizes]
        grid = np.meshgrid(*axes, indexing="ij")
        rows = np.stack([g.ravel() for g in grid], axis=1)
        return rows

    def to_finite_set(self) -> FiniteSet:
        L = self.leading()
        if L <= _MAX_NAT:
            return divisors(L)
        return FiniteSet(self.rows())


def divisors(L: int) -> FiniteSet:
    """All divisors of L as a sorted FiniteSet of naturals."""
    if not 1 <= L <= _MAX_NAT:
        raise ValueError(f"natural out of range [1, 2**63): {L}")
    fac = primes.factorize(L)
    count = 1
    for _, e in fac:
        count *= e + 1
    if count > 1 << 24:
        raise ValueError(f"divisor count {count} exceeds 2**24")
    divs = np.ones(1, dtype=np.int64)
    for i, e in fac:
        p = primes.prime(i)
        powers = np.array([p**j for j in range(e + 1)], dtype=np.int64)
        divs = (divs[:, None] * powers[None, :]).ravel()
    divs.sort()
    return FiniteSet(divs)


@dataclass(frozen=True)
class DirectionSchedule:
    """Which prime direction gets doubled (or multiplied in) at each step.

    staircase: 1; 1,2; 1,2,3; ... (triangular blocks).
    toeplitz: 1,2,1,3,1,2,1,4,...  (direction of step n is v2(n)+1).
    explicit: a fixed finite list.
    """

    kind: str
    directions: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("staircase", "toeplitz", "explicit"):
            raise ValueError(f"unknown schedule kind: {self.kind}")
        if self.kind == "explicit":
            if not self.directions:
                raise ValueError("explicit schedule needs directions")
            d = tuple(int(x) for x in self.directions)
            if any(x < 1 for x in d):
                raise ValueError("directions are 1-based positive indices")
            object.__setattr__(self, "directions", d)
        elif self.directions is not None:
            raise ValueError(f"{self.kind} schedule takes no explicit list")

    def direction(self, n: int) -> int:
        """1-based direction at step n >= 1."""
        if n < 1:
            raise ValueError(f"step must be >= 1, got {n}")
        if self.kind == "staircase":
            # block m covers steps m(m-1)/2 + 1 .. m(m+1)/2
            m = (isqrt(8 * n - 7) + 1) // 2
            while m * (m - 1) // 2 >= n:
                m -= 1
            while m * (m + 1) // 2 < n:
                m += 1
            return n - m * (m - 1) // 2
        if self.kind == "toeplitz":
            d = 1
            while n % 2 == 0:
                n //= 2
                d += 1
            return d
        if n > len(self.directions):
            raise ValueError(f"explicit schedule has {len(self.directions)} steps")
        return self.directions[n - 1]

    def counts(self, n: int) -> tuple:
        """Occurrences of each direction among steps 1..n (closed form)."""
        if n == 0:
            return ()
        if self.kind == "staircase":
            m = 1
            while m * (m + 1) // 2 < n:
                m += 1
            # direction i appears in block j >= i at step j(j-1)/2 + i
            out = []
            for i in range(1, m + 1):
                c = sum(1 for j in range(i, m + 1) if j * (j - 1) // 2 + i <= n)
                if c == 0:
                    break
                out.append(c)
            return tuple(out)
        if self.kind == "toeplitz":
            out = []
            i = 1
            while (1 << (i - 1)) <= n:
                out.append((n + (1 << (i - 1))) >> i)
                i += 1
            return tuple(x for x in out if x)
        if n > len(self.directions):
            raise ValueError(f"explicit schedule has {len(self.directions)} steps")
        steps = self.directions[:n]
        d = max(steps)
        return tuple(steps.count(i) for i in range(1, d + 1))


STAIRCASE = DirectionSchedule("staircase")
TOEPLITZ = DirectionSchedule("toeplitz")


@dataclass(frozen=True)
class FolnerSpec:
    """One of the supported Folner sequence families.

    classical: F_n = {1..n} in (N,+).
    interval_union: F_n = an explicit finite union of integer intervals.
    nice_boxes: F_n = divisors(L_n) with L_n | L_{n+1}, L_n != L_{n+1}.
    doubling: F_{n+1} = F_n disjoint-union (v_n + F_n) in the exponent
    lattice, v_n from a direction schedule; |F_n| = 2**n.
    """

    variant: str
    semigroup: str
    intervals: Optional[tuple] = None
    L: Optional[tuple] = None
    schedule: Optional[DirectionSchedule] = None

    def __post_init__(self):
        if self.semigroup not in (ADDITIVE, MULTIPLICATIVE):
            raise ValueError(f"unknown semigroup: {self.semigroup}")
        if self.variant not in ("classical", "interval_union", "nice_boxes", "doubling"):
            raise ValueError(f"unknown variant: {self.variant}")
        if self.variant in ("classical", "interval_union") and self.semigroup != ADDITIVE:
            raise ValueError(f"{self.variant} is an additive family")
        if self.variant in ("nice_boxes", "doubling") and self.semigroup != MULTIPLICATIVE:
            raise ValueError(f"{self.variant} is a multiplicative family")
        if self.variant == "interval_union":
            if not self.intervals:
                raise ValueError("interval_union needs per-n interval lists")
            norm = []
            for lists in self.intervals:
                ivs = tuple((int(a), int(b)) for a, b in lists)
                for a, b in ivs:
                    if not (0 <= a <= b <= _MAX_NAT):
                        raise ValueError(f"bad interval [{a}, {b}]")
                norm.append(ivs)
            object.__setattr__(self, "intervals", tuple(norm))
        if self.variant == "nice_boxes":
            if (self.L is None) == (self.schedule is None):
                raise ValueError("nice_boxes takes exactly one of L list or schedule")
            if self.L is not None:
                Ls = tuple(int(x) for x in self.L)
                for a, b in zip(Ls, Ls[1:]):
                    if a == b or b % a != 0:
                        raise ValueError(
                            f"leading parameters must strictly divide along the list: {a} -> {b}"
                        )
                if any(x < 1 for x in Ls):
                    raise ValueError("leading parameters must be >= 1")
                object.__setattr__(self, "L", Ls)
        if self.variant == "doubling" and self.schedule is None:
            raise ValueError("doubling needs a direction schedule")

    @staticmethod
    def classical() -> "FolnerSpec":
        return FolnerSpec("classical", ADDITIVE)

    @staticmethod
    def interval_union(intervals: Sequence[Sequence[tuple]]) -> "FolnerSpec":
        return FolnerSpec("interval_union", ADDITIVE, intervals=tuple(map(tuple, intervals)))

    @staticmethod
    def nice_boxes(L: Optional[Sequence[int]] = None,
                   schedule: Optional[DirectionSchedule] = None) -> "FolnerSpec":
        return FolnerSpec("nice_boxes", MULTIPLICATIVE,
                          L=None if L is None else tuple(L), schedule=schedule)

    @staticmethod
    def doubling(schedule: DirectionSchedule = STAIRCASE) -> "FolnerSpec":
        return FolnerSpec("doubling", MULTIPLICATIVE, schedule=schedule)

    def leading(self, n: int) -> int:
        """Leading parameter of F_n (nice_boxes and doubling only)."""
        if self.variant == "nice_boxes":
            if self.L is not None:
                if not 1 <= n <= len(self.L):
                    raise ValueError(f"n out of range 1..{len(self.L)}")
                return self.L[n - 1]
            L = 1
            for m in range(1, n + 1):
                L *= primes.prime(self.schedule.direction(m))
            return L
        if self.variant == "doubling":
            return self.box(n).leading()
        raise ValueError(f"{self.variant} has no leading parameter")

    def box(self, n: int) -> AnchoredBox:
        """The doubling box at step n (doubling only)."""
        if self.variant != "doubling":
            raise ValueError(f"{self.variant} has no box structure")
        counts = self.schedule.counts(n)
        return AnchoredBox(tuple((1 << c) - 1 for c in counts))


def folner_set(spec: FolnerSpec, n: int) -> FiniteSet:
    """Materialize F_n for the given spec."""
    if spec.variant == "doubling":
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        if n == 0:
            return FiniteSet([1])
        return spec.box(n).to_finite_set()
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if spec.variant == "classical":
        return FiniteSet(np.arange(1, n + 1, dtype=np.int64))
    if spec.variant == "interval_union":
        if n > len(spec.intervals):
            raise ValueError(f"spec defines {len(spec.intervals)} levels, got n={n}")
        parts = [np.arange(a, b + 1, dtype=np.int64) for a, b in spec.intervals[n - 1]]
        return FiniteSet(np.concatenate(parts) if parts else np.empty(0, dtype=np.int64))
    return divisors(spec.leading(n))


def folner_size(spec: FolnerSpec, n: int) -> int:
    """|F_n| without materializing the set."""
    if spec.variant == "doubling":
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        return 1 << n
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if spec.variant == "classical":
        return n
    if spec.variant == "interval_union":
        if n > len(spec.intervals):
            raise ValueError(f"spec defines {len(spec.intervals)} levels, got n={n}")
        return sum(b - a + 1 for a, b in spec.intervals[n - 1])
    card = 1
    for _, e in primes.factorize(spec.leading(n)):
        card *= e + 1
    return card


def _as_key_iterable(K) -> list:
    if isinstance(K, FiniteSet):
        return list(K)
    return sorted(set(int(k) for k in K))


def _compose_naturals(g: int, F: np.ndarray, semigroup: str) -> np.ndarray:
    if semigroup == ADDITIVE:
        if g < 0:
            raise ValueError(f"additive elements are >= 0, got {g}")
        if F.size and int(F[-1]) + g > _MAX_NAT:
            raise ValueError(f"sum overflows 63 bits: {int(F[-1])} + {g}")
        return F + np.int64(g)
    if g < 1:
        raise ValueError(f"multiplicative elements are >= 1, got {g}")
    if F.size and int(F[-1]) * g > _MAX_NAT:
        raise ValueError(f"product overflows 63 bits: {int(F[-1])} * {g}")
    return F * np.int64(g)


def compose_set(K, F: FiniteSet, semigroup: str) -> FiniteSet:
    """K o F = {k o f}: the translate union used by invariance defects."""
    keys = _as_key_iterable(K)
    if not keys:
        raise ValueError("K must be nonempty")
    if F.is_vector_mode:
        vecs = [k if isinstance(k, tuple) else nat_to_expvec(int(k)) for k in keys]
        d = max([F.values.shape[1]] + [len(v) for v in vecs])
        base = _pad_cols(F.values, d)
        rows = []
        for v in vecs:
            kv = np.zeros(d, dtype=np.int64)
            kv[: len(v)] = v
            rows.append(base + kv)
        return FiniteSet(np.concatenate(rows))
    arrs = [_compose_naturals(int(k), F.values, semigroup) for k in keys]
    return FiniteSet(np.unique(np.concatenate(arrs)))


def invariance_defect(F: FiniteSet, K, semigroup: str) -> Fraction:
    """|KF symmetric-difference F| / |F|, exact."""
    if len(F) == 0:
        raise ValueError("F must be nonempty")
    KF = compose_set(K, F, semigroup)
    a, b = _common_arrays(KF, F)
    if a.ndim == 1:
        inter = np.intersect1d(a, b, assume_unique=True).size
    else:
        stacked = np.concatenate([a, b])
        uniq = _dedup_rows(stacked)
        inter = stacked.shape[0] - uniq.shape[0]
    sym = (len(KF) - inter) + (len(F) - inter)
    return Fraction(int(sym), len(F))


def k_core(F: FiniteSet, K, semigroup: str, include_identity: bool = False) -> FiniteSet:
    """F_K = {h in the semigroup : k o h in F for all k in K}.

    With include_identity, the identity is adjoined when K is a subset
    of F (for naturals this means 0 joins an additive core; a
    multiplicative core already contains 1 in that case).
    """
    keys = _as_key_iterable(K)
    if not keys:
        raise ValueError("K must be nonempty")
    if F.is_vector_mode:
        # multiplicative only; the identity is the all-zero row and already
        # belongs to the domain, so include_identity adds nothing new here
        d = F.values.shape[1]
        core = None
        for k in keys:
            vec = k if isinstance(k, tuple) else nat_to_expvec(int(k))
            if len(vec) > d:
                core = np.empty((0, d), dtype=np.int64)
                break
            kv = np.zeros(d, dtype=np.int64)
            kv[: len(vec)] = vec
            cand = F.values - kv
            cand = cand[np.all(cand >= 0, axis=1)]
            core = cand if core is None else _intersect_rows(core, cand)
        return FiniteSet(core)
    vals = F.values
    core = None
    for k in keys:
        k = int(k)
        if semigroup == ADDITIVE:
            cand = vals - np.int64(k)
            cand = cand[cand >= 1]
        else:
            if k < 1:
                raise ValueError(f"multiplicative elements are >= 1, got {k}")
            cand = vals[vals % k == 0] // np.int64(k)
        core = cand if core is None else np.intersect1d(core, cand, assume_unique=True)
    if include_identity and all(int(k) in F for k in keys):
        e = 0 if semigroup == ADDITIVE else 1
        core = np.union1d(core, np.array([e], dtype=np.int64))
    return FiniteSet(core)


def _intersect_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size == 0 or b.size == 0:
        return np.empty((0, a.shape[1]), dtype=np.int64)
    stacked = np.concatenate([_dedup_rows(a), _dedup_rows(b)])
    stacked = _sort_rows(stacked)
    dup = np.all(stacked[1:] == stacked[:-1], axis=1)
    return stacked[1:][dup]


@dataclass
class DensityReport:
    """Per-level densities plus tail extremes (tail = second half)."""

    per_n: list
    lower: Fraction
    upper: Fraction


def density(A: Callable[[int], bool], spec: FolnerSpec, n_lo: int, n_hi: int) -> DensityReport:
    """|A intersect F_n| / |F_n| for n_lo <= n <= n_hi.

    A is called with an int in naturals mode and a tuple of exponents in
    vector mode.  The reported lower/upper estimates are the min/max
    over the second half of the range.
    """
    if n_lo > n_hi:
        raise ValueError(f"empty range {n_lo}..{n_hi}")
    per_n = []
    for n in range(n_lo, n_hi + 1):
        F = folner_set(spec, n)
        hits = sum(1 for g in F if A(g))
        per_n.append((n, Fraction(hits, len(F))))
    tail = [r for _, r in per_n[len(per_n) // 2 :]]
    return DensityReport(per_n=per_n, lower=min(tail), upper=max(tail))


def equivalence_defect(spec_a: FolnerSpec, spec_b: FolnerSpec, n: int) -> Fraction:
    """|F_n(a) symmetric-difference F_n(b)| / |F_n(a)|, exact."""
    if spec_a.semigroup != spec_b.semigroup:
        raise ValueError("specs live in different semigroups")
    Fa = folner_set(spec_a, n)
    Fb = folner_set(spec_b, n)
    a, b = _common_arrays(Fa, Fb)
    if a.ndim == 1:
        inter = np.intersect1d(a, b, assume_unique=True).size
    else:
        stacked = np.concatenate([a, b])
        inter = stacked.shape[0] - _dedup_rows(stacked).shape[0]
    sym = (len(Fa) - inter) + (len(Fb) - inter)
    return Fraction(int(sym), len(Fa))
