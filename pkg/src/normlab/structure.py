"""Subsets of the naturals and the configurations they carry.

Set transforms (A/n, nA, translates), bounded searches for linear,
power, sum-product and progression patterns, the thick set avoiding a
non-partition-regular linear equation, the factorial-multiple union
that is multiplicatively large but additively sparse, the cube-free
divisor-shell union, and density tables that play the additive and
multiplicative viewpoints against each other.

All searches are exhaustive within explicit bounds, so an empty witness
list is a statement about the finite truncation, not a sampling result.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .folner import ADDITIVE, FolnerSpec, divisors, folner_set
from .seq import BitSeq, Block, all_blocks

SEARCH_BUDGET = 10**9


@dataclass(frozen=True, eq=False)
class NatSet:
    """Sorted duplicate-free naturals below a declared horizon."""

    values: np.ndarray
    horizon: int
    provenance: Optional[str] = None

    def __post_init__(self):
        vals = np.unique(np.asarray(self.values, dtype=np.int64))
        horizon = int(self.horizon)
        if horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {horizon}")
        if vals.size:
            if vals[0] < 1:
                raise ValueError(f"naturals start at 1, got {vals[0]}")
            if vals[-1] > horizon:
                raise ValueError(
                    f"element {vals[-1]} beyond the horizon {horizon}"
                )
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "horizon", horizon)

    @classmethod
    def from_bitseq(cls, x: BitSeq, provenance: Optional[str] = None) -> "NatSet":
        """Support {i : x_i = 1} with the prefix length as horizon."""
        vals = np.flatnonzero(x.to_array()) + 1
        return cls(vals, len(x), provenance or x.provenance)

    def __len__(self) -> int:
        return int(self.values.size)

    def __iter__(self):
        return (int(v) for v in self.values)

    def __contains__(self, item) -> bool:
        i = int(np.searchsorted(self.values, int(item)))
        return i < len(self) and int(self.values[i]) == int(item)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NatSet):
            return NotImplemented
        return self.horizon == other.horizon and bool(
            np.array_equal(self.values, other.values)
        )

    def contains_array(self, arr: np.ndarray) -> np.ndarray:
        """Vectorized membership for an int64 array."""
        arr = np.asarray(arr, dtype=np.int64)
        if len(self) == 0:
            return np.zeros(arr.shape, dtype=bool)
        idx = np.searchsorted(self.values, arr)
        idx = np.minimum(idx, len(self) - 1)
        return self.values[idx] == arr

    def indicator(self) -> np.ndarray:
        """Boolean array indexed by value, length horizon + 1."""
        ind = np.zeros(self.horizon + 1, dtype=bool)
        ind[self.values] = True
        return ind

    def __repr__(self) -> str:
        tag = f", {self.provenance}" if self.provenance else ""
        return f"NatSet(<{len(self)} of 1..{self.horizon}{tag}>)"


def set_transform(A: NatSet, kind: str) -> NatSet:
    """One of "div n" ({m : nm in A}), "times n" (nA), "plus m", "minus m".

    The horizon follows the transform: div shrinks it to floor(N/n),
    times and plus stretch it, minus shrinks it and drops what falls
    below 1.
    """
    op, _, arg = kind.partition(" ")
    try:
        g = int(arg)
    except ValueError:
        raise ValueError(f"transform needs an integer argument: {kind!r}")
    vals = A.values
    tag = f"{A.provenance or 'set'} {kind}"
    if op == "div":
        if g < 1:
            raise ValueError("div needs n >= 1")
        return NatSet(vals[vals % g == 0] // g, A.horizon // g, tag)
    if op == "times":
        if g < 1:
            raise ValueError("times needs n >= 1")
        return NatSet(vals * g, A.horizon * g, tag)
    if op == "plus":
        if g < 0:
            raise ValueError("plus needs m >= 0")
        return NatSet(vals + g, A.horizon + g, tag)
    if op == "minus":
        if g < 0:
            raise ValueError("minus needs m >= 0")
        return NatSet(vals[vals > g] - g, max(A.horizon - g, 0), tag)
    raise ValueError(f"unknown transform {kind!r}")


# --------------------------------------------------------------- patterns

@dataclass(frozen=True)
class Linear:
    """ia + jb = kc with a, b, c in A."""

    i: int
    j: int
    k: int

    def __post_init__(self):
        if min(self.i, self.j, self.k) < 1:
            raise ValueError("coefficients must be >= 1")


@dataclass(frozen=True)
class Power:
    """ab = c^k with a, b, c in A and a <= b."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("exponent must be >= 1")


@dataclass(frozen=True)
class SumProd:
    """{a + b, ab} subset of A with a <= b ranging over the naturals."""


@dataclass(frozen=True)
class GeoArith:
    """{q^j (a + id) : 0 <= i, j <= n} subset of A, q > 1, d >= 1."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("grid size must be >= 1")


@dataclass(frozen=True)
class PolyGeo:
    """{b (a + id)^j : 0 <= i, j <= n} subset of A, d >= 1."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("grid size must be >= 1")


@dataclass(frozen=True)
class SearchBounds:
    q_max: int = 10
    d_max: int = 100
    a_max: int = 1000
    b_max: int = 1000


class _Budget:
    def __init__(self):
        self.seen = 0

    def spend(self, n: int):
        self.seen += n
        if self.seen > SEARCH_BUDGET:
            raise ValueError(
                f"search visited over {SEARCH_BUDGET} candidates; "
                "tighten the bounds or pass a witness limit"
            )


def config_search(
    A: NatSet,
    pattern,
    bounds: Optional[SearchBounds] = None,
    limit: Optional[int] = None,
) -> List[tuple]:
    """Exhaustive bounded witness search; empty means no witness exists
    within the bounds.

    Witness tuples follow the search order: Linear and Power yield
    (a, b, c), SumProd (a, b), GeoArith (q, d, a), PolyGeo (d, a, b).
    With a limit the search stops early after that many witnesses.
    """
    bounds = bounds or SearchBounds()
    if limit is not None and limit < 1:
        raise ValueError("limit must be >= 1")
    if isinstance(pattern, Linear):
        return _search_linear(A, pattern, limit)
    if isinstance(pattern, Power):
        return _search_power(A, pattern, limit)
    if isinstance(pattern, SumProd):
        return _search_sumprod(A, limit)
    if isinstance(pattern, GeoArith):
        return _search_geo_arith(A, pattern, bounds, limit)
    if isinstance(pattern, PolyGeo):
        return _search_poly_geo(A, pattern, bounds, limit)
    raise ValueError(f"unknown pattern {pattern!r}")


def _search_linear(A: NatSet, pat: Linear, limit) -> List[tuple]:
    i, j, k = pat.i, pat.j, pat.k
    if (i + j) * A.horizon >= 2**62:
        raise ValueError("coefficients overflow the exact integer search")
    if limit is None and len(A) * len(A) > SEARCH_BUDGET:
        raise ValueError(
            f"{len(A)**2} candidate pairs exceed the {SEARCH_BUDGET} budget; "
            "pass a witness limit for an early-exit search"
        )
    budget = _Budget()
    arr = A.values
    # c = (ia + jb)/k membership through a value-indexed table
    ind = A.indicator()
    out: List[tuple] = []
    chunk = max(1, (1 << 22) // max(arr.size, 1))
    for lo in range(0, arr.size, chunk):
        blk = arr[lo : lo + chunk]
        budget.spend(blk.size * arr.size)
        s = i * blk[:, None] + j * arr[None, :]
        c = s // k
        good = (s % k == 0) & (c <= A.horizon)
        good &= ind[np.where(good, c, 0)]
        if np.any(good):
            for r, col in zip(*np.nonzero(good)):
                out.append((int(blk[r]), int(arr[col]), int(c[r, col])))
                if limit is not None and len(out) >= limit:
                    return out
    return out


def _search_power(A: NatSet, pat: Power, limit) -> List[tuple]:
    k = pat.k
    N = A.horizon
    if N * N >= 2**63:
        raise ValueError("horizon overflows the exact integer search")
    cs = [int(c) for c in A.values if int(c) ** k <= N * N]
    if limit is None and len(A) * len(cs) > SEARCH_BUDGET:
        raise ValueError(
            f"{len(A) * len(cs)} candidate pairs exceed the "
            f"{SEARCH_BUDGET} budget; pass a witness limit"
        )
    budget = _Budget()
    arr = A.values
    ind = A.indicator()
    out: List[tuple] = []
    for c in cs:
        budget.spend(arr.size)
        cv = c**k
        lo = arr[arr * arr <= cv]  # a <= b forces a <= sqrt(c^k)
        ok = lo[cv % lo == 0]
        b = cv // ok
        hit = (b <= N) & ind[np.minimum(b, N)]
        for a, bb in zip(ok[hit], b[hit]):
            out.append((int(a), int(bb), c))
            if limit is not None and len(out) >= limit:
                return out
    return out


def _search_sumprod(A: NatSet, limit) -> List[tuple]:
    N = A.horizon
    ind = A.indicator()
    budget = _Budget()
    out: List[tuple] = []
    for a in range(1, math.isqrt(N) + 1):
        hi = min(N - a, N // a)
        if hi < a:
            break
        b = np.arange(a, hi + 1, dtype=np.int64)
        budget.spend(b.size)
        hit = ind[a + b] & ind[a * b]
        for bb in b[hit]:
            out.append((a, int(bb)))
            if limit is not None and len(out) >= limit:
                return out
    return out


def _search_geo_arith(A: NatSet, pat: GeoArith, bounds, limit) -> List[tuple]:
    n = pat.n
    N = A.horizon
    ind = A.indicator()
    budget = _Budget()
    out: List[tuple] = []
    js = np.arange(n + 1, dtype=np.int64)
    for q in range(2, bounds.q_max + 1):
        if q**n > N:
            break
        qp = q ** js
        for d in range(1, bounds.d_max + 1):
            if q**n * (1 + n * d) > N:
                break
            for a in range(1, bounds.a_max + 1):
                if q**n * (a + n * d) > N:
                    break
                budget.spend(1)
                vals = np.outer(qp, a + d * js)
                if bool(ind[vals].all()):
                    out.append((q, d, a))
                    if limit is not None and len(out) >= limit:
                        return out
    return out


def _search_poly_geo(A: NatSet, pat: PolyGeo, bounds, limit) -> List[tuple]:
    n = pat.n
    N = A.horizon
    ind = A.indicator()
    budget = _Budget()
    out: List[tuple] = []
    js = np.arange(n + 1, dtype=np.int64)
    for d in range(1, bounds.d_max + 1):
        if (1 + n * d) ** n > N:
            break
        for a in range(1, bounds.a_max + 1):
            top = (a + n * d) ** n
            if top > N:
                break
            powers = (a + d * js)[None, :] ** js[:, None]
            for b in range(1, bounds.b_max + 1):
                if b * top > N:
                    break
                budget.spend(1)
                if bool(ind[b * powers].all()):
                    out.append((d, a, b))
                    if limit is not None and len(out) >= limit:
                        return out
    return out


# ------------------------------------------------------------- thick set

@dataclass
class ThickResult:
    """Union of geometrically spaced integer intervals avoiding
    ia + jb = kc, with the exhaustive no-solution certificate."""

    A: NatSet
    delta: Fraction
    ratio: int
    intervals: List[Tuple[int, int]]
    solutions: List[Tuple[int, int, int]]

    @property
    def certified(self) -> bool:
        return not self.solutions


def _scaled_disjoint(i: int, j: int, k: int, delta: Fraction) -> bool:
    lo_k, hi_k = k * 1, k * (1 + delta)
    others = [
        (i, i * (1 + 2 * delta)),
        (j, j * (1 + 2 * delta)),
        ((i + j), (i + j) * (1 + delta)),
    ]
    return all(hi < lo_k or hi_k < lo for lo, hi in others)


def thick_counterexample(i: int, j: int, k: int, N: int) -> ThickResult:
    """Thick set with no solution of ia + jb = kc up to N.

    delta halves from 1 until k[1,1+delta] separates from i[1,1+2delta],
    j[1,1+2delta] and (i+j)[1,1+delta]; the intervals r_n[1,1+delta]
    then use the least integer ratio >= 10(1+delta) with r_n delta
    integral, and the certificate is an exhaustive linear search.
    """
    if min(i, j, k) < 1:
        raise ValueError("coefficients must be >= 1")
    if k in (i, j, i + j):
        raise ValueError(
            f"ia + jb = kc with k = {k} is partition regular for these "
            "coefficients; no counterexample set exists"
        )
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    delta = Fraction(1)
    while not _scaled_disjoint(i, j, k, delta):
        delta /= 2
        if delta < Fraction(1, 2**40):
            raise RuntimeError("interval separation failed to converge")
    ratio = -(-(10 * (1 + delta)).numerator // (10 * (1 + delta)).denominator)
    r = delta.denominator
    intervals: List[Tuple[int, int]] = []
    chunks = []
    while r <= N:
        hi = min(int(r * (1 + delta)), N)
        intervals.append((r, hi))
        chunks.append(np.arange(r, hi + 1, dtype=np.int64))
        r *= ratio
    if not intervals:
        raise ValueError(f"horizon {N} is below the first interval start")
    A = NatSet(
        np.concatenate(chunks), N, f"thick avoiding {i}a+{j}b={k}c"
    )
    solutions = config_search(A, Linear(i, j, k))
    return ThickResult(A, delta, int(ratio), intervals, solutions)


# -------------------------------------------------------- density tables

def intersection_density(
    A: NatSet,
    divisor_list: Sequence[int],
    spec: FolnerSpec,
    n_range: Tuple[int, int],
) -> List[Tuple[int, Fraction]]:
    """Density of the intersection of the division sets A/n_i along the
    spec: per n, |{h in F_n : n_i h in A for all i}| / |F_n|."""
    ds = [int(d) for d in divisor_list]
    if not ds or min(ds) < 1:
        raise ValueError("divisors must be naturals >= 1")
    n_lo, n_hi = int(n_range[0]), int(n_range[1])
    rows = []
    for n in range(n_lo, n_hi + 1):
        F = folner_set(spec, n).to_naturals()
        top = int(F.max()) * max(ds)
        if top > A.horizon:
            raise ValueError(
                f"division probes reach {top}, horizon is {A.horizon}"
            )
        mask = np.ones(F.shape, dtype=bool)
        for d in ds:
            mask &= A.contains_array(d * F)
        rows.append((n, Fraction(int(mask.sum()), F.size)))
    return rows


@dataclass
class IndependenceProfile:
    """Densities of the pattern intersections over one box, against the
    uniform value 2^-|K|."""

    freqs: Dict[Block, Fraction]
    defect: Fraction


def independence_profile(
    A: NatSet, K: Sequence[int], spec: FolnerSpec, n: int
) -> IndependenceProfile:
    """Density of every intersection pattern of shifted copies of A
    over F_n: for each 0/1 assignment B on K, the n-density of
    {h : (kh in A) == B(k) for all k in K}."""
    F = folner_set(spec, n).to_naturals()
    sup = tuple(sorted(int(h) for h in K))
    if not sup or sup[0] < 1 or len(set(sup)) != len(sup):
        raise ValueError("K must be distinct naturals >= 1")
    masks = {}
    for h in sup:
        probes = h + F if spec.semigroup == ADDITIVE else h * F
        top = int(probes.max())
        if top > A.horizon:
            raise ValueError(f"probes reach {top}, horizon is {A.horizon}")
        masks[h] = A.contains_array(probes)
    freqs: Dict[Block, Fraction] = {}
    for block in all_blocks(sup):
        hit = np.ones(F.shape, dtype=bool)
        for h, bit in zip(block.support, block.bits):
            hit &= masks[h] == bool(bit)
        freqs[block] = Fraction(int(hit.sum()), F.size)
    uniform = Fraction(1, 2 ** len(sup))
    defect = max(abs(f - uniform) for f in freqs.values())
    return IndependenceProfile(freqs, defect)


# ----------------------------------------------------- factorial union

@dataclass
class OrtoResult:
    """Union of leading boxes and factorial multiples, with its density
    seen from both semigroups."""

    A: NatSet
    thresholds: Dict[int, int]
    mult_density: Fraction
    additive_density: Fraction


def orto_set(spec: FolnerSpec, N: int) -> OrtoResult:
    """K_1..K_{n_2} plus 2!-multiples of the boxes up to n_3, then
    3!-multiples, and so on while the thresholds exist.

    n_m is the least index past which every box holds m!-multiples in
    fraction above 1 - 1/m; the horizon must exhibit at least the
    m = 2 and m = 3 stages.
    """
    if spec.variant != "nice_boxes":
        raise ValueError("the construction needs a nice_boxes spec")
    if N < 2:
        raise ValueError(f"horizon must be >= 2, got {N}")
    leads: List[int] = []
    n = 1
    while True:
        try:
            L = spec.leading(n)
        except ValueError:
            break
        if L > N:
            break
        leads.append(L)
        n += 1
    if len(leads) < 2:
        raise ValueError("horizon admits fewer than two boxes")
    boxes = [divisors(L).to_naturals() for L in leads]
    last = len(boxes)

    thresholds: Dict[int, int] = {}
    m = 2
    while True:
        fm = math.factorial(m)
        if fm > leads[-1]:
            break  # no multiples fit in any box
        bound = 1 - Fraction(1, m)
        n_m = 0
        for idx in range(last, 0, -1):
            box = boxes[idx - 1]
            frac = Fraction(int((box % fm == 0).sum()), box.size)
            if frac <= bound:
                n_m = idx
                break
        if n_m >= last:
            break
        thresholds[m] = n_m
        m += 1
    if 2 not in thresholds or 3 not in thresholds:
        raise ValueError(
            "horizon too small to exhibit two threshold stages"
        )
    if thresholds[2] >= thresholds[3]:
        raise ValueError(
            "horizon too small to exhibit two threshold stages"
        )

    stages = sorted(thresholds)
    pieces = [boxes[idx] for idx in range(thresholds[2])]
    for pos, m in enumerate(stages):
        fm = math.factorial(m)
        lo = thresholds[m]
        hi = thresholds[stages[pos + 1]] if pos + 1 < len(stages) else last
        for idx in range(lo, hi):
            box = boxes[idx]
            pieces.append(box[box % fm == 0])
    A = NatSet(
        np.concatenate(pieces), N, f"factorial union over {last} boxes"
    )
    top = boxes[-1]
    mult_density = Fraction(int(A.contains_array(top).sum()), top.size)
    additive_density = Fraction(len(A), N)
    return OrtoResult(A, thresholds, mult_density, additive_density)


# ------------------------------------------------------- divisor shells

def ex9_stage_fraction(exponents: Sequence[int]) -> Fraction:
    """Fraction of the divisors of L^3 that do not divide L^2, for
    L with the given prime exponents: 1 - prod (2k+1)/(3k+1)."""
    num = den = 1
    for k in exponents:
        k = int(k)
        if k < 1:
            raise ValueError("exponents must be >= 1")
        num *= 2 * k + 1
        den *= 3 * k + 1
    return 1 - Fraction(num, den)


def _factorize(x: int, hints: Sequence[int] = ()) -> Dict[int, int]:
    out: Dict[int, int] = {}
    for p in hints:
        while x % p == 0:
            out[p] = out.get(p, 0) + 1
            x //= p
    p = 2
    while p * p <= x and p <= 10**6:
        while x % p == 0:
            out[p] = out.get(p, 0) + 1
            x //= p
        p += 1 if p == 2 else 2
    if x > 1:
        if x > 10**12:
            raise ValueError(f"cannot factor the stage parameter {x}")
        out[x] = out.get(x, 0) + 1
    return dict(sorted(out.items()))


@dataclass
class Ex9Stage:
    n: int
    exponents: Tuple[int, ...]
    fraction: Fraction  # of div(L^3) falling in the shell


@dataclass
class Ex9Result:
    """Union of divisor shells div(L^3) minus div(L^2), with the
    exhaustive ab = c^3 certificate."""

    B: NatSet
    stages: List[Ex9Stage]
    solutions: List[Tuple[int, int, int]]

    @property
    def certified(self) -> bool:
        return not self.solutions


def _icbrt(x: int) -> int:
    r = round(x ** (1 / 3))
    while r**3 > x:
        r -= 1
    while (r + 1) ** 3 <= x:
        r += 1
    return r


def ex9_set(L: Sequence[int], N: int) -> Ex9Result:
    """B = union over n of {divisors of L_n^3 not dividing L_n^2}, up
    to the horizon, with no products ab = c^3 inside it.

    The list must grow with L_n^5 dividing L_{n+1}; each shell keeps
    every exponent at most tripled while some exponent exceeds twice
    the original, which in exponent coordinates blocks a + b = 3c.
    """
    Ls = [int(v) for v in L]
    if not Ls or min(Ls) < 2:
        raise ValueError("stage parameters must be >= 2")
    for prev, nxt in zip(Ls, Ls[1:]):
        if nxt % prev**5 != 0:
            raise ValueError(
                f"growth condition violated: {prev}^5 does not divide {nxt}"
            )
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")

    stages: List[Ex9Stage] = []
    elems: List[int] = []
    hints: List[int] = []
    for n, Ln in enumerate(Ls, start=1):
        pf = _factorize(Ln, hints)
        hints = list(pf)
        ks = tuple(pf.values())
        stages.append(Ex9Stage(n, ks, ex9_stage_fraction(ks)))
        primes_ = list(pf)

        def rec(idx: int, val: int, fresh: bool):
            if idx == len(primes_):
                if fresh:
                    elems.append(val)
                return
            p = primes_[idx]
            kp = pf[p]
            v = val
            for e in range(3 * kp + 1):
                if v > N:
                    break
                rec(idx + 1, v, fresh or e > 2 * kp)
                v *= p

        rec(0, 1, False)

    B = NatSet(
        np.array(sorted(set(elems)), dtype=np.int64),
        N,
        f"divisor shells of {len(Ls)} stages",
    )
    solutions: List[Tuple[int, int, int]] = []
    members = set(int(v) for v in B.values)
    vals = [int(v) for v in B.values]
    if len(vals) * (len(vals) + 1) // 2 > SEARCH_BUDGET:
        raise ValueError(
            f"certificate needs over {SEARCH_BUDGET} pair checks"
        )
    for ia, a in enumerate(vals):
        for b in vals[ia:]:
            c = _icbrt(a * b)
            if c**3 == a * b and c in members:
                solutions.append((a, b, c))
    return Ex9Result(B, stages, solutions)


# ---------------------------------------------------------- cover tables

@dataclass
class CoverDensityReport:
    rows: List[Tuple[int, Fraction]]
    plus: Optional[List[Tuple[int, Fraction]]] = None
    minus: Optional[List[Tuple[int, Fraction]]] = None


def _conv_support(ind_a: np.ndarray, ind_b: np.ndarray) -> np.ndarray:
    """Support of the integer convolution of two 0/1 arrays."""
    n = ind_a.size + ind_b.size - 1
    size = 1 << max(n - 1, 1).bit_length()
    fa = np.fft.rfft(ind_a.astype(np.float64), size)
    fb = np.fft.rfft(ind_b.astype(np.float64), size)
    conv = np.fft.irfft(fa * fb, size)[:n]
    return conv > 0.5


def _scaled_indicator(A: NatSet, c: int) -> np.ndarray:
    ind = np.zeros(c * A.horizon + 1, dtype=bool)
    ind[c * A.values] = True
    return ind

_COVER_CAP = 10**8


def _density_rows(
    ind: np.ndarray, spec: FolnerSpec, n_lo: int, n_hi: int
) -> List[Tuple[int, Fraction]]:
    rows = []
    for n in range(n_lo, n_hi + 1):
        F = folner_set(spec, n).to_naturals()
        if int(F.max()) >= ind.size:
            raise ValueError(
                f"F_{n} reaches {int(F.max())}, cover known to {ind.size - 1}"
            )
        rows.append((n, Fraction(int(ind[F].sum()), F.size)))
    return rows


def cover_density(
    A: NatSet,
    B: NatSet,
    spec: FolnerSpec,
    n_range: Tuple[int, int],
    op: str = "sum",
    coeffs: Optional[Tuple[int, int]] = None,
) -> CoverDensityReport:
    """Density of B + A or B * A along the spec; with op="sum" and
    coefficients (n, m) also of nA + mA and nA - mA.

    Sumsets go through an FFT convolution of the indicators; the
    product set enumerates multiples of the (small) B side.
    """
    n_lo, n_hi = int(n_range[0]), int(n_range[1])
    if op == "sum":
        cover = _conv_support(A.indicator(), B.indicator())
    elif op == "product":
        top = A.horizon * max([int(v) for v in B.values] + [1])
        if top > _COVER_CAP:
            raise ValueError(
                f"product cover reaches {top}; over the {_COVER_CAP} cap"
            )
        cover = np.zeros(top + 1, dtype=bool)
        for b in B.values:
            cover[int(b) * A.values] = True
    else:
        raise ValueError(f"op must be sum or product, got {op!r}")
    cover[0] = False
    report = CoverDensityReport(_density_rows(cover, spec, n_lo, n_hi))

    if coeffs is not None:
        if op != "sum":
            raise ValueError("coefficient variants only apply to op=sum")
        cn, cm = int(coeffs[0]), int(coeffs[1])
        if min(cn, cm) < 1:
            raise ValueError("coefficients must be >= 1")
        if (cn + cm) * A.horizon > _COVER_CAP:
            raise ValueError("coefficient cover exceeds the size cap")
        ia = _scaled_indicator(A, cn)
        ib = _scaled_indicator(A, cm)
        plus = _conv_support(ia, ib)
        plus[0] = False
        # differences na - mb read off the correlation with ib reversed
        corr = _conv_support(ia, ib[::-1])
        shift = ib.size - 1
        minus = corr[shift:]
        minus[0] = False
        report.plus = _density_rows(plus, spec, n_lo, n_hi)
        report.minus = _density_rows(minus, spec, n_lo, n_hi)
    return report
