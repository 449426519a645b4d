"""Tests for the semigroup / Folner layer."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normlab import (
    ADDITIVE,
    MULTIPLICATIVE,
    STAIRCASE,
    TOEPLITZ,
    AnchoredBox,
    DirectionSchedule,
    FiniteSet,
    FolnerSpec,
    density,
    divisors,
    equivalence_defect,
    expvec_to_nat,
    folner_set,
    invariance_defect,
    k_core,
    nat_to_expvec,
)
from normlab import primes


# ---------------------------------------------------------------- oracles

def oracle_factor(m):
    """Trial-division factorization, independent of the library sieve."""
    out = {}
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def oracle_divisors(L):
    """Brute-force divisibility scan."""
    return [d for d in range(1, L + 1) if L % d == 0]


def oracle_expvec(m):
    fac = oracle_factor(m)
    if not fac:
        return ()
    ps = []
    p = 2
    while p <= max(fac):
        if all(p % q for q in range(2, p)):
            ps.append(p)
        p += 1
    out = [0] * len(ps)
    for p, e in fac.items():
        out[ps.index(p)] = e
    return tuple(out)


# ---------------------------------------------------------------- primes

def test_prime_basics():
    assert primes.prime(1) == 2
    assert primes.prime(2) == 3
    assert primes.prime(100) == 541
    assert primes.prime(10_000) == 104_729


def test_is_prime_spot_checks():
    assert primes.is_prime(2)
    assert primes.is_prime(104_729)
    assert primes.is_prime((1 << 61) - 1)
    assert not primes.is_prime(1)
    assert not primes.is_prime(104_729 * 104_729)


def test_factorize_errors():
    with pytest.raises(ValueError):
        primes.factorize(0)
    with pytest.raises(ValueError):
        primes.factorize(1 << 63)
    # prime factor beyond the extendable sieve range
    with pytest.raises(ValueError):
        primes.factorize(2 * 10_000_019)


# ---------------------------------------------------------------- expvec

def test_nat_to_expvec_examples():
    assert nat_to_expvec(1) == ()
    assert nat_to_expvec(12) == (2, 1)
    assert nat_to_expvec(35) == (0, 0, 1, 1)
    # frozen values double-checked against the independent oracle
    assert oracle_expvec(12) == (2, 1)
    assert oracle_expvec(35) == (0, 0, 1, 1)


def test_expvec_out_of_range():
    with pytest.raises(ValueError):
        nat_to_expvec(0)
    with pytest.raises(ValueError):
        nat_to_expvec(1 << 63)


@given(st.integers(1, 10**7))
@settings(max_examples=300, deadline=None)
def test_expvec_round_trip(m):
    assert expvec_to_nat(nat_to_expvec(m)) == m


def test_expvec_round_trip_large_smooth():
    for m in [1 << 62, 3**39, 2**30 * 3**20, 104_729**3, (1 << 63) - 1]:
        assert expvec_to_nat(nat_to_expvec(m)) == m


@given(st.integers(1, 10**6), st.integers(1, 10**6))
@settings(max_examples=300, deadline=None)
def test_componentwise_order_is_divisibility(a, b):
    va, vb = nat_to_expvec(a), nat_to_expvec(b)
    d = max(len(va), len(vb))
    va = va + (0,) * (d - len(va))
    vb = vb + (0,) * (d - len(vb))
    assert (all(x <= y for x, y in zip(va, vb))) == (b % a == 0)


# ---------------------------------------------------------------- divisors

def test_divisors_examples():
    assert list(divisors(1)) == [1]
    assert list(divisors(12)) == [1, 2, 3, 4, 6, 12]
    assert list(divisors(8)) == [1, 2, 4, 8]
    assert oracle_divisors(12) == [1, 2, 3, 4, 6, 12]
    assert oracle_divisors(8) == [1, 2, 4, 8]


def test_divisors_against_oracle():
    rng = np.random.default_rng(7)
    for L in rng.integers(1, 5000, size=40):
        assert list(divisors(int(L))) == oracle_divisors(int(L))


def test_divisors_cardinality_formula():
    for L in [360, 2**10, 2 * 3 * 5 * 7 * 11]:
        fac = oracle_factor(L)
        want = 1
        for e in fac.values():
            want *= e + 1
        assert len(divisors(L)) == want


def test_divisors_range_error():
    with pytest.raises(ValueError):
        divisors(0)
    with pytest.raises(ValueError):
        divisors(1 << 63)


# ---------------------------------------------------------------- schedules

def test_staircase_prefix():
    got = [STAIRCASE.direction(n) for n in range(1, 22)]
    assert got == [1, 1, 2, 1, 2, 3, 1, 2, 3, 4, 1, 2, 3, 4, 5, 1, 2, 3, 4, 5, 6]


def test_toeplitz_prefix():
    got = [TOEPLITZ.direction(n) for n in range(1, 9)]
    assert got == [1, 2, 1, 3, 1, 2, 1, 4]


@pytest.mark.parametrize("sched", [STAIRCASE, TOEPLITZ])
def test_schedule_counts_match_brute_force(sched):
    for N in [1, 2, 3, 7, 20, 23, 64, 100]:
        brute = {}
        for n in range(1, N + 1):
            d = sched.direction(n)
            brute[d] = brute.get(d, 0) + 1
        want = tuple(brute.get(i, 0) for i in range(1, max(brute) + 1))
        assert sched.counts(N) == want


def test_explicit_schedule():
    s = DirectionSchedule("explicit", (1, 1, 2, 1))
    assert [s.direction(n) for n in range(1, 5)] == [1, 1, 2, 1]
    assert s.counts(4) == (3, 1)
    with pytest.raises(ValueError):
        s.direction(5)


# ---------------------------------------------------------------- folner_set

def test_classical():
    assert list(folner_set(FolnerSpec.classical(), 5)) == [1, 2, 3, 4, 5]


def test_doubling_staircase_worked_list():
    spec = FolnerSpec.doubling()
    assert list(folner_set(spec, 0)) == [1]
    # divisors of 2**3 * 3, i.e. the box {0..3} x {0,1}
    assert list(folner_set(spec, 3)) == [1, 2, 3, 4, 6, 8, 12, 24]
    assert spec.box(3).sizes == (3, 1)
    assert spec.box(6).sizes == (7, 3, 1)
    assert len(folner_set(spec, 6)) == 64


def test_doubling_cardinality():
    spec = FolnerSpec.doubling()
    for n in range(0, 21):
        assert spec.box(n).cardinality() == 2**n
    for n in range(0, 13):
        assert len(folner_set(spec, n)) == 2**n


def test_doubling_vector_mode():
    spec = FolnerSpec.doubling()
    F = folner_set(spec, 15)
    assert F.is_vector_mode
    assert len(F) == 2**15
    assert (0, 0, 0, 0, 0) in F
    assert (31, 15, 7, 3, 1) in F
    assert (32, 0, 0, 0, 0) not in F


def test_doubling_disjoint_union_step():
    # F_{n+1} = F_n disjoint-union (v_n + F_n)
    spec = FolnerSpec.doubling()
    for n in range(0, 10):
        F = set(folner_set(spec, n))
        G = set(folner_set(spec, n + 1))
        d = spec.schedule.direction(n + 1)
        c = spec.schedule.counts(n)
        exp = c[d - 1] if d <= len(c) else 0
        v = primes.prime(d) ** (1 << exp)
        shifted = {f * v for f in F}
        assert F | shifted == G and not (F & shifted)


def test_nice_boxes_explicit_list():
    spec = FolnerSpec.nice_boxes(L=[2, 4, 12, 24])
    assert list(folner_set(spec, 3)) == [1, 2, 3, 4, 6, 12]
    with pytest.raises(ValueError):
        FolnerSpec.nice_boxes(L=[2, 4, 4])
    with pytest.raises(ValueError):
        FolnerSpec.nice_boxes(L=[4, 6])


def test_nice_boxes_from_schedule():
    spec = FolnerSpec.nice_boxes(schedule=STAIRCASE)
    # L_n multiplies by prime(direction(n)) each step: 2,2,3,2,3,5
    assert [spec.leading(n) for n in range(1, 7)] == [2, 4, 12, 24, 72, 360]


def test_interval_union():
    spec = FolnerSpec.interval_union([[(1, 3)], [(1, 2), (5, 6)]])
    assert list(folner_set(spec, 1)) == [1, 2, 3]
    assert list(folner_set(spec, 2)) == [1, 2, 5, 6]
    with pytest.raises(ValueError):
        folner_set(spec, 3)


def test_spec_semigroup_validation():
    with pytest.raises(ValueError):
        FolnerSpec("classical", MULTIPLICATIVE)
    with pytest.raises(ValueError):
        FolnerSpec("doubling", ADDITIVE, schedule=STAIRCASE)


# ---------------------------------------------------------------- defects

def test_invariance_defect_examples():
    for n in [5, 17, 100]:
        F = folner_set(FolnerSpec.classical(), n)
        assert invariance_defect(F, [1], ADDITIVE) == Fraction(2, n)
    for a in [3, 6, 10]:
        F = divisors(2**a)
        assert invariance_defect(F, [2], MULTIPLICATIVE) == Fraction(2, a + 1)
    F = folner_set(FolnerSpec.classical(), 9)
    assert invariance_defect(F, [0], ADDITIVE) == 0
    assert invariance_defect(divisors(30), [1], MULTIPLICATIVE) == 0


def test_invariance_defect_oracle():
    rng = np.random.default_rng(11)
    for _ in range(30):
        F = sorted(set(rng.integers(1, 200, size=25).tolist()))
        K = sorted(set(rng.integers(0, 9, size=3).tolist()))
        KF = {k + f for k in K for f in F}
        want = Fraction(len(KF ^ set(F)), len(F))
        assert invariance_defect(FiniteSet(F), K, ADDITIVE) == want


def test_invariance_defect_overflow():
    F = FiniteSet([(1 << 62) + 5])
    with pytest.raises(ValueError):
        invariance_defect(F, [1 << 62], ADDITIVE)
    with pytest.raises(ValueError):
        invariance_defect(F, [4], MULTIPLICATIVE)


# ---------------------------------------------------------------- k_core

def test_k_core_examples():
    F = folner_set(FolnerSpec.classical(), 10)
    assert list(k_core(F, [1, 2], ADDITIVE)) == list(range(1, 9))
    assert list(k_core(F, [1, 2], ADDITIVE, include_identity=True)) == list(range(0, 9))
    D = divisors(24)
    assert list(k_core(D, [2, 3], MULTIPLICATIVE)) == [1, 2, 4]
    assert list(k_core(D, [2, 3], MULTIPLICATIVE, include_identity=True)) == [1, 2, 4]
    assert k_core(F, [0], ADDITIVE) == F
    assert k_core(D, [1], MULTIPLICATIVE) == D


def test_k_core_exhaustive_oracle():
    rng = np.random.default_rng(3)
    for _ in range(40):
        F = set(rng.integers(1, 120, size=30).tolist())
        K = set(rng.integers(1, 8, size=2).tolist())
        want_add = sorted(h for h in range(1, 200) if all(k + h in F for k in K))
        got = list(k_core(FiniteSet(sorted(F)), sorted(K), ADDITIVE))
        assert got == want_add
        want_mul = sorted(h for h in range(1, 200) if all(k * h in F for k in K))
        got = list(k_core(FiniteSet(sorted(F)), sorted(K), MULTIPLICATIVE))
        assert got == want_mul


def test_k_core_identity_adjoined_only_when_k_inside():
    F = FiniteSet([2, 3, 4])
    # K not a subset of F: no identity even with the flag
    got = k_core(F, [5], ADDITIVE, include_identity=True)
    assert 0 not in got
    got = k_core(F, [2], ADDITIVE, include_identity=True)
    assert 0 in got


def test_k_core_vector_mode():
    F = folner_set(FolnerSpec.doubling(), 15)
    core = k_core(F, [2], MULTIPLICATIVE)
    # box (31,15,7,3,1) shifted down by one along the first axis
    assert len(core) == 31 * 16 * 8 * 4 * 2
    assert (30, 15, 7, 3, 1) in core
    assert (31, 15, 7, 3, 1) not in core


def test_cancellativity_identity():
    rng = np.random.default_rng(5)
    for _ in range(200):
        F = FiniteSet(sorted(set(rng.integers(1, 400, size=40).tolist())))
        g = int(rng.integers(1, 12))
        lhs = sum(1 for h in k_core(F, [g], ADDITIVE) if h in F)
        gF = {g + f for f in F}
        assert lhs == len(gF & set(F))
        lhs = sum(1 for h in k_core(F, [g], MULTIPLICATIVE) if h in F)
        gF = {g * f for f in F}
        assert lhs == len(gF & set(F))


# ---------------------------------------------------------------- lemma estim

def test_core_estimate_from_invariance():
    # if |KF^F|/|F| <= eps/(2|K|) for K = {1..k}, then |F_K ^ F| <= eps|F|
    rng = np.random.default_rng(42)
    triggered = 0
    for _ in range(1000):
        k = int(rng.integers(1, 9))
        a = int(rng.integers(1, 10**6))
        length = int(rng.integers(1, 4000))
        eps = Fraction(int(rng.integers(1, 101)), 100)
        F = FiniteSet(np.arange(a, a + length, dtype=np.int64))
        K = list(range(1, k + 1))
        if invariance_defect(F, K, ADDITIVE) <= eps / (2 * k):
            triggered += 1
            FK = k_core(F, K, ADDITIVE)
            sym = set(F) ^ set(FK)
            assert Fraction(len(sym)) <= eps * len(F)
    assert triggered >= 200, f"only {triggered} of 1000 samples exercised the hypothesis"


# ---------------------------------------------------------------- density

def test_density_classical_evens():
    rep = density(lambda g: g % 2 == 0, FolnerSpec.classical(), 1, 20)
    for n, r in rep.per_n:
        assert r == Fraction(n // 2, n)


def test_density_empty_set():
    rep = density(lambda g: False, FolnerSpec.classical(), 1, 6)
    assert rep.lower == 0 and rep.upper == 0


def test_density_multiples_of_six_in_nice_boxes():
    # exact count by the divisor formula: divisors of L/6 times 6 are the hits
    spec = FolnerSpec.nice_boxes(L=[6, 36, 216, 1296])
    rep = density(lambda g: g % 6 == 0, spec, 1, 4)
    for n, r in rep.per_n:
        L = 6**n
        want = Fraction(len(oracle_divisors(L // 6)), len(oracle_divisors(L)))
        assert r == want


def test_density_tail_window():
    rep = density(lambda g: g % 2 == 0, FolnerSpec.classical(), 1, 10)
    tail = [Fraction(n // 2, n) for n in range(6, 11)]
    assert rep.lower == min(tail)
    assert rep.upper == max(tail)


# ---------------------------------------------------------------- equivalence

def test_equivalence_defect_identical():
    s = FolnerSpec.classical()
    assert equivalence_defect(s, s, 9) == 0


def test_equivalence_defect_core_sequence():
    n = 30
    cores = FolnerSpec.interval_union(
        [[(1, m - 2)] if m > 2 else [] for m in range(1, n + 1)]
    )
    assert equivalence_defect(FolnerSpec.classical(), cores, n) == Fraction(2, n)


def test_equivalence_defect_disjoint():
    a = FolnerSpec.interval_union([[(1, 5)]])
    b = FolnerSpec.interval_union([[(10, 14)]])
    assert equivalence_defect(a, b, 1) == 2


def test_equivalence_defect_semigroup_mismatch():
    with pytest.raises(ValueError):
        equivalence_defect(FolnerSpec.classical(), FolnerSpec.doubling(), 3)


# ---------------------------------------------------------------- nice defect decay

def test_nice_boxes_defect_decays():
    spec = FolnerSpec.nice_boxes(schedule=STAIRCASE)
    # stop before 6 * L_n leaves 63 bits
    for g, floor in [(2, Fraction(1, 4)), (6, Fraction(1, 2))]:
        defs = []
        for n in range(3, 28):
            if spec.leading(n) % g == 0:
                F = folner_set(spec, n)
                defs.append(invariance_defect(F, [g], MULTIPLICATIVE))
        assert defs == sorted(defs, reverse=True)
        assert defs[-1] < defs[0]
        assert defs[-1] <= floor


def test_box_defect_closed_form():
    # for F = divisors(L) and g | L the defect is 2(1 - prod (k_i+1-a_i)/(k_i+1))
    L = 2**5 * 3**3 * 5**2
    F = divisors(L)
    for g in [2, 6, 90, 8]:
        ks = dict(oracle_factor(L))
        gs = dict(oracle_factor(g))
        prod = Fraction(1)
        for p, k in ks.items():
            a = gs.get(p, 0)
            prod *= Fraction(k + 1 - a, k + 1)
        assert invariance_defect(F, [g], MULTIPLICATIVE) == 2 * (1 - prod)


# ---------------------------------------------------------------- finite set plumbing

def test_finite_set_dedup_and_sort():
    F = FiniteSet([5, 1, 5, 3])
    assert list(F) == [1, 3, 5]
    assert 3 in F and 2 not in F


def test_finite_set_vector_naturals_bridge():
    F = FiniteSet(np.array([[1, 1], [0, 0], [2, 0]], dtype=np.int64))
    assert sorted(F.to_naturals().tolist()) == [1, 4, 6]
    G = FiniteSet([1, 4, 6])
    assert F == G


def test_anchored_box():
    b = AnchoredBox((3, 1))
    assert b.cardinality() == 8
    assert b.leading() == 24
    assert b.contains((3, 1)) and not b.contains((4, 0))
    assert list(b.to_finite_set()) == [1, 2, 3, 4, 6, 8, 12, 24]
    with pytest.raises(ValueError):
        AnchoredBox((2, 0))
    assert AnchoredBox(()).cardinality() == 1
