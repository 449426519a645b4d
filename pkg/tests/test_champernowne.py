"""Tests for the classical and multiplicative Champernowne constructions.

Oracles here rebuild the layouts from first principles with scalar
Python (itertools corners, dict cell maps, recursive chain descent) and
never share the vectorized slot/position formulas under test.
"""

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from normlab import champernowne as ch
from normlab import primes
from normlab.folner import MULTIPLICATIVE, FiniteSet, FolnerSpec, divisors, invariance_defect, nat_to_expvec
from normlab.seq import PrefixError

SCH = ch.DEFAULT_SCHEME


# ------------------------------------------------------------------ oracles

def oracle_classical(N):
    out = []
    m = 1
    while len(out) < N:
        out.append(bin(m)[2:])
        m += 1
    return "".join(out)[:N]


def oracle_box_cells_colex(sizes, width=None):
    """Cells of the box in colex order (first coordinate fastest)."""
    width = width or max(len(sizes), 1)
    full = list(sizes) + [0] * (width - len(sizes))
    axes = [range(s + 1) for s in full]
    return [tuple(reversed(c)) for c in itertools.product(*reversed(axes))]


def oracle_slot_corners(outer_sizes, inner_sizes, width):
    full_outer = list(outer_sizes) + [0] * (width - len(outer_sizes))
    per = [inner_sizes[i] + 1 if i < len(inner_sizes) else 1 for i in range(width)]
    axes = [range(0, full_outer[i] + 1, per[i]) for i in range(width)]
    return [tuple(reversed(c)) for c in itertools.product(*reversed(axes))]


def oracle_brick_bits(k, m):
    n = 1 << k
    return [(m >> (n - 1 - j)) & 1 for j in range(n)]


_cellmap_cache = {}


def oracle_package_cellmap(k):
    """{cell tuple: bit} for the order-k package, built by placing each
    brick at its slot corner."""
    if k in _cellmap_cache:
        return _cellmap_cache[k]
    outer = SCH.box(ch.r(k))
    inner = SCH.box(k)
    width = max(outer.dim, 1)
    corners = oracle_slot_corners(outer.sizes, inner.sizes, width)
    cellmap = {}
    for j, c in enumerate(corners):
        bits = oracle_brick_bits(k, j)
        for pos, o in enumerate(oracle_box_cells_colex(inner.sizes, width)):
            cell = tuple(ci + oi for ci, oi in zip(c, o))
            assert cell not in cellmap
            cellmap[cell] = bits[pos]
    assert len(cellmap) == outer.cardinality()
    _cellmap_cache[k] = cellmap
    return cellmap


def _inside(g, box):
    return all(gi <= (box.sizes[i] if i < box.dim else 0) for i, gi in enumerate(g))


def _tile_offset(g, tile):
    """Offset of g inside its tile-grid cell, as a cellmap key."""
    width = max(tile.dim, 1)
    gg = tuple(g) + (0,) * width
    return tuple(
        gg[i] % ((tile.sizes[i] if i < tile.dim else 0) + 1) for i in range(width)
    )


def oracle_chain_bit(k, g):
    g = tuple(g)
    while k >= 1 and _inside(g, SCH.box(ch.r(k))):
        k -= 1
    tile = SCH.box(ch.r(k))
    return oracle_package_cellmap(k)[_tile_offset(g, tile)]


def oracle_limit_bit(g):
    g = tuple(g)
    for k in range(ch.MAX_CHAIN_ORDER + 1):
        if _inside(g, SCH.box(ch.r(k + 1))):
            return oracle_chain_bit(k, g)
    return 0


def pad(g, d):
    return tuple(g) + (0,) * (d - len(g))


# ------------------------------------------------------------------ classical

def test_classical_examples():
    assert ch.classical_champernowne(1).to01() == "1"
    assert ch.classical_champernowne(6).to01() == "110111"
    assert ch.classical_champernowne(16).to01() == "1101110010111011"


def test_classical_matches_oracle():
    for N in (1, 2, 3, 17, 100, 1000, 4096, 65536):
        assert ch.classical_champernowne(N).to01() == oracle_classical(N)


def test_classical_range_guard():
    with pytest.raises(ValueError):
        ch.classical_champernowne(0)
    with pytest.raises(ValueError):
        ch.classical_champernowne((1 << 31) + 1)


# ------------------------------------------------------------------ bricks

def test_brick_small_examples():
    assert [(b.support, b.bits) for b in ch.bricks(0)] == [
        ((1,), (0,)),
        ((1,), (1,)),
    ]
    # order 1 over {1, 2}: numerals 00 01 10 11, high bit at cell 1
    assert [(b.support, b.bits) for b in ch.bricks(1)] == [
        ((1, 2), (0, 0)),
        ((1, 2), (0, 1)),
        ((1, 2), (1, 0)),
        ((1, 2), (1, 1)),
    ]


def test_brick_support_is_box_divisors():
    for k in range(4):
        L = SCH.box(k).leading()
        b = ch.brick(k, 0)
        assert list(b.support) == list(divisors(L))


def test_bricks_every_pattern_exactly_once():
    for k in range(4):
        seen = set()
        for b in ch.bricks(k):
            seen.add(b.bits)
        assert len(seen) == 1 << (1 << k)


def test_brick_against_colex_numeral_oracle():
    for k in range(4):
        box = SCH.box(k)
        width = max(box.dim, 1)
        cells = oracle_box_cells_colex(box.sizes, width)
        nats = [
            int(np.prod([primes.prime(i + 1) ** e for i, e in enumerate(c)]))
            for c in cells
        ]
        rng = random.Random(7 + k)
        for m in [0, 1, (1 << (1 << k)) - 1] + [
            rng.randrange(1 << (1 << k)) for _ in range(10)
        ]:
            b = ch.brick(k, m)
            bits = oracle_brick_bits(k, m)
            expect = dict(zip(nats, bits))
            assert dict(zip(b.support, b.bits)) == expect


def test_brick_guards():
    with pytest.raises(ValueError):
        ch.brick(6, 0)
    with pytest.raises(ValueError):
        ch.brick(1, 4)
    with pytest.raises(ValueError):
        ch.brick(1, -1)


# ------------------------------------------------------------------ packages

def test_package_matches_brick_placement_oracle():
    for k in range(3):
        pk = ch.package(k)
        cellmap = oracle_package_cellmap(k)
        width = max(pk.outer.dim, 1)
        cells = np.array([list(c) for c in cellmap], dtype=np.int64)
        got = pk.bit_rows(cells)
        want = np.array([cellmap[tuple(c)] for c in cells.tolist()], dtype=np.uint8)
        assert (got == want).all()


def test_package_slots_partition_box():
    for k in range(4):
        pk = ch.package(k)
        corners = pk.slot_corners()
        assert corners.shape[0] == pk.slot_count == 1 << (1 << k)
        # every cell of the outer box lands in exactly one slot
        seen = set()
        width = corners.shape[1]
        for c in corners.tolist():
            for o in oracle_box_cells_colex(pk.inner.sizes, width):
                cell = tuple(ci + oi for ci, oi in zip(c, o))
                assert cell not in seen
                seen.add(cell)
        assert len(seen) == pk.outer.cardinality()


def test_package_order_guard():
    with pytest.raises(ValueError):
        ch.package(5)


def test_package_mapping_roundtrip():
    pk = ch.package(1)
    m = pk.to_mapping()
    # F_3 as naturals is divisors(24); bottom row 0001, top row 1011
    assert m == {1: 0, 2: 0, 4: 0, 8: 1, 3: 1, 6: 0, 12: 1, 24: 1}
    blk = pk.to_block()
    assert blk.support == (1, 2, 3, 4, 6, 8, 12, 24)


# ------------------------------------------------------------------ chains

def test_chain_matches_recursive_oracle():
    for k in range(3):
        cb = ch.chain(k)
        cells = cb.cells()
        got = cb.bit_rows(cells)
        want = np.array([oracle_chain_bit(k, tuple(c)) for c in cells.tolist()])
        assert (got == want).all()


def test_chain_corner_embedding():
    # chain(k) restricted to the anchored corner box is chain(k-1)
    for k in (1, 2, 3):
        inner_cells = ch.chain(k - 1).cells()
        a = ch.chain(k).bit_rows(inner_cells)
        b = ch.chain(k - 1).bit_rows(inner_cells)
        assert (a == b).all()


def test_chain4_streaming_consistency():
    rng = random.Random(11)
    outer = SCH.box(ch.r(5))
    cb4 = ch.chain(4)
    cb3 = ch.chain(3)
    inner = SCH.box(ch.r(4))
    for _ in range(200):
        g = tuple(rng.randrange(s + 1) for s in inner.sizes)
        assert cb4.bit(pad(g, outer.dim)) == cb3.bit(g)
    # outside the corner box the bit comes from an order-4 package
    pk4 = ch.package(4)
    for _ in range(200):
        g = list(rng.randrange(s + 1) for s in outer.sizes)
        if _inside(g, inner):
            g[0] += inner.sizes[0] + 1
        per = [inner.sizes[i] + 1 if i < inner.dim else 1 for i in range(len(g))]
        off = tuple(gi % p for gi, p in zip(g, per))
        assert cb4.bit(g) == pk4.bit(off[: inner.dim])


def test_chain_materialize_cap():
    with pytest.raises(ValueError):
        ch.chain(4).cells()
    with pytest.raises(ValueError):
        ch.chain(5)


def test_chain_package_coverage_fraction():
    # inside chain(k), order-k packages cover 1 - 2**-(2**k + 1) exactly
    for k in range(4):
        inner = SCH.box(ch.r(k))
        outer = SCH.box(ch.r(k + 1))
        cells = ch._box_cells_colex(outer)
        per = np.ones(cells.shape[1], dtype=np.int64)
        per[: inner.dim] = np.asarray(inner.sizes) + 1
        corner = cells - cells % per
        covered = int((corner != 0).any(axis=1).sum())
        frac = Fraction(covered, cells.shape[0])
        assert frac == 1 - Fraction(1, 1 << ((1 << k) + 1))


# ------------------------------------------------------------------ the limit

def test_mult_champernowne_first_values():
    x = ch.mult_champernowne(SCH, 64)
    assert x.get(1) == 0
    assert x.get(2) == 1


def test_mult_champernowne_agrees_with_chain_on_box():
    x = ch.mult_champernowne(SCH, 17280)
    m1 = ch.chain(1).to_mapping()
    for v, b in m1.items():
        assert x.get(v) == b


def test_mult_champernowne_matches_scalar_oracle():
    N = 5000
    x = ch.mult_champernowne(SCH, N)
    rng = random.Random(3)
    sample = list(range(1, 130)) + [rng.randrange(1, N + 1) for _ in range(300)]
    top = SCH.box(ch.r(ch.MAX_CHAIN_ORDER + 1))
    for m in sample:
        vec = nat_to_expvec(m)
        if len(vec) > top.dim:
            want = 0  # prime direction beyond every supported box
        else:
            want = oracle_limit_bit(pad(vec, top.dim))
        assert x.get(m) == want, m


def test_mult_champernowne_uncovered_positions_are_zero():
    x = ch.mult_champernowne(SCH, 400)
    # 19**2 exceeds the eighth box side; 23 lies beyond its dimension
    assert x.get(361) == 0
    assert x.get(23) == 0


def test_mult_champernowne_ones_exactly_half_on_box():
    x = ch.mult_champernowne(SCH, 17280)
    ones = sum(x.get(d) for d in divisors(17280))
    assert Fraction(ones, 64) == Fraction(1, 2)
    assert abs(Fraction(ones, 64) - Fraction(1, 2)) <= Fraction(1, 8)


def test_mult_champernowne_guard():
    with pytest.raises(ValueError):
        ch.mult_champernowne(SCH, 0)
    with pytest.raises(ValueError):
        ch.mult_champernowne(SCH, (1 << 26) + 1)


def test_limit_freqs_sum_to_one():
    f = ch.chain_limit_freqs(SCH, 6, [1, 2])
    assert sum(f.values()) == 1
    assert len(f) == 4


def test_limit_defect_matches_scalar_oracle():
    for k in (1, 2, 3):
        n = ch.r(k)
        box = SCH.box(n)
        width = max(SCH.box(ch.r(4)).dim, box.dim)
        cells = oracle_box_cells_colex(box.sizes, box.dim)
        for K in ([1], [1, 2]):
            counts = {}
            for g in cells:
                pat = tuple(
                    oracle_limit_bit(
                        pad(
                            tuple(
                                a + b
                                for a, b in zip(
                                    pad(g, width), pad(nat_to_expvec(h), width)
                                )
                            ),
                            width,
                        )
                    )
                    for h in K
                )
                counts[pat] = counts.get(pat, 0) + 1
            total = len(cells)
            target = Fraction(1, 1 << len(K))
            want = max(
                abs(Fraction(counts.get(p, 0), total) - target)
                for p in itertools.product((0, 1), repeat=len(K))
            )
            assert ch.chain_limit_defect(SCH, n, K) == want


def test_limit_defect_non_increasing():
    # pinned from the exact computation; k = 4 runs over 2**20 cells
    got1 = [ch.chain_limit_defect(SCH, ch.r(k), [1]) for k in (1, 2, 3, 4)]
    got2 = [ch.chain_limit_defect(SCH, ch.r(k), [1, 2]) for k in (1, 2, 3, 4)]
    assert got1 == [0, 0, 0, 0]
    assert got2 == [
        Fraction(1, 4),
        Fraction(1, 32),
        Fraction(1, 1024),
        Fraction(1, 524288),
    ]
    for seq in (got1, got2):
        assert all(a >= b for a, b in zip(seq, seq[1:]))


# ------------------------------------------------------------------ net-normal

def _oracle_net_bit(m):
    if 24 % m == 0:
        k = 0
    elif 17280 % m == 0:
        k = 1
    else:
        k = 2  # saturated region {v2 <= 31} holds below 2**32
    tile = SCH.box(ch.r(k))
    return oracle_package_cellmap(k)[_tile_offset(nat_to_expvec(m), tile)]


def test_net_normal_prefix_matches_oracle():
    x = ch.net_normal(SCH, 4096)
    for m in range(1, 4097):
        assert x.get(m) == _oracle_net_bit(m), m


def test_net_normal_first_rows():
    assert ch.net_normal(SCH, 32).to01() == "01000101000000100000000100100000"


def test_net_normal_guard():
    with pytest.raises(ValueError):
        ch.net_normal(SCH, 0)
    with pytest.raises(ValueError):
        ch.net_normal(SCH, (1 << 24) + 1)


def test_net_normal_order_counts():
    c18 = ch.net_normal_order_counts(SCH, 1 << 18)
    c20 = ch.net_normal_order_counts(SCH, 1 << 20)
    # the two bounded regions keep their exact tile counts
    assert c18[0] == c20[0] == 4
    assert c18[1] == c20[1] == 7
    # the open region keeps acquiring tiles
    assert c20[2] > c18[2] > 0
    for k in sorted(c18):
        assert c20[k] >= c18[k]


def test_net_normal_tiles_carry_packages():
    # x restricted to any tile equals that order's package bit for bit
    N = 1 << 20
    x = ch.net_normal(SCH, N)
    pk2 = ch.package(2).to_mapping()
    full = [m for m in range(2, N // 17280 + 1) if _is_order2_corner(m)]
    assert len(full) >= 10
    partial = [m for m in (257, 1 << 8, 99991) if _is_order2_corner(m)]
    checked = 0
    for cv in full + partial:
        for cell, bit in pk2.items():
            pos = cv * cell
            if pos <= N:
                assert x.get(pos) == bit, (cv, cell)
                checked += 1
    assert checked >= 10 * 64


def _is_order2_corner(m):
    if m == 1 or 17280 % m == 0:
        return False
    vec = nat_to_expvec(m)
    v2 = vec[0] if len(vec) > 0 else 0
    v3 = vec[1] if len(vec) > 1 else 0
    v5 = vec[2] if len(vec) > 2 else 0
    return v2 in (0, 8, 16, 24) and v3 % 4 == 0 and v5 % 2 == 0


# ------------------------------------------------------------------ z regions

def test_z_impl_examples():
    # order 1 has threshold 0: the region is empty
    assert not ch.z_impl_contains(SCH, 1, 1)
    assert not ch.z_impl_contains(SCH, 1, 2 ** 40)
    # order 2: first coordinate below 2*3 - 1 = 5
    assert ch.z_impl_contains(SCH, 2, 1)
    assert ch.z_impl_contains(SCH, 2, 3 ** 30)
    assert not ch.z_impl_contains(SCH, 2, 1 << 5)
    # order 3: g1 < 8 or g2 < 2
    assert ch.z_impl_contains(SCH, 3, (8, 1))
    assert not ch.z_impl_contains(SCH, 3, (8, 2))


def test_z_impl_boxes_fail_invariance():
    # any box inside the region has defect above 1/k against F_k
    rng = random.Random(19)
    for k in (2, 3):
        inner = SCH.box(k)
        K = list(divisors(inner.leading()))
        for _ in range(25):
            i = rng.randrange(inner.dim)
            thresh = k * inner.sizes[i] - 1
            lo = rng.randrange(thresh)
            hi = rng.randrange(lo, thresh)
            spans = []
            for d in range(inner.dim):
                if d == i:
                    spans.append(range(lo, hi + 1))
                else:
                    a = rng.randrange(6)
                    spans.append(range(a, a + rng.randrange(1, 7)))
            rows = [list(c) for c in itertools.product(*spans)]
            F = FiniteSet(np.array(rows, dtype=np.int64))
            assert invariance_defect(F, K, MULTIPLICATIVE) > Fraction(1, k)


def test_z_impl_density_vanishes_along_nice_boxes():
    from normlab.folner import density

    Ls = [2 ** (4 * j) * 3 ** j for j in range(1, 6)]
    spec = FolnerSpec.nice_boxes(L=Ls)
    rep = density(lambda m: ch.z_impl_contains(SCH, 2, m), spec, 1, 5)
    fracs = [f for _, f in rep.per_n]
    assert fracs == [
        Fraction(1),
        Fraction(5, 9),
        Fraction(5, 13),
        Fraction(5, 17),
        Fraction(5, 21),
    ]
    assert all(a > b for a, b in zip(fracs, fracs[1:]))
    assert fracs[-1] < Fraction(1, 3)


# ------------------------------------------------------------------ figure

def test_figure_blocks_shapes():
    fig = ch.figure1_blocks()
    assert set(fig) == {"package_0", "chain_0", "package_1", "chain_1", "package_2"}
    assert fig["package_0"] == [["01"]]
    assert fig["chain_0"] == [["0101", "0101"]]
    assert fig["package_1"] == [["1011", "0001"]]
    assert len(fig["chain_1"]) == 2 and all(len(l) == 4 for l in fig["chain_1"])


def test_figure_diff_flags_exactly_two_rows():
    diffs = ch.figure1_diff()
    assert len(diffs) == 2
    assert {(d[0], d[1], d[2]) for d in diffs} == {
        ("package_2", 0, 1),
        ("package_2", 1, 1),
    }
    # the reference prints the brick after the one the convention places
    for name, li, ri, ours, ref in diffs:
        a = int(ours[:4], 2), int(ours[4:], 2)
        b = int(ref[:4], 2), int(ref[4:], 2)
        assert b == (a[0] + 1, a[1] + 1)


def test_scheme_order_map():
    assert [ch.r(k) for k in range(5)] == [1, 3, 6, 11, 20]
    assert SCH.box(20).sizes == (63, 31, 15, 7, 3)
    assert SCH.box(6).sizes == (7, 3, 1)
