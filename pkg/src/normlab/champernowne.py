"""Champernowne-style constructions: classical, multiplicative, net-normal.

The multiplicative construction lives on a doubling box sequence in the
exponent lattice.  Bricks of order k are the 2**(2**k) blocks over the
box F_k; a package of order k concatenates every brick exactly once
into the box F_{r(k)} with r(k) = 2**k + k; a chain of order k fills
F_{r(k+1)} with the previous chain in the anchored corner and copies of
the order-k package everywhere else.  Conventions (they reproduce the
known small cases exactly): slots are ordered corner-colexicographically
with the first coordinate fastest and the origin slot first; brick #m
spells the 2**k-bit numeral of m along the colex cell order of F_k,
most significant bit at the first cell.

Everything evaluates positionally, so bits of cells far beyond 63-bit
naturals cost O(k) arithmetic and no memory.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Sequence

import numpy as np

from . import primes
from .folner import (
    MULTIPLICATIVE,
    STAIRCASE,
    AnchoredBox,
    DirectionSchedule,
    FiniteSet,
    FolnerSpec,
    nat_to_expvec,
)
from .seq import BitSeq, Block

MAX_BRICK_ORDER = 5
MAX_PACKAGE_ORDER = 4
MAX_CHAIN_ORDER = 4
MAX_CHAIN_MATERIALIZE = 3
MULT_HORIZON = 1 << 26
NET_HORIZON = 1 << 24


def r(k: int) -> int:
    """Order map: the box index carrying the order-k package."""
    return (1 << k) + k


@dataclass(frozen=True)
class DoublingScheme:
    """Doubling box sequence (direction schedule) plus the order map."""

    schedule: DirectionSchedule = STAIRCASE

    def box(self, n: int) -> AnchoredBox:
        counts = self.schedule.counts(n)
        return AnchoredBox(tuple((1 << c) - 1 for c in counts))

    def folner_spec(self) -> FolnerSpec:
        return FolnerSpec.doubling(self.schedule)

    def package_box(self, k: int) -> AnchoredBox:
        return self.box(r(k))


DEFAULT_SCHEME = DoublingScheme()


# ---------------------------------------------------------------- classical

def classical_champernowne(N: int) -> BitSeq:
    """First N bits of 1 10 11 100 101 110 111 1000 ..."""
    if not 1 <= N <= 1 << 31:
        raise ValueError(f"N out of range [1, 2**31]: {N}")
    out = np.empty(N, dtype=np.uint8)
    filled = 0
    length = 1
    while filled < N:
        start = 1 << (length - 1)
        total = start  # numbers of this bit length
        need = (N - filled + length - 1) // length
        count = min(total, need)
        shifts = np.arange(length - 1, -1, -1, dtype=np.int64)
        done = 0
        while done < count and filled < N:
            take = min(count - done, 1 << 20)
            nums = np.arange(start + done, start + done + take, dtype=np.int64)
            bits = ((nums[:, None] >> shifts[None, :]) & 1).astype(np.uint8).ravel()
            piece = min(bits.size, N - filled)
            out[filled : filled + piece] = bits[:piece]
            filled += piece
            done += take
        length += 1
    return BitSeq(out, provenance=f"classical_champernowne(N={N})")


# ---------------------------------------------------------------- grid math

def _pad_rows(rows: np.ndarray, d: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    if rows.shape[1] > d:
        if rows[:, d:].any():
            raise ValueError("cell has coordinates beyond the box dimension")
        return rows[:, :d]
    if rows.shape[1] == d:
        return rows
    out = np.zeros((rows.shape[0], d), dtype=np.int64)
    out[:, : rows.shape[1]] = rows
    return out


def _periods(tile: AnchoredBox, d: int) -> np.ndarray:
    p = np.ones(d, dtype=np.int64)
    p[: tile.dim] = np.asarray(tile.sizes, dtype=np.int64) + 1
    return p


def _grid_corner(rows: np.ndarray, tile: AnchoredBox) -> np.ndarray:
    """Corner of the tile-grid cell containing each row."""
    p = _periods(tile, rows.shape[1])
    return rows - rows % p


def _slot_index(corner: np.ndarray, outer: AnchoredBox, tile: AnchoredBox) -> np.ndarray:
    """Colex slot numbering: origin first, first coordinate fastest."""
    d = corner.shape[1]
    p = _periods(tile, d)
    sizes = np.asarray(outer.sizes, dtype=np.int64)
    q = (sizes + 1) // p
    w = np.concatenate([[1], np.cumprod(q[:-1])])
    return ((corner // p) * w).sum(axis=1)


def _cell_index(offset: np.ndarray, tile: AnchoredBox) -> np.ndarray:
    """Colex cell numbering inside the tile, first coordinate fastest."""
    d = tile.dim
    if d == 0:
        return np.zeros(offset.shape[0], dtype=np.int64)
    sizes = np.asarray(tile.sizes, dtype=np.int64)
    u = np.concatenate([[1], np.cumprod(sizes + 1)[:-1]])
    return (offset[:, :d] * u).sum(axis=1)


def _box_cells_colex(box: AnchoredBox) -> np.ndarray:
    """All cells as rows, in colex order (first coordinate fastest)."""
    if box.dim == 0:
        return np.zeros((1, 1), dtype=np.int64)
    axes = [np.arange(k + 1, dtype=np.int64) for k in box.sizes]
    grid = np.meshgrid(*axes, indexing="ij")
    # Fortran-order ravel varies the first axis fastest
    return np.stack([g.ravel(order="F") for g in grid], axis=1)


def _cells_to_naturals(rows: np.ndarray) -> np.ndarray:
    if rows.size:
        bound = 1
        for i in range(rows.shape[1]):
            bound *= primes.prime(i + 1) ** int(rows[:, i].max())
        if bound > (1 << 63) - 1:
            raise ValueError("cell value exceeds 63 bits")
    vals = np.ones(rows.shape[0], dtype=np.int64)
    for i in range(rows.shape[1]):
        vals = vals * np.power(np.int64(primes.prime(i + 1)), rows[:, i])
    return vals


# ---------------------------------------------------------------- bricks

def brick(k: int, m: int, scheme: DoublingScheme = DEFAULT_SCHEME) -> Block:
    """Brick #m of order k, as a block over the naturals of F_k."""
    if k > MAX_BRICK_ORDER:
        raise ValueError(f"brick order {k} exceeds {MAX_BRICK_ORDER}")
    n_cells = 1 << k
    if not 0 <= m < 1 << n_cells:
        raise ValueError(f"brick index {m} out of range for order {k}")
    box = scheme.box(k)
    cells = _box_cells_colex(box) if k else np.zeros((1, 1), dtype=np.int64)
    cells = cells[:, : max(box.dim, 1)]
    nats = _cells_to_naturals(cells)
    bits = [(m >> (n_cells - 1 - j)) & 1 for j in range(n_cells)]
    order = np.argsort(nats)
    return Block(tuple(int(nats[i]) for i in order), tuple(bits[i] for i in order))


def bricks(k: int, scheme: DoublingScheme = DEFAULT_SCHEME) -> Iterator[Block]:
    """All bricks of order k in index order (lazy: 2**(2**k) of them)."""
    if k > MAX_BRICK_ORDER:
        raise ValueError(f"brick order {k} exceeds {MAX_BRICK_ORDER}")
    for m in range(1 << (1 << k)):
        yield brick(k, m, scheme)


# ---------------------------------------------------------------- packages

@dataclass(frozen=True)
class PackageLayout:
    """Order-k package: F_k-translates tiling F_{r(k)}, slot j = brick j."""

    k: int
    scheme: DoublingScheme = DEFAULT_SCHEME

    def __post_init__(self):
        if self.k > MAX_PACKAGE_ORDER:
            raise ValueError(f"package order {self.k} exceeds {MAX_PACKAGE_ORDER}")

    @property
    def outer(self) -> AnchoredBox:
        return self.scheme.box(r(self.k))

    @property
    def inner(self) -> AnchoredBox:
        return self.scheme.box(self.k)

    @property
    def slot_count(self) -> int:
        return 1 << (1 << self.k)

    def slot_corners(self) -> np.ndarray:
        """Corners of all slots, rows indexed by slot number."""
        d = max(self.outer.dim, 1)
        p = _periods(self.inner, d)
        sizes = np.asarray(
            list(self.outer.sizes) + [0] * (d - self.outer.dim), dtype=np.int64
        )
        q = (sizes + 1) // p
        axes = [np.arange(qi, dtype=np.int64) * pi for qi, pi in zip(q, p)]
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel(order="F") for g in grid], axis=1)

    def bit_rows(self, rows) -> np.ndarray:
        """Package bits at the given cells (exponent rows inside F_{r(k)})."""
        rows = _pad_rows(rows, max(self.outer.dim, 1))
        sizes = np.asarray(
            list(self.outer.sizes) + [0] * (rows.shape[1] - self.outer.dim),
            dtype=np.int64,
        )
        if (rows < 0).any() or (rows > sizes).any():
            raise ValueError("cell outside the package box")
        corner = _grid_corner(rows, self.inner)
        j = _slot_index(corner, self.outer, self.inner)
        pos = _cell_index(rows - corner, self.inner)
        nbits = 1 << self.k
        return ((j >> (nbits - 1 - pos)) & 1).astype(np.uint8)

    def bit(self, cell) -> int:
        return int(self.bit_rows(np.asarray([tuple(cell)], dtype=np.int64))[0])

    def to_mapping(self) -> Dict[int, int]:
        """{natural cell value: bit}; needs the box to fit 63 bits."""
        cells = _box_cells_colex(self.outer)
        nats = _cells_to_naturals(cells)
        bits = self.bit_rows(cells)
        return {int(v): int(b) for v, b in zip(nats, bits)}

    def to_block(self) -> Block:
        m = self.to_mapping()
        keys = sorted(m)
        return Block(tuple(keys), tuple(m[v] for v in keys))


def package(k: int, scheme: DoublingScheme = DEFAULT_SCHEME) -> PackageLayout:
    return PackageLayout(k, scheme)


# ---------------------------------------------------------------- chains

@dataclass(frozen=True)
class ChainBlock:
    """Order-k chain over F_{r(k+1)}: previous chain in the anchored
    corner, order-k packages in the other 2**(2**k + 1) - 1 slots."""

    k: int
    scheme: DoublingScheme = DEFAULT_SCHEME

    def __post_init__(self):
        if self.k > MAX_CHAIN_ORDER:
            raise ValueError(f"chain order {self.k} exceeds {MAX_CHAIN_ORDER}")

    @property
    def outer(self) -> AnchoredBox:
        return self.scheme.box(r(self.k + 1))

    def bit_rows(self, rows) -> np.ndarray:
        rows = _pad_rows(rows, max(self.outer.dim, 1))
        sizes = np.asarray(
            list(self.outer.sizes) + [0] * (rows.shape[1] - self.outer.dim),
            dtype=np.int64,
        )
        if (rows < 0).any() or (rows > sizes).any():
            raise ValueError("cell outside the chain box")
        out = np.empty(rows.shape[0], dtype=np.uint8)
        idx = np.arange(rows.shape[0])
        cur = rows
        level = self.k
        while level >= 1 and idx.size:
            tile = self.scheme.box(r(level))
            corner = _grid_corner(cur, tile)
            origin = ~corner.any(axis=1)
            sel = ~origin
            if sel.any():
                pk = package(level, self.scheme)
                out[idx[sel]] = pk.bit_rows(cur[sel] - corner[sel])
            idx = idx[origin]
            cur = cur[origin]
            level -= 1
        if idx.size:
            # order-0 chain: every slot of the F_1-grid is the package "01"
            tile = self.scheme.box(r(0))
            corner = _grid_corner(cur, tile)
            out[idx] = package(0, self.scheme).bit_rows(cur - corner)
        return out

    def bit(self, cell) -> int:
        return int(self.bit_rows(np.asarray([tuple(cell)], dtype=np.int64))[0])

    def cells(self) -> np.ndarray:
        if self.k > MAX_CHAIN_MATERIALIZE:
            raise ValueError(
                f"chain order {self.k} materializes 2**{r(self.k + 1)} bits; "
                f"use bit_rows streaming instead"
            )
        return _box_cells_colex(self.outer)

    def bits(self) -> np.ndarray:
        return self.bit_rows(self.cells())

    def to_mapping(self) -> Dict[int, int]:
        cells = self.cells()
        nats = _cells_to_naturals(cells)
        return {int(v): int(b) for v, b in zip(nats, self.bit_rows(cells))}

    def to_block(self) -> Block:
        m = self.to_mapping()
        keys = sorted(m)
        return Block(tuple(keys), tuple(m[v] for v in keys))


def chain(k: int, scheme: DoublingScheme = DEFAULT_SCHEME) -> ChainBlock:
    return ChainBlock(k, scheme)


# ---------------------------------------------------------------- the limit

def _covering_order_rows(rows: np.ndarray, scheme: DoublingScheme) -> np.ndarray:
    """Least k <= MAX_CHAIN_ORDER with the cell inside F_{r(k+1)}, else -1."""
    n, d = rows.shape
    order = np.full(n, -1, dtype=np.int8)
    for k in range(MAX_CHAIN_ORDER, -1, -1):
        box = scheme.box(r(k + 1))
        sizes = np.zeros(d, dtype=np.int64)
        m = min(box.dim, d)
        sizes[:m] = np.asarray(box.sizes[:m], dtype=np.int64)
        inside = (rows <= sizes[None, :]).all(axis=1)
        order[inside] = k
    return order


def chain_limit_bits(rows, scheme: DoublingScheme = DEFAULT_SCHEME) -> np.ndarray:
    """Bits of the limit sequence at exponent rows.

    Each cell is read from the lowest-order chain whose box contains it;
    cells beyond the largest supported chain box get 0.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    order = _covering_order_rows(rows, scheme)
    out = np.zeros(rows.shape[0], dtype=np.uint8)
    for k in range(0, MAX_CHAIN_ORDER + 1):
        sel = order == k
        if sel.any():
            out[sel] = chain(k, scheme).bit_rows(rows[sel])
    return out


def _exponents(ms: np.ndarray, p: int) -> np.ndarray:
    e = np.zeros(ms.shape[0], dtype=np.int64)
    cur = ms.copy()
    while True:
        mask = cur % p == 0
        if not mask.any():
            return e
        e[mask] += 1
        cur[mask] //= p


def mult_champernowne(scheme: DoublingScheme = DEFAULT_SCHEME, N: int = 1 << 16) -> BitSeq:
    """The multiplicative Champernowne prefix x(1..N).

    x(m) is the limit-chain bit at the exponent vector of m; naturals
    whose exponent vector never enters a supported chain box get 0.
    """
    if not 1 <= N <= MULT_HORIZON:
        raise ValueError(f"N out of range [1, 2**26]: {N}")
    top = scheme.box(r(MAX_CHAIN_ORDER + 1))
    d = top.dim
    ms = np.arange(1, N + 1, dtype=np.int64)
    rows = np.empty((N, d), dtype=np.int64)
    rest = ms.copy()
    for i in range(d):
        p = primes.prime(i + 1)
        e = _exponents(rest, p)
        rows[:, i] = e
        np.floor_divide(rest, np.power(np.int64(p), e), out=rest)
    bits = chain_limit_bits(rows, scheme)
    bits[rest != 1] = 0  # a prime factor beyond every supported box
    return BitSeq(bits, provenance=f"mult_champernowne(N={N})")


def chain_limit_freqs(
    scheme: DoublingScheme, n: int, K: Sequence[int]
) -> Dict[Block, Fraction]:
    """Occurrence frequencies of all blocks over K in the limit sequence,
    counted over the cells of the doubling box F_n (exact)."""
    sup = tuple(sorted(int(h) for h in K))
    if not sup or len(set(sup)) != len(sup):
        raise ValueError("K must be nonempty and duplicate-free")
    if len(sup) > 20:
        raise ValueError("|K| exceeds the 20-bit table guard")
    box = scheme.box(n)
    cells = _box_cells_colex(box)
    pattern = np.zeros(cells.shape[0], dtype=np.int64)
    for j, h in enumerate(sup):
        hv = nat_to_expvec(h)
        d = max(cells.shape[1], len(hv))
        shifted = _pad_rows(cells, d) + np.asarray(list(hv) + [0] * (d - len(hv)), dtype=np.int64)
        bits = chain_limit_bits(shifted, scheme)
        pattern |= bits.astype(np.int64) << j
    counts = np.bincount(pattern, minlength=1 << len(sup))
    total = cells.shape[0]
    return {
        Block.from_pattern_id(sup, pid): Fraction(int(c), total)
        for pid, c in enumerate(counts)
    }


def chain_limit_defect(scheme: DoublingScheme, n: int, K: Sequence[int]) -> Fraction:
    freqs = chain_limit_freqs(scheme, n, K)
    target = Fraction(1, 1 << len(next(iter(freqs)).support))
    return max(abs(f - target) for f in freqs.values())


# ---------------------------------------------------------------- net-normal

def z_impl_contains(scheme: DoublingScheme, k: int, g) -> bool:
    """Certified inner non-invariance region for (F_k, 1/k).

    A cell g belongs when some coordinate i <= dim(F_k) has
    g_i < k * s_i - 1; every box through such a g fails exact
    (F_k, 1/k)-invariance by the slab bound s_i / (g_i + 1) > 1/k.
    """
    if k < 1:
        raise ValueError("order must be >= 1")
    vec = nat_to_expvec(int(g)) if isinstance(g, (int, np.integer)) else tuple(g)
    s = scheme.box(k).sizes
    for i, si in enumerate(s):
        gi = vec[i] if i < len(vec) else 0
        if gi < k * si - 1:
            return True
    return False


class _ExpCache:
    """Exponent columns of 1..N, one prime direction at a time."""

    def __init__(self, N: int):
        self.ms = np.arange(1, N + 1, dtype=np.int64)
        self._cols: Dict[int, np.ndarray] = {}

    def __getitem__(self, i: int) -> np.ndarray:
        if i not in self._cols:
            e = _exponents(self.ms, primes.prime(i + 1))
            self._cols[i] = e.astype(np.int16)
        return self._cols[i]


def _saturated_z_mask(exps: _ExpCache, scheme: DoublingScheme, k: int) -> np.ndarray:
    """Vectorized membership in the F_{r(k+1)}-grid saturation of the
    inner region for (F_k, 1/k)."""
    inner = scheme.box(k)
    outer = scheme.box(r(k + 1))
    mask = np.zeros(exps.ms.shape[0], dtype=bool)
    for i, si in enumerate(inner.sizes):
        thresh = k * si - 1
        if thresh <= 0:
            continue
        e = exps[i]
        period = outer.sizes[i] + 1 if i < outer.dim else 1
        corner = e - e % period
        mask |= corner < thresh
    return mask


def net_normal(scheme: DoublingScheme = DEFAULT_SCHEME, N: int = 1 << 20) -> BitSeq:
    """Mixed-tiling modification: higher-order packages appear only on
    the saturated non-invariance regions, so every box eventually sees
    overwhelmingly many tiles of every order.

    Region of order 0 is F_{r(1)}, order 1 is F_{r(2)}, and order k >= 2
    is the F_{r(k+1)}-grid saturation of the inner region for
    (F_k, 1/k); a cell takes the least covering order and reads the bit
    of that order's package in its F_{r(k)}-grid tile.  Cells beyond
    every region (none below 2**32 under the staircase) fall back to
    order-0 tiles.
    """
    if not 1 <= N <= NET_HORIZON:
        raise ValueError(f"N out of range [1, 2**24]: {N}")
    order, exps = _net_orders(scheme, N)
    bits = np.zeros(N, dtype=np.uint8)
    for k in sorted(set(order.tolist())):
        sel = order == k
        kk = max(k, 0)  # fallback cells use order-0 tiles
        tile = scheme.box(r(kk))
        d = max(tile.dim, 1)
        offs = np.zeros((int(sel.sum()), d), dtype=np.int64)
        for i in range(tile.dim):
            period = tile.sizes[i] + 1
            offs[:, i] = exps[i][sel] % period
        bits[sel] = package(kk, scheme).bit_rows(offs)
    return BitSeq(bits, provenance=f"net_normal(N={N})")


_NET_MAX_ORDER = 6


def _net_orders(scheme: DoublingScheme, N: int):
    """Order map for positions 1..N plus the exponent-column cache."""
    exps = _ExpCache(N)
    ms = exps.ms
    order = np.full(N, -1, dtype=np.int8)
    L0 = scheme.box(r(1)).leading()
    L1 = scheme.box(r(2)).leading()
    order[L1 % ms == 0] = 1
    order[L0 % ms == 0] = 0
    for k in range(2, _NET_MAX_ORDER + 1):
        if not (order == -1).any():
            break
        sat = _saturated_z_mask(exps, scheme, k)
        fresh = (order == -1) & sat
        order[fresh] = k
    return order, exps


def net_normal_order_counts(scheme: DoublingScheme, N: int) -> Dict[int, int]:
    """Tiles of each order whose corner value lies within the horizon."""
    if not 1 <= N <= NET_HORIZON:
        raise ValueError(f"N out of range [1, 2**24]: {N}")
    order, exps = _net_orders(scheme, N)
    out: Dict[int, int] = {}
    for k in sorted(set(order.tolist())):
        sel = order == k
        kk = max(k, 0)
        tile = scheme.box(r(kk))
        is_corner = sel.copy()
        for i in range(tile.dim):
            period = tile.sizes[i] + 1
            is_corner &= exps[i] % period == 0
        out[int(kk)] = out.get(int(kk), 0) + int(is_corner.sum())
    return out


# ---------------------------------------------------------------- figure data

def _ascii_layers(bit_fn, box: AnchoredBox):
    """Rows of bits as strings: columns follow the first coordinate,
    rows list the second coordinate downward from its maximum, layers
    list the third coordinate downward from its maximum."""
    sizes = list(box.sizes) + [0, 0, 0]
    if box.dim > 3:
        raise ValueError("ascii rendering supports up to three dimensions")
    w, h, dep = sizes[0] + 1, sizes[1] + 1, sizes[2] + 1
    layers = []
    for g3 in range(dep - 1, -1, -1):
        rows = []
        for g2 in range(h - 1, -1, -1):
            cells = np.array(
                [[g1, g2, g3][: max(box.dim, 1)] for g1 in range(w)], dtype=np.int64
            )
            bits = bit_fn(cells)
            rows.append("".join(str(int(b)) for b in bits))
        layers.append(rows)
    return layers


def figure1_blocks(scheme: DoublingScheme = DEFAULT_SCHEME) -> Dict[str, list]:
    """The five small worked blocks, rendered as ASCII layers."""
    out = {}
    out["package_0"] = _ascii_layers(package(0, scheme).bit_rows, scheme.box(r(0)))
    out["chain_0"] = _ascii_layers(chain(0, scheme).bit_rows, scheme.box(r(1)))
    out["package_1"] = _ascii_layers(package(1, scheme).bit_rows, scheme.box(r(1)))
    out["chain_1"] = _ascii_layers(chain(1, scheme).bit_rows, scheme.box(r(2)))
    out["package_2"] = _ascii_layers(package(2, scheme).bit_rows, scheme.box(r(2)))
    return out


def _parse_labeled_layers(text: str) -> Dict[str, list]:
    out: Dict[str, list] = {}
    name = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            out[name] = [[]]
        elif line == "--":
            out[name].append([])
        else:
            out[name][-1].append(line)
    return out


def figure1_reference() -> Dict[str, list]:
    """The reference rendering shipped with the package, parsed into the
    same shape figure1_blocks produces."""
    from importlib.resources import files

    text = files("normlab").joinpath("data/figure1_verbatim.txt").read_text()
    return _parse_labeled_layers(text)


def figure1_diff(scheme: DoublingScheme = DEFAULT_SCHEME):
    """Rows where the generated blocks differ from the reference.

    Returns (name, layer, row, generated, reference) tuples; layer and
    row are indices into the rendered layout (top layer and row first).
    """
    ours = figure1_blocks(scheme)
    ref = figure1_reference()
    if set(ours) != set(ref):
        raise ValueError("reference data does not list the expected blocks")
    diffs = []
    for name in ours:
        if len(ours[name]) != len(ref[name]) or any(
            len(a) != len(b) for a, b in zip(ours[name], ref[name])
        ):
            raise ValueError(f"reference shape mismatch for {name}")
        for li, (la, lb) in enumerate(zip(ours[name], ref[name])):
            for ri, (ra, rb) in enumerate(zip(la, lb)):
                if ra != rb:
                    diffs.append((name, li, ri, ra, rb))
    return diffs
