"""Binary sequences, blocks, and the two occurrence counters.

Positions are 1-based.  N(B, x, F) counts the g (identity included)
with h o g inside F and matching bits for every h in the support;
Ntilde(B, x, F) counts g in F with matching bits, with no membership
requirement on h o g, which is why the sequence prefix must cover K o F.
A too-short prefix is always a hard error, never a silent truncation.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Union

import numpy as np

from .folner import (
    ADDITIVE,
    MULTIPLICATIVE,
    FiniteSet,
    FolnerSpec,
    folner_set,
    k_core,
)

_MAX_NAT = (1 << 63) - 1
_BITMAP_CUTOFF = 1 << 26
MAX_BLOCK_SIZE = 20


class PrefixError(ValueError):
    """The sequence prefix does not cover a position the count needs."""


class BitSeq:
    """Immutable packed bit sequence with 1-based access."""

    __slots__ = ("_packed", "length", "provenance")

    def __init__(self, bits, provenance: str = "") -> None:
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        self._packed = np.packbits(arr, bitorder="little")
        self.length = int(arr.size)
        self.provenance = provenance

    @classmethod
    def from_packed(cls, packed: np.ndarray, length: int, provenance: str = "") -> "BitSeq":
        out = cls.__new__(cls)
        out._packed = np.asarray(packed, dtype=np.uint8)
        if out._packed.size * 8 < length:
            raise ValueError("packed buffer shorter than declared length")
        out.length = int(length)
        out.provenance = provenance
        return out

    @classmethod
    def from01(cls, text: str, provenance: str = "") -> "BitSeq":
        arr = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
        if arr.size and arr.max() > 1:
            raise ValueError("text must consist of 0 and 1 only")
        return cls(arr, provenance)

    def __len__(self) -> int:
        return self.length

    def get(self, i: int) -> int:
        if not 1 <= i <= self.length:
            raise PrefixError(f"position {i} outside prefix of length {self.length}")
        return int((self._packed[(i - 1) >> 3] >> ((i - 1) & 7)) & 1)

    def bits_at(self, positions) -> np.ndarray:
        """Bits at the given 1-based positions, vectorized."""
        pos = np.asarray(positions, dtype=np.int64)
        if pos.size:
            lo, hi = int(pos.min()), int(pos.max())
            if lo < 1 or hi > self.length:
                raise PrefixError(
                    f"positions span {lo}..{hi}, prefix has length {self.length}"
                )
        idx = pos - 1
        return ((self._packed[idx >> 3] >> (idx & 7)) & 1).astype(np.uint8)

    def to_array(self) -> np.ndarray:
        return np.unpackbits(self._packed, count=self.length, bitorder="little")

    def to01(self) -> str:
        return "".join("01"[b] for b in self.to_array())

    def packed_bytes(self) -> bytes:
        return self._packed.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitSeq):
            return NotImplemented
        return self.length == other.length and bool(
            np.array_equal(self.to_array(), other.to_array())
        )

    def __repr__(self) -> str:
        tag = f", {self.provenance}" if self.provenance else ""
        return f"BitSeq(<{self.length} bits{tag}>)"


@dataclass(frozen=True)
class Block:
    """0-1 pattern on a finite support of naturals >= 1."""

    support: tuple
    bits: tuple

    def __post_init__(self):
        sup = tuple(int(h) for h in self.support)
        vals = tuple(int(b) for b in self.bits)
        if not sup:
            raise ValueError("block support must be nonempty")
        if len(sup) != len(vals):
            raise ValueError("support and bits lengths differ")
        if any(h < 1 for h in sup):
            raise ValueError("support elements are naturals >= 1")
        if len(set(sup)) != len(sup) or list(sup) != sorted(sup):
            raise ValueError("support must be strictly sorted")
        if any(b not in (0, 1) for b in vals):
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "bits", vals)

    @classmethod
    def from_word(cls, word: str, start: int = 1) -> "Block":
        """Contiguous block: word '101' on support {start, start+1, ...}."""
        return cls(tuple(range(start, start + len(word))), tuple(int(c) for c in word))

    def __len__(self) -> int:
        return len(self.support)

    def pattern_id(self) -> int:
        """Bits packed little-endian in support order."""
        return sum(b << j for j, b in enumerate(self.bits))

    @classmethod
    def from_pattern_id(cls, support: Sequence[int], pid: int) -> "Block":
        sup = tuple(support)
        return cls(sup, tuple((pid >> j) & 1 for j in range(len(sup))))


def all_blocks(support: Sequence[int]):
    """All 2**|K| blocks over the support, by ascending pattern id."""
    sup = tuple(support)
    if len(sup) > MAX_BLOCK_SIZE:
        raise ValueError(f"block support larger than {MAX_BLOCK_SIZE}")
    for pid in range(1 << len(sup)):
        yield Block.from_pattern_id(sup, pid)


def shift_mult(x: BitSeq, n: int) -> BitSeq:
    """Read every n-th term: result(j) = x(j*n), length floor(N/n)."""
    if n < 1:
        raise ValueError(f"step must be >= 1, got {n}")
    if n == 1:
        return x
    m = x.length // n
    pos = np.arange(1, m + 1, dtype=np.int64) * n
    return BitSeq(x.bits_at(pos), provenance=f"shift_mult(n={n}; {x.provenance})")


def _compose_positions(h: int, g: np.ndarray, semigroup: str) -> np.ndarray:
    if semigroup == ADDITIVE:
        return g + np.int64(h)
    return g * np.int64(h)


def _check_prefix(block: Block, F: FiniteSet, x: BitSeq, semigroup: str) -> None:
    if len(F) == 0:
        return
    if F.is_vector_mode:
        raise ValueError(
            "set elements exceed 63 bits; positional counting needs naturals"
        )
    h = max(block.support)
    f = int(F.values[-1])
    need = h + f if semigroup == ADDITIVE else h * f
    if need > _MAX_NAT:
        raise ValueError(f"needed position {h} o {f} overflows 63 bits")
    if need > x.length:
        raise PrefixError(
            f"count needs position {need}, prefix has length {x.length}"
        )


def _core_with_identity(F: FiniteSet, support: Sequence[int], semigroup: str) -> np.ndarray:
    """Candidates g (identity included) with h o g in F for all h."""
    vals = F.values
    if semigroup == MULTIPLICATIVE and len(F) and int(vals[-1]) <= _BITMAP_CUTOFF:
        # bitmap membership: cheap exact divide-and-test
        bitmap = np.zeros(int(vals[-1]) + 1, dtype=bool)
        bitmap[vals] = True
        sup = sorted(support)
        h0 = sup[0]
        cand = vals[vals % h0 == 0] // np.int64(h0)
        for h in sup[1:]:
            prod = cand * np.int64(h)
            cand = cand[(prod <= int(vals[-1])) & bitmap[np.minimum(prod, int(vals[-1]))]]
        # the identity qualifies iff every h is itself in F, and in that
        # case it already arrived as h0/h0 and survived the filters
        return cand
    core = k_core(F, list(support), semigroup, include_identity=True)
    return core.values


def count_N(B: Block, x: BitSeq, F: FiniteSet, semigroup: str) -> int:
    """|{g, identity allowed : h o g in F and x_{h o g} = B(h) for all h}|."""
    _check_prefix(B, x=x, F=F, semigroup=semigroup)
    if len(F) == 0:
        return 0
    g = _core_with_identity(F, B.support, semigroup)
    if g.size == 0:
        return 0
    match = np.ones(g.size, dtype=bool)
    for h, b in zip(B.support, B.bits):
        match &= x.bits_at(_compose_positions(h, g, semigroup)) == b
    return int(match.sum())


def count_N_tilde(B: Block, x: BitSeq, F: FiniteSet, semigroup: str) -> int:
    """|{g in F : x_{h o g} = B(h) for all h}|."""
    _check_prefix(B, x=x, F=F, semigroup=semigroup)
    if len(F) == 0:
        return 0
    g = F.values
    match = np.ones(g.size, dtype=bool)
    for h, b in zip(B.support, B.bits):
        match &= x.bits_at(_compose_positions(h, g, semigroup)) == b
    return int(match.sum())


def block_freqs(x: BitSeq, spec: FolnerSpec, n: int, K: Sequence[int]) -> Dict[Block, Fraction]:
    """Frequencies Ntilde(B, x, F_n)/|F_n| for all blocks over K; sums to 1."""
    sup = tuple(sorted(int(h) for h in K))
    if not sup:
        raise ValueError("K must be nonempty")
    if len(sup) > MAX_BLOCK_SIZE:
        raise ValueError(f"|K| = {len(sup)} exceeds the {MAX_BLOCK_SIZE}-bit table guard")
    if len(set(sup)) != len(sup):
        raise ValueError("K must be duplicate-free")
    F = folner_set(spec, n)
    probe = Block(sup, (0,) * len(sup))
    _check_prefix(probe, x=x, F=F, semigroup=spec.semigroup)
    pattern = np.zeros(len(F), dtype=np.int64)
    for j, h in enumerate(sup):
        bits = x.bits_at(_compose_positions(h, F.values, spec.semigroup))
        pattern |= bits.astype(np.int64) << j
    counts = np.bincount(pattern, minlength=1 << len(sup))
    total = len(F)
    return {
        Block.from_pattern_id(sup, pid): Fraction(int(c), total)
        for pid, c in enumerate(counts)
    }


def normality_defect(x: BitSeq, spec: FolnerSpec, n: int, K: Sequence[int]) -> Fraction:
    """max over blocks B of |freq(B) - 2^-|K||, frequencies as in block_freqs."""
    freqs = block_freqs(x, spec, n, K)
    target = Fraction(1, 1 << len(next(iter(freqs)).support))
    return max(abs(f - target) for f in freqs.values())


def ke_normal(C: Mapping, K: Sequence[int], eps, semigroup: str = MULTIPLICATIVE) -> bool:
    """Is the labeled finite block C (K, eps)-normal?

    C maps each element of a finite set F to a bit.  True iff every
    block B over K has N(B, C, F) within (2^-|K| +- eps) |F|.
    """
    worst = ke_normal_defect(C, K, semigroup)
    return worst <= Fraction(eps)


def ke_normal_defect(C: Mapping, K: Sequence[int], semigroup: str = MULTIPLICATIVE) -> Fraction:
    """max over blocks B of |N(B, C, F) - 2^-|K| |F|| / |F|."""
    sup = tuple(sorted(int(h) for h in K))
    if len(sup) > MAX_BLOCK_SIZE:
        raise ValueError(f"|K| = {len(sup)} exceeds the {MAX_BLOCK_SIZE}-bit table guard")
    items = sorted(C.items())
    if items and not isinstance(items[0][0], (int, np.integer)):
        raise ValueError("C must be keyed by naturals")
    F = FiniteSet([e for e, _ in items])
    if len(F) != len(items):
        raise ValueError("C has duplicate keys")
    if items and sup[-1] * items[-1][0] > _MAX_NAT:
        raise ValueError("needed position overflows 63 bits")
    bits_by_pos = np.asarray([b for _, b in items], dtype=np.uint8)
    if bits_by_pos.size and bits_by_pos.max() > 1:
        raise ValueError("C values must be 0 or 1")
    g = _core_with_identity(F, sup, semigroup)
    vals = F.values
    pattern = np.zeros(g.size, dtype=np.int64)
    for j, h in enumerate(sup):
        pos = _compose_positions(h, g, semigroup)
        idx = np.searchsorted(vals, pos)
        pattern |= bits_by_pos[idx].astype(np.int64) << j
    counts = np.bincount(pattern, minlength=1 << len(sup))
    total = len(F)
    target = Fraction(1, 1 << len(sup))
    return max(abs(Fraction(int(c), total) - target) for c in counts)
