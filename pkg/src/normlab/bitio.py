"""Bit-sequence files.

Two formats: an ASCII form for diffing and golden files (header line
`#FNORM-BITS v1 n=<N> base=1`, then '0'/'1' lines of at most 4096
characters), and a packed form for long runs (8-byte magic
``FNRMPK1\\0``, a little-endian u64 bit count, then the bits packed
least-significant-bit-first within each byte).
"""

import re
import struct
from pathlib import Path
from typing import Union

import numpy as np

from .seq import BitSeq

ASCII_LINE_WIDTH = 4096
PACKED_MAGIC = b"FNRMPK1\x00"
_HEADER_RE = re.compile(r"^#FNORM-BITS v1 n=(\d+) base=1$")


def dump_ascii(x: BitSeq) -> str:
    lines = [f"#FNORM-BITS v1 n={len(x)} base=1"]
    if x.provenance:
        lines.append(f"#provenance {x.provenance}")
    word = x.to01()
    for at in range(0, len(word), ASCII_LINE_WIDTH):
        lines.append(word[at : at + ASCII_LINE_WIDTH])
    return "\n".join(lines) + "\n"


def parse_ascii(text: str) -> BitSeq:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty bit file")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ValueError(f"bad bit-file header: {lines[0]!r}")
    n = int(m.group(1))
    provenance = ""
    chunks = []
    for line in lines[1:]:
        if line.startswith("#provenance "):
            provenance = line[len("#provenance ") :]
            continue
        if line.startswith("#") or not line:
            continue
        if len(line) > ASCII_LINE_WIDTH:
            raise ValueError(
                f"bit line of {len(line)} characters exceeds {ASCII_LINE_WIDTH}"
            )
        if line.strip("01"):
            raise ValueError(f"bit line holds characters besides 0/1")
        chunks.append(line)
    word = "".join(chunks)
    if len(word) != n:
        raise ValueError(f"header declares {n} bits, file holds {len(word)}")
    bits = np.frombuffer(word.encode("ascii"), dtype=np.uint8) - ord("0")
    return BitSeq(bits, provenance=provenance)


def dump_packed(x: BitSeq) -> bytes:
    return PACKED_MAGIC + struct.pack("<Q", len(x)) + x.packed_bytes()


def parse_packed(blob: bytes) -> BitSeq:
    if blob[:8] != PACKED_MAGIC:
        raise ValueError("bad packed magic")
    if len(blob) < 16:
        raise ValueError("packed file truncated before the bit count")
    (n,) = struct.unpack("<Q", blob[8:16])
    need = (n + 7) // 8
    payload = blob[16:]
    if len(payload) != need:
        raise ValueError(
            f"packed payload holds {len(payload)} bytes, {need} expected"
        )
    bits = np.unpackbits(
        np.frombuffer(payload, dtype=np.uint8), count=n, bitorder="little"
    )
    return BitSeq(bits)


def write_bits(path: Union[str, Path], x: BitSeq, fmt: str = "ascii") -> None:
    path = Path(path)
    if fmt == "ascii":
        path.write_text(dump_ascii(x), encoding="ascii")
    elif fmt == "packed":
        path.write_bytes(dump_packed(x))
    else:
        raise ValueError(f"format must be ascii or packed, got {fmt!r}")


def read_bits(path: Union[str, Path]) -> BitSeq:
    """Read either format, sniffing the packed magic first."""
    path = Path(path)
    blob = path.read_bytes()
    if blob[:8] == PACKED_MAGIC:
        x = parse_packed(blob)
        return BitSeq(x.to_array(), provenance=f"file {path.name}")
    try:
        text = blob.decode("ascii")
    except UnicodeDecodeError:
        raise ValueError(f"{path} is neither packed nor ASCII bits")
    x = parse_ascii(text)
    if not x.provenance:
        return BitSeq(x.to_array(), provenance=f"file {path.name}")
    return x
