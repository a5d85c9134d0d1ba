"""The PBBC container: a fixed 64-byte header, variable header sections,
the entropy-coded payload, and an optional index-permutation sidecar.

All integers are little-endian; reals are IEEE 754 binary64. Layout:

  [ 0..60)  magic "PBBC", version u16, dims u8, precision u8, flags u8,
            backend u8, reserved u16, N u64, n_seq u64, eps f64,
            delta_max f64, r_ratio f64, layout_bits u64
  [60..64)  CRC32 of bytes [0..60)
  then      dimension order (dims bytes)
            Huffman table: 256 length bytes, n_symbols u64, bit_len u64
            payload: byte length u64, backend-compressed Huffman bits
            sidecar (iff flag): count u64, count u64 origin indices
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from ..errors import CorruptContainer, TruncatedPayload

MAGIC = b"PBBC"
VERSION = 1

FLAG_REORDER = 1
FLAG_SIDECAR = 2

_FIXED = struct.Struct("<4sHBBBBHQQdddQ")
_CRC = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_TABLE_TAIL = struct.Struct("<QQ")

FIXED_HEADER_BYTES = _FIXED.size + _CRC.size
assert FIXED_HEADER_BYTES == 64


@dataclass
class ContainerHeader:
    dims: int
    precision: int
    num_particles: int
    n_seq: int
    eps: float
    delta_max: float
    r_ratio: float
    layout_bits: int
    backend_id: int
    reorder_enabled: bool
    sidecar_present: bool
    dim_order: tuple


@dataclass
class ParsedContainer:
    header: ContainerHeader
    huffman_lengths: np.ndarray  # uint8[256]
    n_symbols: int
    payload_bit_len: int
    payload: bytes  # backend-compressed Huffman bits
    sidecar: np.ndarray | None
    total_bytes: int
    sidecar_bytes: int  # on-disk size of the sidecar section (0 if absent)


def write_container(
    header: ContainerHeader,
    huffman_lengths: np.ndarray,
    n_symbols: int,
    payload_bit_len: int,
    payload: bytes,
    sidecar: np.ndarray | None,
) -> bytes:
    flags = (FLAG_REORDER if header.reorder_enabled else 0) | (
        FLAG_SIDECAR if sidecar is not None else 0
    )
    fixed = _FIXED.pack(
        MAGIC,
        VERSION,
        header.dims,
        header.precision,
        flags,
        header.backend_id,
        0,
        header.num_particles,
        header.n_seq,
        header.eps,
        header.delta_max,
        header.r_ratio,
        header.layout_bits,
    )
    parts = [fixed, _CRC.pack(zlib.crc32(fixed))]
    parts.append(bytes(int(d) for d in header.dim_order))
    lengths = np.ascontiguousarray(huffman_lengths, dtype=np.uint8)
    if lengths.shape[0] != 256:
        raise ValueError("Huffman table must carry 256 lengths")
    parts.append(lengths.tobytes())
    parts.append(_TABLE_TAIL.pack(n_symbols, payload_bit_len))
    parts.append(_U64.pack(len(payload)))
    parts.append(payload)
    if sidecar is not None:
        ids = np.ascontiguousarray(sidecar, dtype="<u8")
        parts.append(_U64.pack(ids.shape[0]))
        parts.append(ids.tobytes())
    return b"".join(parts)


def read_container(data: bytes) -> ParsedContainer:
    if len(data) < FIXED_HEADER_BYTES:
        raise CorruptContainer("container shorter than the fixed header")
    fixed = data[: _FIXED.size]
    (
        magic,
        version,
        dims,
        precision,
        flags,
        backend_id,
        _reserved,
        num_particles,
        n_seq,
        eps,
        delta_max,
        r_ratio,
        layout_bits,
    ) = _FIXED.unpack(fixed)
    if magic != MAGIC:
        raise CorruptContainer(f"bad magic {magic!r}")
    if version != VERSION:
        raise CorruptContainer(f"unsupported container version {version}")
    (crc,) = _CRC.unpack(data[_FIXED.size : FIXED_HEADER_BYTES])
    if crc != zlib.crc32(fixed):
        raise CorruptContainer("fixed header CRC mismatch")
    if dims not in (2, 3) or precision not in (32, 64):
        raise CorruptContainer(f"invalid dims/precision {dims}/{precision}")

    pos = FIXED_HEADER_BYTES

    def take(n: int, what: str) -> bytes:
        nonlocal pos
        if pos + n > len(data):
            raise TruncatedPayload(f"container ends inside {what}")
        chunk = data[pos : pos + n]
        pos += n
        return chunk

    dim_order = tuple(take(dims, "dimension order"))
    if sorted(dim_order) != list(range(dims)):
        raise CorruptContainer(f"dimension order {dim_order} is not a permutation")
    lengths = np.frombuffer(take(256, "Huffman table"), dtype=np.uint8).copy()
    n_symbols, payload_bit_len = _TABLE_TAIL.unpack(take(16, "Huffman table tail"))
    (payload_len,) = _U64.unpack(take(8, "payload length"))
    payload = take(payload_len, "payload")

    sidecar = None
    sidecar_bytes = 0
    if flags & FLAG_SIDECAR:
        start = pos
        (n_ids,) = _U64.unpack(take(8, "sidecar length"))
        if n_ids != num_particles:
            raise CorruptContainer(
                f"sidecar holds {n_ids} entries for {num_particles} particles"
            )
        sidecar = np.frombuffer(take(8 * n_ids, "sidecar"), dtype="<u8").astype(np.int64)
        sidecar_bytes = pos - start

    header = ContainerHeader(
        dims=dims,
        precision=precision,
        num_particles=num_particles,
        n_seq=n_seq,
        eps=eps,
        delta_max=delta_max,
        r_ratio=r_ratio,
        layout_bits=layout_bits,
        backend_id=backend_id,
        reorder_enabled=bool(flags & FLAG_REORDER),
        sidecar_present=bool(flags & FLAG_SIDECAR),
        dim_order=dim_order,
    )
    return ParsedContainer(
        header=header,
        huffman_lengths=lengths,
        n_symbols=n_symbols,
        payload_bit_len=payload_bit_len,
        payload=payload,
        sidecar=sidecar,
        total_bytes=len(data),
        sidecar_bytes=sidecar_bytes,
    )
