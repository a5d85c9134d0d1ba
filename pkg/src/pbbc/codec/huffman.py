"""Canonical Huffman coding over the bytes of the packed layout.

Code lengths are capped at 15 bits so decoding can run through a single
2^15-entry window table. Codes are emitted LSB-first (bit-reversed
canonical codes), matching the pack_bits bit order.
"""

from __future__ import annotations

import heapq

import numpy as np

from ..errors import CorruptContainer, TruncatedPayload
from .. import kernels

MAX_CODE_LEN = 15
TABLE_SIZE = 1 << MAX_CODE_LEN


def _reverse_bits(value: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def code_lengths(data: np.ndarray) -> np.ndarray:
    """Huffman code lengths (uint8[256]) for the byte histogram of data,
    length-limited to MAX_CODE_LEN."""
    counts = np.bincount(data, minlength=256)
    lengths = np.zeros(256, dtype=np.uint8)
    active = np.nonzero(counts)[0]
    if active.size == 0:
        return lengths
    if active.size == 1:
        lengths[active[0]] = 1
        return lengths

    heap = [(int(counts[s]), int(s), [int(s)]) for s in active]
    heapq.heapify(heap)
    depth = np.zeros(256, dtype=np.int64)
    while len(heap) > 1:
        w1, t1, s1 = heapq.heappop(heap)
        w2, t2, s2 = heapq.heappop(heap)
        for s in s1:
            depth[s] += 1
        for s in s2:
            depth[s] += 1
        heapq.heappush(heap, (w1 + w2, min(t1, t2), s1 + s2))

    if depth.max() > MAX_CODE_LEN:
        depth = _limit_lengths(depth)
    lengths[active] = depth[active]
    return lengths


def _limit_lengths(depth: np.ndarray) -> np.ndarray:
    """Clamp overlong codes and restore Kraft feasibility by lengthening
    the deepest still-short codes (deterministic symbol order)."""
    depth = depth.copy()
    depth[depth > MAX_CODE_LEN] = MAX_CODE_LEN
    active = [s for s in range(256) if depth[s] > 0]

    def kraft():
        return sum(1 << (MAX_CODE_LEN - depth[s]) for s in active)

    budget = 1 << MAX_CODE_LEN
    while kraft() > budget:
        grow = max(
            (s for s in active if depth[s] < MAX_CODE_LEN),
            key=lambda s: (depth[s], -s),
        )
        depth[grow] += 1
    return depth


def _canonical_codes(lengths: np.ndarray):
    """Canonical code per symbol, assigned in (length, symbol) order."""
    order = sorted((s for s in range(256) if lengths[s] > 0), key=lambda s: (lengths[s], s))
    codes = np.zeros(256, dtype=np.uint32)
    next_code = 0
    last_len = 0
    for s in order:
        ln = int(lengths[s])
        next_code <<= ln - last_len
        codes[s] = next_code
        next_code += 1
        last_len = ln
    return codes, order


def _validate_lengths(lengths: np.ndarray) -> None:
    if lengths.shape[0] != 256:
        raise CorruptContainer("Huffman table must carry 256 lengths")
    if (lengths > MAX_CODE_LEN).any():
        raise CorruptContainer("Huffman code length exceeds the format limit")
    active = lengths[lengths > 0]
    if active.size == 0:
        return
    kraft = sum(1 << (MAX_CODE_LEN - int(l)) for l in active)
    if kraft > (1 << MAX_CODE_LEN):
        raise CorruptContainer("Huffman table violates the Kraft inequality")


def encode_table(lengths: np.ndarray):
    """(values, nbits) lookup arrays mapping a byte to its LSB-first code."""
    codes, order = _canonical_codes(lengths)
    values = np.zeros(256, dtype=np.uint64)
    for s in order:
        values[s] = _reverse_bits(int(codes[s]), int(lengths[s]))
    return values, lengths.astype(np.uint8)


def decode_table(lengths: np.ndarray) -> np.ndarray:
    """Window table: entry (symbol << 4) | length for every 15-bit window
    whose low bits spell a code. Unreachable windows keep length 0."""
    _validate_lengths(lengths)
    codes, order = _canonical_codes(lengths)
    table = np.zeros(TABLE_SIZE, dtype=np.uint16)
    for s in order:
        ln = int(lengths[s])
        rev = _reverse_bits(int(codes[s]), ln)
        idx = rev + (np.arange(1 << (MAX_CODE_LEN - ln), dtype=np.int64) << ln)
        table[idx] = (s << 4) | ln
    return table


def huffman_encode(data):
    """Encode bytes; returns (lengths uint8[256], payload uint8 array, bit_len)."""
    arr = np.frombuffer(bytes(data), dtype=np.uint8) if isinstance(data, (bytes, bytearray)) else np.ascontiguousarray(data, dtype=np.uint8)
    lengths = code_lengths(arr)
    values, nbits = encode_table(lengths)
    payload, bit_len = kernels.pack_bits(values[arr], nbits[arr])
    return lengths, payload, bit_len


def huffman_decode(lengths, payload, bit_len: int, n_symbols: int) -> np.ndarray:
    """Inverse of huffman_encode; raises on table/payload corruption."""
    lengths = np.ascontiguousarray(lengths, dtype=np.uint8)
    table = decode_table(lengths)
    if n_symbols == 0:
        return np.empty(0, dtype=np.uint8)
    if int(table.max()) == 0:
        raise CorruptContainer("empty Huffman table with a non-empty payload")
    buf = np.concatenate(
        [np.ascontiguousarray(payload, dtype=np.uint8), np.zeros(kernels.PAD_BYTES, dtype=np.uint8)]
    )
    try:
        out, consumed = kernels.huffman_decode(buf, 0, n_symbols, table)
    except ValueError as exc:
        raise TruncatedPayload(str(exc)) from exc
    if consumed != bit_len:
        raise TruncatedPayload(
            f"payload declared {bit_len} bits but decoding consumed {consumed}"
        )
    return out
