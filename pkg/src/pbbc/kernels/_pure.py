"""Numpy fallback for the bit-level kernels.

Same contracts as the compiled extension:

* bit order is LSB-first within each value, values packed back to back;
* readers (`unpack_bits`, `huffman_decode`) require the input buffer to be
  zero-padded by at least `PAD_BYTES` past the last byte they may touch;
* all functions are deterministic and allocation order independent.

Packing and unpacking expand to one element per bit, so they chunk the
work to bound transient memory on multi-million-particle inputs.
"""

from __future__ import annotations

import numpy as np

PAD_BYTES = 8

# ~8M bits (~1 MiB of payload) per vectorized chunk
_CHUNK_BITS = 1 << 23


def _chunks(nbits_i64: np.ndarray):
    """Split value indices into ranges of roughly _CHUNK_BITS bits each."""
    ends = np.cumsum(nbits_i64)
    total = int(ends[-1]) if ends.size else 0
    ranges = []
    a = 0
    bit_a = 0
    while bit_a < total:
        b = int(np.searchsorted(ends, bit_a + _CHUNK_BITS, side="left")) + 1
        b = min(b, len(ends))
        ranges.append((a, b, bit_a, int(ends[b - 1])))
        a = b
        bit_a = int(ends[b - 1])
    return ranges, total


def pack_bits(values, nbits):
    """Pack values[i] into nbits[i] bits each, LSB-first.

    Returns (uint8 buffer of ceil(total/8) bytes, total bit count).
    Values are masked to their declared widths.
    """
    v = np.ascontiguousarray(values, dtype=np.uint64)
    nb = np.ascontiguousarray(nbits, dtype=np.uint8)
    if v.shape != nb.shape or v.ndim != 1:
        raise ValueError("values and nbits must be 1-D arrays of equal length")
    nb64 = nb.astype(np.int64)
    ranges, total = _chunks(nb64)
    if total == 0:
        return np.zeros(0, dtype=np.uint8), 0

    bits = np.zeros(total, dtype=np.uint8)
    for a, b, bit_a, bit_b in ranges:
        cnb = nb64[a:b]
        n_bits = bit_b - bit_a
        item = np.repeat(np.arange(a, b, dtype=np.int64), cnb)
        starts = np.concatenate(([0], np.cumsum(cnb)[:-1]))
        within = (np.arange(n_bits, dtype=np.int64) - np.repeat(starts, cnb)).astype(
            np.uint64
        )
        bits[bit_a:bit_b] = (v[item] >> within) & np.uint64(1)
    return np.packbits(bits, bitorder="little"), total


def unpack_bits(data, start_bit, nbits):
    """Read len(nbits) values of the given widths starting at start_bit.

    `data` must be padded (see PAD_BYTES). Zero-width entries yield 0.
    """
    d = np.ascontiguousarray(data, dtype=np.uint8)
    nb64 = np.ascontiguousarray(nbits, dtype=np.int64)
    out = np.zeros(nb64.shape[0], dtype=np.uint64)
    ranges, total = _chunks(nb64)
    if total == 0:
        return out

    first_byte = start_bit >> 3
    rem = start_bit & 7
    n_bytes = (rem + total + 7) >> 3
    if first_byte + n_bytes > d.shape[0]:
        raise ValueError("bit stream truncated")
    bits = np.unpackbits(d[first_byte : first_byte + n_bytes], bitorder="little")[
        rem : rem + total
    ]

    for a, b, bit_a, bit_b in ranges:
        cnb = nb64[a:b]
        n_bits = bit_b - bit_a
        starts = np.concatenate(([0], np.cumsum(cnb)[:-1]))
        within = (np.arange(n_bits, dtype=np.int64) - np.repeat(starts, cnb)).astype(
            np.uint64
        )
        contrib = bits[bit_a:bit_b].astype(np.uint64) << within
        nz = cnb > 0
        if nz.any():
            # reduceat cannot express empty segments; restrict to nonzero ones
            out[a:b][nz] = np.add.reduceat(contrib, starts[nz])
    return out


def huffman_decode(data, start_bit, n_symbols, table):
    """Decode n_symbols canonical-Huffman symbols via a 15-bit window table.

    `table` entries are (symbol << 4) | code_length. Returns the decoded
    uint8 array and the number of bits consumed.
    """
    if n_symbols == 0:
        return np.empty(0, dtype=np.uint8), 0
    d = np.ascontiguousarray(data, dtype=np.uint8).astype(np.uint32)
    if d.shape[0] < 3:
        raise ValueError("bit stream truncated")
    # 24-bit little-endian windows at every byte offset: enough for any
    # 15-bit code at any intra-byte shift
    win = (d[:-2] | (d[1:-1] << np.uint32(8)) | (d[2:] << np.uint32(16))).tolist()
    tbl = np.ascontiguousarray(table, dtype=np.uint16).tolist()
    out = np.empty(n_symbols, dtype=np.uint8)
    o = out.__setitem__
    pos = start_bit
    n_win = len(win)
    for i in range(n_symbols):
        byte = pos >> 3
        if byte >= n_win:
            raise ValueError("bit stream truncated")
        e = tbl[(win[byte] >> (pos & 7)) & 0x7FFF]
        ln = e & 15
        if ln == 0:
            raise ValueError("invalid decode table entry")
        o(i, e >> 4)
        pos += ln
    return out, pos - start_bit
