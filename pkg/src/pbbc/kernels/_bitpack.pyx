# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bit-level kernels: variable-width packing and Huffman decode.

Contracts match pbbc.kernels._pure exactly; see that module's docstring.
"""

import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint16_t, uint32_t, uint64_t

PAD_BYTES = 8


def pack_bits(values, nbits):
    cdef const uint64_t[::1] v = np.ascontiguousarray(values, dtype=np.uint64)
    cdef const uint8_t[::1] nb = np.ascontiguousarray(nbits, dtype=np.uint8)
    cdef Py_ssize_t n = v.shape[0]
    if nb.shape[0] != n:
        raise ValueError("values and nbits must be 1-D arrays of equal length")

    cdef uint64_t total = 0
    cdef Py_ssize_t i
    for i in range(n):
        total += nb[i]
    out_arr = np.zeros(int((total + 7) >> 3), dtype=np.uint8)
    if total == 0:
        return out_arr, 0
    cdef uint8_t[::1] buf = out_arr

    cdef uint64_t acc = 0
    cdef uint64_t val
    cdef int fill = 0
    cdef int w, k, j
    cdef Py_ssize_t pos = 0
    for i in range(n):
        w = nb[i]
        if w == 0:
            continue
        val = v[i]
        if w < 64:
            val &= ((<uint64_t>1) << w) - 1
        if fill + w > 64:
            # fill >= 1 here, so 1 <= k <= 63 and both shifts are defined
            k = 64 - fill
            acc |= val << fill
            for j in range(8):
                buf[pos] = <uint8_t>(acc & 0xFF)
                acc >>= 8
                pos += 1
            acc = val >> k
            fill = w - k
        else:
            acc |= val << fill
            fill += w
            while fill >= 8:
                buf[pos] = <uint8_t>(acc & 0xFF)
                acc >>= 8
                pos += 1
                fill -= 8
    if fill > 0:
        buf[pos] = <uint8_t>(acc & 0xFF)
    return out_arr, int(total)


def unpack_bits(data, start_bit, nbits):
    cdef const uint8_t[::1] d = np.ascontiguousarray(data, dtype=np.uint8)
    cdef const uint8_t[::1] nb = np.ascontiguousarray(nbits, dtype=np.uint8)
    cdef Py_ssize_t n = nb.shape[0]
    out_arr = np.zeros(n, dtype=np.uint64)
    if n == 0:
        return out_arr
    cdef uint64_t[::1] o = out_arr

    cdef uint64_t total = 0
    cdef Py_ssize_t i
    for i in range(n):
        total += nb[i]
    cdef uint64_t pos = <uint64_t>start_bit
    if ((pos + total + 7) >> 3) + 1 > <uint64_t>d.shape[0]:
        raise ValueError("bit stream truncated")

    cdef uint64_t val, p
    cdef int w, got, take, sh
    cdef uint8_t b
    for i in range(n):
        w = nb[i]
        if w == 0:
            continue
        val = 0
        got = 0
        p = pos
        while got < w:
            sh = <int>(p & 7)
            b = d[p >> 3] >> sh
            take = 8 - sh
            if take > w - got:
                take = w - got
            val |= (<uint64_t>(b & <uint8_t>((1 << take) - 1))) << got
            got += take
            p += take
        o[i] = val
        pos += w
    return out_arr


def huffman_decode(data, start_bit, n_symbols, table):
    cdef const uint8_t[::1] d = np.ascontiguousarray(data, dtype=np.uint8)
    cdef const uint16_t[::1] t = np.ascontiguousarray(table, dtype=np.uint16)
    cdef Py_ssize_t n = n_symbols
    out_arr = np.empty(n, dtype=np.uint8)
    if n == 0:
        return out_arr, 0
    cdef uint8_t[::1] o = out_arr
    if t.shape[0] != (1 << 15):
        raise ValueError("decode table must have 2^15 entries")

    cdef uint64_t pos = <uint64_t>start_bit
    cdef uint64_t limit = (<uint64_t>d.shape[0]) - 3
    cdef Py_ssize_t i, byte
    cdef uint32_t win
    cdef uint16_t e
    cdef int ln
    for i in range(n):
        byte = <Py_ssize_t>(pos >> 3)
        if <uint64_t>byte > limit:
            raise ValueError("bit stream truncated")
        win = (d[byte] | (<uint32_t>d[byte + 1] << 8) | (<uint32_t>d[byte + 2] << 16)) >> (pos & 7)
        e = t[win & 0x7FFF]
        ln = e & 15
        if ln == 0:
            raise ValueError("invalid decode table entry")
        o[i] = <uint8_t>(e >> 4)
        pos += ln
    return out_arr, int(pos - <uint64_t>start_bit)
