"""Bit-level kernels with a compiled fast path and a numpy fallback.

The Cython extension `_bitpack` is preferred when it was built; setting
the environment variable ``PBBC_PURE_PYTHON=1`` before import forces the
fallback. Both expose the same three functions with identical bit-level
semantics (verified by the parity tests):

    pack_bits(values, nbits)            -> (uint8 buffer, total_bits)
    unpack_bits(data, start_bit, nbits) -> uint64 array
    huffman_decode(data, start_bit, n_symbols, table) -> (uint8 array, bits)

Readers require `data` to be zero-padded by PAD_BYTES past the last byte
in use.
"""

import os

from . import _pure

_impl = _pure
if os.environ.get("PBBC_PURE_PYTHON") != "1":
    try:
        from . import _bitpack as _impl  # type: ignore[no-redef]
    except ImportError:
        pass

IMPLEMENTATION = "pure" if _impl is _pure else "compiled"
PAD_BYTES = _pure.PAD_BYTES

pack_bits = _impl.pack_bits
unpack_bits = _impl.unpack_bits
huffman_decode = _impl.huffman_decode


def available_implementations():
    """Name -> module for every importable kernel implementation."""
    impls = {"pure": _pure}
    try:
        from . import _bitpack

        impls["compiled"] = _bitpack
    except ImportError:
        pass
    return impls
