"""Off-the-shelf lossless backends applied after Huffman coding.

Backend 0 ("store") is the identity and always available, which keeps
round-trip tests independent of any compression library.
"""

from __future__ import annotations

import lzma
import zlib

from ..errors import BackendMismatch, CorruptContainer

STORE, ZLIB, LZMA = 0, 1, 2

_NAMES = {"store": STORE, "zlib": ZLIB, "lzma": LZMA}
_IDS = {v: k for k, v in _NAMES.items()}

DEFAULT_BACKEND = "zlib"


def backend_id(name: str) -> int:
    try:
        return _NAMES[name]
    except KeyError:
        raise BackendMismatch(f"unknown backend {name!r}; choose from {sorted(_NAMES)}")


def backend_name(bid: int) -> str:
    try:
        return _IDS[bid]
    except KeyError:
        raise BackendMismatch(f"unknown backend id {bid}")


def backend_compress(data: bytes, bid: int) -> bytes:
    if bid == STORE:
        return bytes(data)
    if bid == ZLIB:
        return zlib.compress(data, 6)
    if bid == LZMA:
        return lzma.compress(data, preset=1)
    raise BackendMismatch(f"unknown backend id {bid}")


def backend_decompress(data: bytes, bid: int) -> bytes:
    try:
        if bid == STORE:
            return bytes(data)
        if bid == ZLIB:
            return zlib.decompress(data)
        if bid == LZMA:
            return lzma.decompress(data)
    except (zlib.error, lzma.LZMAError) as exc:
        raise CorruptContainer(f"backend payload does not decode: {exc}") from exc
    raise BackendMismatch(f"unknown backend id {bid}")
