"""Serialization stack: layout packing, reordering, Huffman, backends,
and the on-disk container."""

from .backend import (
    DEFAULT_BACKEND,
    backend_compress,
    backend_decompress,
    backend_id,
    backend_name,
)
from .container import (
    FLAG_REORDER,
    FLAG_SIDECAR,
    ContainerHeader,
    ParsedContainer,
    read_container,
    write_container,
)
from .huffman import huffman_decode, huffman_encode
from .layout import (
    LayoutAccounting,
    accounting_for,
    dimension_entropy_order,
    parse_layout,
    reorder_sequences,
    rindex_sort,
    rindex_value,
    serialize_layout,
    storage_cost,
)

__all__ = [
    "DEFAULT_BACKEND",
    "backend_compress",
    "backend_decompress",
    "backend_id",
    "backend_name",
    "FLAG_REORDER",
    "FLAG_SIDECAR",
    "ContainerHeader",
    "ParsedContainer",
    "read_container",
    "write_container",
    "huffman_decode",
    "huffman_encode",
    "LayoutAccounting",
    "accounting_for",
    "dimension_entropy_order",
    "parse_layout",
    "reorder_sequences",
    "rindex_sort",
    "rindex_value",
    "serialize_layout",
    "storage_cost",
]
