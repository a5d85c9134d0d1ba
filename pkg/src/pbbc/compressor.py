"""End-to-end compression: reduction, reordering, layout, Huffman, backend,
container assembly."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .codec import (
    ContainerHeader,
    accounting_for,
    backend_compress,
    backend_id,
    dimension_entropy_order,
    huffman_encode,
    reorder_sequences,
    rindex_sort,
    serialize_layout,
    write_container,
)
from .codec.layout import LayoutAccounting
from .kdtree import KdTree
from .model import CompressorConfig, ParticleSet, max_range, resolve_error_bound
from .reducer import ReductionTrace, reduce_tree


@dataclass
class CompressResult:
    container: bytes
    eps: float
    delta_max: float
    trace: ReductionTrace
    accounting: LayoutAccounting
    dim_order: tuple
    sidecar_bytes: int  # on-disk size of the sidecar section
    seconds: float


def build_sidecar(sequences) -> np.ndarray:
    """Origin indices in output order: center first within each sequence."""
    parts = []
    for seq in sequences:
        parts.append(np.array([seq.center_id], dtype=np.int64))
        if seq.origin_ids is not None and len(seq.origin_ids):
            parts.append(seq.origin_ids)
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def compress(
    particles: ParticleSet, config: CompressorConfig, backend: str = "zlib"
) -> CompressResult:
    """Compress a particle set into a PBBC container."""
    t0 = time.perf_counter()
    eps = resolve_error_bound(config.error_bound, particles)
    delta_max = max_range(particles)
    r = config.subregion_capacity(particles.num_particles)
    tree = KdTree.build(particles, r)
    sequences, trace = reduce_tree(tree, particles, eps)

    dims = particles.dims
    precision = particles.precision
    if config.reorder_enabled:
        sequences = reorder_sequences(sequences, precision)
        dim_order = dimension_entropy_order(sequences)
        sequences = [rindex_sort(seq, dim_order) for seq in sequences]
    else:
        dim_order = tuple(range(dims))

    layout, layout_bits, acct = serialize_layout(sequences, precision, dims, dim_order)
    lengths, huff_payload, bit_len = huffman_encode(layout)
    bid = backend_id(backend)
    payload = backend_compress(huff_payload.tobytes(), bid)
    sidecar = build_sidecar(sequences) if config.emit_permutation_sidecar else None

    header = ContainerHeader(
        dims=dims,
        precision=precision,
        num_particles=particles.num_particles,
        n_seq=len(sequences),
        eps=eps,
        delta_max=delta_max,
        r_ratio=config.r_ratio,
        layout_bits=layout_bits,
        backend_id=bid,
        reorder_enabled=config.reorder_enabled,
        sidecar_present=sidecar is not None,
        dim_order=dim_order,
    )
    container = write_container(header, lengths, layout.shape[0], bit_len, payload, sidecar)
    sidecar_bytes = 0 if sidecar is None else 8 + 8 * sidecar.shape[0]
    return CompressResult(
        container=container,
        eps=eps,
        delta_max=delta_max,
        trace=trace,
        accounting=acct,
        dim_order=dim_order,
        sidecar_bytes=sidecar_bytes,
        seconds=time.perf_counter() - t0,
    )
