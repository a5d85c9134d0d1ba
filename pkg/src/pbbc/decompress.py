"""Container parsing and particle reconstruction, plus bound verification.

Decompression inverts the pipeline: backend, Huffman, layout parse,
dequantize. Output particles appear in container sequence order with each
sequence's center first; the original index order is recoverable only
through the optional sidecar.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .bitbox import dequantize_block
from .codec import backend_decompress, huffman_decode, parse_layout, read_container
from .codec.container import ContainerHeader
from .errors import MismatchedCounts, MissingSidecar
from .model import ParticleSet
from .reducer import LOSSLESS_WIDTH, bits_to_float

# multiplicative slack on eps for float arithmetic in reconstruction
DEFAULT_SLACK = 2.0**-40


@dataclass
class DecompressResult:
    particles: ParticleSet
    sidecar: np.ndarray | None
    header: ContainerHeader
    seconds: float


def reconstruct_particles(sequences, header: ContainerHeader) -> ParticleSet:
    """Dequantize parsed sequences into an (N, D) particle set."""
    dims = header.dims
    eps = header.eps
    precision = header.precision
    out = np.empty((header.num_particles, dims), dtype=np.float64)
    row = 0
    for seq in sequences:
        out[row] = seq.center
        n_coded = seq.particle_count - 1
        if n_coded:
            block = out[row + 1 : row + 1 + n_coded]
            for d in range(dims):
                m = int(seq.widths[d])
                if m == LOSSLESS_WIDTH:
                    block[:, d] = bits_to_float(seq.codes[:, d], precision)
                else:
                    block[:, d] = dequantize_block(
                        seq.codes[:, d], float(seq.center[d]), m, eps
                    )
        row += seq.particle_count
    return ParticleSet(out, precision=precision)


def decompress(data: bytes) -> DecompressResult:
    """Parse a PBBC container and reconstruct its particle set."""
    t0 = time.perf_counter()
    parsed = read_container(data)
    header = parsed.header
    huff_bits = backend_decompress(parsed.payload, header.backend_id)
    layout = huffman_decode(
        parsed.huffman_lengths, np.frombuffer(huff_bits, dtype=np.uint8), parsed.payload_bit_len, parsed.n_symbols
    )
    sequences = parse_layout(
        layout,
        header.layout_bits,
        header.n_seq,
        header.num_particles,
        header.precision,
        header.dims,
        header.dim_order,
    )
    particles = reconstruct_particles(sequences, header)
    return DecompressResult(
        particles=particles,
        sidecar=parsed.sidecar,
        header=header,
        seconds=time.perf_counter() - t0,
    )


@dataclass
class VerifyReport:
    max_abs_error: np.ndarray  # per dimension
    worst_index: int  # original particle index of the worst error
    worst_dim: int
    bound: float  # eps * (1 + slack) actually enforced
    passed: bool


def verify(
    original: ParticleSet,
    reconstructed: ParticleSet,
    sidecar: np.ndarray | None,
    eps: float,
    slack: float = DEFAULT_SLACK,
) -> VerifyReport:
    """Pointwise |p - p_hat| <= eps*(1+slack) check via sidecar matching."""
    if sidecar is None:
        raise MissingSidecar("verification requires the permutation sidecar")
    if original.num_particles != reconstructed.num_particles:
        raise MismatchedCounts(
            f"original holds {original.num_particles} particles, "
            f"reconstructed holds {reconstructed.num_particles}"
        )
    if sidecar.shape[0] != original.num_particles:
        raise MismatchedCounts("sidecar length disagrees with the particle count")

    diff = np.abs(original.coords[sidecar] - reconstructed.coords)
    per_dim = diff.max(axis=0)
    flat = int(np.argmax(diff))
    worst_row, worst_dim = divmod(flat, original.dims)
    bound = eps * (1.0 + slack)
    return VerifyReport(
        max_abs_error=per_dim,
        worst_index=int(sidecar[worst_row]),
        worst_dim=int(worst_dim),
        bound=bound,
        passed=bool(per_dim.max() <= bound),
    )
