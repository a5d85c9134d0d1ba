"""pbbc: error-bounded lossy compression for particle position data.

Particles are partitioned by a median-split k-d tree, each subregion gets
a bit box sized by the minimal per-dimension code widths, and boxes are
greedily eliminated cheapest-first, quantizing every particle they cover.
The resulting sequences are reordered for entropy, Huffman coded, and
passed through a lossless backend. Every reconstructed coordinate is
within the user's error bound, and every particle is preserved.
"""

from .compressor import CompressResult, compress
from .decompress import DecompressResult, VerifyReport, decompress, verify
from .io import generate_synthetic, read_csv, read_raw, write_csv, write_raw
from .model import (
    Aabb,
    CompressorConfig,
    ErrorBoundSpec,
    ParticleSet,
    compute_aabb,
    resolve_error_bound,
)

__version__ = "0.1.0"

__all__ = [
    "Aabb",
    "CompressResult",
    "CompressorConfig",
    "DecompressResult",
    "ErrorBoundSpec",
    "ParticleSet",
    "VerifyReport",
    "compress",
    "compute_aabb",
    "decompress",
    "generate_synthetic",
    "read_csv",
    "read_raw",
    "resolve_error_bound",
    "verify",
    "write_csv",
    "write_raw",
    "__version__",
]
