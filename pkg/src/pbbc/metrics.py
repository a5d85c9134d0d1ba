"""Rate-distortion evaluation: NRMSE, PSNR, compression ratio, BPP."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRange, MismatchedCounts, MissingSidecar
from .model import ParticleSet

# frozen column order for CSV emission; max_abs_error is the maximum over
# dimensions (the JSON record carries the per-dimension values)
CSV_COLUMNS = (
    "nrmse",
    "psnr",
    "compression_ratio",
    "bpp",
    "max_abs_error",
    "compress_seconds",
    "decompress_seconds",
)


def nrmse(
    original: ParticleSet,
    reconstructed: ParticleSet,
    sidecar: np.ndarray,
    delta_max: float,
) -> float:
    """sqrt(mean over all N*D coordinates of ((p - p_hat)/delta_max)^2).

    Pairs are matched through the sidecar permutation; numpy's pairwise
    summation keeps the reduction deterministic.
    """
    if sidecar is None:
        raise MissingSidecar("NRMSE requires sidecar-matched particle pairs")
    if original.num_particles != reconstructed.num_particles:
        raise MismatchedCounts(
            f"{original.num_particles} original vs "
            f"{reconstructed.num_particles} reconstructed particles"
        )
    if not delta_max > 0:
        raise DegenerateRange("NRMSE undefined for a zero coordinate range")
    diff = (original.coords[sidecar] - reconstructed.coords) / delta_max
    return float(math.sqrt(np.mean(diff * diff)))


def psnr(nrmse_value: float) -> float:
    """-20*log10(NRMSE); infinite for an exact reconstruction."""
    if nrmse_value < 0:
        raise ValueError("NRMSE cannot be negative")
    if nrmse_value == 0:
        return math.inf
    return -20.0 * math.log10(nrmse_value)


def ratio_and_bpp(original_bytes: int, container_bytes: int, num_particles: int):
    """(compression ratio, bits per particle)."""
    if container_bytes <= 0:
        raise ValueError("container size must be positive")
    if num_particles < 1:
        raise ValueError("particle count must be >= 1")
    return original_bytes / container_bytes, 8.0 * container_bytes / num_particles


def original_size_bytes(particles: ParticleSet) -> int:
    """Uncompressed size at source precision."""
    return particles.num_particles * particles.dims * (particles.precision // 8)


@dataclass
class MetricsReport:
    nrmse: float | None
    psnr: float | None
    compression_ratio: float
    bpp: float
    max_abs_error: tuple | None  # per dimension, dataset units
    compress_seconds: float
    decompress_seconds: float | None

    def to_json(self) -> str:
        """Single-line JSON record (infinities serialized as strings)."""

        def scrub(v):
            if isinstance(v, float) and math.isinf(v):
                return "inf"
            return v

        payload = {
            "nrmse": scrub(self.nrmse),
            "psnr": scrub(self.psnr),
            "compression_ratio": self.compression_ratio,
            "bpp": self.bpp,
            "max_abs_error": None
            if self.max_abs_error is None
            else [float(v) for v in self.max_abs_error],
            "compress_seconds": self.compress_seconds,
            "decompress_seconds": self.decompress_seconds,
        }
        return json.dumps(payload, separators=(",", ":"))

    def csv_row(self) -> list:
        worst = None if self.max_abs_error is None else max(self.max_abs_error)
        values = {
            "nrmse": self.nrmse,
            "psnr": self.psnr,
            "compression_ratio": self.compression_ratio,
            "bpp": self.bpp,
            "max_abs_error": worst,
            "compress_seconds": self.compress_seconds,
            "decompress_seconds": self.decompress_seconds,
        }
        return [values[c] for c in CSV_COLUMNS]
