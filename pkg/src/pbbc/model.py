"""Core domain types: particle sets, bounding boxes, and error bounds.

All geometry and quantization arithmetic downstream runs in float64 even
for single-precision sources, so intermediate rounding never erodes the
error-bound guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateRange,
    EmptySelection,
    InvalidBound,
    NonFiniteValue,
)

SUPPORTED_DIMS = (2, 3)
SUPPORTED_PRECISIONS = (32, 64)


class ParticleSet:
    """Immutable collection of N particles in D dimensions.

    Coordinates are held as an (N, D) float64 array regardless of the
    source precision; `precision` records the width of the on-disk
    scalars (32 or 64) so centers and lossless values can round-trip
    bit-exactly.
    """

    __slots__ = ("coords", "precision")

    def __init__(self, coords, dims: int | None = None, precision: int = 64):
        arr = np.asarray(coords, dtype=np.float64)
        if arr.ndim == 1:
            if dims is None:
                raise ValueError("dims required for flat coordinate input")
            if dims not in SUPPORTED_DIMS:
                raise ValueError(f"dims must be one of {SUPPORTED_DIMS}, got {dims}")
            if arr.size % dims != 0:
                raise ValueError(
                    f"flat coordinate length {arr.size} is not a multiple of dims={dims}"
                )
            arr = arr.reshape(-1, dims)
        elif arr.ndim == 2:
            if dims is not None and dims != arr.shape[1]:
                raise ValueError(f"dims={dims} disagrees with array shape {arr.shape}")
        else:
            raise ValueError(f"coordinates must be 1-D or 2-D, got shape {arr.shape}")

        if arr.shape[1] not in SUPPORTED_DIMS:
            raise ValueError(f"dims must be one of {SUPPORTED_DIMS}, got {arr.shape[1]}")
        if arr.shape[0] < 1:
            raise ValueError("a particle set must hold at least one particle")
        if precision not in SUPPORTED_PRECISIONS:
            raise ValueError(f"precision must be one of {SUPPORTED_PRECISIONS}")
        if not np.isfinite(arr).all():
            raise NonFiniteValue("particle coordinates contain NaN or Inf")

        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)
        object.__setattr__(self, "precision", precision)

    def __setattr__(self, name, value):
        raise AttributeError("ParticleSet is immutable")

    @property
    def num_particles(self) -> int:
        return self.coords.shape[0]

    @property
    def dims(self) -> int:
        return self.coords.shape[1]

    def __len__(self) -> int:
        return self.num_particles

    def __repr__(self) -> str:
        return (
            f"ParticleSet(n={self.num_particles}, dims={self.dims}, "
            f"precision={self.precision})"
        )


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box with closed per-dimension intervals."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi):
            raise ValueError("lo and hi must have the same dimensionality")
        for a, b in zip(lo, hi):
            if not a <= b:
                raise ValueError(f"Aabb requires lo <= hi, got {lo} / {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dims(self) -> int:
        return len(self.lo)

    def center(self) -> tuple:
        return tuple(0.5 * (a + b) for a, b in zip(self.lo, self.hi))

    def extents(self) -> tuple:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    def max_extent(self) -> float:
        return max(self.extents())

    def intersects(self, other: "Aabb") -> bool:
        """Closed-interval overlap: a shared face or corner counts."""
        for lo1, hi1, lo2, hi2 in zip(self.lo, self.hi, other.lo, other.hi):
            if hi1 < lo2 or hi2 < lo1:
                return False
        return True

    def contains_point(self, point) -> bool:
        for lo, hi, v in zip(self.lo, self.hi, point):
            if v < lo or v > hi:
                return False
        return True

    def contains_box(self, other: "Aabb") -> bool:
        for lo1, hi1, lo2, hi2 in zip(self.lo, self.hi, other.lo, other.hi):
            if lo2 < lo1 or hi2 > hi1:
                return False
        return True

    @staticmethod
    def hull(a: "Aabb | None", b: "Aabb | None") -> "Aabb | None":
        """Componentwise hull; None operands (hidden boxes) are skipped."""
        if a is None:
            return b
        if b is None:
            return a
        return Aabb(
            tuple(min(x, y) for x, y in zip(a.lo, b.lo)),
            tuple(max(x, y) for x, y in zip(a.hi, b.hi)),
        )


@dataclass(frozen=True)
class ErrorBoundSpec:
    """User-facing error bound: absolute epsilon or range-relative xi."""

    mode: str  # "absolute" | "relative"
    value: float

    def __post_init__(self):
        if self.mode not in ("absolute", "relative"):
            raise ValueError(f"unknown error bound mode {self.mode!r}")
        v = float(self.value)
        if not (math.isfinite(v) and v > 0):
            raise InvalidBound(f"error bound must be a positive finite real, got {v!r}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class CompressorConfig:
    """Tuning knobs for one compression run."""

    error_bound: ErrorBoundSpec
    r_ratio: float = 0.01
    reorder_enabled: bool = True
    emit_permutation_sidecar: bool = True

    def __post_init__(self):
        rr = float(self.r_ratio)
        if not (0.0 < rr <= 1.0):
            raise ValueError(f"r_ratio must lie in (0, 1], got {rr}")
        object.__setattr__(self, "r_ratio", rr)

    def subregion_capacity(self, num_particles: int) -> int:
        """Max particles per leaf: r = max(1, ceil(r_ratio * N))."""
        return max(1, math.ceil(self.r_ratio * num_particles))


def compute_aabb(indices, particles: ParticleSet) -> Aabb:
    """Tight AABB of the referenced particles (componentwise min/max)."""
    idx = np.asarray(indices, dtype=np.intp)
    if idx.size == 0:
        raise EmptySelection("cannot compute an AABB of zero particles")
    pts = particles.coords[idx]
    return Aabb(tuple(pts.min(axis=0)), tuple(pts.max(axis=0)))


def global_aabb(particles: ParticleSet) -> Aabb:
    return Aabb(tuple(particles.coords.min(axis=0)), tuple(particles.coords.max(axis=0)))


def max_range(particles: ParticleSet) -> float:
    """Largest per-dimension coordinate range of the whole dataset."""
    return global_aabb(particles).max_extent()


def resolve_error_bound(spec: ErrorBoundSpec, particles: ParticleSet) -> float:
    """Turn an error-bound spec into an absolute epsilon in dataset units.

    Relative bounds are normalized by the single global maximum range
    across dimensions, so `epsilon = value * max_range`.
    """
    if not (math.isfinite(spec.value) and spec.value > 0):
        raise InvalidBound(f"error bound must be positive, got {spec.value}")
    if spec.mode == "absolute":
        return float(spec.value)
    delta_max = max_range(particles)
    if delta_max <= 0.0:
        raise DegenerateRange(
            "relative error bound undefined: all particles share one position"
        )
    return float(spec.value) * delta_max
