"""Bit boxes: adaptive per-dimension code widths and linear-scale quantization.

A bit box is centered on one particle of a subregion and sized so every
other particle's coordinate falls inside the predictable range of an
m_d-bit code per dimension: half-range 2*eps*(2^(m_d-1) - 0.5). Codes
index 2*eps-wide intervals relative to the center; reconstruction errs
by at most eps per coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CodeOutOfRange, EmptySelection, InvalidEpsilon, OutOfRange
from .model import Aabb, ParticleSet, compute_aabb

# Width fields are serialized in 6 bits (63 = lossless sentinel), so a
# quantized dimension can never carry more than 62 bits even for M=64.
MAX_CODE_BITS = 62


def lossless_threshold(precision: int) -> int:
    """Widths above this are stored raw at source precision instead."""
    return min(precision, MAX_CODE_BITS)


def predictable_half_range(m: int, eps: float) -> float:
    """Half-length of the range an m-bit code covers: 2*eps*(2^(m-1) - 0.5)."""
    if m <= 0:
        return 0.0
    try:
        p = math.ldexp(1.0, m - 1)
    except OverflowError:
        return math.inf
    return 2.0 * eps * (p - 0.5)


def box_length(m: int, eps: float) -> float:
    """Bit-box side length for an m-bit dimension: 4*eps*(2^(m-1) - 0.5)."""
    if eps <= 0 or not math.isfinite(eps):
        raise InvalidEpsilon(f"epsilon must be positive and finite, got {eps}")
    return 2.0 * predictable_half_range(m, eps)


def _smallest_width(half_range: float, eps: float) -> int:
    """Smallest m >= 0 whose predictable half-range covers half_range."""
    if half_range <= 0.0:
        return 0
    arg = half_range / (2.0 * eps) + 0.5
    lg = math.log2(arg) + 1.0
    m = 1 if lg <= 0 else (1100 if math.isinf(lg) else math.ceil(lg))
    # the closed form can land one off under float rounding; pin the
    # exact minimum against the coverage condition itself
    while m > 0 and predictable_half_range(m - 1, eps) >= half_range:
        m -= 1
    while predictable_half_range(m, eps) < half_range:
        m += 1
    return m


def compute_widths(center, subregion_aabb: Aabb, eps: float) -> np.ndarray:
    """Per-dimension minimal bit widths for a box centered at `center`.

    For each dimension the width is the smallest m with
    2*eps*(2^(m-1) - 0.5) >= max(c_d - lo_d, hi_d - c_d); degenerate
    dimensions get m = 0.
    """
    if not (eps > 0 and math.isfinite(eps)):
        raise InvalidEpsilon(f"epsilon must be positive and finite, got {eps}")
    c = np.asarray(center, dtype=np.float64)
    widths = np.empty(c.shape[0], dtype=np.int64)
    for d in range(c.shape[0]):
        half = max(c[d] - subregion_aabb.lo[d], subregion_aabb.hi[d] - c[d])
        widths[d] = _smallest_width(half, eps)
    return widths


def select_center(indices, particles: ParticleSet) -> int:
    """Particle closest (Euclidean) to the subregion AABB center.

    Ties resolve to the smallest particle id so selection is total.
    """
    idx = np.asarray(indices, dtype=np.intp)
    if idx.size == 0:
        raise EmptySelection("cannot select a center from zero particles")
    pts = particles.coords[idx]
    mid = 0.5 * (pts.min(axis=0) + pts.max(axis=0))
    d2 = ((pts - mid) ** 2).sum(axis=1)
    candidates = idx[d2 == d2.min()]
    return int(candidates.min())


def _round_half_toward_zero(q: float) -> int:
    return int(math.copysign(math.ceil(abs(q) - 0.5), q))


def quantize(v: float, c_d: float, m_d: int, eps: float):
    """Quantize one coordinate against a box center.

    Returns (code, k) where k is the signed interval offset and
    code = k + 2^(m-1) - 1. Guarantees |v - (c_d + 2*eps*k)| <= eps for
    values inside the predictable range (OutOfRange otherwise).
    """
    half = predictable_half_range(m_d, eps)
    if abs(v - c_d) > half:
        raise OutOfRange(
            f"value {v} is outside the predictable range +-{half} around {c_d}"
        )
    if m_d <= 0:
        return 0, 0
    k_max = (1 << (m_d - 1)) - 1
    k = _round_half_toward_zero((v - c_d) / (2.0 * eps))
    k = max(-k_max, min(k_max, k))
    # float rounding of the quotient can, in hairline cases, pick a
    # neighbor interval whose reconstruction misses the eps guarantee;
    # repair by choosing the best nearby offset
    if abs(v - (c_d + 2.0 * eps * k)) > eps:
        k = min(
            (kk for kk in (k - 1, k, k + 1) if -k_max <= kk <= k_max),
            key=lambda kk: (abs(v - (c_d + 2.0 * eps * kk)), abs(kk)),
        )
    return k + k_max, k


def dequantize(code: int, c_d: float, m_d: int, eps: float) -> float:
    """Reconstruct a coordinate from its interval code."""
    if m_d <= 0:
        if code != 0:
            raise CodeOutOfRange(f"width-0 dimension admits only code 0, got {code}")
        return float(c_d)
    if not 0 <= code <= (1 << m_d) - 2:
        raise CodeOutOfRange(f"code {code} outside [0, 2^{m_d} - 2]")
    return float(c_d + 2.0 * eps * (code - ((1 << (m_d - 1)) - 1)))


def quantize_block(values: np.ndarray, c_d: float, m_d: int, eps: float) -> np.ndarray:
    """Vectorized quantize of one dimension's coordinates (m_d <= 62)."""
    if m_d <= 0:
        return np.zeros(values.shape[0], dtype=np.uint64)
    k_max = (1 << (m_d - 1)) - 1
    q = (values - c_d) / (2.0 * eps)
    k = np.sign(q) * np.ceil(np.abs(q) - 0.5)
    # clip in float against an exactly representable bound (2^62) so the
    # int64 cast below cannot overflow, then clip in ints
    np.clip(k, -4.611686018427387904e18, 4.611686018427387904e18, out=k)
    ki = k.astype(np.int64)
    np.clip(ki, -k_max, k_max, out=ki)
    bad = np.abs(values - (c_d + 2.0 * eps * ki)) > eps
    if bad.any():
        # hairline float cases: pick the best in-range neighbor offset
        for i in np.nonzero(bad)[0]:
            base = int(ki[i])
            v = float(values[i])
            ki[i] = min(
                (kk for kk in (base - 1, base, base + 1) if -k_max <= kk <= k_max),
                key=lambda kk: (abs(v - (c_d + 2.0 * eps * kk)), abs(kk)),
            )
    return (ki + k_max).astype(np.uint64)


def dequantize_block(codes: np.ndarray, c_d: float, m_d: int, eps: float) -> np.ndarray:
    """Vectorized inverse of quantize_block."""
    n = codes.shape[0]
    if m_d <= 0:
        return np.full(n, float(c_d), dtype=np.float64)
    if codes.size and int(codes.max()) > (1 << m_d) - 2:
        raise CodeOutOfRange(f"code exceeds alphabet for width {m_d}")
    offset = (1 << (m_d - 1)) - 1
    k = codes.astype(np.int64) - offset
    return c_d + 2.0 * eps * k.astype(np.float64)


@dataclass
class BitBox:
    """Quantization descriptor of one subregion.

    `widths` holds the raw minimal widths from compute_widths; dimensions
    whose width exceeds the lossless threshold are flagged in `lossless`
    and their coordinates bypass quantization. `extent` is the box
    [c - l/2, c + l/2] hulled with the subregion AABB so containment
    survives float rounding of the half-lengths.
    """

    center_particle_id: int
    center: np.ndarray
    widths: np.ndarray
    lossless: np.ndarray
    lengths: np.ndarray
    extent: Aabb

    @property
    def lossless_dims(self) -> frozenset:
        return frozenset(int(d) for d in np.nonzero(self.lossless)[0])

    def width_sum_key(self, precision: int) -> int:
        """Selection key: sum of widths, lossless dimensions count M + 1."""
        total = 0
        for d in range(self.widths.shape[0]):
            total += precision + 1 if self.lossless[d] else int(self.widths[d])
        return total


def build_bitbox(indices, particles: ParticleSet, eps: float) -> BitBox:
    """Construct the bit box of a subregion: center, widths, extent."""
    aabb = compute_aabb(indices, particles)
    cid = select_center(indices, particles)
    center = particles.coords[cid].copy()
    widths = compute_widths(center, aabb, eps)
    lossless = widths > lossless_threshold(particles.precision)
    halves = np.array(
        [predictable_half_range(int(m), eps) for m in widths], dtype=np.float64
    )
    lengths = 2.0 * halves
    extent = Aabb.hull(Aabb(tuple(center - halves), tuple(center + halves)), aabb)
    return BitBox(
        center_particle_id=cid,
        center=center,
        widths=widths,
        lossless=lossless,
        lengths=lengths,
        extent=extent,
    )
