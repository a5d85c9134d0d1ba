"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criteria 1, 2, 7, and 9 share a single 200-configuration randomized
campaign (module-scoped fixture) so the whole suite stays inside the
runtime budget. Run with `pytest tests/test_acceptance.py -v -s`.
"""

import math
import os
import time
from dataclasses import dataclass

import numpy as np
import pytest

from pbbc import (
    CompressorConfig,
    ErrorBoundSpec,
    ParticleSet,
    compress,
    decompress,
    generate_synthetic,
    read_raw,
)
from pbbc.bitbox import compute_widths, predictable_half_range
from pbbc.codec.layout import rindex_value, serialize_layout
from pbbc.metrics import nrmse as nrmse_of
from pbbc.metrics import original_size_bytes, psnr as psnr_of, ratio_and_bpp
from pbbc.model import Aabb
from pbbc.reducer import LOSSLESS_WIDTH, Sequence, float_to_bits

SLACK = 1.0 + 2.0**-40

KINDS = ("uniform", "gaussian-clusters", "shell")
SIZES = (100, 1_000, 100_000)
DIMS = (2, 3)
XIS = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2)
R_RATIOS = (1e-3, 1e-2, 1e-1)
N_CONFIGS = 200


def report(criterion: str, passed: bool, detail: str) -> None:
    print(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")


@dataclass
class RunStats:
    kind: str
    n: int
    dims: int
    xi: float
    r_ratio: float
    eps: float
    max_err: float
    count: int
    sidecar_is_permutation: bool
    nrmse: float
    psnr: float
    n_seq: int
    initial_boxes: int


@pytest.fixture(scope="module")
def campaign():
    rng = np.random.default_rng(20240)
    runs = []
    t0 = time.perf_counter()
    for i in range(N_CONFIGS):
        kind = KINDS[rng.integers(len(KINDS))]
        n = SIZES[rng.integers(len(SIZES))]
        dims = DIMS[rng.integers(len(DIMS))]
        xi = XIS[rng.integers(len(XIS))]
        rr = R_RATIOS[rng.integers(len(R_RATIOS))]
        particles = generate_synthetic(kind, n, dims, seed=int(rng.integers(2**31)))
        config = CompressorConfig(
            error_bound=ErrorBoundSpec("relative", xi),
            r_ratio=rr,
            emit_permutation_sidecar=True,
        )
        result = compress(particles, config)
        out = decompress(result.container)
        diff = np.abs(particles.coords[out.sidecar] - out.particles.coords)
        v = nrmse_of(particles, out.particles, out.sidecar, result.delta_max)
        runs.append(
            RunStats(
                kind=kind,
                n=n,
                dims=dims,
                xi=xi,
                r_ratio=rr,
                eps=result.eps,
                max_err=float(diff.max()),
                count=out.particles.num_particles,
                sidecar_is_permutation=bool(
                    np.array_equal(np.sort(out.sidecar), np.arange(n))
                ),
                nrmse=v,
                psnr=psnr_of(v),
                n_seq=result.trace.n_seq,
                initial_boxes=result.trace.initial_box_count,
            )
        )
    elapsed = time.perf_counter() - t0
    print(f"\ncampaign: {N_CONFIGS} configurations in {elapsed:.1f}s")
    assert elapsed < 300, f"campaign exceeded the 5-minute budget ({elapsed:.0f}s)"
    return runs


def test_criterion_1_error_bound(campaign):
    violations = [r for r in campaign if r.max_err > r.eps * SLACK]
    worst = max(r.max_err / r.eps for r in campaign)
    report(
        "criterion 1 (pointwise error bound)",
        not violations,
        f"{len(campaign)} runs, worst err/eps = {worst:.12f}, "
        f"{len(violations)} violations of eps*(1+2^-40)",
    )
    assert not violations


def test_criterion_2_particle_conservation(campaign):
    bad_count = [r for r in campaign if r.count != r.n]
    bad_sidecar = [r for r in campaign if not r.sidecar_is_permutation]
    ok = not bad_count and not bad_sidecar
    report(
        "criterion 2 (particle conservation)",
        ok,
        f"{len(campaign)} runs, {len(bad_count)} count mismatches, "
        f"{len(bad_sidecar)} non-permutation sidecars",
    )
    assert ok


def test_criterion_3_width_oracle_equivalence():
    rng = np.random.default_rng(31337)
    mismatches = 0
    for _ in range(10_000):
        scale = 10.0 ** rng.uniform(-6, 6)
        lo = rng.uniform(-scale, scale)
        hi = lo + rng.uniform(0, 2 * scale)
        c = lo + rng.uniform(0, 1) * (hi - lo)
        eps = (hi - lo + 1e-30) * 10.0 ** rng.uniform(-8, 1)
        got = int(compute_widths([c, c], Aabb((lo, lo), (hi, hi)), eps)[0])
        half = max(c - lo, hi - c)
        m = 0
        while predictable_half_range(m, eps) < half:
            m += 1
        if got != m:
            mismatches += 1
    report(
        "criterion 3 (width formula vs brute force)",
        mismatches == 0,
        f"10000 random triples, {mismatches} mismatches",
    )
    assert mismatches == 0


def test_criterion_4_worked_example_widths():
    widths = compute_widths(
        [14.0, 0.009, 1.1], Aabb((0.0, 0.0, 0.0), (30.0, 0.02, 2.0)), eps=0.005
    )
    ok = widths.tolist() == [12, 2, 8]
    report("criterion 4 (worked-example widths)", ok, f"widths = {widths.tolist()}")
    assert ok


def test_criterion_5_rindex_bitstring():
    codes = np.array([0b01, 0b100111, 0b01010], dtype=np.uint64)
    widths = np.array([2, 6, 5], dtype=np.int64)
    value = rindex_value(codes, widths, (0, 2, 1))
    expected = int("0101010100111", 2)
    report(
        "criterion 5 (R-index fidelity)",
        value == expected,
        f"R-index = {value:013b}, expected 0101010100111",
    )
    assert value == expected


def test_criterion_6_storage_accounting_exact():
    rng = np.random.default_rng(606)
    failures = 0
    for _ in range(100):
        precision = int(rng.choice([32, 64]))
        dims = int(rng.choice([2, 3]))
        n_seq = int(rng.integers(1, 12))
        seqs = []
        for _ in range(n_seq):
            widths = rng.integers(0, 16, dims)
            if rng.random() < 0.25:
                widths[rng.integers(0, dims)] = LOSSLESS_WIDTH
            count = int(rng.integers(1, 30))
            codes = np.zeros((count - 1, dims), dtype=np.uint64)
            for d in range(dims):
                m = int(widths[d])
                if m == LOSSLESS_WIDTH:
                    codes[:, d] = float_to_bits(rng.normal(size=count - 1), precision)
                elif m >= 1:
                    codes[:, d] = rng.integers(0, (1 << m) - 1, count - 1, dtype=np.uint64)
            center = rng.normal(size=dims)
            if precision == 32:
                center = center.astype(np.float32).astype(np.float64)
            seqs.append(
                Sequence(
                    center_id=0,
                    center=center,
                    widths=np.asarray(widths, np.int64),
                    codes=codes,
                    origin_ids=np.arange(count - 1, dtype=np.int64),
                )
            )
        order = tuple(rng.permutation(dims).tolist())
        _, total_bits, _ = serialize_layout(seqs, precision, dims, order)
        # independent four-component formula
        expected = (
            dims * precision * n_seq
            + 6 * dims * n_seq
            + sum(
                sum(precision if int(m) == LOSSLESS_WIDTH else int(m) for m in s.widths)
                * (s.particle_count - 1)
                for s in seqs
            )
            + 32 * n_seq
        )
        if total_bits != expected:
            failures += 1
    report(
        "criterion 6 (storage accounting exactness)",
        failures == 0,
        f"100 random sequence lists, {failures} mismatches (zero tolerance)",
    )
    assert failures == 0


def test_criterion_7_distortion_bound(campaign):
    nrmse_bad = [r for r in campaign if r.nrmse > r.xi]
    psnr_bad = [r for r in campaign if r.psnr < -20.0 * math.log10(r.xi)]
    ok = not nrmse_bad and not psnr_bad
    worst = max(r.nrmse / r.xi for r in campaign)
    report(
        "criterion 7 (NRMSE <= xi, PSNR floor)",
        ok,
        f"{len(campaign)} runs, worst nrmse/xi = {worst:.4f}, "
        f"{len(nrmse_bad)}+{len(psnr_bad)} violations",
    )
    assert ok


def test_criterion_8_reordering_ablation():
    particles = generate_synthetic(
        "gaussian-clusters", 100_000, 3, seed=88, clusters=8, spread=0.01
    )
    xi = 1e-3
    ratios = {}
    for reorder in (True, False):
        config = CompressorConfig(
            error_bound=ErrorBoundSpec("relative", xi),
            r_ratio=0.01,
            reorder_enabled=reorder,
            emit_permutation_sidecar=False,
        )
        result = compress(particles, config)
        ratios[reorder], _ = ratio_and_bpp(
            original_size_bytes(particles), len(result.container), 100_000
        )
    gain = ratios[True] / ratios[False]
    flag = "" if gain >= 1.0 else " [FLAG: reordering hurt]"
    report(
        "criterion 8 (reordering ablation)",
        gain >= 1.0,
        f"ratio with reorder {ratios[True]:.4f}, without {ratios[False]:.4f}, "
        f"ratio-of-ratios {gain:.4f}{flag}",
    )
    assert gain >= 1.0


def test_criterion_9_reduction_trace(campaign):
    bad = [r for r in campaign if r.n_seq > r.initial_boxes]
    strict = [
        r for r in campaign if r.kind == "gaussian-clusters" and r.n_seq < r.initial_boxes
    ]
    # a dedicated clustered fixture guarantees the strict case even if the
    # random draw somehow avoided it
    particles = generate_synthetic("gaussian-clusters", 20_000, 3, seed=99, spread=0.01)
    config = CompressorConfig(
        error_bound=ErrorBoundSpec("relative", 1e-3),
        r_ratio=0.005,
        emit_permutation_sidecar=False,
    )
    result = compress(particles, config)
    strict_fixture = result.trace.n_seq < result.trace.initial_box_count
    ok = not bad and strict_fixture
    report(
        "criterion 9 (reduction trace sanity)",
        ok,
        f"n_seq <= |B| in all {len(campaign)} runs ({len(bad)} violations); "
        f"fixture removed {result.trace.n_seq} of {result.trace.initial_box_count} boxes; "
        f"{len(strict)} campaign runs were strict",
    )
    assert ok


def test_criterion_10_scaling():
    r_ratio = 0.01
    times = {}
    for n in (10_000, 100_000, 1_000_000):
        particles = generate_synthetic("uniform", n, 3, seed=1010)
        config = CompressorConfig(
            error_bound=ErrorBoundSpec("relative", 1e-3),
            r_ratio=r_ratio,
            emit_permutation_sidecar=False,
        )
        reps = 3 if n <= 100_000 else 2
        best = math.inf
        for _ in range(reps):
            t0 = time.perf_counter()
            compress(particles, config)
            best = min(best, time.perf_counter() - t0)
        times[n] = best
    growth_100x = times[1_000_000] / times[10_000]
    growth_10x = times[100_000] / times[10_000]
    limit_100x = 100.0**1.3
    limit_10x = 10.0**1.3
    ok = growth_100x <= limit_100x and growth_10x <= limit_10x
    report(
        "criterion 10 (compression scaling)",
        ok,
        f"t(1e4)={times[10_000]:.3f}s t(1e5)={times[100_000]:.3f}s "
        f"t(1e6)={times[1_000_000]:.3f}s; growth over 100x = {growth_100x:.1f} "
        f"(limit {limit_100x:.0f})",
    )
    assert ok


@pytest.mark.skipif(
    "PBBC_DATASET" not in os.environ,
    reason="set PBBC_DATASET to a raw particle file to run the dataset check",
)
def test_criterion_11_real_dataset():
    paths = os.environ["PBBC_DATASET"].split(",")
    precision = int(os.environ.get("PBBC_DATASET_PRECISION", "32"))
    dims = int(os.environ.get("PBBC_DATASET_DIMS", "3"))
    layout = os.environ.get("PBBC_DATASET_LAYOUT", "planar")
    particles = read_raw(paths, precision=precision, dims=dims, layout=layout)
    xi = 1e-3
    results = {}
    for backend in ("zlib", "store"):
        config = CompressorConfig(
            error_bound=ErrorBoundSpec("relative", xi),
            r_ratio=min(1.0, 6000 / particles.num_particles),
            emit_permutation_sidecar=True,
        )
        result = compress(particles, config, backend=backend)
        out = decompress(result.container)
        v = nrmse_of(particles, out.particles, out.sidecar, result.delta_max)
        ratio, _ = ratio_and_bpp(
            original_size_bytes(particles),
            len(result.container) - result.sidecar_bytes,
            particles.num_particles,
        )
        results[backend] = (ratio, v)
        assert v <= xi
    ok = results["zlib"][0] > results["store"][0]
    report(
        "criterion 11 (real dataset)",
        ok,
        f"N={particles.num_particles}, zlib ratio {results['zlib'][0]:.3f} vs "
        f"store {results['store'][0]:.3f}, nrmse {results['zlib'][1]:.3g} <= {xi}",
    )
    assert ok
