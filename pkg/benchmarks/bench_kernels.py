#!/usr/bin/env python3
"""Benchmark the compiled bit-packing kernels against the numpy fallback.

Times the three kernel entry points on layout-shaped workloads, then an
end-to-end compress/decompress pass for each implementation. Run after
`pip install -e . --no-build-isolation`:

    python benchmarks/bench_kernels.py [N]
"""

import os
import subprocess
import sys
import time

import numpy as np

from pbbc.codec.huffman import code_lengths, decode_table, encode_table
from pbbc.kernels import PAD_BYTES, available_implementations


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(n_values: int):
    rng = np.random.default_rng(0)
    # mixed widths shaped like a real layout: mostly narrow code fields
    nbits = rng.choice([4, 6, 9, 11, 14, 32, 64], p=[0.2, 0.25, 0.25, 0.15, 0.1, 0.03, 0.02], size=n_values).astype(np.uint8)
    mask = np.where(nbits < 64, (np.uint64(1) << nbits.astype(np.uint64)) - np.uint64(1), np.uint64(2**64 - 1))
    values = rng.integers(0, 2**63, n_values, dtype=np.uint64) & mask

    blob = rng.choice(
        np.arange(256, dtype=np.uint8), p=np.r_[0.4, 0.2, np.full(254, 0.4 / 254)], size=n_values
    )
    lengths = code_lengths(blob)
    enc_vals, enc_bits = encode_table(lengths)
    table = decode_table(lengths)

    impls = available_implementations()
    results = {}
    for name, impl in impls.items():
        buf, total = impl.pack_bits(values, nbits)
        padded = np.concatenate([buf, np.zeros(PAD_BYTES, np.uint8)])
        hbuf, hbits = impl.pack_bits(enc_vals[blob], enc_bits[blob])
        hpadded = np.concatenate([hbuf, np.zeros(PAD_BYTES, np.uint8)])
        results[name] = {
            "pack_bits": timeit(lambda: impl.pack_bits(values, nbits)),
            "unpack_bits": timeit(lambda: impl.unpack_bits(padded, 0, nbits)),
            "huffman_decode": timeit(
                lambda: impl.huffman_decode(hpadded, 0, len(blob), table)
            ),
        }
        out = impl.unpack_bits(padded, 0, nbits)
        assert np.array_equal(out, values), f"{name} kernel mismatch"
    return results


def bench_end_to_end(n_particles: int):
    """Full pipeline timing per implementation, via subprocesses so the
    import-time kernel selection is exercised exactly as users see it."""
    script = (
        "import time, pbbc; from pbbc.kernels import IMPLEMENTATION\n"
        f"ps = pbbc.generate_synthetic('gaussian-clusters', {n_particles}, 3, seed=1)\n"
        "cfg = pbbc.CompressorConfig(pbbc.ErrorBoundSpec('relative', 1e-3), r_ratio=0.01)\n"
        "t0 = time.perf_counter(); res = pbbc.compress(ps, cfg); t1 = time.perf_counter()\n"
        "out = pbbc.decompress(res.container); t2 = time.perf_counter()\n"
        "print(f'{IMPLEMENTATION} compress {t1-t0:.3f}s decompress {t2-t1:.3f}s bytes {len(res.container)}')\n"
    )
    for pure in ("0", "1"):
        env = dict(os.environ, PBBC_PURE_PYTHON=pure)
        subprocess.run([sys.executable, "-c", script], env=env, check=True)


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2_000_000
    print(f"kernel micro-benchmarks on {n:,} values")
    results = bench_kernels(n)
    names = sorted(results)
    ops = ["pack_bits", "unpack_bits", "huffman_decode"]
    width = max(len(op) for op in ops)
    header = " ".join(f"{name:>12}" for name in names)
    print(f"{'op':<{width}} {header}" + ("  speedup" if len(names) == 2 else ""))
    for op in ops:
        row = " ".join(f"{results[name][op] * 1e3:>10.1f}ms" for name in names)
        extra = ""
        if len(names) == 2:
            a, b = (results[n][op] for n in names)
            extra = f"  {max(a, b) / min(a, b):6.1f}x"
        print(f"{op:<{width}} {row}{extra}")

    print("\nend-to-end (100k particles, clusters, xi=1e-3, r=0.01):")
    bench_end_to_end(100_000)


if __name__ == "__main__":
    main()
