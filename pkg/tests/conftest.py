import numpy as np
import pytest

from pbbc import CompressorConfig, ErrorBoundSpec, ParticleSet, compress, decompress


def run_pipeline(particles, mode="relative", value=1e-3, r_ratio=0.02, reorder=True, backend="zlib", sidecar=True):
    config = CompressorConfig(
        error_bound=ErrorBoundSpec(mode, value),
        r_ratio=r_ratio,
        reorder_enabled=reorder,
        emit_permutation_sidecar=sidecar,
    )
    result = compress(particles, config, backend=backend)
    return result, decompress(result.container)


@pytest.fixture
def clustered_2k():
    rng = np.random.default_rng(11)
    centers = rng.random((5, 3))
    coords = centers[rng.integers(0, 5, 2000)] + rng.normal(0, 0.02, (2000, 3))
    return ParticleSet(coords)


@pytest.fixture
def uniform_1k_2d():
    rng = np.random.default_rng(13)
    return ParticleSet(rng.random((1000, 2)))
