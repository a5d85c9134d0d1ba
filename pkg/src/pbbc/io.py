"""Raw dataset ingestion and emission, plus synthetic test generators.

Binary formats are little-endian float32/float64 scalars, either planar
(all x, then all y, then all z; one file per dimension or one concatenated
file) or interleaved (x,y,z,x,y,z,...). CSV with an `x,y[,z]` header is
accepted for small hand-made fixtures.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import SizeMismatch
from .model import ParticleSet

LAYOUTS = ("planar", "interleaved")


def _dtype(precision: int) -> np.dtype:
    if precision == 32:
        return np.dtype("<f4")
    if precision == 64:
        return np.dtype("<f8")
    raise ValueError(f"precision must be 32 or 64, got {precision}")


def _as_paths(paths) -> list:
    if isinstance(paths, (str, Path)):
        return [Path(paths)]
    return [Path(p) for p in paths]


def read_raw(paths, precision: int = 64, dims: int = 3, layout: str = "planar") -> ParticleSet:
    """Load particles from raw little-endian binary files."""
    if layout not in LAYOUTS:
        raise ValueError(f"layout must be one of {LAYOUTS}, got {layout!r}")
    files = _as_paths(paths)
    dt = _dtype(precision)

    if layout == "planar" and len(files) == dims:
        columns = []
        for p in files:
            data = np.fromfile(p, dtype=dt)
            if data.size == 0:
                raise SizeMismatch(f"{p} holds no scalars")
            columns.append(data)
        n = columns[0].size
        for p, col in zip(files, columns):
            if col.size != n:
                raise SizeMismatch(
                    f"{p} holds {col.size} scalars, expected {n} to match the first file"
                )
        coords = np.stack(columns, axis=1)
    elif len(files) == 1:
        data = np.fromfile(files[0], dtype=dt)
        if data.size == 0:
            raise SizeMismatch(f"{files[0]} holds no scalars")
        if data.size % dims != 0:
            raise SizeMismatch(
                f"{files[0]} holds {data.size} scalars, not a multiple of dims={dims}"
            )
        if layout == "planar":
            coords = data.reshape(dims, -1).T
        else:
            coords = data.reshape(-1, dims)
    else:
        raise SizeMismatch(
            f"expected one file or {dims} planar files, got {len(files)}"
        )
    return ParticleSet(np.ascontiguousarray(coords, dtype=np.float64), precision=precision)


def write_raw(particles: ParticleSet, paths, layout: str = "planar", precision: int | None = None):
    """Write particles as raw binary; the inverse of read_raw.

    With one output path, planar data is concatenated per dimension; with
    one path per dimension, each dimension gets its own file.
    """
    if layout not in LAYOUTS:
        raise ValueError(f"layout must be one of {LAYOUTS}, got {layout!r}")
    files = _as_paths(paths)
    precision = particles.precision if precision is None else precision
    dt = _dtype(precision)
    coords = particles.coords.astype(dt)

    if len(files) == particles.dims and layout == "planar":
        for d, p in enumerate(files):
            np.ascontiguousarray(coords[:, d]).tofile(p)
    elif len(files) == 1:
        if layout == "planar":
            np.ascontiguousarray(coords.T).tofile(files[0])
        else:
            np.ascontiguousarray(coords).tofile(files[0])
    else:
        raise SizeMismatch(
            f"expected one file or {particles.dims} planar files, got {len(files)}"
        )
    return [str(p) for p in files]


def read_csv(path, precision: int = 64) -> ParticleSet:
    """CSV with header x,y[,z]; values parsed as float64."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SizeMismatch(f"{path} is empty")
        header = [h.strip().lower() for h in header]
        if header not in (["x", "y"], ["x", "y", "z"]):
            raise SizeMismatch(f"{path} must start with an x,y[,z] header, got {header}")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise SizeMismatch(f"{path} holds no particles")
    return ParticleSet(np.array(rows, dtype=np.float64), precision=precision)


def write_csv(particles: ParticleSet, path):
    names = ["x", "y", "z"][: particles.dims]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in particles.coords:
            writer.writerow([repr(float(v)) for v in row])
    return [str(path)]


def generate_synthetic(
    kind: str,
    num_particles: int,
    dims: int = 3,
    seed: int = 0,
    clusters: int = 8,
    spread: float = 0.05,
) -> ParticleSet:
    """Deterministic synthetic particle sets.

    uniform: iid in [0,1]^D. gaussian-clusters: `clusters` Gaussian blobs
    of width `spread` with centers in [0,1]^D, exercising the
    density-adaptive behavior. shell: points near a hypersphere of radius
    0.4 centered at 0.5 with 5% radial jitter.
    """
    if num_particles < 1:
        raise ValueError("num_particles must be >= 1")
    rng = np.random.default_rng(seed)
    if kind == "uniform":
        coords = rng.random((num_particles, dims))
    elif kind == "gaussian-clusters":
        centers = rng.random((clusters, dims))
        assign = rng.integers(0, clusters, num_particles)
        coords = centers[assign] + rng.normal(0.0, spread, (num_particles, dims))
    elif kind == "shell":
        direction = rng.normal(size=(num_particles, dims))
        norms = np.linalg.norm(direction, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        radius = 0.4 * (1.0 + rng.normal(0.0, 0.05, (num_particles, 1)))
        coords = 0.5 + direction / norms * radius
    else:
        raise ValueError(f"unknown synthetic kind {kind!r}")
    return ParticleSet(coords, precision=64)
