"""Command-line interface: compress, decompress, verify, sweep.

JSON results go to stdout, human-readable logs to stderr. Exit codes:
0 success, 2 usage, 3 I/O, 4 degenerate data, 5 corrupt container,
6 error-bound violation in verify.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import metrics as metrics_mod
from .codec.backend import DEFAULT_BACKEND
from .compressor import compress
from .decompress import decompress, verify
from .errors import (
    CorruptContainer,
    DegenerateRange,
    InvalidBound,
    MissingSidecar,
    NonFiniteValue,
    PbbcError,
    SizeMismatch,
    TruncatedPayload,
)
from .io import read_csv, read_raw, write_csv, write_raw
from .model import CompressorConfig, ErrorBoundSpec, ParticleSet

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4
EXIT_CORRUPT = 5
EXIT_BOUND = 6

# §-recommended default subregion size: aim for ~6000 particles per leaf
DEFAULT_TARGET_LEAF = 6000

SWEEP_COLUMNS = (
    "xi",
    "r_ratio",
    "ratio",
    "bpp",
    "nrmse",
    "psnr",
    "compress_seconds",
    "decompress_seconds",
    "status",
)


def log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("inputs", nargs="+", help="raw binary file(s) or one CSV file")
    p.add_argument("--precision", type=int, choices=(32, 64), default=64)
    p.add_argument("--dims", type=int, choices=(2, 3), default=3)
    p.add_argument("--layout", choices=("planar", "interleaved"), default="planar")


def load_particles(args) -> ParticleSet:
    if len(args.inputs) == 1 and str(args.inputs[0]).endswith(".csv"):
        return read_csv(args.inputs[0], precision=args.precision)
    return read_raw(args.inputs, precision=args.precision, dims=args.dims, layout=args.layout)


def default_r_ratio(num_particles: int) -> float:
    return min(1.0, DEFAULT_TARGET_LEAF / num_particles)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pbbc", description="Error-bounded lossy compressor for particle positions"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("compress", help="compress raw particles into a container")
    _add_input_flags(pc)
    bound = pc.add_mutually_exclusive_group(required=True)
    bound.add_argument("--abs-eps", type=float, help="absolute error bound")
    bound.add_argument("--rel-eps", type=float, help="range-relative error bound")
    pc.add_argument("--r-ratio", type=float, default=None, help="max leaf size as a fraction of N")
    pc.add_argument("--no-reorder", action="store_true", help="disable entropy reordering")
    pc.add_argument("--sidecar", action="store_true", help="embed the index permutation")
    pc.add_argument(
        "--count-sidecar",
        action="store_true",
        help="include the sidecar in ratio/BPP accounting",
    )
    pc.add_argument("--backend", default=os.environ.get("PBBC_BACKEND", DEFAULT_BACKEND))
    pc.add_argument("-o", "--output", required=True)

    pd = sub.add_parser("decompress", help="reconstruct particles from a container")
    pd.add_argument("container")
    pd.add_argument("-o", "--output", nargs="+", required=True)
    pd.add_argument("--layout", choices=("planar", "interleaved"), default="planar")
    pd.add_argument(
        "--out-precision", type=int, choices=(32, 64), default=None, help="defaults to source precision"
    )

    pv = sub.add_parser("verify", help="check a container against its original input")
    _add_input_flags(pv)
    pv.add_argument("container")

    ps = sub.add_parser("sweep", help="rate-distortion sweep over (xi, r-ratio) grids")
    _add_input_flags(ps)
    ps.add_argument("--rel-eps-list", required=True, help="comma-separated xi values")
    ps.add_argument("--r-ratio-list", default=None, help="comma-separated r-ratio values")
    ps.add_argument("--no-reorder", action="store_true")
    ps.add_argument("--backend", default=os.environ.get("PBBC_BACKEND", DEFAULT_BACKEND))
    ps.add_argument("--csv", required=True, help="output CSV path")
    return parser


def _parse_bound(parser, args) -> ErrorBoundSpec:
    try:
        if args.abs_eps is not None:
            return ErrorBoundSpec("absolute", args.abs_eps)
        return ErrorBoundSpec("relative", args.rel_eps)
    except InvalidBound as exc:
        parser.error(str(exc))


def _counted_bytes(container_len: int, sidecar_bytes: int, count_sidecar: bool) -> int:
    return container_len if count_sidecar else container_len - sidecar_bytes


def cmd_compress(parser, args) -> int:
    particles = load_particles(args)
    r_ratio = args.r_ratio if args.r_ratio is not None else default_r_ratio(particles.num_particles)
    if not 0 < r_ratio <= 1:
        parser.error(f"--r-ratio must lie in (0, 1], got {r_ratio}")
    config = CompressorConfig(
        error_bound=_parse_bound(parser, args),
        r_ratio=r_ratio,
        reorder_enabled=not args.no_reorder,
        emit_permutation_sidecar=args.sidecar,
    )
    result = compress(particles, config, backend=args.backend)
    with open(args.output, "wb") as fh:
        fh.write(result.container)

    counted = _counted_bytes(len(result.container), result.sidecar_bytes, args.count_sidecar)
    ratio, bpp = metrics_mod.ratio_and_bpp(
        metrics_mod.original_size_bytes(particles), counted, particles.num_particles
    )
    nrmse_v = psnr_v = max_err = dec_seconds = None
    if args.sidecar:
        dres = decompress(result.container)
        dec_seconds = dres.seconds
        nrmse_v = metrics_mod.nrmse(particles, dres.particles, dres.sidecar, result.delta_max)
        psnr_v = metrics_mod.psnr(nrmse_v)
        max_err = tuple(
            np.abs(particles.coords[dres.sidecar] - dres.particles.coords).max(axis=0)
        )
    report = metrics_mod.MetricsReport(
        nrmse=nrmse_v,
        psnr=psnr_v,
        compression_ratio=ratio,
        bpp=bpp,
        max_abs_error=max_err,
        compress_seconds=result.seconds,
        decompress_seconds=dec_seconds,
    )
    log(
        f"compressed {particles.num_particles} particles: ratio {ratio:.4g}, "
        f"bpp {bpp:.4g}, eps {result.eps:.6g}, {result.trace.n_seq} sequences "
        f"of {result.trace.initial_box_count} boxes in {result.seconds:.3f}s"
    )
    print(report.to_json())
    return EXIT_OK


def cmd_decompress(parser, args) -> int:
    with open(args.container, "rb") as fh:
        data = fh.read()
    dres = decompress(data)
    hdr = dres.header
    log(
        f"container: N={hdr.num_particles} dims={hdr.dims} precision={hdr.precision} "
        f"eps={hdr.eps:.6g} delta_max={hdr.delta_max:.6g} r_ratio={hdr.r_ratio:.6g} "
        f"n_seq={hdr.n_seq} reorder={hdr.reorder_enabled} backend={hdr.backend_id}"
    )
    precision = args.out_precision or hdr.precision
    if len(args.output) == 1 and str(args.output[0]).endswith(".csv"):
        write_csv(dres.particles, args.output[0])
    else:
        write_raw(dres.particles, args.output, layout=args.layout, precision=precision)
    print(
        json.dumps(
            {"num_particles": hdr.num_particles, "decompress_seconds": dres.seconds},
            separators=(",", ":"),
        )
    )
    return EXIT_OK


def cmd_verify(parser, args) -> int:
    particles = load_particles(args)
    with open(args.container, "rb") as fh:
        data = fh.read()
    dres = decompress(data)
    report = verify(particles, dres.particles, dres.sidecar, dres.header.eps)
    payload = {
        "passed": report.passed,
        "max_abs_error": [float(v) for v in report.max_abs_error],
        "bound": report.bound,
        "worst_index": report.worst_index,
        "worst_dim": report.worst_dim,
    }
    print(json.dumps(payload, separators=(",", ":")))
    if not report.passed:
        log(
            f"bound violated: particle {report.worst_index} dim {report.worst_dim} "
            f"err {report.max_abs_error[report.worst_dim]:.6g} > {report.bound:.6g}"
        )
        return EXIT_BOUND
    log(f"verify passed: max error {max(report.max_abs_error):.6g} <= {report.bound:.6g}")
    return EXIT_OK


def _parse_list(parser, text: str, flag: str) -> list:
    try:
        values = [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        parser.error(f"{flag} must be a comma-separated list of reals")
    if not values:
        parser.error(f"{flag} needs at least one value")
    return values


def cmd_sweep(parser, args) -> int:
    particles = load_particles(args)
    xis = _parse_list(parser, args.rel_eps_list, "--rel-eps-list")
    if args.r_ratio_list is None:
        ratios = [default_r_ratio(particles.num_particles)]
    else:
        ratios = _parse_list(parser, args.r_ratio_list, "--r-ratio-list")

    rows = []
    original_bytes = metrics_mod.original_size_bytes(particles)
    for xi in xis:
        for rr in ratios:
            row = {"xi": xi, "r_ratio": rr, "status": "ok"}
            try:
                config = CompressorConfig(
                    error_bound=ErrorBoundSpec("relative", xi),
                    r_ratio=rr,
                    reorder_enabled=not args.no_reorder,
                    emit_permutation_sidecar=True,
                )
                result = compress(particles, config, backend=args.backend)
                dres = decompress(result.container)
                counted = _counted_bytes(len(result.container), result.sidecar_bytes, False)
                ratio, bpp = metrics_mod.ratio_and_bpp(
                    original_bytes, counted, particles.num_particles
                )
                nrmse_v = metrics_mod.nrmse(
                    particles, dres.particles, dres.sidecar, result.delta_max
                )
                row.update(
                    ratio=ratio,
                    bpp=bpp,
                    nrmse=nrmse_v,
                    psnr=metrics_mod.psnr(nrmse_v),
                    compress_seconds=result.seconds,
                    decompress_seconds=dres.seconds,
                )
            except PbbcError as exc:
                row["status"] = f"failed: {type(exc).__name__}"
                log(f"sweep point xi={xi} r_ratio={rr} failed: {exc}")
            rows.append(row)
            print(json.dumps(row, separators=(",", ":")))

    with open(args.csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([row.get(c, "") for c in SWEEP_COLUMNS])
    log(f"sweep wrote {len(rows)} rows to {args.csv}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "compress": cmd_compress,
        "decompress": cmd_decompress,
        "verify": cmd_verify,
        "sweep": cmd_sweep,
    }
    try:
        return handlers[args.command](parser, args)
    except (CorruptContainer, TruncatedPayload) as exc:
        log(f"corrupt container: {exc}")
        return EXIT_CORRUPT
    except (DegenerateRange, NonFiniteValue) as exc:
        log(f"degenerate data: {exc}")
        return EXIT_DEGENERATE
    except MissingSidecar as exc:
        log(f"cannot verify: {exc}")
        return EXIT_CORRUPT
    except (SizeMismatch, OSError) as exc:
        log(f"I/O error: {exc}")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
