"""Bit-exact sequence layout, reordering strategies, and storage accounting.

Per-sequence record, in stream order:

  center          D * M bits   source-precision coordinate bit patterns
  width fields    D * 6 bits   natural dimension order; 63 = lossless dim
  particle count  32 bits      includes the center
  codes           (count - 1) rows; per row one field per dimension in the
                  header's dimension order: m bits for a quantized dim,
                  M raw bits for a lossless dim, nothing for a 0-width dim

The count field precedes the codes so a sequential parser knows how many
code rows to read; its 32-bit cost is identical to a trailing end mark.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CorruptContainer, TruncatedPayload, WidthOverflow
from ..reducer import LOSSLESS_WIDTH, Sequence, bits_to_float, float_to_bits
from .. import kernels

WIDTH_FIELD_BITS = 6
WIDTH_SENTINEL = 63
MAX_WIDTH_FIELD = 62
COUNT_FIELD_BITS = 32


@dataclass(frozen=True)
class LayoutAccounting:
    """Exact bit-size breakdown of the serialized (pre-entropy) layout."""

    centers_bits: int
    width_fields_bits: int
    codes_bits: int
    terminator_bits: int

    @property
    def total_bits(self) -> int:
        return (
            self.centers_bits
            + self.width_fields_bits
            + self.codes_bits
            + self.terminator_bits
        )


def storage_cost(width: int, precision: int) -> int:
    """Stored bits per particle for one dimension's width field."""
    return precision if width == LOSSLESS_WIDTH else int(width)


def accounting_for(sequences, precision: int, dims: int) -> LayoutAccounting:
    """Four-component storage cost computed from sequence metadata alone."""
    n_seq = len(sequences)
    codes_bits = 0
    for seq in sequences:
        row = sum(storage_cost(int(m), precision) for m in seq.widths)
        codes_bits += row * (seq.particle_count - 1)
    return LayoutAccounting(
        centers_bits=dims * precision * n_seq,
        width_fields_bits=WIDTH_FIELD_BITS * dims * n_seq,
        codes_bits=codes_bits,
        terminator_bits=COUNT_FIELD_BITS * n_seq,
    )


def _width_field(width: int) -> int:
    if width == LOSSLESS_WIDTH:
        return WIDTH_SENTINEL
    if not 0 <= width <= MAX_WIDTH_FIELD:
        raise WidthOverflow(f"width {width} does not fit a 6-bit field")
    return int(width)


def serialize_layout(sequences, precision: int, dims: int, dim_order):
    """Pack sequences into the layout bit stream.

    Returns (uint8 buffer, total_bits, LayoutAccounting); total_bits always
    equals the accounting sum.
    """
    dim_order = tuple(int(d) for d in dim_order)
    if sorted(dim_order) != list(range(dims)):
        raise ValueError(f"dim_order must permute 0..{dims - 1}, got {dim_order}")

    value_parts = []
    nbit_parts = []
    head_bits = np.empty(2 * dims + 1, dtype=np.uint8)
    head_bits[:dims] = precision
    head_bits[dims : 2 * dims] = WIDTH_FIELD_BITS
    head_bits[2 * dims] = COUNT_FIELD_BITS

    for seq in sequences:
        if seq.particle_count >= 1 << COUNT_FIELD_BITS:
            raise WidthOverflow("sequence particle count exceeds the 32-bit field")
        head_vals = np.empty(2 * dims + 1, dtype=np.uint64)
        head_vals[:dims] = float_to_bits(seq.center, precision)
        head_vals[dims : 2 * dims] = [_width_field(int(m)) for m in seq.widths]
        head_vals[2 * dims] = seq.particle_count
        value_parts.append(head_vals)
        nbit_parts.append(head_bits)

        n_coded = seq.particle_count - 1
        if n_coded:
            row_bits = np.array(
                [storage_cost(int(seq.widths[d]), precision) for d in dim_order],
                dtype=np.uint8,
            )
            value_parts.append(np.ascontiguousarray(seq.codes[:, dim_order]).reshape(-1))
            nbit_parts.append(np.tile(row_bits, n_coded))

    if value_parts:
        values = np.concatenate(value_parts)
        nbits = np.concatenate(nbit_parts)
    else:
        values = np.empty(0, dtype=np.uint64)
        nbits = np.empty(0, dtype=np.uint8)
    buf, total_bits = kernels.pack_bits(values, nbits)
    acct = accounting_for(sequences, precision, dims)
    assert total_bits == acct.total_bits
    return buf, total_bits, acct


def parse_layout(data, total_bits: int, n_seq: int, num_particles: int, precision: int, dims: int, dim_order):
    """Parse the layout bit stream back into sequences.

    `data` must be padded by kernels.PAD_BYTES. origin_ids are unknown on
    this side and set to None.
    """
    dim_order = tuple(int(d) for d in dim_order)
    padded = np.concatenate(
        [np.ascontiguousarray(data, dtype=np.uint8), np.zeros(kernels.PAD_BYTES, dtype=np.uint8)]
    )

    head_bits = np.empty(2 * dims + 1, dtype=np.uint8)
    head_bits[:dims] = precision
    head_bits[dims : 2 * dims] = WIDTH_FIELD_BITS
    head_bits[2 * dims] = COUNT_FIELD_BITS
    head_total = int(head_bits.sum())

    # pass 1: walk the record headers, collecting widths/counts and
    # computing where each code block lives
    metas = []
    nbit_parts = []
    pos = 0
    for _ in range(n_seq):
        if pos + head_total > total_bits:
            raise TruncatedPayload("layout ends inside a sequence header")
        head = kernels.unpack_bits(padded, pos, head_bits)
        widths = np.empty(dims, dtype=np.int64)
        for d in range(dims):
            w = int(head[dims + d])
            if w == WIDTH_SENTINEL:
                widths[d] = LOSSLESS_WIDTH
            elif w <= MAX_WIDTH_FIELD:
                widths[d] = w
            else:
                raise CorruptContainer(f"invalid width field value {w}")
        count = int(head[2 * dims])
        if count < 1:
            raise CorruptContainer("sequence particle count must be >= 1")
        row_bits = np.array(
            [storage_cost(int(widths[d]), precision) for d in dim_order], dtype=np.uint8
        )
        pos += head_total
        code_bits = int(row_bits.sum()) * (count - 1)
        metas.append((head[:dims], widths, count))
        nbit_parts.append(np.tile(row_bits, count - 1))
        pos += code_bits
        if pos > total_bits:
            raise TruncatedPayload("layout ends inside a code block")
    if pos != total_bits:
        raise CorruptContainer(
            f"layout carries {total_bits} bits but records account for {pos}"
        )
    total_count = sum(m[2] for m in metas)
    if total_count != num_particles:
        raise CorruptContainer(
            f"sequences hold {total_count} particles, header says {num_particles}"
        )

    # pass 2: unpack each code block at the offsets found in pass 1
    sequences = []
    if metas:
        offsets = []
        pos = 0
        for (_, widths, count), nb in zip(metas, nbit_parts):
            pos += head_total
            offsets.append(pos)
            pos += int(nb.sum())
        for (center_bits, widths, count), nb, off in zip(metas, nbit_parts, offsets):
            vals = kernels.unpack_bits(padded, off, nb) if count > 1 else np.empty(0, np.uint64)
            mat = vals.reshape(count - 1, dims) if count > 1 else np.zeros((0, dims), np.uint64)
            codes = np.zeros((count - 1, dims), dtype=np.uint64)
            codes[:, list(dim_order)] = mat
            sequences.append(
                Sequence(
                    center_id=-1,
                    center=bits_to_float(center_bits, precision),
                    widths=widths,
                    codes=codes,
                    origin_ids=None,
                )
            )
    return sequences


def reorder_sequences(sequences, precision: int):
    """Ascending by per-particle width sum; stable for equal keys."""
    return sorted(sequences, key=lambda seq: seq.width_sum_key(precision))


def dimension_entropy_order(sequences) -> tuple:
    """Dimensions ordered by ascending Shannon entropy of their pooled
    quantization codes; ties resolve to the lower dimension index."""
    if not sequences:
        return ()
    dims = sequences[0].dims
    entropies = []
    for d in range(dims):
        pools = [
            seq.codes[:, d]
            for seq in sequences
            if seq.widths[d] >= 1 and seq.particle_count > 1
        ]
        if not pools:
            entropies.append(0.0)
            continue
        values = np.concatenate(pools)
        _, counts = np.unique(values, return_counts=True)
        p = counts / counts.sum()
        entropies.append(float(-(p * np.log2(p)).sum()))
    return tuple(sorted(range(dims), key=lambda d: (entropies[d], d)))


def rindex_value(codes_row, widths, dim_order) -> int:
    """Concatenated code bit-string as a big integer, first dimension in
    dim_order most significant. Lossless and 0-width dims contribute no bits."""
    value = 0
    for d in dim_order:
        m = int(widths[d])
        if m >= 1:
            value = (value << m) | int(codes_row[d])
    return value


def rindex_sort(seq: Sequence, dim_order) -> Sequence:
    """Sort a sequence's coded particles ascending by R-index (stable)."""
    if seq.particle_count <= 2:
        return seq
    keys = [seq.codes[:, d] for d in dim_order if seq.widths[d] >= 1]
    if not keys:
        return seq
    # np.lexsort treats the last key as primary; R-index order puts
    # dim_order[0] first, so feed the keys reversed
    perm = np.lexsort(tuple(reversed(keys)))
    return Sequence(
        center_id=seq.center_id,
        center=seq.center,
        widths=seq.widths,
        codes=seq.codes[perm],
        origin_ids=None if seq.origin_ids is None else seq.origin_ids[perm],
    )
