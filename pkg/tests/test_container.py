import numpy as np
import pytest

from pbbc.codec.backend import (
    backend_compress,
    backend_decompress,
    backend_id,
    backend_name,
)
from pbbc.codec.container import (
    ContainerHeader,
    read_container,
    write_container,
)
from pbbc.errors import BackendMismatch, CorruptContainer, TruncatedPayload


class TestBackend:
    def test_store_is_identity(self):
        data = b"\x00\x01\x02payload"
        assert backend_compress(data, backend_id("store")) == data
        assert backend_decompress(data, backend_id("store")) == data

    @pytest.mark.parametrize("name", ["store", "zlib", "lzma"])
    def test_roundtrip_random(self, name):
        rng = np.random.default_rng(3)
        data = rng.integers(0, 256, 10_000, dtype=np.uint8).tobytes()
        bid = backend_id(name)
        assert backend_decompress(backend_compress(data, bid), bid) == data

    @pytest.mark.parametrize("name", ["zlib", "lzma"])
    def test_repeated_pattern_shrinks(self, name):
        data = b"0123456789abcdef" * 512
        bid = backend_id(name)
        assert len(backend_compress(data, bid)) < len(data)

    def test_unknown_backend(self):
        with pytest.raises(BackendMismatch):
            backend_decompress(b"x", 250)
        with pytest.raises(BackendMismatch):
            backend_id("snappy")
        assert backend_name(1) == "zlib"


def sample_container(sidecar=True):
    header = ContainerHeader(
        dims=3,
        precision=64,
        num_particles=42,
        n_seq=5,
        eps=0.0125,
        delta_max=30.0,
        r_ratio=0.01,
        layout_bits=12345,
        backend_id=1,
        reorder_enabled=True,
        sidecar_present=sidecar,
        dim_order=(2, 0, 1),
    )
    lengths = np.zeros(256, dtype=np.uint8)
    lengths[65] = 1
    payload = b"\xAA\xBB\xCC"
    ids = np.arange(42, dtype=np.int64) if sidecar else None
    return write_container(header, lengths, 100, 777, payload, ids), header


class TestContainer:
    def test_header_roundtrip(self):
        blob, header = sample_container()
        parsed = read_container(blob)
        assert parsed.header == header
        assert parsed.n_symbols == 100
        assert parsed.payload_bit_len == 777
        assert parsed.payload == b"\xAA\xBB\xCC"
        assert np.array_equal(parsed.sidecar, np.arange(42))
        assert parsed.sidecar_bytes == 8 + 8 * 42

    def test_no_sidecar(self):
        blob, _ = sample_container(sidecar=False)
        parsed = read_container(blob)
        assert parsed.sidecar is None
        assert parsed.sidecar_bytes == 0

    def test_bad_magic(self):
        blob, _ = sample_container()
        with pytest.raises(CorruptContainer, match="magic"):
            read_container(b"XXXX" + blob[4:])

    def test_bad_version(self):
        blob, _ = sample_container()
        tampered = blob[:4] + b"\x63\x00" + blob[6:]
        with pytest.raises(CorruptContainer):
            read_container(tampered)

    def test_crc_detects_header_flip(self):
        blob, _ = sample_container()
        tampered = bytearray(blob)
        tampered[20] ^= 0xFF  # inside the fixed header
        with pytest.raises(CorruptContainer, match="CRC"):
            read_container(bytes(tampered))

    def test_truncated_sections(self):
        blob, _ = sample_container()
        with pytest.raises(CorruptContainer):
            read_container(blob[:10])
        with pytest.raises(TruncatedPayload):
            read_container(blob[:70])
        with pytest.raises(TruncatedPayload):
            read_container(blob[:-8])

    def test_sidecar_count_must_match(self):
        header = ContainerHeader(
            dims=2,
            precision=32,
            num_particles=5,
            n_seq=1,
            eps=1.0,
            delta_max=2.0,
            r_ratio=1.0,
            layout_bits=0,
            backend_id=0,
            reorder_enabled=False,
            sidecar_present=True,
            dim_order=(0, 1),
        )
        blob = write_container(
            header, np.zeros(256, np.uint8), 0, 0, b"", np.arange(4, dtype=np.int64)
        )
        with pytest.raises(CorruptContainer):
            read_container(blob)
