# Copyright 2024 The hyperrate Authors

import pytest

from hyperrate.codec.bitstream import HEADER, Bitstream, BitstreamError
from hyperrate.codec.constants import MAGIC
from hyperrate.codec.data_classes import CodecConfig, ControllerConfig, PredictorConfig
from hyperrate.utils.data_classes import CubeGeometry


@pytest.fixture
def bitstream() -> Bitstream:
    geometry = CubeGeometry(7, 3, 5, bit_depth=12, signed=True, byteorder='big')
    config = CodecConfig(PredictorConfig(bands_used=2, rho_interval=32),
                         ControllerConfig(rate=1.25, q_max=255, tau=7, q_init=9),
                         subset_length=11, adaptation_shift=4)
    return Bitstream(geometry, config, bytes([4, 0, 127]), b'\x00payload')


def test_header_round_trip(bitstream):
    data = bitstream.to_bytes()
    assert data[:4] == MAGIC
    assert len(data) == HEADER.size + 3 + 8 == bitstream.n_bytes

    parsed = Bitstream.from_bytes(data)
    assert parsed.geometry == bitstream.geometry
    assert parsed.config == bitstream.config
    assert parsed.deltas == bitstream.deltas
    assert parsed.payload == bitstream.payload
    assert parsed.steps == [9, 1, 255]
    assert parsed == bitstream


def test_file_round_trip(bitstream, tmp_path):
    path = str(tmp_path / 'cube.hrc')
    bitstream.write(path)
    assert Bitstream.read(path) == bitstream


def test_rates(bitstream):
    n_samples = 7 * 3 * 5
    assert bitstream.payload_rate == pytest.approx(64 / n_samples)
    assert bitstream.container_rate == pytest.approx(8 * bitstream.n_bytes / n_samples)
    assert not bitstream.lossless


def test_bad_magic(bitstream):
    data = bytearray(bitstream.to_bytes())
    data[0:4] = b'HRC0'
    with pytest.raises(BitstreamError):
        Bitstream.from_bytes(bytes(data))


def test_bad_version(bitstream):
    data = bytearray(bitstream.to_bytes())
    data[4] = 99
    with pytest.raises(BitstreamError):
        Bitstream.from_bytes(bytes(data))


@pytest.mark.parametrize('cut', [1, 8, 9, 12])
def test_truncated(bitstream, cut):
    data = bitstream.to_bytes()
    with pytest.raises(BitstreamError):
        Bitstream.from_bytes(data[:-cut])


def test_truncated_header():
    with pytest.raises(BitstreamError):
        Bitstream.from_bytes(MAGIC + b'\x01')


def test_trailing_bytes(bitstream):
    with pytest.raises(BitstreamError):
        Bitstream.from_bytes(bitstream.to_bytes() + b'\x00')


def test_delta_table_mismatch(bitstream):
    with pytest.raises(BitstreamError):
        Bitstream(bitstream.geometry, bitstream.config, bytes(2), b'')


def test_delta_above_q_max(bitstream):
    data = bytearray(bitstream.to_bytes())
    data[HEADER.size + 2] = 200
    with pytest.raises(BitstreamError):
        Bitstream.from_bytes(bytes(data))


def test_invalid_geometry_in_header(bitstream):
    data = bytearray(bitstream.to_bytes())
    data[5:9] = bytes(4)
    with pytest.raises(BitstreamError):
        Bitstream.from_bytes(bytes(data))


def test_header_field_limits():
    # Every accepted setting must survive the fixed-width header.
    config = CodecConfig(PredictorConfig(bands_used=4, weight_resolution=20, rho_init=255,
                                         rho_final=255, rho_interval=65535, register_size=255),
                         ControllerConfig(rate=0.001, q_max=511, tau=65535, q_init=0),
                         subset_length=255, adaptation_shift=10)
    bitstream = Bitstream(CubeGeometry(2, 1, 5, bit_depth=16), config, bytes([255]), b'')
    parsed = Bitstream.from_bytes(bitstream.to_bytes())
    assert parsed.config == config
    assert parsed.config.controller.rate_millibits == 1
