# Copyright 2024 The hyperrate Authors

import math

import numpy as np
import pytest

from hyperrate.codec.bitstream import Bitstream, BitstreamError
from hyperrate.codec.data_classes import CodecConfig, ControllerConfig, PredictorConfig
from hyperrate.codec.pipeline import HyperspectralEncoder, decode, encode
from hyperrate.eval.metrics import metrics
from hyperrate.rate.rate_model import build_lut
from hyperrate.utils.data_classes import CubeGeometry, ImageCube
from hyperrate.utils.synthetic import synthetic_cube


def codec_config(rate: float, q_max: int = 511, bands_used: int = 3, **kwargs) -> CodecConfig:
    return CodecConfig(PredictorConfig(bands_used=bands_used),
                       ControllerConfig(rate=rate, q_max=q_max, **kwargs))


def assert_line_bounds(cube: ImageCube, reconstruction: ImageCube, bitstream: Bitstream):
    error = np.abs(cube.samples.astype(np.int64) - reconstruction.samples)
    line_error = error.max(axis=(1, 2))
    assert np.all(line_error <= np.array(list(bitstream.deltas)))


class TestRoundTrip:

    def test_decoder_matches_encoder(self, small_cube, lut):
        encoder = HyperspectralEncoder(codec_config(1.5), lut)
        bitstream = encoder.encode(small_cube)
        parsed = Bitstream.from_bytes(bitstream.to_bytes())
        assert decode(parsed) == encoder.reconstruction
        assert_line_bounds(small_cube, encoder.reconstruction, bitstream)

    def test_repeated_encodes_identical(self, small_cube, lut):
        first = encode(small_cube, codec_config(1.0), lut).to_bytes()
        second = encode(small_cube, codec_config(1.0), lut).to_bytes()
        assert first == second

    @pytest.mark.parametrize('target', [0.5, 1.0, 2.0, 4.0])
    @pytest.mark.parametrize('seed', range(3))
    def test_near_lossless_bound(self, lut, target, seed):
        rng = np.random.default_rng(seed)
        n_cols, n_rows, n_bands = (int(v) for v in rng.integers(3, 12, 3))
        depth = int(rng.integers(6, 13))
        cube = synthetic_cube(n_rows, n_cols, n_bands, bit_depth=depth, seed=seed,
                              spread=0.2)
        config = codec_config(target, bands_used=min(3, n_bands - 1))
        encoder = HyperspectralEncoder(config, lut)
        bitstream = encoder.encode(cube)
        assert decode(bitstream) == encoder.reconstruction
        assert_line_bounds(cube, encoder.reconstruction, bitstream)
        assert metrics(cube, encoder.reconstruction)[1] <= 255

    @pytest.mark.slow
    @pytest.mark.parametrize('seed', range(50))
    def test_near_lossless_bound_large(self, lut, seed):
        rng = np.random.default_rng(100 + seed)
        n_cols, n_rows = (int(v) for v in rng.integers(8, 65, 2))
        n_bands = int(rng.integers(1, 9))
        cube = synthetic_cube(n_rows, n_cols, n_bands, bit_depth=int(rng.integers(8, 17)),
                              seed=seed, rho=float(rng.uniform(0, 0.95)), spread=0.2)
        for target in (0.5, 1.0, 2.0, 4.0):
            config = codec_config(target, bands_used=min(3, n_bands - 1))
            encoder = HyperspectralEncoder(config, lut)
            bitstream = encoder.encode(cube)
            assert decode(bitstream) == encoder.reconstruction
            assert_line_bounds(cube, encoder.reconstruction, bitstream)
            assert metrics(cube, encoder.reconstruction)[1] <= 255

    def test_random_noise_cube(self, random_cube, lut):
        cube = random_cube(9, 6, 3, bit_depth=16, seed=4, signed=True)
        encoder = HyperspectralEncoder(codec_config(0.5, bands_used=2), lut)
        bitstream = encoder.encode(cube)
        assert decode(bitstream) == encoder.reconstruction
        assert_line_bounds(cube, encoder.reconstruction, bitstream)


class TestSpecialSources:

    def test_lossless_when_budget_exceeds_entropy(self, random_cube, lut):
        cube = random_cube(10, 8, 3, bit_depth=8, seed=1)
        bitstream = encode(cube, codec_config(16.0, bands_used=2), lut)
        assert bitstream.lossless
        snr, mad = metrics(cube, decode(bitstream))
        assert math.isinf(snr) and mad == 0

    def test_constant_cube(self, lut):
        geometry = CubeGeometry(64, 32, 4, bit_depth=12)
        cube = ImageCube(np.full((32, 4, 64), 1000), geometry)
        bitstream = encode(cube, codec_config(2.0), lut)
        assert bitstream.lossless
        assert bitstream.payload_rate < 0.1
        assert decode(bitstream) == cube

    def test_single_pixel(self, lut):
        cube = ImageCube(np.array([[[5]]]), CubeGeometry(1, 1, 1, bit_depth=4))
        bitstream = encode(cube, codec_config(1.0, bands_used=0, q_init=1), lut)
        assert decode(bitstream) == cube

    def test_default_config_few_bands(self, lut):
        for n_bands in (1, 2, 3):
            cube = synthetic_cube(6, 8, n_bands, bit_depth=8, seed=n_bands)
            bitstream = encode(cube, lut=lut)
            assert bitstream.config.predictor.bands_used == n_bands - 1
            assert decode(bitstream).geometry == cube.geometry

    def test_first_line_uses_initial_step(self, small_cube, lut):
        bitstream = encode(small_cube, codec_config(1.0, q_init=7), lut)
        assert bitstream.steps[0] == 7

    def test_first_line_medians(self, lut):
        geometry = CubeGeometry(40, 3, 4, bit_depth=12)
        cube = ImageCube(np.full((3, 4, 40), 1000), geometry)
        encoder = HyperspectralEncoder(codec_config(2.0), lut)
        assert encoder.first_line_medians(cube) == [0, 0, 0, 0]

        noisy = synthetic_cube(3, 40, 4, seed=8)
        medians = encoder.first_line_medians(noisy)
        assert len(medians) == 4 and all(m > 0 for m in medians)

    def test_first_step_derived_from_target(self, lut):
        cube = synthetic_cube(24, 64, 8, seed=5)
        derived = HyperspectralEncoder(codec_config(0.5), lut)
        derived.encode(cube)
        fixed = HyperspectralEncoder(codec_config(0.5, q_init=1), lut)
        fixed.encode(cube)
        assert derived.trace[0].q > 1
        assert fixed.trace[0].q == 1
        # Q = 1 spends the budget of many lines on the first one.
        assert derived.trace[0].actual_bits < 0.3 * fixed.trace[0].actual_bits
        assert sum(r.lookups for r in derived.trace) == derived.lookups


class TestRateControl:

    def test_rate_accuracy_small(self, lut):
        cube = synthetic_cube(48, 64, 8, seed=5)
        bitstream = encode(cube, codec_config(2.0), lut)
        assert bitstream.payload_rate == pytest.approx(2.0, rel=0.05)

    @pytest.mark.slow
    @pytest.mark.parametrize('target, tolerance', [(1.0, 0.02), (2.0, 0.02), (3.0, 0.02),
                                                   (0.5, 0.05)])
    def test_rate_accuracy(self, full_lut, target, tolerance):
        cube = synthetic_cube()
        bitstream = encode(cube, codec_config(target), full_lut)
        assert bitstream.payload_rate == pytest.approx(target, rel=tolerance)

    def test_trace(self, small_cube, lut):
        encoder = HyperspectralEncoder(codec_config(1.0), lut)
        bitstream = encoder.encode(small_cube)
        assert [r.line for r in encoder.trace] == list(range(small_cube.geometry.n_rows))
        assert [r.q for r in encoder.trace] == bitstream.steps
        assert sum(r.lookups for r in encoder.trace) == encoder.lookups
        assert encoder.trace[-1].lookups == 0
        assert sum(r.actual_bits for r in encoder.trace) <= 8 * len(bitstream.payload)
        assert 0 <= encoder.controller_time < encoder.total_time

    def test_lookup_economy(self, lut):
        cube = synthetic_cube(16, 256, 8, seed=9)
        encoder = HyperspectralEncoder(codec_config(2.0), lut)
        encoder.encode(cube)
        settled = encoder.trace[10:-1]
        assert np.mean([r.search_steps for r in settled]) <= 10
        assert 1e6 * encoder.lookups / cube.geometry.n_samples <= 100000

    def test_qmax_limits_distortion(self):
        cube = synthetic_cube(16, 32, 4, seed=2)
        previous = None
        for q_max in (511, 255, 127, 63):
            config = codec_config(0.5, q_max=q_max)
            bitstream = encode(cube, config, build_lut(delta_max=q_max >> 1))
            _, mad = metrics(cube, decode(bitstream))
            assert mad <= (q_max - 1) // 2
            assert max(bitstream.steps) <= q_max
            if previous is not None:
                assert mad <= previous
            previous = mad


class TestCorruption:

    def test_truncated_payload(self, small_cube, lut):
        bitstream = encode(small_cube, codec_config(1.0), lut)
        broken = Bitstream(bitstream.geometry, bitstream.config, bitstream.deltas,
                           bitstream.payload[:-3])
        with pytest.raises(BitstreamError):
            decode(broken)

    def test_extra_payload(self, small_cube, lut):
        bitstream = encode(small_cube, codec_config(1.0), lut)
        padded = Bitstream(bitstream.geometry, bitstream.config, bitstream.deltas,
                           bitstream.payload + b'\x00\x00')
        with pytest.raises(BitstreamError):
            decode(padded)

    def test_truncated_file(self, small_cube, lut):
        data = encode(small_cube, codec_config(1.0), lut).to_bytes()
        with pytest.raises(BitstreamError):
            decode(Bitstream.from_bytes(data[:len(data) // 2]))
