# Copyright 2024 The hyperrate Authors

import math

import numpy as np
import pytest

from hyperrate.codec.constants import LUT_ENV_VAR
from hyperrate.rate.rate_model import RateLut, build_lut, eval_rate, load_lut, lut_from_env


def quantized_laplacian_entropy(m: float, q: int, n: int, seed: int) -> float:
    """ Empirical entropy of Laplacian(scale m) draws quantized with step q. """
    rng = np.random.default_rng(seed)
    r = rng.laplace(0.0, m, n)
    index = np.sign(r) * np.floor((np.abs(r) + q / 2) / q)
    _, counts = np.unique(index, return_counts=True)
    p = counts / n
    return float(-np.sum(p * np.log2(p)))


class TestEvalRate:

    def test_fine_quantization(self):
        assert eval_rate(10, 1) == pytest.approx(5.7652, abs=0.002)
        assert eval_rate(10, 1) == pytest.approx(math.log2(2 * math.e * 10), abs=0.002)

    def test_vanishes_for_coarse_steps(self):
        rates = [eval_rate(10, q) for q in (1, 11, 101, 1001, 10001)]
        assert all(a > b for a, b in zip(rates, rates[1:]))
        assert rates[-1] < 1e-10

    def test_vectorized(self):
        rates = eval_rate(np.array([1.0, 10.0]), np.array([1.0, 3.0]))
        assert rates.shape == (2,)
        assert rates[1] == pytest.approx(eval_rate(10, 3))

    def test_invalid(self):
        with pytest.raises(ValueError):
            eval_rate(0, 1)
        with pytest.raises(ValueError):
            eval_rate(1, -1)

    def test_monte_carlo(self):
        assert eval_rate(10, 21) == pytest.approx(
            quantized_laplacian_entropy(10, 21, 10 ** 6, seed=0), abs=0.01)

    @pytest.mark.slow
    def test_monte_carlo_random_pairs(self, full_lut):
        rng = np.random.default_rng(123)
        for i in range(20):
            m = int(rng.integers(1, 1024))
            q = 2 * int(rng.integers(0, 256)) + 1
            empirical = quantized_laplacian_entropy(m, q, 10 ** 7, seed=i)
            assert full_lut.lookup(m, q) / 1000 == pytest.approx(empirical, abs=0.02)


class TestRateLut:

    def test_shape_and_known_entries(self, full_lut):
        assert full_lut.table.shape == (1024, 256)
        assert full_lut.nbytes == 512 * 1024
        assert full_lut.table[10, 0] == 5765
        assert full_lut.table[10, 1] == round(1000 * eval_rate(10, 3))
        assert 4184 <= full_lut.table[10, 1] <= 4185
        assert not full_lut.table[0].any()
        assert full_lut.table.max() < 2 ** 16

    def test_self_check(self, full_lut):
        full_lut.self_check()

    def test_independent_evaluation(self, full_lut):
        """ Every entry agrees with a scalar evaluation of the closed form in plain floats. """
        def rate(m, q):
            a = q / (2 * m)
            p0 = -math.expm1(-a)
            outer = -math.expm1(-2 * a)
            h0 = -p0 * math.log2(p0) if p0 < 1 else 0.0
            bracket = math.log(outer / 2) + a - 2 * a / outer
            return max(0.0, h0 - math.exp(-a) / math.log(2) * bracket)

        rng = np.random.default_rng(5)
        for m, delta in zip(rng.integers(1, 1024, 2000), rng.integers(0, 256, 2000)):
            expected = round(1000 * rate(int(m), 2 * int(delta) + 1))
            assert abs(int(full_lut.table[m, delta]) - expected) <= 1

    def test_lookup_counter(self, lut):
        assert lut.lookup(10, 1) == 5765
        assert lut.lookup(0, 511) == 0
        assert lut.lookup_counter == 2
        assert lut.line_rate([10, 10, 0], 3) == 2 * int(lut.table[10, 1])
        assert lut.lookup_counter == 5
        lut.reset_counter()
        assert lut.lookup_counter == 0

    def test_reduced_domain(self, full_lut):
        small = build_lut(m_max=63, delta_max=31)
        assert small.table.shape == (64, 32)
        assert np.array_equal(small.table, full_lut.table[:64, :32])

    def test_dump_and_load(self, full_lut, tmp_path):
        path = str(tmp_path / 'lut.bin')
        full_lut.dump(path)
        with open(path, 'rb') as f:
            raw = f.read()
        assert len(raw) == 1024 * 256 * 2
        assert raw[2 * 256 * 10:2 * 256 * 10 + 2] == (5765).to_bytes(2, 'little')
        assert load_lut(path) == full_lut

    def test_load_bad_blob(self, tmp_path):
        path = str(tmp_path / 'lut.bin')
        with open(path, 'wb') as f:
            f.write(bytes(1000))
        with pytest.raises(ValueError):
            load_lut(path)

    def test_from_env(self, full_lut, tmp_path, monkeypatch):
        path = str(tmp_path / 'lut.bin')
        RateLut(full_lut.table[:, :8].copy()).dump(path)
        monkeypatch.setenv(LUT_ENV_VAR, path)
        loaded = lut_from_env()
        assert loaded.delta_max == 7
        monkeypatch.delenv(LUT_ENV_VAR)
        assert lut_from_env() == full_lut
