# Copyright 2024 The hyperrate Authors

import numpy as np
import pytest

from hyperrate.rate.rate_model import RateLut, build_lut
from hyperrate.utils.data_classes import CubeGeometry, ImageCube
from hyperrate.utils.synthetic import synthetic_cube


@pytest.fixture(scope='session')
def full_lut() -> RateLut:
    """ Rate LUT over the whole default domain, built once per session. """
    return build_lut()


@pytest.fixture
def lut(full_lut) -> RateLut:
    """ The shared table with a fresh lookup counter. """
    return RateLut(full_lut.table)


@pytest.fixture
def small_cube() -> ImageCube:
    return synthetic_cube(n_rows=12, n_cols=20, n_bands=5, seed=7)


@pytest.fixture
def random_cube():
    """ Factory of uniformly random cubes. """
    def make(n_cols: int, n_rows: int, n_bands: int, bit_depth: int = 8, seed: int = 0,
             signed: bool = False) -> ImageCube:
        geometry = CubeGeometry(n_cols, n_rows, n_bands, bit_depth, signed)
        lo, hi = geometry.sample_range
        rng = np.random.default_rng(seed)
        samples = rng.integers(lo, hi + 1, size=(n_rows, n_bands, n_cols))
        return ImageCube(samples, geometry)
    return make
