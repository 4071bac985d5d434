# Copyright 2024 The hyperrate Authors

import numpy as np

from hyperrate.utils.data_classes import CubeGeometry, ImageCube


def _ar1(field: np.ndarray, axis: int, rho: float) -> np.ndarray:
    """ Applies a first-order autoregressive recursion along one axis. """
    out = np.moveaxis(field.copy(), axis, 0)
    for i in range(1, out.shape[0]):
        out[i] += rho * out[i - 1]
    return np.moveaxis(out, 0, axis)


def synthetic_cube(n_rows: int = 128,
                   n_cols: int = 256,
                   n_bands: int = 32,
                   bit_depth: int = 12,
                   seed: int = 42,
                   rho: float = 0.9,
                   spread: float = 0.1,
                   stationary: bool = True) -> ImageCube:
    """
    Generates a spatially and spectrally AR(1)-correlated integer cube.

    Gaussian innovations are filtered by a separable AR(1) recursion along rows, columns
    and bands, scaled to occupy `spread` of the dynamic range around mid-range, offset by a
    smooth per-band mean spectrum and clipped to the sample range.

    Arguments:
        n_rows: Number of rows.
        n_cols: Number of columns.
        n_bands: Number of bands.
        bit_depth: Bit depth of the unsigned samples.
        seed: Seed of the random generator.
        rho: AR(1) coefficient applied along every axis.
        spread: Standard deviation of the field as a fraction of the dynamic range.
        stationary: If False, the field energy ramps up along the rows.

    Returns:
        The synthetic cube.
    """
    assert 0 <= rho < 1, 'Error: rho must be in [0, 1)!'
    geometry = CubeGeometry(n_cols, n_rows, n_bands, bit_depth=bit_depth)
    rng = np.random.default_rng(seed)

    field = rng.standard_normal((n_rows, n_bands, n_cols))
    for axis in range(3):
        field = _ar1(field, axis, rho)
    field /= field.std()

    lo, hi = geometry.sample_range
    full_scale = hi - lo + 1
    if not stationary:
        field *= np.linspace(0.25, 1.75, n_rows)[:, None, None]

    spectrum = 0.1 * full_scale * np.sin(np.linspace(0, np.pi, n_bands))
    samples = geometry.mid_sample + spectrum[None, :, None] + spread * full_scale * field
    samples = np.clip(np.rint(samples), lo, hi).astype(np.int32)
    return ImageCube(samples, geometry)
