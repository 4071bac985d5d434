# Copyright 2024 The hyperrate Authors

from enum import IntEnum
from typing import Iterator, Tuple

from hyperrate.utils.data_classes import CubeGeometry


class PixelType(IntEnum):
    """ Enumerates the roles a sample plays in the per-line rate control schedule. """
    A = 0  # Interior sample, its unquantized residual is buffered.
    B = 1  # Closes a subset of L samples, emits the subset median.
    C = 2  # Last sample of a band line, computes the median of medians.
    D = 3  # Last sample of the last band, additionally runs the rate controller.


def classify_pixel(x: int, z: int, geometry: CubeGeometry, subset_length: int) -> PixelType:
    """
    Returns the role of the sample at column x of band z.
    Row terminators take precedence over subset terminators.

    Arguments:
        x: Column index.
        z: Band index.
        geometry: Cube geometry.
        subset_length: Subset length L of the median-of-medians estimator.

    Returns:
        The pixel type.
    """
    if x == geometry.n_cols - 1:
        return PixelType.D if z == geometry.n_bands - 1 else PixelType.C
    if x % subset_length == subset_length - 1:
        return PixelType.B
    return PixelType.A


def bil_positions(geometry: CubeGeometry,
                  subset_length: int = 17) -> Iterator[Tuple[int, int, int, PixelType]]:
    """
    Enumerates all sample positions in band-interleaved-by-line order: y outer, z middle,
    x inner.

    Arguments:
        geometry: Cube geometry.
        subset_length: Subset length L used to mark type-B samples.

    Returns:
        Iterator over (x, y, z, pixel type).
    """
    assert subset_length >= 1, 'Error: subset_length must be >= 1!'
    types = [[classify_pixel(x, z, geometry, subset_length) for x in range(geometry.n_cols)]
             for z in range(geometry.n_bands)]
    for y in range(geometry.n_rows):
        for z in range(geometry.n_bands):
            band_types = types[z]
            for x in range(geometry.n_cols):
                yield x, y, z, band_types[x]


def bil_index(x: int, y: int, z: int, geometry: CubeGeometry) -> int:
    """ Returns the offset of s_{x,y,z} in a flat BIL sample stream. """
    return (y * geometry.n_bands + z) * geometry.n_cols + x
