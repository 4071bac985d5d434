# Copyright 2024 The hyperrate Authors

import math

from typing import Tuple

import numpy as np

from hyperrate.utils.data_classes import ImageCube


def metrics(original: ImageCube, reconstructed: ImageCube) -> Tuple[float, int]:
    """
    Distortion of a reconstruction.

    Arguments:
        original: The source cube.
        reconstructed: The decoded cube, same geometry.

    Returns:
        SNR = 10 log10(sum s^2 / sum (s - s~)^2) in dB, math.inf for an exact match,
        and the maximum absolute distortion.
    """
    if original.geometry != reconstructed.geometry:
        raise ValueError('Error: Cannot compare cubes of geometries %s and %s!'
                         % (original.geometry, reconstructed.geometry))

    s = original.samples.astype(np.int64)
    error = s - reconstructed.samples.astype(np.int64)
    mad = int(np.abs(error).max())
    noise = float(np.sum(error * error))
    if noise == 0:
        return math.inf, mad

    signal = float(np.sum(s * s))
    if signal == 0:
        return -math.inf, mad
    return 10.0 * math.log10(signal / noise), mad


def order0_entropy(cube: ImageCube) -> float:
    """ Zeroth-order entropy of the sample histogram in bits per sample. """
    _, counts = np.unique(cube.samples, return_counts=True)
    p = counts / counts.sum()
    return float(-np.sum(p * np.log2(p)))
