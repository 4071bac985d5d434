# Copyright 2024 The hyperrate Authors

from __future__ import annotations

import os

from typing import Sequence, Union

import numpy as np

from hyperrate.codec.constants import DELTA_MAX, LUT_CAP, LUT_ENV_VAR, LUT_SCALE, M_MAX

ArrayLike = Union[float, np.ndarray]


def eval_rate(m: ArrayLike, q: ArrayLike) -> ArrayLike:
    """
    Entropy in bits per sample of an i.i.d. Laplacian source of parameter 1/m quantized with
    a uniform scalar quantizer of step q:

        R = -(1 - e^{-q/2m}) log2(1 - e^{-q/2m})
            - e^{-q/2m} / ln 2 * [ln((1 - e^{-q/m}) / 2) + q/2m - q / (m (1 - e^{-q/m}))]

    Evaluated in float64 with expm1/log1p; only used when the LUT is built.

    Arguments:
        m: Scale parameter(s), > 0.
        q: Quantization step(s), > 0.

    Returns:
        Rate(s) in bits per sample.
    """
    m = np.asarray(m, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if np.any(m <= 0) or np.any(q <= 0):
        raise ValueError('Error: eval_rate() needs m > 0 and Q > 0!')

    a = q / (2.0 * m)
    tail = np.exp(-a)                 # P(|index| >= 1)
    zero_bin = -np.expm1(-a)          # P(index == 0)
    outer = -np.expm1(-2.0 * a)       # 1 - e^{-q/m}

    with np.errstate(divide='ignore', invalid='ignore'):
        h_zero = np.where(zero_bin < 1.0, -zero_bin * np.log2(zero_bin), 0.0)
    bracket = np.log(outer / 2.0) + a - 2.0 * a / outer
    rate = h_zero - tail / np.log(2.0) * bracket
    rate = np.maximum(rate, 0.0)
    return float(rate) if rate.ndim == 0 else rate


class RateLut:
    """
    Precomputed table of rates in millibits per sample, indexed by [m][delta] with
    delta = (Q - 1) / 2. Every lookup is counted.
    """

    def __init__(self, table: np.ndarray):
        """
        Arguments:
            table: <uint16: m_max + 1, delta_max + 1>. Rates in millibits per sample.
        """
        assert table.ndim == 2, 'Error: The rate LUT must be two-dimensional!'
        assert table.dtype == np.uint16, 'Error: The rate LUT holds 16-bit entries!'
        self.table = table
        # Python ints are faster than numpy scalars in the per-line search.
        self.rows = table.astype(np.int64).tolist()
        self.lookup_counter = 0

    def __repr__(self):
        return 'RateLut with %d x %d entries, %d lookups' % (
            self.table.shape[0], self.table.shape[1], self.lookup_counter)

    def __eq__(self, other):
        return isinstance(other, RateLut) and np.array_equal(self.table, other.table)

    @property
    def m_max(self) -> int:
        return self.table.shape[0] - 1

    @property
    def delta_max(self) -> int:
        return self.table.shape[1] - 1

    @property
    def nbytes(self) -> int:
        return self.table.nbytes

    def lookup(self, m: int, q: int) -> int:
        """
        Returns R(m, q) in millibits per sample by direct [m][(q - 1) / 2] addressing.

        Arguments:
            m: Median of medians, already clamped to [0, m_max].
            q: Odd quantization step.

        Returns:
            The tabulated rate.
        """
        self.lookup_counter += 1
        return self.rows[m][q >> 1]

    def line_rate(self, medians: Sequence[int], q: int) -> int:
        """ Sum over bands of R(m_z, q); counts one lookup per band. """
        delta = q >> 1
        rows = self.rows
        self.lookup_counter += len(medians)
        return sum(rows[m][delta] for m in medians)

    def reset_counter(self) -> None:
        self.lookup_counter = 0

    def dump(self, path: str) -> None:
        """ Writes the table as a flat blob of little-endian uint16, row-major by m. """
        self.table.astype('<u2').tofile(path)

    def self_check(self) -> None:
        """ Verifies monotonicity and agreement with the analytic rate. """
        table = self.table.astype(np.int64)
        assert np.all(np.diff(table[1:], axis=1) <= 0), \
            'Error: Rate LUT is not non-increasing in delta!'
        assert np.all(np.diff(table, axis=0) >= 0), \
            'Error: Rate LUT is not non-decreasing in m!'
        m, delta = np.meshgrid(np.arange(1, self.m_max + 1), np.arange(self.delta_max + 1),
                               indexing='ij')
        exact = eval_rate(m, 2 * delta + 1)
        err = np.abs(table[1:] / LUT_SCALE - exact)
        assert np.all(err <= 0.0005 + 1e-9), 'Error: Rate LUT deviates from the analytic rate!'


def build_lut(m_max: int = M_MAX, delta_max: int = DELTA_MAX) -> RateLut:
    """
    Builds the rate LUT for m in [0, m_max] and Q in {1, 3, ..., 2 delta_max + 1}.
    Entries are round(1000 R(m, Q)); the m = 0 row is zero, a point mass has no entropy.

    Arguments:
        m_max: Largest median of medians.
        delta_max: Largest quantizer half-width; smaller values shrink the table when the
            step is capped below 511.

    Returns:
        The rate LUT.
    """
    assert m_max >= 1 and delta_max >= 0, 'Error: Invalid LUT domain!'
    m, delta = np.meshgrid(np.arange(1, m_max + 1), np.arange(delta_max + 1), indexing='ij')
    rates = np.rint(LUT_SCALE * eval_rate(m, 2 * delta + 1))

    table = np.zeros((m_max + 1, delta_max + 1), dtype=np.uint16)
    table[1:] = np.minimum(rates, LUT_CAP).astype(np.uint16)
    return RateLut(table)


def load_lut(path: str, m_max: int = M_MAX) -> RateLut:
    """
    Loads a LUT blob written by RateLut.dump(). The delta extent follows from the file size.
    """
    raw = np.fromfile(path, dtype='<u2')
    if raw.size == 0 or raw.size % (m_max + 1) != 0:
        raise ValueError('Error: LUT blob %s has %d entries, not a multiple of %d!'
                         % (path, raw.size, m_max + 1))
    return RateLut(raw.astype(np.uint16).reshape(m_max + 1, -1))


def lut_from_env(verbose: bool = False) -> RateLut:
    """ Loads the LUT named by HYPERRATE_LUT_PATH, or builds it when the variable is unset. """
    path = os.getenv(LUT_ENV_VAR)
    if path:
        if verbose:
            print('Loading rate LUT from %s' % path)
        return load_lut(path)
    return build_lut()
