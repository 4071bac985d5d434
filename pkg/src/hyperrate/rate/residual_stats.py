# Copyright 2024 The hyperrate Authors

import math

from typing import List, Sequence

from hyperrate.codec.constants import DEFAULT_SUBSET_LENGTH, M_MAX


def median_small(values: Sequence[int]) -> int:
    """
    Exact median of a short list by full sort. For an even length the lower of the two
    middle elements is returned, so no averaging is needed.
    """
    if len(values) == 0:
        raise ValueError('Error: Median of an empty list!')
    return sorted(values)[(len(values) - 1) // 2]


class LineStatistics:
    """
    Streaming median-of-medians estimate of the residual magnitude of one band line.

    Residual magnitudes are buffered in subsets of L samples; a full subset is replaced by
    its median (type-B sample). At the end of the line (type-C sample) the partial subset
    contributes its own median and the median of the subset medians becomes m_z.
    """

    def __init__(self, n_cols: int, subset_length: int = DEFAULT_SUBSET_LENGTH,
                 m_max: int = M_MAX):
        """
        Arguments:
            n_cols: Length of a band line.
            subset_length: Subset length L.
            m_max: Finalized medians are clamped to [0, m_max].
        """
        assert subset_length >= 1, 'Error: subset_length must be >= 1!'
        self.n_cols = n_cols
        self.subset_length = subset_length
        self.m_max = m_max
        self.max_medians = math.ceil(n_cols / subset_length)

        self.subset_buffer: List[int] = []
        self.medians_buffer: List[int] = []
        self.m_z = 0

    def push_residual(self, r: int) -> None:
        """ Buffers the magnitude of an unquantized residual. """
        self.subset_buffer.append(r if r >= 0 else -r)
        if len(self.subset_buffer) == self.subset_length:
            self.medians_buffer.append(median_small(self.subset_buffer))
            self.subset_buffer = []

    def finalize_line(self) -> int:
        """
        Closes the line: returns the clamped median of medians and resets the buffers.
        """
        if self.subset_buffer:
            self.medians_buffer.append(median_small(self.subset_buffer))
        if not self.medians_buffer:
            raise ValueError('Error: finalize_line() called on a line without residuals!')
        assert len(self.medians_buffer) <= self.max_medians, \
            'Error: More residuals pushed than the line holds!'

        self.m_z = min(median_small(self.medians_buffer), self.m_max)
        self.subset_buffer = []
        self.medians_buffer = []
        return self.m_z
