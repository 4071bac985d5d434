# Copyright 2024 The hyperrate Authors

from hyperrate.codec.constants import Q_MAX


class StepSize:
    """ Odd uniform quantization step Q and its half-width delta = (Q - 1) / 2. """

    __slots__ = ('q', 'delta')

    def __init__(self, q: int, q_max: int = Q_MAX):
        if q % 2 == 0 or not 1 <= q <= q_max:
            raise ValueError('Error: Step size must be odd and in [1, %d], got %d!' % (q_max, q))
        self.q = q
        self.delta = (q - 1) >> 1

    @classmethod
    def from_delta(cls, delta: int, q_max: int = Q_MAX) -> 'StepSize':
        return cls(2 * delta + 1, q_max)

    def __eq__(self, other):
        return isinstance(other, StepSize) and self.q == other.q

    def __hash__(self):
        return hash(self.q)

    def __repr__(self):
        return 'StepSize(q=%d, delta=%d)' % (self.q, self.delta)


def quantize(r: int, step: StepSize) -> int:
    """
    Quantizes a prediction residual: q = sgn(r) * floor((|r| + delta) / Q).
    The reconstruction q * Q is within delta of r.
    """
    if r >= 0:
        return (r + step.delta) // step.q
    return -((step.delta - r) // step.q)


def dequantize(index: int, step: StepSize) -> int:
    """ Midpoint reconstruction of a quantizer index. """
    return index * step.q
