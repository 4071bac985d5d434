# Copyright 2024 The hyperrate Authors

from typing import List, Union

import numpy as np

from hyperrate.codec.bitstream import BitstreamError
from hyperrate.codec.constants import DEFAULT_ADAPTATION_SHIFT

PROB_BITS = 12
PROB_ONE = 1 << PROB_BITS
PROB_INIT = PROB_ONE >> 1
TOP = 1 << 24
PREFIX_BINS = 24

# Context layout of a BandModel.
ZERO_CTX = 0
SIGN_CTX = 1
PREFIX_CTX = 2


class CorruptPayloadError(BitstreamError):
    """ The range-coded payload ended before every symbol was decoded. """


def map_index(q: Union[int, np.ndarray]) -> Union[int, np.ndarray]:
    """ Folds a signed index onto the naturals: 0, -1, 1, -2, 2, ... -> 0, 1, 2, 3, 4, ... """
    if isinstance(q, np.ndarray):
        return np.where(q >= 0, 2 * q, -2 * q - 1)
    return 2 * q if q >= 0 else -2 * q - 1


def unmap_index(u: Union[int, np.ndarray]) -> Union[int, np.ndarray]:
    """ Inverse of map_index. """
    if isinstance(u, np.ndarray):
        return np.where(u % 2 == 0, u // 2, -(u + 1) // 2)
    return u >> 1 if u % 2 == 0 else -((u + 1) >> 1)


class BandModel:
    """
    Adaptive binary contexts of one band: a zero flag, a sign and the unary prefix bins of
    the Exp-Golomb(0) magnitude. Probabilities are 12-bit estimates of a zero bit, updated
    with a shift.
    """

    def __init__(self, adaptation_shift: int = DEFAULT_ADAPTATION_SHIFT):
        self.adaptation_shift = adaptation_shift
        self.probs: List[int] = [PROB_INIT] * (PREFIX_CTX + PREFIX_BINS)

    def __repr__(self):
        return 'BandModel(shift=%d, probs=%s)' % (self.adaptation_shift, self.probs)


class RangeEncoder:
    """ Carry-propagating binary range encoder with a one-byte cache. """

    def __init__(self):
        self.low = 0
        self.range = 0xFFFFFFFF
        self.cache = 0
        self.cache_size = 1
        self.out = bytearray()
        self.flushed = False

    @property
    def bits_written(self) -> int:
        """ Payload size so far in bits, exact to within one bit. """
        return 8 * (len(self.out) + self.cache_size - 1) + 32 - self.range.bit_length()

    def _shift_low(self) -> None:
        low = self.low
        if low < 0xFF000000 or low >= 0x100000000:
            carry = low >> 32
            temp = self.cache
            out = self.out
            while True:
                out.append((temp + carry) & 0xFF)
                temp = 0xFF
                self.cache_size -= 1
                if self.cache_size == 0:
                    break
            self.cache = (low >> 24) & 0xFF
        self.cache_size += 1
        self.low = (low & 0x00FFFFFF) << 8

    def encode_bit(self, probs: List[int], ctx: int, bit: int, shift: int) -> None:
        """ Codes one bit with the adaptive probability probs[ctx] and updates it. """
        p = probs[ctx]
        bound = (self.range >> PROB_BITS) * p
        if bit:
            self.low += bound
            self.range -= bound
            probs[ctx] = p - (p >> shift)
        else:
            self.range = bound
            probs[ctx] = p + ((PROB_ONE - p) >> shift)
        while self.range < TOP:
            self.range <<= 8
            self._shift_low()

    def encode_direct(self, value: int, n_bits: int) -> None:
        """ Codes the n_bits low bits of value with probability one half, MSB first. """
        for i in range(n_bits - 1, -1, -1):
            self.range >>= 1
            if (value >> i) & 1:
                self.low += self.range
            while self.range < TOP:
                self.range <<= 8
                self._shift_low()

    def flush(self) -> bytes:
        """ Terminates the stream; the decoder consumes exactly the returned bytes. """
        if self.flushed:
            raise RuntimeError('Error: Range encoder flushed twice!')
        self.flushed = True
        for _ in range(5):
            self._shift_low()
        return bytes(self.out)


class RangeDecoder:
    """ Decoder matching RangeEncoder. """

    def __init__(self, data: bytes):
        if len(data) < 5:
            raise CorruptPayloadError('Error: Range-coded payload shorter than 5 bytes!')
        self.data = data
        self.pos = 0
        self.range = 0xFFFFFFFF
        self.code = 0
        for _ in range(5):
            self.code = (self.code << 8) | self._next_byte()
        if self.data[0] != 0:
            raise CorruptPayloadError('Error: Range-coded payload does not start with 0x00!')

    def _next_byte(self) -> int:
        if self.pos >= len(self.data):
            raise CorruptPayloadError('Error: Premature end of the range-coded payload!')
        byte = self.data[self.pos]
        self.pos += 1
        return byte

    @property
    def exhausted(self) -> bool:
        return self.pos == len(self.data)

    def decode_bit(self, probs: List[int], ctx: int, shift: int) -> int:
        p = probs[ctx]
        bound = (self.range >> PROB_BITS) * p
        if self.code < bound:
            self.range = bound
            probs[ctx] = p + ((PROB_ONE - p) >> shift)
            bit = 0
        else:
            self.code -= bound
            self.range -= bound
            probs[ctx] = p - (p >> shift)
            bit = 1
        while self.range < TOP:
            self.range <<= 8
            self.code = ((self.code << 8) | self._next_byte()) & 0xFFFFFFFF
        return bit

    def decode_direct(self, n_bits: int) -> int:
        value = 0
        for _ in range(n_bits):
            self.range >>= 1
            bit = 0
            if self.code >= self.range:
                self.code -= self.range
                bit = 1
            value = (value << 1) | bit
            while self.range < TOP:
                self.range <<= 8
                self.code = ((self.code << 8) | self._next_byte()) & 0xFFFFFFFF
        return value


def encode_index(coder: RangeEncoder, model: BandModel, q: int) -> None:
    """
    Codes a quantizer index: zero flag, sign, then |q| - 1 as Exp-Golomb(0) with adaptive
    unary prefix bins and bypass suffix bits.
    """
    probs = model.probs
    shift = model.adaptation_shift
    if q == 0:
        coder.encode_bit(probs, ZERO_CTX, 0, shift)
        return
    coder.encode_bit(probs, ZERO_CTX, 1, shift)
    coder.encode_bit(probs, SIGN_CTX, 1 if q < 0 else 0, shift)

    # Exp-Golomb(0) of |q| - 1 writes the binary digits of |q|.
    value = q if q > 0 else -q
    n = value.bit_length() - 1
    last = PREFIX_CTX + PREFIX_BINS - 1
    for i in range(n):
        coder.encode_bit(probs, min(PREFIX_CTX + i, last), 1, shift)
    coder.encode_bit(probs, min(PREFIX_CTX + n, last), 0, shift)
    if n:
        coder.encode_direct(value - (1 << n), n)


def decode_index(coder: RangeDecoder, model: BandModel) -> int:
    """ Inverse of encode_index under the same model trajectory. """
    probs = model.probs
    shift = model.adaptation_shift
    if not coder.decode_bit(probs, ZERO_CTX, shift):
        return 0
    negative = coder.decode_bit(probs, SIGN_CTX, shift)

    last = PREFIX_CTX + PREFIX_BINS - 1
    n = 0
    while coder.decode_bit(probs, min(PREFIX_CTX + n, last), shift):
        n += 1
        if n > 64:
            raise CorruptPayloadError('Error: Exp-Golomb prefix exceeds 64 bins!')
    value = (1 << n) + (coder.decode_direct(n) if n else 0)
    return -value if negative else value
