# Copyright 2024 The hyperrate Authors

from __future__ import annotations

import struct

from hyperrate.codec.constants import LUT_SCALE, MAGIC, VERSION
from hyperrate.codec.data_classes import CodecConfig, ControllerConfig, PredictorConfig
from hyperrate.utils.data_classes import BYTE_ORDERS, CubeGeometry

# magic, version | cols, rows, bands, depth, signed, byteorder |
# P, weight_resolution, rho_init, rho_final, rho_interval, register_size |
# rate (millibits), q_max, tau, window, q_init | L, adaptation_shift | payload length
HEADER = struct.Struct('<4sB' 'IIIBBB' 'HBBBHB' 'IHHHH' 'HB' 'Q')


class BitstreamError(ValueError):
    """ A compressed file that cannot be decoded. """


class Bitstream:
    """
    Compressed representation of a cube:
    - global header: magic, version, geometry, codec settings, payload length;
    - side channel: delta_y = (Q_y - 1) / 2 of every line as one unsigned byte;
    - payload: range-coded quantizer indices in BIL order.
    All multi-byte header fields are little-endian.
    """

    def __init__(self, geometry: CubeGeometry, config: CodecConfig, deltas: bytes,
                 payload: bytes):
        """
        Arguments:
            geometry: Geometry of the coded cube.
            config: Settings the encoder ran with.
            deltas: One byte delta_y per line.
            payload: Range-coded indices.
        """
        if len(deltas) != geometry.n_rows:
            raise BitstreamError('Error: %d line steps for %d rows!'
                                 % (len(deltas), geometry.n_rows))
        self.geometry = geometry
        self.config = config
        self.deltas = bytes(deltas)
        self.payload = bytes(payload)

    def __repr__(self):
        return 'Bitstream with %d header, %d side and %d payload bytes' % (
            HEADER.size, len(self.deltas), len(self.payload))

    def __eq__(self, other):
        return isinstance(other, Bitstream) and self.to_bytes() == other.to_bytes()

    @property
    def steps(self):
        """ Quantization step of every line. """
        return [2 * delta + 1 for delta in self.deltas]

    @property
    def n_bytes(self) -> int:
        return HEADER.size + len(self.deltas) + len(self.payload)

    @property
    def payload_rate(self) -> float:
        """ Entropy-coded payload in bits per sample. """
        return 8.0 * len(self.payload) / self.geometry.n_samples

    @property
    def container_rate(self) -> float:
        """ Whole file, header and side channel included, in bits per sample. """
        return 8.0 * self.n_bytes / self.geometry.n_samples

    @property
    def lossless(self) -> bool:
        return not any(self.deltas)

    def to_bytes(self) -> bytes:
        g = self.geometry
        p = self.config.predictor
        c = self.config.controller
        header = HEADER.pack(MAGIC, VERSION,
                             g.n_cols, g.n_rows, g.n_bands, g.bit_depth, int(g.signed),
                             BYTE_ORDERS.index(g.byteorder),
                             p.bands_used, p.weight_resolution, p.rho_init, p.rho_final,
                             p.rho_interval, p.register_size,
                             c.rate_millibits, c.q_max, c.tau, c.window, c.q_init,
                             self.config.subset_length, self.config.adaptation_shift,
                             len(self.payload))
        return header + self.deltas + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> Bitstream:
        """
        Parses a compressed file.

        Arguments:
            data: Content of the file.

        Returns:
            The parsed bitstream.
        """
        if len(data) < HEADER.size:
            raise BitstreamError('Error: Truncated header, %d of %d bytes!'
                                 % (len(data), HEADER.size))
        fields = HEADER.unpack_from(data)
        magic, version = fields[:2]
        if magic != MAGIC:
            raise BitstreamError('Error: Bad magic %r, expected %r!' % (magic, MAGIC))
        if version != VERSION:
            raise BitstreamError('Error: Unsupported version %d!' % version)

        (n_cols, n_rows, n_bands, depth, signed, byteorder,
         bands_used, omega, rho_init, rho_final, rho_interval, register_size,
         rate, q_max, tau, window, q_init,
         subset_length, adaptation_shift, payload_size) = fields[2:]
        try:
            if byteorder >= len(BYTE_ORDERS):
                raise ValueError('Error: Unknown byte order code %d!' % byteorder)
            geometry = CubeGeometry(n_cols, n_rows, n_bands, depth, bool(signed),
                                    BYTE_ORDERS[byteorder])
            config = CodecConfig(
                PredictorConfig(bands_used, omega, rho_init, rho_final, rho_interval,
                                register_size),
                ControllerConfig(rate / LUT_SCALE, q_max, tau, window, q_init),
                subset_length, adaptation_shift)
        except (AssertionError, ValueError) as e:
            raise BitstreamError('Error: Invalid header: %s' % e) from e

        start = HEADER.size
        end = start + n_rows + payload_size
        if len(data) < end:
            raise BitstreamError('Error: Truncated file, %d of %d bytes!' % (len(data), end))
        if len(data) > end:
            raise BitstreamError('Error: %d trailing bytes after the payload!'
                                 % (len(data) - end))

        deltas = data[start:start + n_rows]
        if max(deltas) > q_max >> 1:
            raise BitstreamError('Error: Line step exceeds q_max=%d!' % q_max)
        return cls(geometry, config, deltas, data[start + n_rows:end])

    def write(self, path: str) -> None:
        with open(path, 'wb') as f:
            f.write(self.to_bytes())

    @classmethod
    def read(cls, path: str) -> Bitstream:
        with open(path, 'rb') as f:
            return cls.from_bytes(f.read())
