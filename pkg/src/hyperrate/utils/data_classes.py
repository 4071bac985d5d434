# Copyright 2024 The hyperrate Authors

from __future__ import annotations

import os

from typing import Tuple

import numpy as np


BYTE_ORDERS = ('little', 'big')


class CubeGeometry:
    """ Data class that describes the layout of a headerless raw BIL file. """

    def __init__(self,
                 n_cols: int,
                 n_rows: int,
                 n_bands: int,
                 bit_depth: int = 16,
                 signed: bool = False,
                 byteorder: str = 'little'):
        """
        Arguments:
            n_cols: Number of columns (x).
            n_rows: Number of rows (y).
            n_bands: Number of spectral bands (z).
            bit_depth: Bits per sample in [2, 16].
            signed: Whether samples are two's complement.
            byteorder: Byte order of samples wider than 8 bits, 'little' or 'big'.
        """
        if min(n_cols, n_rows, n_bands) < 1:
            raise ValueError('Error: Geometry counts must be >= 1, got %dx%dx%d!'
                             % (n_cols, n_rows, n_bands))
        if not 2 <= bit_depth <= 16:
            raise ValueError('Error: bit_depth must be in [2, 16], got %d!' % bit_depth)
        if byteorder not in BYTE_ORDERS:
            raise ValueError('Error: byteorder must be one of %s!' % (BYTE_ORDERS,))

        self.n_cols = int(n_cols)
        self.n_rows = int(n_rows)
        self.n_bands = int(n_bands)
        self.bit_depth = int(bit_depth)
        self.signed = bool(signed)
        self.byteorder = byteorder

    def __repr__(self):
        return 'CubeGeometry(%s)' % self.serialize()

    def __eq__(self, other):
        return isinstance(other, CubeGeometry) and self.serialize() == other.serialize()

    @property
    def n_samples(self) -> int:
        return self.n_cols * self.n_rows * self.n_bands

    @property
    def bytes_per_sample(self) -> int:
        """ Samples wider than 8 bits occupy a 16-bit word regardless of the exact depth. """
        return 2 if self.bit_depth > 8 else 1

    @property
    def file_size(self) -> int:
        return self.n_samples * self.bytes_per_sample

    @property
    def sample_range(self) -> Tuple[int, int]:
        """ Returns the inclusive (min, max) sample values. """
        if self.signed:
            return -(1 << (self.bit_depth - 1)), (1 << (self.bit_depth - 1)) - 1
        return 0, (1 << self.bit_depth) - 1

    @property
    def mid_sample(self) -> int:
        return 0 if self.signed else 1 << (self.bit_depth - 1)

    @property
    def dtype(self) -> np.dtype:
        """ On-disk numpy dtype of a sample. """
        kind = 'i' if self.signed else 'u'
        order = '<' if self.byteorder == 'little' else '>'
        if self.bytes_per_sample == 1:
            return np.dtype(kind + '1')
        return np.dtype(order + kind + '2')

    def serialize(self) -> dict:
        """ Serialize instance into json-friendly format. """
        return {
            'cols': self.n_cols,
            'rows': self.n_rows,
            'bands': self.n_bands,
            'depth': self.bit_depth,
            'signed': int(self.signed),
            'byteorder': self.byteorder
        }

    @classmethod
    def deserialize(cls, content: dict):
        """ Initialize from serialized dictionary. """
        return cls(int(content['cols']),
                   int(content['rows']),
                   int(content['bands']),
                   int(content.get('depth', 16)),
                   bool(int(content.get('signed', 0))),
                   content.get('byteorder', 'little'))

    @classmethod
    def from_sidecar(cls, path: str) -> CubeGeometry:
        """
        Reads a sidecar geometry file of `key=value` lines.
        Blank lines and lines starting with '#' are ignored.

        Arguments:
            path: Path of the sidecar text file.

        Returns:
            The parsed geometry.
        """
        content = {}
        with open(path, 'r') as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line or line.startswith('#'):
                    continue
                if '=' not in line:
                    raise ValueError('Error: %s:%d is not a key=value line!' % (path, lineno))
                key, value = line.split('=', 1)
                content[key.strip().lower()] = value.strip()

        missing = {'cols', 'rows', 'bands'} - set(content)
        if missing:
            raise ValueError('Error: Sidecar %s misses keys %s!' % (path, sorted(missing)))
        if 'signed' in content:
            content['signed'] = content['signed'].lower() in ('1', 'true', 'yes')
        return cls.deserialize(content)

    def to_sidecar(self, path: str) -> None:
        """ Writes the geometry as a sidecar text file. """
        with open(path, 'w') as f:
            for key, value in self.serialize().items():
                f.write('%s=%s\n' % (key, value))


class ImageCube:
    """
    A hyperspectral image held in memory.

    Samples are stored in an int32 array of shape (n_rows, n_bands, n_cols), i.e. the
    band-interleaved-by-line order, so that `samples[y, z, x]` addresses s_{x,y,z}.
    """

    def __init__(self, samples: np.ndarray, geometry: CubeGeometry):
        """
        Arguments:
            samples: <int: n_rows, n_bands, n_cols>. Sample values.
            geometry: Geometry the samples must comply with.
        """
        expected = (geometry.n_rows, geometry.n_bands, geometry.n_cols)
        if samples.shape != expected:
            raise ValueError('Error: Sample array shape %s does not match geometry %s!'
                             % (samples.shape, expected))
        lo, hi = geometry.sample_range
        if samples.size and (samples.min() < lo or samples.max() > hi):
            raise ValueError('Error: Samples exceed the %d-bit %s range [%d, %d]!'
                             % (geometry.bit_depth, 'signed' if geometry.signed else 'unsigned',
                                lo, hi))

        self.samples = samples.astype(np.int32, copy=False)
        self.geometry = geometry

    def __repr__(self):
        g = self.geometry
        return 'ImageCube with %d cols x %d rows x %d bands, %d-bit %s' % (
            g.n_cols, g.n_rows, g.n_bands, g.bit_depth, 'signed' if g.signed else 'unsigned')

    def __eq__(self, other):
        return isinstance(other, ImageCube) and self.geometry == other.geometry \
            and np.array_equal(self.samples, other.samples)

    def __getitem__(self, pos: Tuple[int, int, int]) -> int:
        """ Returns s_{x,y,z} for pos = (x, y, z). """
        x, y, z = pos
        return int(self.samples[y, z, x])

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.samples.shape

    def band(self, z: int) -> np.ndarray:
        """ Returns band z as a <n_rows, n_cols> view. """
        return self.samples[:, z, :]


def load_raw(path: str, geometry: CubeGeometry) -> ImageCube:
    """
    Loads a headerless raw file stored in BIL order: for each row, all bands of that row,
    each band a run of n_cols samples.

    Arguments:
        path: Path of the raw file.
        geometry: Layout of the file.

    Returns:
        The loaded cube.
    """
    size = os.path.getsize(path)
    if size != geometry.file_size:
        raise ValueError('Error: File %s has %d bytes, geometry %dx%dx%d at %d byte(s)/sample '
                         'requires %d!' % (path, size, geometry.n_cols, geometry.n_rows,
                                           geometry.n_bands, geometry.bytes_per_sample,
                                           geometry.file_size))

    raw = np.fromfile(path, dtype=geometry.dtype)
    samples = raw.astype(np.int32).reshape(geometry.n_rows, geometry.n_bands, geometry.n_cols)
    return ImageCube(samples, geometry)


def store_raw(cube: ImageCube, path: str) -> None:
    """
    Writes a cube as a headerless raw BIL file, the inverse of load_raw.

    Arguments:
        cube: The cube to store.
        path: Destination path.
    """
    if not path:
        raise FileNotFoundError('Error: Empty output path!')
    with open(path, 'wb') as f:
        f.write(cube.samples.astype(cube.geometry.dtype).tobytes())

