# Copyright 2024 The hyperrate Authors

import time

from typing import List

import numpy as np
import tqdm

from hyperrate.codec.bitstream import Bitstream, BitstreamError
from hyperrate.codec.data_classes import CodecConfig
from hyperrate.codec.entropy import BandModel, RangeDecoder, RangeEncoder, decode_index, \
    encode_index
from hyperrate.codec.predictor import Predictor
from hyperrate.codec.quantizer import StepSize, quantize
from hyperrate.rate.controller import LineRecord, RateController
from hyperrate.rate.rate_model import RateLut, build_lut
from hyperrate.rate.residual_stats import LineStatistics
from hyperrate.utils.data_classes import ImageCube
from hyperrate.utils.traversal import PixelType, classify_pixel


class HyperspectralEncoder:
    """
    Near-lossless encoder with one quantization step per spectral line.

    The cube is traversed in BIL order. Every sample is predicted from the reconstructed
    neighborhood, its residual r = s^ - s is quantized with the step of the current line,
    range coded and reconstructed in the loop. Unquantized residual magnitudes feed the
    median-of-medians statistics; at the end of a line the controller corrects its target
    with the bits just produced and selects the step of the next line from the rate LUT.
    With q_init = 0 the step of the first line is searched the same way, on the medians of a
    lossless look-ahead over that line.

    After encode() the following attributes describe the last run:
    - reconstruction: the encoder's in-loop reconstruction;
    - trace: one LineRecord per line;
    - controller_time / total_time: seconds spent in rate control and in total.
    """

    def __init__(self, config: CodecConfig, lut: RateLut = None, verbose: bool = False):
        """
        Arguments:
            config: Codec settings.
            lut: Rate LUT, built on demand when omitted. Can be shared between encoders.
            verbose: Whether to print progress and timing.
        """
        self.config = config
        self.lut = lut if lut is not None else build_lut()
        self.verbose = verbose

        self.reconstruction = None
        self.trace: List[LineRecord] = []
        self.controller_time = 0.0
        self.total_time = 0.0
        self.lookups = 0

    def first_line_medians(self, cube: ImageCube) -> List[int]:
        """
        Medians of the first line under lossless prediction. They stand in for the statistics
        of a previous line when the first step is derived from the target.
        """
        geometry = cube.geometry
        predictor = Predictor(self.config.predictor, geometry)
        stats = LineStatistics(geometry.n_cols, self.config.subset_length)
        predictor.start_line(0)
        medians = []
        for z in range(geometry.n_bands):
            for x, s in enumerate(cube.samples[0, z].tolist()):
                s_hat = predictor.predict(x, 0, z)
                stats.push_residual(s_hat - s)
                predictor.update(x, 0, z, predictor.prediction_error(s), s)
            medians.append(stats.finalize_line())
        return medians

    def encode(self, cube: ImageCube) -> Bitstream:
        """
        Compresses a cube.

        Arguments:
            cube: The cube to compress.

        Returns:
            The compressed bitstream.
        """
        start_time = time.perf_counter()
        geometry = cube.geometry
        n_cols, n_rows, n_bands = geometry.n_cols, geometry.n_rows, geometry.n_bands
        s_min, s_max = geometry.sample_range
        config = self.config

        predictor = Predictor(config.predictor, geometry)
        controller = RateController(config.controller, self.lut, n_cols * n_bands)
        # One estimator per band.
        stats = [LineStatistics(n_cols, config.subset_length) for _ in range(n_bands)]
        models = [BandModel(config.adaptation_shift) for _ in range(n_bands)]
        coder = RangeEncoder()
        lookups_start = self.lut.lookup_counter

        types = [[classify_pixel(x, z, geometry, config.subset_length) for x in range(n_cols)]
                 for z in range(n_bands)]
        recon = np.empty_like(cube.samples)
        deltas = bytearray()
        self.trace = []
        self.controller_time = 0.0

        for y in tqdm.tqdm(range(n_rows), leave=self.verbose, disable=not self.verbose):
            line_lookups = self.lut.lookup_counter
            line_steps = controller.state.search_steps
            if y == 0 and config.controller.q_init == 0:
                medians = self.first_line_medians(cube)
                tic = time.perf_counter()
                controller.select_next_q(medians)
                self.controller_time += time.perf_counter() - tic

            predictor.start_line(y)
            step = controller.step
            q_step = step.q
            deltas.append(step.delta)
            bits_before = coder.bits_written
            medians = []

            for z in range(n_bands):
                row = cube.samples[y, z].tolist()
                rec_row = [0] * n_cols
                band_types = types[z]
                band_stats = stats[z]
                model = models[z]
                for x in range(n_cols):
                    s_hat = predictor.predict(x, y, z)
                    r = s_hat - row[x]
                    band_stats.push_residual(r)
                    index = quantize(r, step)
                    encode_index(coder, model, index)

                    s_rec = s_hat - index * q_step
                    s_rec = s_min if s_rec < s_min else (s_max if s_rec > s_max else s_rec)
                    predictor.update(x, y, z, predictor.prediction_error(s_rec), s_rec)
                    rec_row[x] = s_rec

                    if band_types[x] < PixelType.C:
                        continue
                    tic = time.perf_counter()
                    medians.append(band_stats.finalize_line())
                    if band_types[x] == PixelType.D:
                        line_bits = coder.bits_written - bits_before
                        controller.update_target(line_bits, n_cols * n_bands)
                        predicted = 0
                        if y + 1 < n_rows:
                            controller.select_next_q(medians)
                            predicted = controller.last_predicted_rate
                        self.trace.append(LineRecord(
                            y, q_step, controller.state.r_target, predicted, line_bits,
                            self.lut.lookup_counter - line_lookups,
                            controller.state.search_steps - line_steps))
                    self.controller_time += time.perf_counter() - tic
                recon[y, z] = rec_row

        payload = coder.flush()
        self.reconstruction = ImageCube(recon, geometry)
        self.lookups = self.lut.lookup_counter - lookups_start
        self.total_time = time.perf_counter() - start_time
        if self.verbose:
            print('Done encoding in %.1f seconds, %d payload bytes, %d LUT lookups'
                  % (self.total_time, len(payload), self.lookups))
        return Bitstream(geometry, config, bytes(deltas), payload)


class HyperspectralDecoder:
    """
    Decoder mirroring HyperspectralEncoder. The step of every line is read from the side
    channel, so the decoder needs neither the statistics nor the rate LUT.
    """

    def __init__(self, verbose: bool = False):
        self.verbose = verbose

    def decode(self, bitstream: Bitstream) -> ImageCube:
        """
        Reconstructs the cube held by a bitstream.

        Arguments:
            bitstream: A parsed bitstream.

        Returns:
            The reconstruction, identical to the encoder's in-loop reconstruction.
        """
        start_time = time.perf_counter()
        geometry = bitstream.geometry
        config = bitstream.config
        n_cols, n_rows, n_bands = geometry.n_cols, geometry.n_rows, geometry.n_bands
        s_min, s_max = geometry.sample_range

        try:
            predictor = Predictor(config.predictor, geometry)
        except ValueError as e:
            raise BitstreamError('Error: Header settings do not fit the geometry: %s' % e) from e
        models = [BandModel(config.adaptation_shift) for _ in range(n_bands)]
        coder = RangeDecoder(bitstream.payload)
        recon = np.empty((n_rows, n_bands, n_cols), dtype=np.int32)

        for y in tqdm.tqdm(range(n_rows), leave=self.verbose, disable=not self.verbose):
            predictor.start_line(y)
            step = StepSize.from_delta(bitstream.deltas[y], config.controller.q_max)
            q_step = step.q
            for z in range(n_bands):
                rec_row = [0] * n_cols
                model = models[z]
                for x in range(n_cols):
                    s_hat = predictor.predict(x, y, z)
                    index = decode_index(coder, model)
                    s_rec = s_hat - index * q_step
                    s_rec = s_min if s_rec < s_min else (s_max if s_rec > s_max else s_rec)
                    predictor.update(x, y, z, predictor.prediction_error(s_rec), s_rec)
                    rec_row[x] = s_rec
                recon[y, z] = rec_row

        if not coder.exhausted:
            raise BitstreamError('Error: %d payload bytes left after the last sample!'
                                 % (len(bitstream.payload) - coder.pos))
        if self.verbose:
            print('Done decoding in %.1f seconds' % (time.perf_counter() - start_time))
        return ImageCube(recon, geometry)


def encode(cube: ImageCube, config: CodecConfig = None, lut: RateLut = None,
           verbose: bool = False) -> Bitstream:
    """
    Compresses a cube with the given settings. When omitted, the default preset is used with
    P reduced to the previous bands the cube offers.
    """
    if config is None:
        config = CodecConfig().fitted(cube.geometry.n_bands)
    return HyperspectralEncoder(config, lut, verbose).encode(cube)


def decode(bitstream: Bitstream, verbose: bool = False) -> ImageCube:
    """ Reconstructs the cube held by a bitstream. """
    return HyperspectralDecoder(verbose).decode(bitstream)
