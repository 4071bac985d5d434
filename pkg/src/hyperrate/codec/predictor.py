# Copyright 2024 The hyperrate Authors

from typing import List

from hyperrate.codec.data_classes import PredictorConfig
from hyperrate.utils.data_classes import CubeGeometry


class Predictor:
    """
    Closed-loop adaptive linear predictor in the style of CCSDS-123.

    The prediction of s_{x,y,z} is built from the reconstructed samples of the current
    band and of P previous bands:
    - local sum sigma = W + NW + N + NE (4W on the first row, N replaces missing W, NW, NE);
    - central local differences d_{z-i} = 4 s~_{x,y,z-i} - sigma_{x,y,z-i} of the previous
      bands and directional differences d_N, d_W, d_NW of the current band;
    - s^ = clamp(round((w . d / 2^Omega + sigma) / 4)).

    Weights adapt with the sign algorithm. Everything is integer arithmetic, so an encoder
    and a decoder that feed the same reconstructed samples hold identical states.
    """

    def __init__(self, config: PredictorConfig, geometry: CubeGeometry):
        """
        Arguments:
            config: Predictor settings.
            geometry: Geometry of the cube being coded.
        """
        config.validate(geometry.bit_depth, geometry.n_bands)

        self.config = config
        self.geometry = geometry
        self.s_min, self.s_max = geometry.sample_range
        self.s_mid = geometry.mid_sample

        n_cols, n_bands = geometry.n_cols, geometry.n_bands
        omega = config.weight_resolution
        self.w_min = -(1 << (omega + 2))
        self.w_max = (1 << (omega + 2)) - 1

        # Weight layout: [d_{z-1}, ..., d_{z-P}, d_N, d_W, d_NW].
        initial = [0] * config.n_weights
        if config.bands_used > 0:
            initial[0] = (7 << omega) >> 3
        self.weights: List[List[int]] = [list(initial) for _ in range(n_bands)]

        # Reconstructed history: previous and current row of every band.
        self.prev_rows: List[List[int]] = [[0] * n_cols for _ in range(n_bands)]
        self.cur_rows: List[List[int]] = [[0] * n_cols for _ in range(n_bands)]
        # Central local differences of the current row of every band.
        self.central: List[List[int]] = [[0] * n_cols for _ in range(n_bands)]
        self.filled = [0] * n_bands
        self.line = 0

        # Context of the last prediction, consumed by update().
        self._sigma = None
        self._diffs = None
        self._dot = 0

    def start_line(self, y: int) -> None:
        """ Moves the reconstructed history to line y. """
        assert y == self.line + 1 or (y == 0 and self.line == 0), \
            'Error: Lines must be visited in order!'
        if y > 0:
            self.prev_rows, self.cur_rows = self.cur_rows, self.prev_rows
        self.filled = [0] * self.geometry.n_bands
        self.line = y

    def rho(self, x: int, y: int) -> int:
        """ Weight update exponent after x + y * n_cols samples of a band. """
        cfg = self.config
        t = y * self.geometry.n_cols + x
        return min(cfg.rho_final, cfg.rho_init + t // cfg.rho_interval)

    def predict(self, x: int, y: int, z: int) -> int:
        """
        Predicts s_{x,y,z} from the causal reconstructed neighborhood.

        Arguments:
            x: Column.
            y: Row, must be the current line.
            z: Band.

        Returns:
            The clamped prediction s^.
        """
        assert y == self.line and self.filled[z] == x, \
            'Error: Non-causal prediction request at (%d, %d, %d)!' % (x, y, z)
        bands_used = min(self.config.bands_used, z)
        assert bands_used == 0 or self.filled[z - 1] > x, \
            'Error: Band %d is not reconstructed at column %d!' % (z - 1, x)

        if x == 0 and y == 0:
            # Mid-range for the first P bands, the co-located sample of band z - 1 after.
            self._sigma = None
            if z == 0 or z < self.config.bands_used:
                return self.s_mid
            return self.cur_rows[z - 1][0]

        cur = self.cur_rows[z]
        if y == 0:
            sigma = 4 * cur[x - 1]
            d_n = d_w = d_nw = 0
        else:
            prev = self.prev_rows[z]
            north = prev[x]
            north_east = prev[x + 1] if x + 1 < self.geometry.n_cols else north
            if x == 0:
                west = north_west = north
            else:
                west = cur[x - 1]
                north_west = prev[x - 1]
            sigma = west + north_west + north + north_east
            d_n = 4 * north - sigma
            d_w = 4 * west - sigma
            d_nw = 4 * north_west - sigma

        diffs = [0] * self.config.bands_used
        for i in range(bands_used):
            diffs[i] = self.central[z - 1 - i][x]
        diffs += [d_n, d_w, d_nw]

        weights = self.weights[z]
        dot = 0
        for w, d in zip(weights, diffs):
            dot += w * d

        self._sigma = sigma
        self._diffs = diffs
        self._dot = dot

        omega = self.config.weight_resolution
        s_hat = (dot + (sigma << omega) + (1 << (omega + 1))) >> (omega + 2)
        return min(max(s_hat, self.s_min), self.s_max)

    def prediction_error(self, reconstructed: int) -> int:
        """
        Full-resolution error of the last prediction against the reconstructed sample:
        positive when the sample lies above the unrounded prediction.
        """
        if self._sigma is None:
            return 0
        return ((4 * reconstructed - self._sigma) << self.config.weight_resolution) - self._dot

    def adapt(self, x: int, y: int, z: int, prediction_error: int) -> None:
        """ Sign-algorithm weight update w <- clamp(w + sgn(e) * d / 2^rho). """
        if prediction_error == 0 or self._sigma is None:
            return
        rho = self.rho(x, y)
        w_min, w_max = self.w_min, self.w_max
        weights = self.weights[z]
        for i, d in enumerate(self._diffs):
            step = d >> rho if d >= 0 else -((-d) >> rho)
            w = weights[i] + step if prediction_error > 0 else weights[i] - step
            weights[i] = w_min if w < w_min else (w_max if w > w_max else w)

    def update(self, x: int, y: int, z: int, prediction_error: int, reconstructed: int) -> None:
        """
        Adapts the band weights and stores the reconstructed sample.

        Arguments:
            x: Column of the last prediction.
            y: Row of the last prediction.
            z: Band of the last prediction.
            prediction_error: Error returned by prediction_error().
            reconstructed: Reconstructed sample s~_{x,y,z}.
        """
        assert self.filled[z] == x, 'Error: update() does not match the last prediction!'
        self.adapt(x, y, z, prediction_error)
        self.cur_rows[z][x] = reconstructed
        self.central[z][x] = 0 if self._sigma is None else 4 * reconstructed - self._sigma
        self.filled[z] = x + 1
