# Copyright 2024 The hyperrate Authors

from __future__ import annotations

from hyperrate.codec.constants import DEFAULT_ADAPTATION_SHIFT, DEFAULT_SUBSET_LENGTH, \
    LUT_SCALE, Q_MAX, UINT16_MAX, UINT32_MAX, UINT8_MAX


class PredictorConfig:
    """ Data class that specifies the adaptive predictor settings. """

    def __init__(self,
                 bands_used: int = 3,
                 weight_resolution: int = 13,
                 rho_init: int = 4,
                 rho_final: int = 9,
                 rho_interval: int = 64,
                 register_size: int = 64):
        """
        Arguments:
            bands_used: Number P of previous bands used by the predictor.
            weight_resolution: Fractional bits of the fixed-point weights.
            rho_init: Initial weight update exponent.
            rho_final: Final weight update exponent.
            rho_interval: Number of samples after which the exponent is incremented.
            register_size: Bits available to the inner-product accumulator.
        """
        assert 0 <= bands_used <= UINT16_MAX, 'Error: bands_used must be in [0, %d]!' % UINT16_MAX
        assert 1 <= weight_resolution <= 20, 'Error: weight_resolution must be in [1, 20]!'
        assert 0 <= rho_init <= rho_final <= UINT8_MAX, \
            'Error: Need 0 <= rho_init <= rho_final <= %d!' % UINT8_MAX
        assert 1 <= rho_interval <= UINT16_MAX, \
            'Error: rho_interval must be in [1, %d]!' % UINT16_MAX
        assert 8 <= register_size <= UINT8_MAX, \
            'Error: register_size must be in [8, %d]!' % UINT8_MAX

        self.bands_used = bands_used
        self.weight_resolution = weight_resolution
        self.rho_init = rho_init
        self.rho_final = rho_final
        self.rho_interval = rho_interval
        self.register_size = register_size

    def __eq__(self, other):
        return isinstance(other, PredictorConfig) and self.serialize() == other.serialize()

    def __repr__(self):
        return 'PredictorConfig(%s)' % self.serialize()

    @property
    def n_weights(self) -> int:
        """ P central differences plus the N, W and NW directional differences. """
        return self.bands_used + 3

    def required_register_bits(self, bit_depth: int) -> int:
        """
        Returns the signed accumulator width needed by the inner product when every weight
        sits at its bound and every local difference at its extreme.
        """
        max_weight = 1 << (self.weight_resolution + 2)
        max_diff = 4 * ((1 << bit_depth) - 1)
        max_sum = 4 * ((1 << bit_depth) - 1) << self.weight_resolution
        worst = self.n_weights * max_weight * max_diff + max_sum
        return worst.bit_length() + 1

    def validate(self, bit_depth: int, n_bands: int) -> None:
        """ Checks the settings against the cube they are about to code. """
        if self.bands_used > n_bands - 1:
            raise ValueError('Error: Predictor uses P=%d previous bands, cube has only %d!'
                             % (self.bands_used, n_bands))
        needed = self.required_register_bits(bit_depth)
        if needed > self.register_size:
            raise ValueError('Error: register_size=%d cannot hold the inner product, %d bits '
                             'needed!' % (self.register_size, needed))

    def fitted(self, n_bands: int) -> PredictorConfig:
        """ Copy with P reduced to the n_bands - 1 previous bands a cube offers. """
        content = self.serialize()
        content['bands_used'] = min(self.bands_used, n_bands - 1)
        return PredictorConfig.deserialize(content)

    def serialize(self) -> dict:
        """ Serialize instance into json-friendly format. """
        return {
            'bands_used': self.bands_used,
            'weight_resolution': self.weight_resolution,
            'rho_init': self.rho_init,
            'rho_final': self.rho_final,
            'rho_interval': self.rho_interval,
            'register_size': self.register_size
        }

    @classmethod
    def deserialize(cls, content: dict):
        """ Initialize from serialized dictionary. """
        return cls(content['bands_used'],
                   content['weight_resolution'],
                   content['rho_init'],
                   content['rho_final'],
                   content['rho_interval'],
                   content['register_size'])


class ControllerConfig:
    """ Data class that specifies the rate controller settings. """

    def __init__(self,
                 rate: float = 2.0,
                 q_max: int = Q_MAX,
                 tau: int = 5,
                 window: int = 1,
                 q_init: int = 0):
        """
        Arguments:
            rate: User target rate R_user in bits per sample.
            q_max: Largest allowed odd quantization step.
            tau: Number of lines over which a budget deficit is spread.
            window: Number |I| of past lines entering the feedback.
            q_init: Quantization step of the first line. 0 derives it from the target and a
                lossless look-ahead of the first line.
        """
        if not rate > 0:
            raise ValueError('Error: Target rate must be > 0, got %s!' % rate)
        if not 1 <= int(round(rate * LUT_SCALE)) <= UINT32_MAX:
            raise ValueError('Error: Target rate %s is not representable in millibits per '
                             'sample!' % rate)
        if q_max % 2 == 0 or not 1 <= q_max <= Q_MAX:
            raise ValueError('Error: q_max must be odd and in [1, %d], got %d!' % (Q_MAX, q_max))
        if q_init != 0 and (q_init % 2 == 0 or not 1 <= q_init <= q_max):
            raise ValueError('Error: q_init must be 0 or odd and in [1, q_max], got %d!'
                             % q_init)
        if not 1 <= tau <= UINT16_MAX:
            raise ValueError('Error: tau must be in [1, %d], got %d!' % (UINT16_MAX, tau))
        if window != 1:
            raise ValueError('Error: Only a feedback window of |I| = 1 line is supported!')

        self.rate = float(rate)
        self.q_max = q_max
        self.tau = tau
        self.window = window
        self.q_init = q_init

    def __eq__(self, other):
        return isinstance(other, ControllerConfig) and self.serialize() == other.serialize()

    def __repr__(self):
        return 'ControllerConfig(%s)' % self.serialize()

    @property
    def rate_millibits(self) -> int:
        """ Target rate in millibits per sample, the unit of the rate LUT. """
        return int(round(self.rate * LUT_SCALE))

    def serialize(self) -> dict:
        """ Serialize instance into json-friendly format. """
        return {
            'rate': self.rate,
            'q_max': self.q_max,
            'tau': self.tau,
            'window': self.window,
            'q_init': self.q_init
        }

    @classmethod
    def deserialize(cls, content: dict):
        """ Initialize from serialized dictionary. """
        return cls(content['rate'],
                   content['q_max'],
                   content['tau'],
                   content['window'],
                   content['q_init'])


class CodecConfig:
    """ Data class that groups every setting an encode needs and the decoder must mirror. """

    def __init__(self,
                 predictor: PredictorConfig = None,
                 controller: ControllerConfig = None,
                 subset_length: int = DEFAULT_SUBSET_LENGTH,
                 adaptation_shift: int = DEFAULT_ADAPTATION_SHIFT):
        """
        Arguments:
            predictor: Predictor settings.
            controller: Rate controller settings.
            subset_length: Subset length L of the median-of-medians estimator.
            adaptation_shift: Probability update shift of the binary range coder.
        """
        if not 1 <= subset_length <= 255:
            raise ValueError('Error: subset_length must be in [1, 255], got %d!' % subset_length)
        assert 1 <= adaptation_shift <= 10, 'Error: adaptation_shift must be in [1, 10]!'

        self.predictor = predictor if predictor is not None else PredictorConfig()
        self.controller = controller if controller is not None else ControllerConfig()
        self.subset_length = subset_length
        self.adaptation_shift = adaptation_shift

    def __eq__(self, other):
        return isinstance(other, CodecConfig) and self.serialize() == other.serialize()

    def __repr__(self):
        return 'CodecConfig(%s)' % self.serialize()

    def fitted(self, n_bands: int) -> CodecConfig:
        """ Copy whose predictor uses at most the previous bands a cube of n_bands offers. """
        return CodecConfig(self.predictor.fitted(n_bands), self.controller, self.subset_length,
                           self.adaptation_shift)

    def serialize(self) -> dict:
        """ Serialize instance into json-friendly format. """
        return {
            'predictor': self.predictor.serialize(),
            'controller': self.controller.serialize(),
            'subset_length': self.subset_length,
            'adaptation_shift': self.adaptation_shift
        }

    @classmethod
    def deserialize(cls, content: dict):
        """ Initialize from serialized dictionary. """
        return cls(PredictorConfig.deserialize(content['predictor']),
                   ControllerConfig.deserialize(content['controller']),
                   content['subset_length'],
                   content['adaptation_shift'])
