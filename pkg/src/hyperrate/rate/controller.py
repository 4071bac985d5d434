# Copyright 2024 The hyperrate Authors

from __future__ import annotations

from typing import Sequence

from hyperrate.codec.constants import LUT_SCALE
from hyperrate.codec.data_classes import ControllerConfig
from hyperrate.codec.quantizer import StepSize
from hyperrate.rate.rate_model import RateLut


class ControllerState:
    """ Mutable state of the rate controller between two lines. """

    def __init__(self, q_current: int, r_target: int):
        """
        Arguments:
            q_current: Quantization step Q_y of the line being coded.
            r_target: Adjusted target rate in millibits per sample.
        """
        self.q_current = q_current
        self.r_target = r_target
        self.produced_bits = 0
        self.samples_done = 0
        self.lines_done = 0
        self.search_steps = 0

    def __repr__(self):
        return 'ControllerState(q=%d, r_target=%d mb, produced=%d bits, lines=%d)' % (
            self.q_current, self.r_target, self.produced_bits, self.lines_done)


class LineRecord:
    """ One row of the controller trace. """

    fields = ('line', 'q', 'r_target', 'predicted_rate', 'actual_bits', 'lookups',
              'search_steps')

    def __init__(self, line: int, q: int, r_target: int, predicted_rate: int,
                 actual_bits: int, lookups: int, search_steps: int):
        self.line = line
        self.q = q
        self.r_target = r_target
        self.predicted_rate = predicted_rate
        self.actual_bits = actual_bits
        self.lookups = lookups
        self.search_steps = search_steps

    def serialize(self) -> dict:
        """ Serialize instance into json-friendly format. """
        return {key: getattr(self, key) for key in self.fields}

    @classmethod
    def deserialize(cls, content: dict):
        """ Initialize from serialized dictionary. """
        return cls(*(int(content[key]) for key in cls.fields))


class RateController:
    """
    Chooses one quantization step per spectral line.

    After a line is coded, the working target is corrected with the measured output
    (update_target) and the step of the next line is searched in the rate LUT starting
    from the current one (select_next_q).
    """

    def __init__(self, config: ControllerConfig, lut: RateLut, samples_per_line: int):
        """
        Arguments:
            config: Controller settings.
            lut: Rate LUT shared with other sessions; only its counter is mutated.
            samples_per_line: n_cols * n_bands.
        """
        assert samples_per_line >= 1, 'Error: samples_per_line must be >= 1!'
        assert config.q_max >> 1 <= lut.delta_max, \
            'Error: q_max=%d exceeds the LUT domain!' % config.q_max
        self.config = config
        self.lut = lut
        self.samples_per_line = samples_per_line
        # With q_init = 0 the encoder derives the first step; the search then starts at Q = 1.
        self.state = ControllerState(config.q_init or 1, config.rate_millibits)
        self.last_predicted_rate = 0

    @property
    def step(self) -> StepSize:
        return StepSize(self.state.q_current, self.config.q_max)

    def update_target(self, actual_line_bits: int, line_samples: int) -> int:
        """
        Feedback correction of the working target after a coded line:

            R_target = max(0, R_user + (B - P) / (tau * samples_per_line))

        with B = R_user * samples coded so far and P the payload bits produced so far.

        Arguments:
            actual_line_bits: Entropy-coded payload bits of the line just coded.
            line_samples: Samples in that line.

        Returns:
            The new target in millibits per sample.
        """
        state = self.state
        state.produced_bits += actual_line_bits
        state.samples_done += line_samples
        state.lines_done += 1

        r_user = self.config.rate_millibits
        budget = r_user * state.samples_done
        deficit = budget - state.produced_bits * LUT_SCALE
        state.r_target = max(0, r_user + deficit // (self.config.tau * self.samples_per_line))
        return state.r_target

    def select_next_q(self, medians: Sequence[int]) -> StepSize:
        """
        Searches the step of the next line, warm-started at the current step: walk up by 2
        while the predicted line rate is at or above the target, or down by 2 while it is at
        or below, then step back if the walk crossed the target and the previous candidate
        was closer. The line rate sum_z R(m_z, Q) is compared against R_target * n_bands.
        Ties keep the larger step.

        Arguments:
            medians: Clamped median of medians m_z of every band.

        Returns:
            The step of the next line.
        """
        lut = self.lut
        q_max = self.config.q_max
        target = self.state.r_target * len(medians)

        q = self.state.q_current
        rate = lut.line_rate(medians, q)
        steps = 0
        if rate >= target:
            rate_old = rate
            while rate >= target and q < q_max:
                rate_old = rate
                q += 2
                rate = lut.line_rate(medians, q)
                steps += 1
            if steps and abs(rate - target) > abs(rate_old - target):
                q -= 2
                rate = rate_old
        else:
            rate_old = rate
            while rate <= target and q > 1:
                rate_old = rate
                q -= 2
                rate = lut.line_rate(medians, q)
                steps += 1
            # Stopping at Q = 1 without crossing the target leaves nothing to roll back to.
            if rate > target and abs(rate - target) >= abs(rate_old - target):
                q += 2
                rate = rate_old

        self.state.q_current = q
        self.state.search_steps += steps
        self.last_predicted_rate = rate
        return StepSize(q, q_max)

