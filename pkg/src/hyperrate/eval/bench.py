# Copyright 2024 The hyperrate Authors

from __future__ import annotations

import argparse
import csv
import json
import os
import warnings

from importlib import import_module
from typing import Any, Dict, List, Sequence

import numpy as np

from hyperrate.codec.config import config_factory, load_config
from hyperrate.codec.data_classes import CodecConfig
from hyperrate.codec.pipeline import HyperspectralEncoder, decode
from hyperrate.eval.metrics import metrics, order0_entropy
from hyperrate.rate.rate_model import RateLut, build_lut, lut_from_env
from hyperrate.utils.data_classes import ImageCube
from hyperrate.utils.synthetic import synthetic_cube

# Lines excluded from the amortized search step count while the controller converges.
WARMUP_LINES = 10


class BenchResult:
    """ Outcome of one encode of the benchmark cube. """

    fields = ('target', 'q_max', 'payload_rate', 'container_rate', 'snr', 'mad', 'lossless',
              'lookups', 'lookups_per_msample', 'search_steps_per_line', 'controller_time',
              'total_time', 'throughput')

    def __init__(self, target: float, q_max: int, payload_rate: float, container_rate: float,
                 snr: float, mad: int, lossless: bool, lookups: int, lookups_per_msample: float,
                 search_steps_per_line: float, controller_time: float, total_time: float,
                 throughput: float):
        """
        Arguments:
            target: User target rate in bits per sample.
            q_max: Largest allowed quantization step.
            payload_rate: Achieved payload rate in bits per sample.
            container_rate: Achieved rate including header and side channel.
            snr: Signal to noise ratio in dB, inf when lossless.
            mad: Maximum absolute distortion.
            lossless: Whether every line used Q = 1.
            lookups: Rate LUT lookups of the encode.
            lookups_per_msample: Lookups per million samples.
            search_steps_per_line: Mean search steps per line after the warm-up lines.
            controller_time: Seconds spent in rate control.
            total_time: Seconds spent encoding.
            throughput: Encoded samples per second.
        """
        self.target = target
        self.q_max = q_max
        self.payload_rate = payload_rate
        self.container_rate = container_rate
        self.snr = snr
        self.mad = mad
        self.lossless = lossless
        self.lookups = lookups
        self.lookups_per_msample = lookups_per_msample
        self.search_steps_per_line = search_steps_per_line
        self.controller_time = controller_time
        self.total_time = total_time
        self.throughput = throughput

    def __repr__(self):
        return 'BenchResult(%s)' % self.serialize()

    @property
    def rate_deviation(self) -> float:
        """ Relative deviation of the payload rate from the target. """
        return (self.payload_rate - self.target) / self.target

    def serialize(self) -> Dict[str, Any]:
        """ Serialize instance into json-friendly format. """
        return {key: getattr(self, key) for key in self.fields}

    @classmethod
    def deserialize(cls, content: Dict[str, Any]):
        """ Initialize from serialized dictionary. """
        return cls(*(content[key] for key in cls.fields))


def with_controller(config: CodecConfig, rate: float = None, q_max: int = None) -> CodecConfig:
    """ Copy of a codec configuration with another target rate and/or step cap. """
    content = config.serialize()
    if rate is not None:
        content['controller']['rate'] = rate
    if q_max is not None:
        content['controller']['q_max'] = q_max
        content['controller']['q_init'] = min(content['controller']['q_init'], q_max)
    return CodecConfig.deserialize(content)


class RateControlBench:
    """
    Benchmark of the line-based rate control on one cube.

    - run: encodes the cube at several targets and reports achieved rates, distortion,
        LUT lookups and controller time.
    - qmax_sweep: encodes at a fixed target under decreasing step caps.
    - main: runs both, writes a JSON summary and CSV tables and optionally renders plots.
    """

    def __init__(self,
                 cube: ImageCube,
                 config: CodecConfig,
                 output_dir: str = None,
                 lut: RateLut = None,
                 verify: bool = False,
                 verbose: bool = True):
        """
        Arguments:
            cube: The cube to encode.
            config: Base codec settings, the target rate and q_max are overridden per run.
            output_dir: Folder to save tables and plots to.
            lut: Rate LUT, built once when omitted.
            verify: Whether to decode every bitstream and check it against the encoder.
            verbose: Whether to print to stdout.
        """
        self.cube = cube
        self.config = config
        self.output_dir = output_dir
        self.lut = lut if lut is not None else build_lut()
        self.verify = verify
        self.verbose = verbose
        self.traces: Dict[str, list] = {}

        if output_dir is not None and not os.path.isdir(output_dir):
            os.makedirs(output_dir)

    def encode_once(self, config: CodecConfig, lut: RateLut = None) -> BenchResult:
        """ Encodes the cube once and measures the run. """
        encoder = HyperspectralEncoder(config, lut if lut is not None else self.lut)
        bitstream = encoder.encode(self.cube)
        if self.verify:
            assert decode(bitstream) == encoder.reconstruction, \
                'Error: Decoder output differs from the encoder reconstruction!'

        controller = config.controller
        self.traces['%g_%d' % (controller.rate, controller.q_max)] = encoder.trace
        snr, mad = metrics(self.cube, encoder.reconstruction)
        n_samples = self.cube.geometry.n_samples
        settled = encoder.trace[WARMUP_LINES:]
        steps = float(np.mean([r.search_steps for r in settled])) if settled else 0.0

        return BenchResult(controller.rate, controller.q_max, bitstream.payload_rate,
                           bitstream.container_rate, snr, mad, bitstream.lossless,
                           encoder.lookups, 1e6 * encoder.lookups / n_samples, steps,
                           encoder.controller_time, encoder.total_time,
                           n_samples / encoder.total_time)

    def run(self, targets: Sequence[float]) -> List[BenchResult]:
        """
        Encodes the cube at every target rate.

        Arguments:
            targets: Target rates in bits per sample.

        Returns:
            One result per target.
        """
        results = []
        for target in targets:
            if self.verbose:
                print('Encoding at %.3f bpp' % target)
            results.append(self.encode_once(with_controller(self.config, rate=target)))
        return results

    def qmax_sweep(self, target: float, q_maxes: Sequence[int]) -> List[BenchResult]:
        """
        Encodes the cube at a fixed target under several step caps. Each run uses a LUT
        reduced to the steps it can reach.

        Arguments:
            target: Target rate in bits per sample.
            q_maxes: Odd step caps.

        Returns:
            One result per cap.
        """
        results = []
        for q_max in q_maxes:
            if self.verbose:
                print('Encoding at %.3f bpp with Q_max=%d' % (target, q_max))
            config = with_controller(self.config, rate=target, q_max=q_max)
            results.append(self.encode_once(config, build_lut(delta_max=q_max >> 1)))
        return results

    @staticmethod
    def to_csv(results: Sequence[BenchResult], path: str) -> None:
        """ Writes results as a CSV table with one row per encode. """
        with open(path, 'w', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=BenchResult.fields)
            writer.writeheader()
            for result in results:
                row = result.serialize()
                for key in ('payload_rate', 'container_rate', 'snr'):
                    row[key] = '%.3f' % row[key]
                writer.writerow(row)

    def render(self, results: Sequence[BenchResult]) -> None:
        """ Renders the controller traces, when matplotlib is available. """
        try:
            plot_trace = getattr(import_module('hyperrate.eval.render'), 'plot_trace')
            rate_accuracy_plot = getattr(import_module('hyperrate.eval.render'),
                                         'rate_accuracy_plot')
        except ModuleNotFoundError:
            warnings.warn('''The visualization dependencies are not installed on your system! '''
                          '''Run 'pip install "hyperrate[visu]"'.''')
        else:
            if self.verbose:
                print('Rendering controller traces')
            n_samples_per_line = self.cube.geometry.n_cols * self.cube.geometry.n_bands
            for key, trace in self.traces.items():
                plot_trace(trace, n_samples_per_line,
                           savepath=os.path.join(self.output_dir, 'trace_%s.pdf' % key))
            rate_accuracy_plot(results, savepath=os.path.join(self.output_dir, 'rates.pdf'))

    def main(self,
             targets: Sequence[float],
             q_maxes: Sequence[int] = (),
             render_curves: bool = False) -> Dict[str, Any]:
        """
        Runs the rate sweep and the optional Q_max sweep and stores the results.

        Arguments:
            targets: Target rates in bits per sample.
            q_maxes: Step caps swept at the first target, skipped when empty.
            render_curves: Whether to render controller traces to disk.

        Returns:
            A dict with the input entropy and the serialized results.
        """
        entropy = order0_entropy(self.cube)
        results = self.run(targets)
        sweep = self.qmax_sweep(targets[0], q_maxes) if q_maxes else []

        summary = {
            'geometry': self.cube.geometry.serialize(),
            'entropy': entropy,
            'rates': [r.serialize() for r in results],
            'qmax_sweep': [r.serialize() for r in sweep]
        }
        if self.output_dir is not None:
            if self.verbose:
                print('Saving results to: %s' % self.output_dir)
            with open(os.path.join(self.output_dir, 'bench_summary.json'), 'w') as f:
                json.dump(summary, f, indent=2)
            self.to_csv(results, os.path.join(self.output_dir, 'rates.csv'))
            if sweep:
                self.to_csv(sweep, os.path.join(self.output_dir, 'qmax_sweep.csv'))
            if render_curves:
                self.render(results)

        print()
        print('Input entropy: %.3f bpp' % entropy)
        print('%-8s\t%-6s\t%-8s\t%-8s\t%-8s\t%-5s\t%-10s\t%-8s' % (
            'Target', 'Q_max', 'Payload', 'Total', 'SNR', 'MAD', 'Lookups/M', 'RC time'))
        for r in results + sweep:
            print('%-8.3f\t%-6d\t%-8.3f\t%-8.3f\t%-8.3f\t%-5d\t%-10.0f\t%-8.3f%s' % (
                r.target, r.q_max, r.payload_rate, r.container_rate, r.snr, r.mad,
                r.lookups_per_msample, r.controller_time, ' (lossless)' if r.lossless else ''))
        return summary


if __name__ == "__main__":

    # Settings.
    parser = argparse.ArgumentParser(description='Benchmark the line-based rate control on '
                                                 'a synthetic cube.',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--output_dir', type=str, default='~/hyperrate-bench',
                        help='Folder to store tables and plots.')
    parser.add_argument('--rows', type=int, default=128, help='Rows of the synthetic cube.')
    parser.add_argument('--cols', type=int, default=256, help='Columns of the synthetic cube.')
    parser.add_argument('--bands', type=int, default=32, help='Bands of the synthetic cube.')
    parser.add_argument('--seed', type=int, default=42, help='Seed of the synthetic cube.')
    parser.add_argument('--targets', type=float, nargs='+', default=[0.5, 1.0, 2.0, 3.0],
                        help='Target rates in bits per sample.')
    parser.add_argument('--q_maxes', type=int, nargs='*', default=[511, 255, 127, 63],
                        help='Step caps swept at the first target.')
    parser.add_argument('--config_path', type=str, default='',
                        help='Path to the configuration file. '
                             'If no path given, the default configuration will be used.')
    parser.add_argument('--render_curves', type=int, default=1,
                        help='Whether to render controller traces to disk.')
    parser.add_argument('--verbose', type=int, default=1,
                        help='Whether to print to stdout.')
    args = parser.parse_args()

    if args.config_path == '':
        cfg_ = config_factory('codec_default')
    else:
        cfg_ = load_config(args.config_path)

    cube_ = synthetic_cube(args.rows, args.cols, args.bands, seed=args.seed)
    bench = RateControlBench(cube_, cfg_.fitted(args.bands),
                             output_dir=os.path.expanduser(args.output_dir),
                             lut=lut_from_env(bool(args.verbose)), verbose=bool(args.verbose))
    bench.main(args.targets, args.q_maxes, render_curves=bool(args.render_curves))
