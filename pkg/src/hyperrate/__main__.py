# Copyright 2024 The hyperrate Authors

"""
Command-line front end of hyperrate.

    hyperrate compress cube.raw --cols 256 --rows 128 --bands 32 --depth 12 --rate 2 --out c.hrc
    hyperrate decompress c.hrc --out rec.raw
    hyperrate metrics cube.raw rec.raw --geometry cube.txt
    hyperrate bench --synthetic --targets 0.5 1 2 --out bench/
    hyperrate lut-dump lut.bin

Geometry flags default to the sidecar named by HYPERRATE_GEOMETRY, the rate LUT is loaded
from HYPERRATE_LUT_PATH when set. Failures print `Error: ...` to stderr and exit with 1.
"""

import argparse
import os
import sys

from typing import List

from hyperrate.codec.bitstream import Bitstream
from hyperrate.codec.config import config_factory, load_config
from hyperrate.codec.constants import GEOMETRY_ENV_VAR
from hyperrate.codec.data_classes import CodecConfig
from hyperrate.codec.pipeline import HyperspectralEncoder, decode
from hyperrate.eval.bench import BenchResult, RateControlBench
from hyperrate.eval.metrics import metrics
from hyperrate.rate.controller import LineRecord
from hyperrate.rate.rate_model import build_lut, lut_from_env
from hyperrate.utils.data_classes import CubeGeometry, ImageCube, load_raw, store_raw
from hyperrate.utils.synthetic import synthetic_cube


def add_geometry_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('geometry')
    group.add_argument('--cols', type=int, help='Number of columns.')
    group.add_argument('--rows', type=int, help='Number of rows.')
    group.add_argument('--bands', type=int, help='Number of spectral bands.')
    group.add_argument('--depth', type=int, default=16, help='Bits per sample.')
    group.add_argument('--signed', action='store_true', help='Samples are signed.')
    group.add_argument('--byteorder', choices=('little', 'big'), default='little',
                       help='Byte order of 16-bit samples.')
    group.add_argument('--geometry', type=str, default=os.getenv(GEOMETRY_ENV_VAR),
                       help='Sidecar file of key=value geometry lines, used when the '
                            'dimension flags are not given.')


def add_codec_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('codec')
    group.add_argument('--config', type=str, default='',
                       help='Path to a codec configuration file. '
                            'If no path given, the default configuration will be used.')
    group.add_argument('--rate', type=float, help='Target rate in bits per sample.')
    group.add_argument('--qmax', type=int, help='Largest odd quantization step.')
    group.add_argument('--L', dest='subset_length', type=int,
                       help='Subset length of the median-of-medians estimator.')
    group.add_argument('--tau', type=int, help='Lines over which a rate deficit is spread.')
    group.add_argument('--qinit', type=int,
                       help='Quantization step of the first line, 0 derives it from the '
                            'target.')
    group.add_argument('--pbands', type=int, help='Previous bands used by the predictor.')


def parse_geometry(parser: argparse.ArgumentParser, args: argparse.Namespace) -> CubeGeometry:
    """ Geometry from the dimension flags, else from the sidecar file. """
    dims = (args.cols, args.rows, args.bands)
    if all(d is not None for d in dims):
        return CubeGeometry(args.cols, args.rows, args.bands, args.depth, args.signed,
                            args.byteorder)
    if any(d is not None for d in dims):
        parser.error('--cols, --rows and --bands must be given together')
    if args.geometry:
        return CubeGeometry.from_sidecar(args.geometry)
    parser.error('the cube geometry is required: pass --cols --rows --bands or --geometry '
                 '(or set %s)' % GEOMETRY_ENV_VAR)


def build_config(args: argparse.Namespace, n_bands: int) -> CodecConfig:
    """
    Codec configuration from the preset or file, overridden by explicit flags. Unless
    --pbands is given, P is reduced to the n_bands - 1 previous bands of the cube.
    """
    config = load_config(args.config) if args.config else config_factory('codec_default')
    content = config.serialize()
    controller = content['controller']
    for key, value in (('rate', args.rate), ('q_max', args.qmax), ('tau', args.tau),
                       ('q_init', args.qinit)):
        if value is not None:
            controller[key] = value
    if args.subset_length is not None:
        content['subset_length'] = args.subset_length
    if args.pbands is not None:
        content['predictor']['bands_used'] = args.pbands
        return CodecConfig.deserialize(content)
    return CodecConfig.deserialize(content).fitted(n_bands)


def load_input(parser: argparse.ArgumentParser, args: argparse.Namespace) -> ImageCube:
    if args.synthetic:
        if args.input is not None:
            parser.error('--synthetic does not take an input file')
        geometry = parse_geometry(parser, args) if args.cols or args.geometry else None
        if geometry is None:
            return synthetic_cube()
        return synthetic_cube(geometry.n_rows, geometry.n_cols, geometry.n_bands,
                              geometry.bit_depth)
    if args.input is None:
        parser.error('an input file or --synthetic is required')
    return load_raw(args.input, parse_geometry(parser, args))


def run_compress(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    cube = load_input(parser, args)
    config = build_config(args, cube.geometry.n_bands)
    encoder = HyperspectralEncoder(config, lut_from_env(args.verbose), verbose=args.verbose)
    bitstream = encoder.encode(cube)
    if args.out:
        bitstream.write(args.out)

    print('target=%.3f' % config.controller.rate)
    print('payload_bpp=%.3f' % bitstream.payload_rate)
    print('container_bpp=%.3f' % bitstream.container_rate)
    print('bytes=%d' % bitstream.n_bytes)
    print('lines=%d' % cube.geometry.n_rows)
    print('lookups=%d' % encoder.lookups)
    print('lossless=%d' % int(bitstream.lossless))
    if args.trace:
        print(','.join(LineRecord.fields))
        for record in encoder.trace:
            print(','.join(str(v) for v in record.serialize().values()))
    return 0


def run_decompress(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    bitstream = Bitstream.read(args.input)
    cube = decode(bitstream, verbose=args.verbose)
    store_raw(cube, args.out)
    if args.sidecar:
        cube.geometry.to_sidecar(args.sidecar)
    for key, value in cube.geometry.serialize().items():
        print('%s=%s' % (key, value))
    return 0


def run_metrics(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    geometry = parse_geometry(parser, args)
    snr, mad = metrics(load_raw(args.original, geometry), load_raw(args.reconstructed, geometry))
    print('snr=%.3f' % snr)
    print('mad=%d' % mad)
    print('lossless=%d' % int(mad == 0))
    return 0


def run_bench(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    cube = load_input(parser, args)
    bench = RateControlBench(cube, build_config(args, cube.geometry.n_bands),
                             output_dir=args.out,
                             lut=lut_from_env(args.verbose), verify=args.verify,
                             verbose=args.verbose)
    summary = bench.main(args.targets, args.qmaxes, render_curves=args.plots)
    if args.csv:
        RateControlBench.to_csv([BenchResult.deserialize(r) for r in summary['rates']],
                                args.csv)
    return 0


def run_lut_dump(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    lut = build_lut()
    lut.self_check()
    lut.dump(args.out)
    print('entries=%d' % lut.table.size)
    print('bytes=%d' % lut.nbytes)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='hyperrate',
                                     description='Near-lossless hyperspectral compression '
                                                 'with line-based rate control.')
    parser.add_argument('--verbose', action='store_true', help='Print progress to stdout.')
    commands = parser.add_subparsers(dest='command', required=True)

    compress = commands.add_parser('compress', help='Compress a raw BIL cube.')
    compress.add_argument('input', nargs='?', help='Raw BIL input file.')
    compress.add_argument('--synthetic', action='store_true',
                          help='Compress a seeded synthetic cube instead of a file.')
    compress.add_argument('--out', type=str, help='Output bitstream.')
    compress.add_argument('--trace', action='store_true', help='Print the per-line trace.')
    add_geometry_args(compress)
    add_codec_args(compress)
    compress.set_defaults(func=run_compress)

    decompress = commands.add_parser('decompress', help='Decompress a bitstream.')
    decompress.add_argument('input', help='Bitstream file.')
    decompress.add_argument('--out', type=str, required=True, help='Raw BIL output file.')
    decompress.add_argument('--sidecar', type=str, help='Also write the geometry sidecar.')
    decompress.set_defaults(func=run_decompress)

    metrics_cmd = commands.add_parser('metrics', help='SNR and MAD of a reconstruction.')
    metrics_cmd.add_argument('original', help='Raw BIL original.')
    metrics_cmd.add_argument('reconstructed', help='Raw BIL reconstruction.')
    add_geometry_args(metrics_cmd)
    metrics_cmd.set_defaults(func=run_metrics)

    bench = commands.add_parser('bench', help='Rate accuracy and lookup benchmark.')
    bench.add_argument('input', nargs='?', help='Raw BIL input file.')
    bench.add_argument('--synthetic', action='store_true',
                       help='Benchmark on a seeded synthetic cube instead of a file.')
    bench.add_argument('--targets', type=float, nargs='+', default=[0.5, 1.0, 2.0, 3.0],
                       help='Target rates in bits per sample.')
    bench.add_argument('--qmaxes', type=int, nargs='*', default=[],
                       help='Step caps swept at the first target.')
    bench.add_argument('--out', type=str, help='Folder for the JSON summary and CSV tables.')
    bench.add_argument('--csv', type=str, help='Also write the rate table to this file.')
    bench.add_argument('--plots', action='store_true', help='Render controller traces.')
    bench.add_argument('--verify', action='store_true', help='Decode and check every run.')
    add_geometry_args(bench)
    add_codec_args(bench)
    bench.set_defaults(func=run_bench)

    lut_dump = commands.add_parser('lut-dump', help='Write the rate LUT as a binary blob.')
    lut_dump.add_argument('out', help='Output file.')
    lut_dump.set_defaults(func=run_lut_dump)
    return parser


def main(argv: List[str] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except (OSError, ValueError, AssertionError) as e:
        message = str(e)
        if not message.startswith('Error:'):
            message = 'Error: %s' % message
        print(message, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
