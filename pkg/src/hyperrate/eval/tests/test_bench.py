# Copyright 2024 The hyperrate Authors

import csv
import json
import os

import pytest

from hyperrate.codec.data_classes import CodecConfig
from hyperrate.eval.bench import BenchResult, RateControlBench, with_controller
from hyperrate.utils.synthetic import synthetic_cube


@pytest.fixture
def bench(lut, tmp_path) -> RateControlBench:
    cube = synthetic_cube(16, 24, 4, seed=3)
    return RateControlBench(cube, CodecConfig(), output_dir=str(tmp_path / 'bench'), lut=lut,
                            verify=True, verbose=False)


def test_with_controller():
    config = CodecConfig()
    changed = with_controller(config, rate=0.75, q_max=31)
    assert changed.controller.rate == 0.75
    assert changed.controller.q_max == 31
    assert changed.predictor == config.predictor
    assert config.controller.rate == 2.0


def test_run(bench):
    results = bench.run([1.0, 3.0])
    assert [r.target for r in results] == [1.0, 3.0]
    assert results[0].payload_rate < results[1].payload_rate
    assert results[0].mad >= results[1].mad
    for r in results:
        assert r.lookups > 0
        assert r.lookups_per_msample == pytest.approx(1e6 * r.lookups / (16 * 24 * 4))
        assert 0 <= r.controller_time <= r.total_time
        assert r.container_rate > r.payload_rate
    assert set(bench.traces) == {'1_511', '3_511'}


def test_controller_time_share(bench):
    results = bench.run([0.5, 1.0, 2.0])
    controller = sum(r.controller_time for r in results)
    total = sum(r.total_time for r in results)
    assert 0 < controller < 0.05 * total


def test_lookups_deterministic(bench):
    first, second = bench.run([1.5, 1.5])
    assert first.lookups == second.lookups
    assert first.payload_rate == second.payload_rate


def test_qmax_sweep(bench):
    results = bench.qmax_sweep(0.5, [511, 31])
    assert [r.q_max for r in results] == [511, 31]
    assert results[1].mad <= 15


def test_main_writes_tables(bench, capsys):
    summary = bench.main([1.0, 2.0], q_maxes=[63])
    assert len(summary['rates']) == 2 and len(summary['qmax_sweep']) == 1
    assert 'Input entropy' in capsys.readouterr().out

    with open(os.path.join(bench.output_dir, 'bench_summary.json')) as f:
        stored = json.load(f)
    assert stored['geometry'] == bench.cube.geometry.serialize()
    assert BenchResult.deserialize(stored['rates'][1]).target == 2.0

    with open(os.path.join(bench.output_dir, 'rates.csv')) as f:
        rows = list(csv.DictReader(f))
    assert [float(r['target']) for r in rows] == [1.0, 2.0]
    assert os.path.isfile(os.path.join(bench.output_dir, 'qmax_sweep.csv'))


def test_render_without_matplotlib(bench, monkeypatch):
    def missing(name):
        raise ModuleNotFoundError(name)

    monkeypatch.setattr('hyperrate.eval.bench.import_module', missing)
    results = bench.run([1.0])
    with pytest.warns(UserWarning):
        bench.render(results)


def test_render(bench):
    pytest.importorskip('matplotlib')
    import matplotlib
    matplotlib.use('Agg')

    results = bench.run([1.0])
    bench.render(results)
    assert os.path.isfile(os.path.join(bench.output_dir, 'trace_1_511.pdf'))
    assert os.path.isfile(os.path.join(bench.output_dir, 'rates.pdf'))
