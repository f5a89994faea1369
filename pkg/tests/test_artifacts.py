import numpy as np
import pandas as pd

from src.artifacts import format_value, export_results, read_sidecar, sidecar_path
from src.config_processor import parse_value
from src.system_constants import Command


def test_format_value_reads_back():
    for value in [0.1, 1e-300, 3, True, None, [0.001, 0.01], 'results/eval.csv']:
        assert parse_value(format_value(value)) == value


def test_format_value_unwraps_numpy_and_enums():
    assert format_value(np.float64(0.25)) == '0.25'
    assert format_value(np.int64(7)) == '7'
    assert format_value(np.array([1, 2])) == '[1, 2]'
    assert format_value(Command.SWEEP) == "'sweep'"
    assert format_value(float('nan')) == "'nan'"


def test_export_writes_table_and_sidecar(tmp_path):
    path = str(tmp_path / 'table.csv')
    frame = pd.DataFrame({'axis_value': [0.1, 1.0], 'r_e_bits_s_hz': [1.0 / 3.0, 2.0]})
    export_results(frame, path, {'seed': 1, 'command': Command.EVAL, 'theta': 0.01})

    with open(path) as f:
        lines = f.read().splitlines()
    assert lines == ['axis_value,r_e_bits_s_hz', '0.1,0.333333333', '1,2']

    with open(sidecar_path(path)) as f:
        assert f.read() == "command = 'eval'\nseed = 1\ntheta = 0.01\n"
    assert read_sidecar(path) == {'command': 'eval', 'seed': 1, 'theta': 0.01}


def test_export_is_byte_identical(tmp_path):
    frame = pd.DataFrame({'q': np.geomspace(1.0, 1e3, 5), 'p': np.linspace(0.5, 0.0, 5)})
    first, second = str(tmp_path / 'a.csv'), str(tmp_path / 'b.csv')
    export_results(frame, first, {'seed': 3})
    export_results(frame, second, {'seed': 3})
    with open(first, 'rb') as a, open(second, 'rb') as b:
        assert a.read() == b.read()
