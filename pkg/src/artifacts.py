''' writes result tables as CSV with a key = value metadata sidecar next to them '''

import math
from enum import Enum
from typing import Any, Dict

import numpy as np
import pandas as pd

from src.config_processor import parse_lines

FLOAT_FORMAT = '%.9g'
SIDECAR_SUFFIX = '.meta'


def sidecar_path(output_path: str) -> str:
    return output_path + SIDECAR_SUFFIX


def format_value(value: Any) -> str:
    '''Text that parse_value reads back to an equal value; floats keep full precision'''
    if isinstance(value, Enum):
        value = value.value
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, np.ndarray):
        value = value.tolist()

    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return repr(str(value))
        return repr(value)
    if isinstance(value, (list, tuple, dict, int, bool)) or value is None:
        return repr(value)
    return repr(str(value))


def write_table(frame: pd.DataFrame, output_path: str):
    frame.to_csv(output_path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def write_sidecar(output_path: str, metadata: Dict[str, Any]):
    lines = [f'{key} = {format_value(metadata[key])}\n' for key in sorted(metadata)]
    with open(sidecar_path(output_path), 'w', newline='\n') as f:
        f.writelines(lines)


def read_sidecar(output_path: str) -> Dict[str, Any]:
    with open(sidecar_path(output_path), 'r') as f:
        return parse_lines(f, sidecar_path(output_path))


def export_results(frame: pd.DataFrame, output_path: str, metadata: Dict[str, Any]):
    '''Table and sidecar; identical inputs give byte-identical files'''
    write_table(frame, output_path)
    write_sidecar(output_path, metadata)
