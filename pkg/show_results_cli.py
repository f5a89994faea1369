import sys
import math

import pandas as pd

"""
Displays a result CSV in the terminal as an ASCII bar chart of its second column against its first
Sample usage: python3 show_results_cli.py results/theta_sweep.csv
"""
# ANSI color codes
COLOR_MAP = {
    "BAR": "\033[42m",  # Green background
    "FAILED": "\033[41m",  # Red background for failed rows
    "RESET": "\033[0m",
}

BAR_WIDTH = 50


def render_bar(value: float, largest: float, color: bool = True) -> str:
    if value is None or math.isnan(value):
        text = "failed"
        return COLOR_MAP["FAILED"] + text + COLOR_MAP["RESET"] if color else text

    length = 0 if largest <= 0 else int(round(BAR_WIDTH * max(value, 0.0) / largest))
    bar = "#" * length
    return COLOR_MAP["BAR"] + bar + COLOR_MAP["RESET"] if color and bar else bar


def render_table(frame: pd.DataFrame, color: bool = True) -> list:
    '''One line per row: label, bar, value'''
    if frame.shape[1] < 2:
        raise ValueError("need at least two columns to chart")

    label_column, value_column = frame.columns[0], frame.columns[1]
    values = pd.to_numeric(frame[value_column], errors="coerce")
    largest = values.max(skipna=True)
    largest = 0.0 if pd.isna(largest) else float(largest)

    labels = [str(label) for label in frame[label_column]]
    width = max(len(label) for label in labels) if labels else 0

    lines = [f"{label_column} vs {value_column}"]
    for label, value in zip(labels, values):
        value = float(value)
        shown = "nan" if math.isnan(value) else f"{value:.6g}"
        lines.append(f"{label:>{width}} | {render_bar(value, largest, color)} {shown}")
    return lines


def main():
    if len(sys.argv) < 2:
        print("Usage: python3 show_results_cli.py <result_csv>")
        return

    frame = pd.read_csv(sys.argv[1])
    for line in render_table(frame, color=sys.stdout.isatty()):
        print(line)


if __name__ == "__main__":
    main()
