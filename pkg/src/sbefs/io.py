"""File formats: CSV and LIBSVM datasets, ID lists, run reports and config files."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .data import DataError, Dataset

WALL_CLOCK_KEYS = frozenset({"wall_seconds"})


def _map_labels(raw, where):
    names = []
    index = {}
    labels = []
    for value in raw:
        if value not in index:
            index[value] = len(names)
            names.append(value)
        labels.append(index[value])
    if len(names) < 2:
        raise DataError(f"{where}: only one class present")
    return np.array(labels, dtype=np.int64), tuple(names)


def load_csv(path, header=False):
    """Read features followed by a trailing label column.

    Labels are mapped to 0..K-1 in order of first appearance; the original
    strings are kept in ``Dataset.label_names``.
    """
    path = Path(path)
    rows, raw_labels = [], []
    width = None
    with path.open(newline="") as fh:
        for lineno, cells in enumerate(csv.reader(fh), start=1):
            if header and lineno == 1:
                continue
            if not cells or all(not c.strip() for c in cells):
                continue
            if width is None:
                width = len(cells)
                if width < 2:
                    raise DataError(f"{path}: line {lineno}: need at least one feature and a label")
            elif len(cells) != width:
                raise DataError(f"{path}: line {lineno}: expected {width} fields, got {len(cells)}")
            try:
                values = [float(c) for c in cells[:-1]]
            except ValueError:
                bad = next(c for c in cells[:-1] if not _is_float(c))
                raise DataError(f"{path}: line {lineno}: non-numeric feature value {bad!r}") from None
            if not all(np.isfinite(values)):
                raise DataError(f"{path}: line {lineno}: missing or non-finite feature value")
            rows.append(values)
            raw_labels.append(cells[-1].strip())
    if not rows:
        raise DataError(f"{path}: no data rows")
    labels, names = _map_labels(raw_labels, str(path))
    return Dataset(np.array(rows, dtype=np.float64), labels, label_names=names)


def _is_float(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def format_value(x):
    """Canonical text for a float: the shortest repr that round-trips exactly."""
    return repr(float(x))


def write_csv(dataset, path):
    names = dataset.label_names or tuple(str(i) for i in range(dataset.n_classes))
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row, label in zip(dataset.samples, dataset.labels):
            writer.writerow([format_value(v) for v in row] + [names[label]])


def load_libsvm(path):
    """Read ``label idx:val ...`` lines (1-based, strictly increasing indexes) into a dense dataset."""
    path = Path(path)
    entries, raw_labels = [], []
    width = 0
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            raw_labels.append(tokens[0])
            row = {}
            prev = 0
            for tok in tokens[1:]:
                try:
                    idx_text, val_text = tok.split(":", 1)
                    idx, val = int(idx_text), float(val_text)
                except ValueError:
                    raise DataError(f"{path}: line {lineno}: malformed entry {tok!r}") from None
                if idx < 1:
                    raise DataError(f"{path}: line {lineno}: indexes are 1-based, got {idx}")
                if idx <= prev:
                    raise DataError(f"{path}: line {lineno}: indexes must be strictly increasing")
                if not np.isfinite(val):
                    raise DataError(f"{path}: line {lineno}: non-finite value")
                row[idx] = val
                prev = idx
            width = max(width, prev)
            entries.append(row)
    if not entries:
        raise DataError(f"{path}: no data rows")
    if width == 0:
        raise DataError(f"{path}: no feature values")
    samples = np.zeros((len(entries), width))
    for r, row in enumerate(entries):
        for idx, val in row.items():
            samples[r, idx - 1] = val
    labels, names = _map_labels(raw_labels, str(path))
    return Dataset(samples, labels, label_names=names)


def load_dataset(path, fmt=None, header=False):
    fmt = fmt or ("libsvm" if Path(path).suffix.lower() in (".svm", ".libsvm") else "csv")
    if fmt == "libsvm":
        return load_libsvm(path)
    return load_csv(path, header=header)


def read_ids(path):
    ids = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            ids.append(int(line))
        except ValueError:
            raise DataError(f"{path}: line {lineno}: not an integer feature id: {line!r}") from None
    return ids


def write_ids(ids, path):
    Path(path).write_text("".join(f"{int(i)}\n" for i in ids))


def write_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None


def strip_wall_clock(obj):
    """Copy of a report with every wall-clock field removed."""
    if isinstance(obj, dict):
        return {k: strip_wall_clock(v) for k, v in obj.items() if k not in WALL_CLOCK_KEYS}
    if isinstance(obj, list):
        return [strip_wall_clock(v) for v in obj]
    return obj


def selected_ids_from_report(path):
    return [int(i) for i in read_json(path)["selected_ids"]]
