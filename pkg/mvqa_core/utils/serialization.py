"""Canonical JSON used for every artifact the engine writes.

Keys are sorted, reals carry 9 significant digits, ``-0.0`` becomes ``0.0``
and files are written as UTF-8 bytes with ``\\n`` line endings so that two
runs with the same seed produce byte-identical files on any platform.
"""
import json
import math

import numpy as np

SIGNIFICANT_DIGITS = 9


def canonical_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("cannot serialize non-finite real {!r}".format(x))
    x = float("{:.{}g}".format(x, SIGNIFICANT_DIGITS))
    if x == 0.0:
        return 0.0
    return x


def normalize(obj):
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return canonical_float(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(normalize(v) for v in obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return normalize(obj.to_dict())
    raise TypeError("cannot serialize object of type {}".format(type(obj).__name__))


def dumps_canonical(obj, indent=None):
    separators = (",", ":") if indent is None else (",", ": ")
    return json.dumps(
        normalize(obj), sort_keys=True, indent=indent, separators=separators, ensure_ascii=True
    )


def write_json(path, obj, indent=2):
    with open(path, "wb") as f:
        f.write((dumps_canonical(obj, indent=indent) + "\n").encode("utf-8"))


def read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_jsonl(path, records):
    with open(path, "wb") as f:
        for record in records:
            f.write((dumps_canonical(record) + "\n").encode("utf-8"))


def append_jsonl(path, record):
    with open(path, "ab") as f:
        f.write((dumps_canonical(record) + "\n").encode("utf-8"))


def read_jsonl(path):
    """Read a JSON Lines file; blank lines are skipped, bad lines raise with
    their 1-based line number."""
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise ValueError("{}:{}: invalid JSON ({})".format(path, lineno, e.msg))
    return records
