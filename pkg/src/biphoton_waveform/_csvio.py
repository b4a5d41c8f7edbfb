"""Locale-independent CSV/JSON writers with round-trip float precision."""
import json
from pathlib import Path


def fmt(x):
    return "%.17g" % x


def write_csv(path, header, columns):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(fmt(x) for x in row) + "\n")


def read_csv(path):
    """Read a numeric CSV written by :func:`write_csv` into ``{column: list}``."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        cols = {h: [] for h in header}
        for line in fh:
            for h, x in zip(header, line.strip().split(",")):
                cols[h].append(float(x))
    return cols


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False)
        fh.write("\n")
