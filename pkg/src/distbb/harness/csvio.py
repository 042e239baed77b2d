"""CSV output for iteration records."""

import csv
import math

from ..diagnostics import IterationRecord
from ..exceptions import ConfigurationError


def format_value(value):
    """Shortest round-trip text for a number; ``nan``/``inf``/``-inf`` spelled out."""
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def emit_csv(records, path):
    """Write a header and one row per record to ``path`` (UTF-8, LF endings)."""
    records = list(records)
    if not records:
        raise ConfigurationError("no records to write")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(IterationRecord.columns())
        for rec in records:
            writer.writerow(format_value(v) for v in rec.as_tuple())
    return path


def read_csv(path):
    """Parse a file written by :func:`emit_csv` back into records."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != IterationRecord.columns():
            raise ConfigurationError(f"unexpected CSV header {header}")
        out = []
        for row in reader:
            values = [int(v) if name in ("round", "clamp_events", "breach_events") else float(v)
                      for name, v in zip(header, row)]
            out.append(IterationRecord(*values))
    return out
