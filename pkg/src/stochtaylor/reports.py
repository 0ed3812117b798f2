"""CSV and JSON report writers.

CSV detail files have one row per outcome or replicate and always start
with the columns ``id, X, xi, theta, residual``:

* ``X`` is the increment from the anchor,
* ``xi`` is the intermediate point's offset from the anchor,
* ``theta`` is the segment parameter (``xi = theta * X``),
* ``residual`` is ``f(a + X) - partial sum - remainder at xi``.

Command-specific columns follow.  Floats are written with ``repr`` so that
output is exact and byte-stable across runs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Mapping, Sequence

BASE_COLUMNS = ("id", "X", "xi", "theta", "residual")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(v))
    if isinstance(v, (tuple, list)):
        return " ".join(_fmt(float(c)) for c in v)
    return str(v)


def csv_text(rows: Iterable[Mapping], extra: Sequence[str] = ()) -> str:
    columns = list(BASE_COLUMNS) + [c for c in extra if c not in BASE_COLUMNS]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def json_text(summary: Mapping) -> str:
    """Sorted-key JSON; non-finite floats become ``null``."""
    return json.dumps(_clean(dict(summary)), indent=2, sort_keys=True) + "\n"


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
