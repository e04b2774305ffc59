"""Deterministic CSV/JSON rendering: 12 significant digits, '.' decimal, '\\n' lines."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

from .config import DEFAULTS


def sig(x: float, digits: int = DEFAULTS.sig_digits) -> float | None:
    """Round to ``digits`` significant digits; non-finite values become None."""
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(format(x, f".{digits}g"))


def rounded(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return sig(obj)
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):    # numpy scalar
        return rounded(obj.item())
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    raise TypeError(f"cannot render {type(obj).__name__}")


def dumps_json(obj: Any) -> str:
    return json.dumps(rounded(obj), indent=2, allow_nan=False) + "\n"


def _cell(v: Any) -> str:
    v = rounded(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def dumps_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        r = list(csv.reader(fh))
    return r[0], r[1:]


def write_text(path: Path, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)
