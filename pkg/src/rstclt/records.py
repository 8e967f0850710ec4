"""JSON experiment records and CSV tables."""

from __future__ import annotations

import io
import json
import math
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__


def _plain(obj: Any):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if hasattr(obj, "__dataclass_fields__"):
        return _plain({k: getattr(obj, k) for k in obj.__dataclass_fields__})
    return obj


def make_record(operation: str, params: dict, seed: int, values: dict,
                std_errors: dict | None = None, replicates: int | None = None,
                runtime_ms: float | None = None, metadata: dict | None = None) -> dict:
    return _plain({
        "operation": operation,
        "params": params,
        "seed": seed,
        "values": values,
        "std_errors": std_errors or {},
        "replicates": replicates,
        "runtime_ms": runtime_ms,
        "metadata": metadata or {},
        "version": __version__,
    })


def dumps(record: dict) -> str:
    return json.dumps(_plain(record), indent=2, sort_keys=True) + "\n"


def numeric_payload(record: dict) -> dict:
    """Record without wall-clock fields, for reproducibility comparisons."""
    out = dict(record)
    out.pop("runtime_ms", None)
    out.pop("wall_time_ms", None)
    return out


def table_to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append("%.17g" % v)
            else:
                cells.append(str(v))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()
