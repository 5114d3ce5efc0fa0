import json
import logging
import math
import os
import sys
from typing import Any, Optional

import numpy as np
import pandas as pd

# 17 significant digits round-trip every double exactly
CSV_FLOAT_FORMAT = "%.17g"


def convert_to_serializable(obj):
    """Recursively turn numpy scalars/arrays and tuples into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): convert_to_serializable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [convert_to_serializable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return convert_to_serializable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    if isinstance(obj, (np.complexfloating, complex)):
        return [convert_to_serializable(obj.real), convert_to_serializable(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"Object of type {type(obj)} is not JSON serializable")


def to_json(obj: Any) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(convert_to_serializable(obj), sort_keys=True, indent=2) + "\n"


def write_json(obj: Any, path: Optional[str] = None) -> str:
    """Write canonical JSON to path, or to stdout when path is None."""
    text = to_json(obj)
    if path is None:
        sys.stdout.write(text)
    else:
        _ensure_parent(path)
        with open(path, 'w', newline='\n') as file:
            file.write(text)
        logging.info(f"Wrote {path}")
    return text


def write_csv(frame: pd.DataFrame, path: Optional[str] = None) -> str:
    """Write a frame with '.' decimals and 17 significant digits, no index."""
    text = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    if path is None:
        sys.stdout.write(text)
    else:
        _ensure_parent(path)
        with open(path, 'w', newline='\n') as file:
            file.write(text)
        logging.info(f"Wrote {path} ({len(frame)} rows)")
    return text


def _ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
