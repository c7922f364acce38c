"""
Data management utilities: JSON configs, JSON summaries and CSV tables
"""
import json
import math
import os
import sys
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np


def load_json_config(path: str) -> Dict[str, Any]:
    """Load a run configuration; keys may use '-' or '_'"""
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def to_jsonable(obj: Any) -> Any:
    """Convert numpy values and non-finite floats into plain JSON values"""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps(data: Any) -> str:
    return json.dumps(to_jsonable(data), indent=2, ensure_ascii=False)


def save_json(data: Any, path: Optional[str] = None):
    """Write a JSON document to path, or stdout when path is None"""
    text = dumps(data) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def format_cell(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], path: Optional[str] = None):
    """Write a CSV table with 17-significant-digit floats and '\\n' line endings"""
    lines = [",".join(header)]
    lines.extend(",".join(format_cell(x) for x in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def check_writable(path: Optional[str]):
    """Raise ValueError unless path can be created or overwritten"""
    if path is None:
        return
    directory = os.path.dirname(os.path.abspath(path)) or "."
    if not os.path.isdir(directory):
        raise ValueError(f"output directory does not exist: {directory}")
    if os.path.exists(path) and not os.access(path, os.W_OK):
        raise ValueError(f"output file is not writable: {path}")
    if not os.access(directory, os.W_OK):
        raise ValueError(f"output directory is not writable: {directory}")
