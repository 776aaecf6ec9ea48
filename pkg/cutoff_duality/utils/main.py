import csv
import dataclasses
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from cutoff_duality.types.error_types import PreconditionError


def parse_grid(text: str) -> List[float]:
    """
    Parses a grid given either as a comma-separated list ``"0.5,1,2"`` or
    as ``"start:stop:count"``, which expands to ``count`` geometrically
    spaced points from ``start`` to ``stop`` inclusive.

    Args:
        text (str): Grid specification.

    Returns:
        List[float]: The grid, strictly ascending.

    Raises:
        PreconditionError: If the text is malformed, empty or not ascending.
    """
    text = text.strip()
    if not text:
        raise PreconditionError("grid is empty")
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            start, stop, count = float(start), float(stop), int(count)
        else:
            values = [float(item) for item in text.split(",")]
    except ValueError:
        raise PreconditionError(f"cannot parse grid {text!r}")
    if ":" in text:
        if count < 1 or start <= 0 or stop <= 0:
            raise PreconditionError(
                f"geometric grid {text!r} needs positive bounds and count >= 1"
            )
        values = [start] if count == 1 else np.geomspace(start, stop, count).tolist()
    return check_ascending(values, "grid")


def check_ascending(values: Sequence[float], name: str = "grid") -> List[float]:
    """
    Returns ``values`` as floats after checking they are finite, non-empty
    and strictly ascending.
    """
    values = [float(value) for value in values]
    if not values:
        raise PreconditionError(f"{name} is empty")
    if not all(math.isfinite(value) for value in values):
        raise PreconditionError(f"{name} has non-finite entries")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise PreconditionError(f"{name} must be strictly ascending, got {values}")
    return values


def format_float(value: Any) -> str:
    """
    Formats numbers with 17 significant digits, enough to read back the
    same double; other values are passed through ``str``.
    """
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def make_json_safe(obj: Any) -> Any:
    """
    Recursively converts dataclasses, numpy scalars and arrays, and paths to
    plain JSON types. Non-finite floats become the strings ``"inf"``,
    ``"-inf"`` and ``"nan"``.
    """
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = dataclasses.asdict(obj)
    if isinstance(obj, dict):
        return {str(key): make_json_safe(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [make_json_safe(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return make_json_safe(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else format_float(value)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_csv(
    path: Union[str, Path], columns: Sequence[str], rows: Sequence[Dict[str, Any]]
) -> Path:
    """
    Writes rows as CSV with a header line, formatting floats with
    ``format_float``.
    """
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_float(row[column]) for column in columns])
    return path


def write_json(path: Union[str, Path], payload: Any) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        json.dump(make_json_safe(payload), handle, indent=2)
        handle.write("\n")
    return path
