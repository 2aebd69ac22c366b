"""Common utilities for Kac Root Utilities."""

import hashlib
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import yaml
from pydantic import BaseModel
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn
from tabulate import tabulate

from .exceptions import ValidationError

logger = logging.getLogger(__name__)
console = Console()

CSV_FLOAT_FORMAT = "%.10f"


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Parse ``p/q``, an integer or a terminating decimal into an exact Fraction.

    Raises:
        ValidationError: If the text is not a rational literal
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"'{text}' is not a rational number: {e}", "rational")


def _parse_int(token: str) -> int:
    token = token.strip()
    try:
        if "^" in token:
            base, exponent = token.split("^")
            return int(base) ** int(exponent)
        return int(token)
    except ValueError:
        pass
    try:
        value = float(token)
    except ValueError:
        value = math.nan
    if not value.is_integer():
        raise ValidationError(f"'{token}' is not an integer", "integer")
    return int(value)


def parse_int_list(text: str) -> List[int]:
    """Parse ``4,8,1e3`` and ranges ``2^4..2^8`` (powers) or ``3..7`` (every integer)."""
    values: List[int] = []
    for item in str(text).split(","):
        if not item.strip():
            continue
        if ".." not in item:
            values.append(_parse_int(item))
            continue
        lo_text, hi_text = item.split("..", 1)
        if "^" in lo_text and "^" in hi_text:
            base, lo_exp = (int(v) for v in lo_text.strip().split("^"))
            hi_base, hi_exp = (int(v) for v in hi_text.strip().split("^"))
            if hi_base != base:
                raise ValidationError(f"range '{item}' mixes bases", "integer")
            values.extend(base**e for e in range(lo_exp, hi_exp + 1))
        else:
            values.extend(range(_parse_int(lo_text), _parse_int(hi_text) + 1))
    if not values:
        raise ValidationError(f"no integers in '{text}'", "integer")
    return values


def parse_interval(text: str) -> Tuple[Optional[Fraction], Optional[Fraction]]:
    """Parse ``a,b`` with rational ends; ``inf`` and ``-inf`` become None."""
    parts = str(text).split(",")
    if len(parts) != 2:
        raise ValidationError(f"interval '{text}' must be 'a,b'", "interval")
    ends = []
    for part in parts:
        token = part.strip().lower()
        ends.append(None if token in ("inf", "+inf", "-inf") else parse_rational(token))
    if ends[0] is not None and ends[1] is not None and not ends[0] < ends[1]:
        raise ValidationError(f"empty interval '{text}'", "interval")
    return ends[0], ends[1]


def render_rational(value: Fraction) -> Dict[str, Any]:
    """Render an exact rational as a numerator/denominator string plus a float."""
    value = Fraction(value)
    exact = (
        str(value.numerator)
        if value.denominator == 1
        else f"{value.numerator}/{value.denominator}"
    )
    return {"exact": exact, "float": float(value)}


def to_jsonable(data: Any) -> Any:
    """Convert models, Fractions and tuples into JSON-serialisable values."""
    if isinstance(data, BaseModel):
        return to_jsonable(data.model_dump())
    if isinstance(data, Fraction):
        return render_rational(data)
    if isinstance(data, dict):
        return {str(k): to_jsonable(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [to_jsonable(v) for v in data]
    if isinstance(data, float) and not math.isfinite(data):
        return str(data)
    if isinstance(data, Enum):
        return data.value
    if isinstance(data, np.generic):
        return data.item()
    return data


def format_output(
    data: Any, output_format: str = "table", headers: Optional[List[str]] = None
) -> str:
    """Format data for output.

    Args:
        data: Data to format
        output_format: Output format (table, json, yaml, csv)
        headers: Table headers (for table format)

    Returns:
        Formatted string
    """
    data = to_jsonable(data)
    if output_format == "json":
        return json.dumps(data, indent=2, sort_keys=True, default=str)
    elif output_format == "yaml":
        return yaml.dump(data, default_flow_style=False, sort_keys=True)
    elif output_format == "csv":
        if isinstance(data, list) and data and isinstance(data[0], dict):
            return pd.DataFrame(data).to_csv(index=False, lineterminator="\n")
        return str(data)
    elif output_format == "table":
        if isinstance(data, list) and data:
            if isinstance(data[0], dict):
                headers = headers or list(data[0].keys())
                rows = [[item.get(header, "") for header in headers] for item in data]
                return tabulate(rows, headers=headers, tablefmt="grid")
            return tabulate(data, headers=headers or [], tablefmt="grid")
        elif isinstance(data, dict):
            rows = [[k, _flat(v)] for k, v in data.items()]
            return tabulate(rows, headers=["Key", "Value"], tablefmt="grid")
        return str(data)
    return str(data)


def _flat(value: Any) -> Any:
    if isinstance(value, dict) and set(value) == {"exact", "float"}:
        return f"{value['exact']} (~{value['float']:.6g})"
    return value


def print_output(
    data: Any,
    output_format: str = "table",
    headers: Optional[List[str]] = None,
    title: Optional[str] = None,
) -> None:
    """Print formatted output to console.

    Args:
        data: Data to print
        output_format: Output format
        headers: Table headers
        title: Optional title
    """
    if title:
        console.print(f"\n[bold blue]{title}[/bold blue]")

    formatted_output = format_output(data, output_format, headers)

    if output_format == "json":
        console.print_json(formatted_output)
    else:
        console.print(formatted_output, markup=False, highlight=False)


def parallel_map(
    func: Callable[[Any], Any],
    items: Sequence[Any],
    max_workers: int = 4,
    show_progress: bool = False,
    description: str = "Processing",
) -> List[Any]:
    """Apply ``func`` to every item on a thread pool, keeping input order.

    Results come back in the order of ``items`` whatever the worker count, so
    reductions over them are deterministic. Exceptions propagate.
    """
    if max_workers <= 1 or len(items) <= 1:
        iterator: Iterable[Any] = map(func, items)
        if not show_progress:
            return list(iterator)
        results = []
        with _progress() as progress:
            task = progress.add_task(description, total=len(items))
            for result in iterator:
                results.append(result)
                progress.advance(task)
        return results

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        if not show_progress:
            return list(executor.map(func, items))
        results = []
        with _progress() as progress:
            task = progress.add_task(description, total=len(items))
            for result in executor.map(func, items):
                results.append(result)
                progress.advance(task)
        return results


def _progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("{task.completed}/{task.total}"),
        console=console,
        transient=True,
    )


def write_csv(
    rows: List[Dict[str, Any]], filepath: Union[str, Path], columns: List[str]
) -> Path:
    """Write rows as CSV with a fixed column order and float format.

    Missing cells are written empty. Output is byte-stable for equal input.
    """
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(rows, columns=columns)
    frame.to_csv(
        filepath,
        index=False,
        float_format=CSV_FLOAT_FORMAT,
        lineterminator="\n",
        encoding="utf-8",
    )
    return filepath


def save_to_file(
    data: Any, filepath: Union[str, Path], file_format: str = "json"
) -> Path:
    """Save data to file.

    Args:
        data: Data to save
        filepath: File path
        file_format: File format (json, yaml)

    Returns:
        The path written
    """
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    payload = to_jsonable(data)

    with open(filepath, "w", encoding="utf-8", newline="\n") as f:
        if file_format == "json":
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
        elif file_format == "yaml":
            yaml.dump(payload, f, default_flow_style=False, sort_keys=True)
        else:
            f.write(str(payload))
    return filepath


def load_from_file(filepath: Union[str, Path]) -> Any:
    """Load data from a JSON or YAML file.

    Args:
        filepath: File path

    Returns:
        Loaded data
    """
    filepath = Path(filepath)

    if not filepath.exists():
        raise FileNotFoundError(f"File not found: {filepath}")

    with open(filepath, "r", encoding="utf-8") as f:
        if filepath.suffix == ".json":
            return json.load(f)
        elif filepath.suffix in [".yaml", ".yml"]:
            return yaml.safe_load(f)
        else:
            return f.read()


def file_digest(filepath: Union[str, Path]) -> str:
    """Return the sha256 hex digest of a file."""
    sha = hashlib.sha256()
    with open(filepath, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            sha.update(chunk)
    return sha.hexdigest()


def get_detailed_timestamp() -> str:
    """Get detailed timestamp string.

    Returns:
        Timestamp in YYYY-MM-DD_HH-MM-SS format
    """
    return datetime.now().strftime("%Y-%m-%d_%H-%M-%S")


def ensure_directory(path: Union[str, Path]) -> Path:
    """Ensure directory exists.

    Args:
        path: Directory path

    Returns:
        Path object
    """
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path
