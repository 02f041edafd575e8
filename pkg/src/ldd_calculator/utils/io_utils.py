from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence


def ensure_parent_dir(filepath: str | os.PathLike) -> None:
    Path(filepath).parent.mkdir(parents=True, exist_ok=True)


def file_digest(filepath: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(filepath, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def provenance(argv: Sequence[str], inputs: Iterable[str | os.PathLike | None]) -> dict:
    """Invocation and sha256 digests of the input files that exist."""
    digests = {}
    for path in inputs:
        if path is not None and os.path.isfile(path):
            digests[os.path.basename(str(path))] = file_digest(path)
    return {"invocation": " ".join(argv), "inputs": dict(sorted(digests.items()))}


def header_lines(prov: dict | None) -> list[str]:
    if not prov:
        return []
    lines = [f"# invocation: {prov['invocation']}"]
    for name, digest in prov["inputs"].items():
        lines.append(f"# sha256 {name} {digest}")
    return lines


def render_value(value: Any) -> Any:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return value


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return render_value(obj)
    return obj


def write_json_data(obj: Any, filepath: str | None, prov: dict | None = None) -> None:
    """JSON output; the provenance record is stored under a leading '_provenance' key."""
    payload = _jsonable(obj)
    if prov is not None and isinstance(payload, dict):
        payload = {"_provenance": prov, **payload}
    if filepath is None:
        json.dump(payload, sys.stdout, sort_keys=True, indent=4)
        sys.stdout.write("\n")
        return
    ensure_parent_dir(filepath)
    with open(filepath, "w", encoding="utf-8") as f:
        json.dump(payload, f, sort_keys=True, indent=4)
        f.write("\n")


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]], prov: dict | None = None) -> str:
    buffer = io.StringIO()
    for line in header_lines(prov):
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([render_value(v) for v in row])
    return buffer.getvalue()


def write_csv_data(
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    filepath: str | None,
    prov: dict | None = None,
) -> None:
    text = csv_text(columns, rows, prov)
    if filepath is None:
        sys.stdout.write(text)
        return
    ensure_parent_dir(filepath)
    with open(filepath, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def read_csv_rows(filepath: str) -> list[dict[str, str]]:
    """Reads a CSV written by `write_csv_data`, skipping '#' header lines."""
    with open(filepath, "r", encoding="utf-8") as f:
        body = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(body))
