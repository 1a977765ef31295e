"""Line-delimited record files and atomic output writing.

Records are one JSON object per line.  Read errors carry the file path
and 1-based line number.  Writers stage into a temporary file in the
destination directory and rename it into place on success, so a failed
command never leaves a partial output behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Iterable, Iterator

from .errors import FormatError


def dump_record(obj: dict) -> str:
    """One record as a single JSON line (no trailing newline)."""
    text = json.dumps(obj, ensure_ascii=False)
    if "\n" in text:
        raise FormatError("record serialization produced an embedded newline")
    return text


def read_records(path: str) -> Iterator[tuple[int, dict]]:
    """Yield (line number, object) per non-blank line of a record file."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise FormatError(f"{path}:{lineno}: expected an object")
            yield lineno, obj


def load_records(path: str) -> list[dict]:
    return [obj for _lineno, obj in read_records(path)]


def _atomic_write(path: str, payload: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def write_text(path: str, text: str) -> None:
    _atomic_write(path, text.encode("utf-8"))


def write_bytes(path: str, payload: bytes) -> None:
    _atomic_write(path, payload)


def records_text(records: Iterable[dict]) -> str:
    return "".join(dump_record(obj) + "\n" for obj in records)


def write_records(path: str, records: Iterable[dict]) -> None:
    write_text(path, records_text(records))
