"""CSV output: atomic writes and round-trip number formatting."""

import contextlib
import csv
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

Cell = Union[str, int, float, None]


def format_number(value: Cell) -> str:
    """Shortest round-trip decimal; -inf, inf and nan as literals; None as empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        return repr(value)
    return str(value)


@contextlib.contextmanager
def atomic_writer(path: Path) -> Iterator[IO[str]]:
    """Open a temp file next to path and rename it over path on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as f:
            yield f
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def write_rows(
    out: IO[str], header: Optional[Sequence[str]], rows: Iterable[Sequence[Cell]]
) -> None:
    """Write formatted rows (and an optional header) to an open text stream."""
    writer = csv.writer(out, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(cell) for cell in row])


def emit_csv(
    path: Optional[Path], header: Optional[Sequence[str]], rows: Iterable[Sequence[Cell]]
) -> None:
    """Write a CSV atomically to path, or to stdout when path is None."""
    if path is None:
        write_rows(sys.stdout, header, rows)
        sys.stdout.flush()
        return
    with atomic_writer(path) as f:
        write_rows(f, header, rows)
