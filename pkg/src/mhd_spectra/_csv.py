"""CSV emission shared by every module that dumps data.

Numbers are written with 17 significant digits so that identical runs give
byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence


def fmt(value) -> str:
    if isinstance(value, (bool,)):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def write_csv(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
    footer: str | None = None,
    comment: str | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    if comment is not None:
        lines.append(f"# {comment}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    if footer is not None:
        lines.append(footer)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path
