"""CSV table reading for the renderer.

Tables follow the producer convention: '#'-prefixed key=value metadata
lines, a header row, then comma-separated data rows with booleans spelled
true/false. The renderer never recomputes model quantities; everything it
draws comes from these rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


class TableError(ValueError):
    """A table does not match the schema the figure kind requires."""


@dataclass
class Table:
    columns: list[str]
    rows: list[dict[str, str]] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)

    def floats(self, name: str) -> list[float]:
        self.require(name)
        try:
            return [float(row[name]) for row in self.rows]
        except ValueError as exc:
            raise TableError(f"column {name!r} contains a non-numeric cell") from exc

    def strings(self, name: str) -> list[str]:
        self.require(name)
        return [row[name] for row in self.rows]

    def require(self, *names: str) -> None:
        for name in names:
            if name not in self.columns:
                raise TableError(f"missing required column {name!r}")


def read_table(path) -> Table:
    metadata: dict[str, str] = {}
    columns: list[str] | None = None
    rows: list[dict[str, str]] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            metadata[key.strip()] = value
            continue
        cells = line.split(",")
        if columns is None:
            columns = cells
            continue
        if len(cells) != len(columns):
            raise TableError(f"row has {len(cells)} cells, header has {len(columns)}")
        rows.append(dict(zip(columns, cells)))
    if columns is None:
        raise TableError(f"{path}: no header row found")
    return Table(columns=columns, rows=rows, metadata=metadata)


def read_tables(paths) -> Table:
    """Read and concatenate tables; all inputs must share one header."""
    paths = list(paths)
    if not paths:
        raise TableError("no input tables given")
    merged = read_table(paths[0])
    for path in paths[1:]:
        extra = read_table(path)
        if extra.columns != merged.columns:
            raise TableError(
                f"{path}: columns {extra.columns} do not match {merged.columns}"
            )
        merged.rows.extend(extra.rows)
        merged.metadata.update(extra.metadata)
    if not merged.rows:
        raise TableError("table is empty")
    return merged
