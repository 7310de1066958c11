"""Deterministic CSV output: ``#`` metadata header, fixed 17-significant-digit numbers."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping

import numpy as np


def fmt(x) -> str:
    if isinstance(x, (str, bytes)):
        return x if isinstance(x, str) else x.decode()
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _meta_lines(meta) -> list[str]:
    if meta is None:
        return []
    items = meta.items() if isinstance(meta, Mapping) else meta
    return [f"# {k}={fmt(v) if not isinstance(v, str) else v}" for k, v in items]


def write_csv(path, columns: Iterable[str], rows, meta=None, footer=None) -> Path:
    """Write ``rows`` under ``columns`` with ``meta``/``footer`` as ``# key=value`` lines."""
    path = Path(path)
    lines = _meta_lines(meta)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    lines.extend(_meta_lines(footer))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def read_csv(path):
    """Inverse of :func:`write_csv` for numeric bodies: ``(meta, columns, data, footer)``."""
    meta, footer, rows, columns = {}, {}, [], None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            (footer if columns is not None and rows else meta)[key] = value
        elif columns is None:
            columns = line.split(",")
        else:
            rows.append([float(v) for v in line.split(",")])
    return meta, columns, np.array(rows), footer
