"""Result persistence: CSV tables, run manifests, plot-data files, SVG lines.

Everything in here is deterministic: identical inputs produce byte-identical
files. Floats are written with repr(), whose shortest form round-trips
exactly, so no precision is lost between runs and re-parses.
"""

import json
import os
import time
from dataclasses import dataclass, field

MANIFEST_SCHEMA_VERSION = 1


def format_number(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if v != v:                              # NaN never belongs in a table
        return ""
    return repr(v)


@dataclass(frozen=True)
class ResultTable:
    """Rectangular table with per-column unit annotations."""

    columns: tuple
    units: tuple
    rows: list = field(repr=False)

    def __post_init__(self):
        if len(self.columns) != len(self.units):
            raise ValueError("one unit annotation per column required")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("ragged row in result table")


def write_csv(path, table: ResultTable) -> str:
    """Units comment line, header, then rows. Returns the path written."""
    lines = ["# units: " + ", ".join(
        f"{c}[{u}]" if u else c for c, u in zip(table.columns, table.units))]
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(
            v if isinstance(v, str) else format_number(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return str(path)


def read_csv(path):
    """Inverse of write_csv; numbers come back as floats, blanks as None."""
    with open(path) as fh:
        raw = [line.rstrip("\n") for line in fh]
    header = None
    rows = []
    for line in raw:
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
            continue
        parsed = []
        for cell in line.split(","):
            if cell == "":
                parsed.append(None)
            else:
                try:
                    parsed.append(float(cell))
                except ValueError:
                    parsed.append(cell)
        rows.append(parsed)
    return header, rows


def write_manifest(path, command: str, parameters: dict, time_grid: dict,
                   diagnostics: dict, duration_seconds: float,
                   outputs: list) -> str:
    """One manifest per run; refuses to reference files that do not exist."""
    from . import __version__              # resolved late, init imports us
    here = os.path.dirname(os.path.abspath(path))
    for name in outputs:
        if not os.path.exists(os.path.join(here, name)):
            raise FileNotFoundError(f"manifest would reference missing file: {name}")
    doc = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "command": command,
        "parameters": parameters,
        "engine_version": __version__,
        "time_grid": time_grid,
        "diagnostics": diagnostics,
        "duration_seconds": duration_seconds,
        "outputs": sorted(outputs),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return str(path)


class Stopwatch:
    def __enter__(self):
        self._t0 = time.monotonic()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.monotonic() - self._t0
        return False


def emit_line_dat(path, xs, ys) -> str:
    """Two-column whitespace series, one row per point."""
    lines = [f"{format_number(x)} {format_number(y)}" for x, y in zip(xs, ys)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return str(path)


def emit_heatmap_dat(path, table: ResultTable) -> str:
    """Blank-line-separated blocks, one per leading-column value.

    Rows must arrive grouped by the first column (sweep order); each block
    holds that group's rows whitespace-separated, ready for matrix plotting.
    """
    blocks = []
    current_key = object()
    block = None
    for row in table.rows:
        if row[0] != current_key:
            current_key = row[0]
            block = []
            blocks.append(block)
        block.append(" ".join(
            v if isinstance(v, str) else format_number(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n\n".join("\n".join(b) for b in blocks) + "\n")
    return str(path)


def _svg_coord(v: float) -> str:
    return f"{v:.6g}"


def write_svg_line(path, xs, ys, x_label: str, y_label: str,
                   title: str = "") -> str:
    """Self-contained vector line plot; needs no display or plot library.

    Axis labels come from the caller (column name plus units). Degenerate
    ranges widen symmetrically so a constant series still renders.
    """
    width, height = 640.0, 420.0
    ml, mr, mt, mb = 70.0, 20.0, 30.0, 50.0
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    if not xs or len(xs) != len(ys):
        raise ValueError("need matching nonempty x and y series")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(x):
        return ml + (x - x0) / (x1 - x0) * (width - ml - mr)

    def py(y):
        return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb)

    points = " ".join(f"{_svg_coord(px(x))},{_svg_coord(py(y))}"
                      for x, y in zip(xs, ys))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" '
        f'height="{height:g}" viewBox="0 0 {width:g} {height:g}">',
        f'<rect width="{width:g}" height="{height:g}" fill="white"/>',
        f'<line x1="{ml:g}" y1="{height - mb:g}" x2="{width - mr:g}" '
        f'y2="{height - mb:g}" stroke="black"/>',
        f'<line x1="{ml:g}" y1="{mt:g}" x2="{ml:g}" y2="{height - mb:g}" '
        f'stroke="black"/>',
        f'<polyline points="{points}" fill="none" stroke="#1f5fa8" '
        f'stroke-width="1.5"/>',
    ]
    for x in (x0, x1):
        parts.append(
            f'<text x="{_svg_coord(px(x))}" y="{height - mb + 18:g}" '
            f'font-size="11" text-anchor="middle">{format_number(x)}</text>')
    for y in (y0, y1):
        parts.append(
            f'<text x="{ml - 8:g}" y="{_svg_coord(py(y) + 4)}" font-size="11" '
            f'text-anchor="end">{format_number(y)}</text>')
    parts.append(
        f'<text x="{(ml + width - mr) / 2:g}" y="{height - 12:g}" '
        f'font-size="13" text-anchor="middle">{x_label}</text>')
    parts.append(
        f'<text x="16" y="{(mt + height - mb) / 2:g}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 16 '
        f'{(mt + height - mb) / 2:g})">{y_label}</text>')
    if title:
        parts.append(
            f'<text x="{(ml + width - mr) / 2:g}" y="20" font-size="14" '
            f'text-anchor="middle">{title}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
    return str(path)
