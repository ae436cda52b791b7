"""Figures from emitted .dat files.

Two file formats come in: whitespace error tables (header ``depth
width_1 ...`` followed by one row per depth) and gridded surface samples
(``x y f`` triples in scanline order, a blank line between scanlines).
Two figures go out: an error-vs-depth line chart with one series per
width, and a 3-D surface view. Rendering only ever reads the inputs.
"""

from dataclasses import dataclass
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

# Enough distinct markers for a ten-width table; combined with the
# default colour cycle every series stays tellable apart in print.
_MARKERS = "osD^vP*X<>"


class TableFormatError(ValueError):
    """A .dat file does not match its documented layout."""


@dataclass(frozen=True)
class ErrorTable:
    """Best sup-norm error per (depth, width) cell.

    ``series`` maps each ``width_k`` column name to its error values,
    in file order; every series has one value per depth.
    """

    depths: tuple[int, ...]
    series: dict[str, tuple[float, ...]]

    def __post_init__(self):
        if not self.depths or not self.series:
            raise ValueError("table must have at least one depth and one width")
        if any(b <= a for a, b in zip(self.depths, self.depths[1:])):
            raise ValueError(f"depths must be strictly ascending, got {self.depths}")
        for name, values in self.series.items():
            if not name.startswith("width_") or not name[6:].isdigit():
                raise ValueError(f"column name {name!r} is not of the form width_k")
            if len(values) != len(self.depths):
                raise ValueError(
                    f"series {name} has {len(values)} values for "
                    f"{len(self.depths)} depths"
                )


def load_table(path) -> ErrorTable:
    """Parse an error table, reporting malformed rows by line number."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    numbered = [(i, line) for i, line in enumerate(lines, start=1) if line.strip()]
    if not numbered:
        raise TableFormatError(f"{path}: empty table")

    header_no, header = numbered[0]
    columns = header.split()
    if columns[:1] != ["depth"] or len(columns) < 2:
        raise TableFormatError(
            f"{path} line {header_no}: expected header 'depth width_...', got {header!r}"
        )

    depths = []
    rows = []
    for line_no, line in numbered[1:]:
        fields = line.split()
        if len(fields) != len(columns):
            raise TableFormatError(
                f"{path} line {line_no}: expected {len(columns)} fields, "
                f"got {len(fields)}"
            )
        try:
            depths.append(int(fields[0]))
            rows.append([float(f) for f in fields[1:]])
        except ValueError as exc:
            raise TableFormatError(f"{path} line {line_no}: {exc}") from exc

    try:
        return ErrorTable(
            depths=tuple(depths),
            series={
                name: tuple(row[j] for row in rows)
                for j, name in enumerate(columns[1:])
            },
        )
    except ValueError as exc:
        raise TableFormatError(f"{path}: {exc}") from exc


def load_surface(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Parse gridded surface samples into (X, Y, Z) meshes of shape (k, k).

    Scanlines (runs of ``x y f`` lines at constant x) are separated by
    single blank lines; a k x k grid therefore has k blocks of k lines.
    """
    lines = Path(path).read_text(encoding="ascii").splitlines()
    blocks: list[list[list[float]]] = [[]]
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            if blocks[-1]:
                blocks.append([])
            continue
        fields = line.split()
        if len(fields) != 3:
            raise TableFormatError(
                f"{path} line {line_no}: expected 'x y f', got {line!r}"
            )
        try:
            blocks[-1].append([float(f) for f in fields])
        except ValueError as exc:
            raise TableFormatError(f"{path} line {line_no}: {exc}") from exc
    if not blocks[-1]:
        blocks.pop()

    k = len(blocks)
    if k < 2 or any(len(block) != k for block in blocks):
        raise TableFormatError(
            f"{path}: expected k blocks of k samples each with k >= 2, "
            f"got block sizes {[len(b) for b in blocks]}"
        )
    mesh = np.asarray(blocks, dtype=np.float64)  # (k, k, 3)
    return mesh[:, :, 0], mesh[:, :, 1], mesh[:, :, 2]


def build_error_figure(table: ErrorTable):
    """Error-vs-depth line chart: one labeled series per width column."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for i, (name, values) in enumerate(table.series.items()):
        ax.plot(
            table.depths, values,
            marker=_MARKERS[i % len(_MARKERS)], markersize=4, label=name,
        )
    ax.set_xlabel("depth")
    ax.set_ylabel("error")
    ax.set_ylim(0.0, 1.0)
    ax.set_xticks(table.depths)
    ax.legend()
    return fig


def build_surface_figure(X: np.ndarray, Y: np.ndarray, Z: np.ndarray):
    """3-D surface view of one sampled function."""
    fig = plt.figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot(projection="3d")
    ax.plot_surface(X, Y, Z, cmap="viridis", linewidth=0, antialiased=True)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    return fig


def _save(fig, out_path) -> Path:
    out = Path(out_path)
    # savefig infers the format from the suffix; bare paths become PNG.
    if out.suffix:
        fig.savefig(out, bbox_inches="tight")
    else:
        fig.savefig(out, format="png", bbox_inches="tight")
    return out


def render_error_plot(table: ErrorTable, out_path) -> Path:
    """Write the error chart for ``table`` to ``out_path``; returns the path."""
    fig = build_error_figure(table)
    try:
        return _save(fig, out_path)
    finally:
        plt.close(fig)


def render_surface(dat_path, out_path) -> Path:
    """Render the surface samples in ``dat_path`` to ``out_path``."""
    fig = build_surface_figure(*load_surface(dat_path))
    try:
        return _save(fig, out_path)
    finally:
        plt.close(fig)
