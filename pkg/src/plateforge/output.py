"""VTK, CSV and SVG writers."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


def write_vtk(path, mesh, point_data: dict | None = None, cell_data: dict | None = None,
              title: str = "plateforge field") -> None:
    """Legacy ASCII unstructured grid with one polygon cell per element."""
    point_data = point_data or {}
    cell_data = cell_data or {}
    lines = ["# vtk DataFile Version 3.0", title[:255], "ASCII", "DATASET UNSTRUCTURED_GRID",
             f"POINTS {mesh.n_nodes} double"]
    lines += [f"{x:.16g} {y:.16g} 0" for x, y in mesh.nodes]
    size = sum(len(e) + 1 for e in mesh.elements)
    lines.append(f"CELLS {mesh.n_elements} {size}")
    lines += [" ".join(map(str, [len(e), *e.tolist()])) for e in mesh.elements]
    lines.append(f"CELL_TYPES {mesh.n_elements}")
    lines += ["7"] * mesh.n_elements
    for header, count, data in (("POINT_DATA", mesh.n_nodes, point_data), ("CELL_DATA", mesh.n_elements, cell_data)):
        if not data:
            continue
        lines.append(f"{header} {count}")
        for name, values in data.items():
            values = np.asarray(values, dtype=float)
            lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
            lines += [f"{v:.16g}" for v in values]
    Path(path).write_text("\n".join(lines) + "\n")


def write_csv(path, rows: list[dict]) -> None:
    if not rows:
        Path(path).write_text("")
        return
    fields = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def write_svg_plot(path, series: dict, xlabel: str = "", ylabel: str = "", logx: bool = False,
                   logy: bool = False, width: int = 640, height: int = 420) -> None:
    """Minimal line chart: ``series`` maps a label to ``(x, y)`` sequences."""
    pad = 60
    xs = np.concatenate([np.asarray(x, dtype=float) for x, _ in series.values()])
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in series.values()])
    tx = np.log10 if logx else (lambda v: np.asarray(v, dtype=float))
    ty = np.log10 if logy else (lambda v: np.asarray(v, dtype=float))
    x_lo, x_hi = float(np.min(tx(xs))), float(np.max(tx(xs)))
    y_lo, y_hi = float(np.min(ty(ys))), float(np.max(ty(ys)))
    x_hi = x_hi if x_hi > x_lo else x_lo + 1.0
    y_hi = y_hi if y_hi > y_lo else y_lo + 1.0

    def px(v):
        return pad + (tx(v) - x_lo) / (x_hi - x_lo) * (width - 2 * pad)

    def py(v):
        return height - pad - (ty(v) - y_lo) / (y_hi - y_lo) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{width / 2}" y="{height - 15}" text-anchor="middle">{xlabel}</text>',
           f'<text x="15" y="{height / 2}" transform="rotate(-90 15 {height / 2})" text-anchor="middle">{ylabel}</text>']
    for i, (label, (x, y)) in enumerate(series.items()):
        colour = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px(np.asarray(x)), py(np.asarray(y))))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{width - pad + 5}" y="{pad + 16 * i}" fill="{colour}" font-size="12">{label}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
