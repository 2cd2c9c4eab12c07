"""Standalone SVG line plots of a simulation log.

The plot area carries its data ranges as ``data-xmin``/``data-xmax``/
``data-ymin``/``data-ymax`` attributes so the files can be checked
structurally.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from . import trajectory
from .logio import OutputError

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=70, right=20, top=40, bottom=50)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
N_TICKS = 5


def _range(values):
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi - lo < 1e-12:
        pad = max(abs(lo) * 0.05, 1e-3)
    else:
        pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def line_plot(series, title: str, xlabel: str, ylabel: str) -> str:
    """Render ``series`` (list of (label, xs, ys) or (label, xs, ys, dashed)) to an SVG string."""
    series = [tuple(s) if len(s) == 4 else (*s, False) for s in series]
    xs_all = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys_all = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    if xs_all.size == 0:
        xs_all = ys_all = np.zeros(1)
    xmin, xmax = _range(xs_all)
    ymin, ymax = _range(ys_all)
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]

    def px(x):
        return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0)

    def py(y):
        return y0 + (y - ymin) / (ymax - ymin) * (y1 - y0)

    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(WIDTH),
        height=str(HEIGHT),
        viewBox=f"0 0 {WIDTH} {HEIGHT}",
    )
    ET.SubElement(svg, "rect", x="0", y="0", width=str(WIDTH), height=str(HEIGHT), fill="white")
    ET.SubElement(svg, "text", {"x": str(WIDTH / 2), "y": "24", "text-anchor": "middle", "font-size": "16"}).text = title
    area = ET.SubElement(
        svg,
        "g",
        {
            "class": "plot-area",
            "data-xmin": repr(xmin),
            "data-xmax": repr(xmax),
            "data-ymin": repr(ymin),
            "data-ymax": repr(ymax),
            "data-px": f"{x0} {x1}",
            "data-py": f"{y0} {y1}",
        },
    )
    ET.SubElement(area, "rect", x=str(x0), y=str(y1), width=str(x1 - x0), height=str(y0 - y1), fill="none", stroke="black")

    axes = ET.SubElement(svg, "g", {"class": "axes", "font-size": "11"})
    for v in np.linspace(xmin, xmax, N_TICKS):
        ET.SubElement(axes, "line", x1=f"{px(v):.2f}", x2=f"{px(v):.2f}", y1=str(y0), y2=str(y0 + 5), stroke="black")
        ET.SubElement(axes, "text", {"class": "xtick", "x": f"{px(v):.2f}", "y": str(y0 + 18), "text-anchor": "middle"}).text = f"{v:.3g}"
    for v in np.linspace(ymin, ymax, N_TICKS):
        ET.SubElement(axes, "line", x1=str(x0 - 5), x2=str(x0), y1=f"{py(v):.2f}", y2=f"{py(v):.2f}", stroke="black")
        ET.SubElement(axes, "text", {"class": "ytick", "x": str(x0 - 8), "y": f"{py(v) + 4:.2f}", "text-anchor": "end"}).text = f"{v:.3g}"
    ET.SubElement(axes, "text", {"x": str((x0 + x1) / 2), "y": str(HEIGHT - 10), "text-anchor": "middle"}).text = xlabel
    ET.SubElement(
        axes,
        "text",
        {"x": "16", "y": str((y0 + y1) / 2), "text-anchor": "middle", "transform": f"rotate(-90 16 {(y0 + y1) / 2})"},
    ).text = ylabel

    legend = ET.SubElement(svg, "g", {"class": "legend", "font-size": "11"})
    for i, (label, xs, ys, dashed) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
        # thin long logs to keep files small; keep the extremes exact
        if xs.size > 2000:
            idx = np.unique(np.concatenate([np.linspace(0, xs.size - 1, 2000).astype(int), [np.argmin(ys), np.argmax(ys)]]))
            xs, ys = xs[idx], ys[idx]
        attrs = {
            "class": "series",
            "data-label": label,
            "fill": "none",
            "stroke": color,
            "stroke-width": "1.5",
            "points": " ".join(f"{px(a):.3f},{py(b):.3f}" for a, b in zip(xs, ys)),
        }
        if dashed:
            attrs["stroke-dasharray"] = "6 4"
        ET.SubElement(area, "polyline", attrs)
        ly = MARGIN["top"] + 14 * i + 10
        ET.SubElement(legend, "line", x1=str(x1 - 120), x2=str(x1 - 100), y1=str(ly), y2=str(ly), stroke=color)
        ET.SubElement(legend, "text", x=str(x1 - 95), y=str(ly + 4)).text = label
    return ET.tostring(svg, encoding="unicode")


def _write(path: Path, text: str):
    try:
        path.write_text('<?xml version="1.0" encoding="UTF-8"?>\n' + text + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def write_plots(rows, out_dir, curve=None) -> list:
    """Write psi, psi_dot, wrench and reference plots; return the paths.

    With ``curve`` the reference plot also shows the nominal x_d(t) next to
    the advanced x_d(psi(t)).
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {out_dir}: {exc}") from exc
    t = np.array([r.t for r in rows])
    psi = np.array([r.psi for r in rows])
    psi_dot = np.array([r.psi_dot for r in rows])
    hands = np.array([r.f_hands for r in rows]).reshape(-1, 6)
    feet = np.array([r.f_feet for r in rows]).reshape(-1, 6)
    x_d = np.array([r.x_d for r in rows]).reshape(-1, 6)
    x = np.array([r.x for r in rows]).reshape(-1, 6)

    plots = {
        "psi_vs_t.svg": line_plot(
            [("psi", t, psi, False), ("psi = t", t, t, True)], "Free parameter", "t [s]", "psi"
        ),
        "psidot_vs_t.svg": line_plot([("psi_dot", t, psi_dot, False)], "Free parameter rate", "t [s]", "psi_dot"),
        "wrench_vs_t.svg": line_plot(
            [(f"hands f{a}", t, hands[:, i], False) for i, a in enumerate("xyz")]
            + [("feet |f|", t, np.linalg.norm(feet[:, :3], axis=1), True)],
            "Interaction wrench",
            "t [s]",
            "force [N]",
        ),
    }
    ref = []
    for i, a in ((0, "x"), (2, "z")):
        ref.append((f"{a}_d advanced", t, x_d[:, i], False))
        if curve is not None:
            nominal = np.array([trajectory.evaluate(curve, ti)[i] for ti in t])
            ref.append((f"{a}_d nominal", t, nominal, True))
        ref.append((f"{a} measured", t, x[:, i], True))
    plots["reference_vs_t.svg"] = line_plot(ref, "CoM reference", "t [s]", "position [m]")

    paths = []
    for name, text in plots.items():
        p = out_dir / name
        _write(p, text)
        paths.append(p)
    return paths
