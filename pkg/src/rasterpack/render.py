"""Layout rendering: SVG strip drawings and benchmark report figures."""

from __future__ import annotations

import hashlib
from xml.sax.saxutils import escape

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .errors import ValidationError  # noqa: E402
from .instances import InstanceFile  # noqa: E402
from .raster import encode, rotate_and_rasterize  # noqa: E402
from .results import ResultFile  # noqa: E402


def shape_color(shape_id: str) -> str:
    """Stable fill color derived from the shape id."""
    h = hashlib.md5(shape_id.encode()).digest()
    hue = int.from_bytes(h[:2], "big") % 360
    return f"hsl({hue},62%,58%)"


def render_svg(result: ResultFile, inst: InstanceFile) -> str:
    """Container plus each placed piece drawn as its row strips.

    Deterministic for a given input; one <g> per piece, one <rect> per strip,
    y axis pointing up.
    """
    if not result.pieces:
        raise ValidationError("result contains no pieces")
    W = result.width_px
    L = result.length_px
    scale = W / inst.container_width
    by_id = {s.id: s for s in inst.shapes}
    cache = {}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {L} {W}" '
        f'width="{L}" height="{W}">',
        f'<rect x="0" y="0" width="{L}" height="{W}" fill="none" '
        f'stroke="black" stroke-width="0.6"/>',
    ]
    for p in result.pieces:
        key = (p["shape"], p["orientation"])
        if key not in cache:
            if p["shape"] not in by_id:
                raise ValidationError(f"result references unknown shape {p['shape']!r}")
            cache[key] = encode(rotate_and_rasterize(
                by_id[p["shape"]].outline, p["orientation"], scale))
        ds = cache[key]
        color = shape_color(p["shape"])
        parts.append(f'<g id="piece-{p["piece"]}" data-shape="{escape(str(p["shape"]))}" '
                     f'fill="{color}">')
        for r in range(ds.nrows):
            y = ds.y0 + r + p["y"]
            for a, b in ds.row_strips(ds.y0 + r):
                x = a + p["x"]
                parts.append(f'<rect x="{x}" y="{W - 1 - y}" '
                             f'width="{b - a + 1}" height="1"/>')
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def density_events(record_events, total_area: int, width: int):
    """(time, best density) steps from a run's event log."""
    ts, ds = [], []
    best = None
    for t, L, feasible in record_events:
        if not feasible:
            continue
        if best is None or L < best:
            best = L
            ts.append(t)
            ds.append(100.0 * total_area / (width * L))
    return ts, ds


def save_density_figure(path, instance_name: str, runs: list[dict]) -> None:
    """Best-density-so-far evolution for each run of one instance.

    runs: dicts with keys seed, corner_reduction, events, total_area, width.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    for run in runs:
        ts, ds = density_events(run["events"], run["total_area"], run["width"])
        label = f"seed {run['seed']}" + (
            "" if run.get("corner_reduction", True) else " (no reduction)")
        style = "-" if run.get("corner_reduction", True) else "--"
        ax.step(ts, ds, where="post", linestyle=style, label=label)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("density (%)")
    ax.set_title(instance_name)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_layout_figure(path, result: ResultFile, inst: InstanceFile) -> None:
    """Raster layout preview as a matplotlib figure."""
    W = result.width_px
    L = result.length_px
    scale = W / inst.container_width
    by_id = {s.id: s for s in inst.shapes}
    cache = {}
    fig, ax = plt.subplots(figsize=(max(4.0, 6.0 * L / max(W, 1)), 6.0))
    ax.add_patch(plt.Rectangle((0, 0), L, W, fill=False, edgecolor="black"))
    for p in result.pieces:
        key = (p["shape"], p["orientation"])
        if key not in cache:
            cache[key] = encode(rotate_and_rasterize(
                by_id[p["shape"]].outline, p["orientation"], scale))
        ds = cache[key]
        h = hashlib.md5(str(p["shape"]).encode()).digest()
        color = (h[0] / 255 * 0.8 + 0.1, h[1] / 255 * 0.8 + 0.1, h[2] / 255 * 0.8 + 0.1)
        for r in range(ds.nrows):
            y = ds.y0 + r + p["y"]
            for a, b in ds.row_strips(ds.y0 + r):
                ax.add_patch(plt.Rectangle((a + p["x"], y), b - a + 1, 1,
                                           facecolor=color, edgecolor="none"))
    ax.set_xlim(-1, L + 1)
    ax.set_ylim(-1, W + 1)
    ax.set_aspect("equal")
    ax.set_title(f"{result.instance}: L={L}px, density {result.density_percent:.2f}%")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
