"""Demand-curve rendering: a hand-written SVG and a gnuplot data file.

Exceeded loads are drawn as open markers at the top of the resource grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from html import escape
from pathlib import Path

from .orchestrator import DemandPoint
from .results import MANIFEST_FILE, find_runs, read_demand_csv, read_manifest

WIDTH, HEIGHT = 800, 500
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 170, 30, 60
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]


@dataclass
class Series:
    label: str
    points: list[DemandPoint]
    grid_max: int
    resource_kind: str = "instances"

    def plotted(self) -> list[tuple[int, int, bool]]:
        """(load, resources, exceeded) with exceeded loads pinned to the grid maximum."""
        return [(p.load, p.demand if p.demand is not None else self.grid_max, p.demand is None)
                for p in self.points]


def load_series(results_dir: Path) -> list[Series]:
    runs = find_runs(results_dir)
    if not runs:
        raise FileNotFoundError(f"no demand.csv under {results_dir}")
    series = []
    for run in runs:
        points = read_demand_csv(run / "demand.csv")
        label, grid_max, kind = run.name, max((p.demand or 0) for p in points), "instances"
        manifest = run / MANIFEST_FILE
        if manifest.is_file():
            doc = read_manifest(manifest)
            prof = doc.get("sut_profile")
            label = prof.get("name", label) if isinstance(prof, dict) else str(prof or label)
            res = doc.get("resources", {})
            grid_max = max(res.get("amounts") or [grid_max])
            kind = res.get("kind", kind)
        series.append(Series(label, points, max(grid_max, 1), kind))
    seen: dict[str, int] = {}
    for s in series:
        seen[s.label] = seen.get(s.label, 0) + 1
    for s, run in zip(series, runs):
        if seen[s.label] > 1:
            s.label = f"{s.label} ({run.name})"
    return series


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo or 1.0
    raw = span / target
    mag = 10 ** len(str(int(raw))) / 10 if raw >= 1 else 1.0
    for m in (1, 2, 5, 10):
        step = mag * m
        if span / step <= target:
            break
    first = (lo // step) * step
    ticks, v = [], first
    while v <= hi + 1e-9:
        if v >= lo - 1e-9:
            ticks.append(v)
        v += step
    return ticks


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:.2f}"


def render_svg(series: list[Series]) -> str:
    all_pts = [pt for s in series for pt in s.plotted()]
    x_lo, x_hi = 0.0, float(max(p[0] for p in all_pts))
    y_lo, y_hi = 0.0, float(max(max(p[1] for p in all_pts), max(s.grid_max for s in series)))
    pw, ph = WIDTH - MARGIN_L - MARGIN_R, HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return MARGIN_L + (x - x_lo) / ((x_hi - x_lo) or 1) * pw

    def sy(y: float) -> float:
        return MARGIN_T + ph - (y - y_lo) / ((y_hi - y_lo) or 1) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line class="axis" x1="{MARGIN_L}" y1="{MARGIN_T + ph}" x2="{MARGIN_L + pw}" y2="{MARGIN_T + ph}" stroke="black"/>',
        f'<line class="axis" x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{MARGIN_T + ph}" stroke="black"/>',
    ]
    for t in _nice_ticks(x_lo, x_hi):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{MARGIN_T + ph}" x2="{x:.2f}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{MARGIN_T + ph + 18}" text-anchor="middle">{_num(t)}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        y = sy(t)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{y:.2f}" x2="{MARGIN_L}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<line x1="{MARGIN_L}" y1="{y:.2f}" x2="{MARGIN_L + pw}" y2="{y:.2f}" stroke="#dddddd"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" text-anchor="end">{_num(t)}</text>')
    kind = series[0].resource_kind.replace("_", " ")
    out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">load (messages/second)</text>')
    out.append(f'<text x="18" y="{MARGIN_T + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {MARGIN_T + ph / 2:.2f})">resources ({escape(kind)})</text>')

    for i, s in enumerate(series):
        color = COLORS[i % len(COLORS)]
        pts = s.plotted()
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y, _ in pts)
        out.append(f'<polyline class="series" fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        for x, y, exceeded in pts:
            fill = "white" if exceeded else color
            cls = "marker exceeded" if exceeded else "marker"
            out.append(f'<circle class="{cls}" cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" '
                       f'fill="{fill}" stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN_T + 10 + 20 * i
        lx = MARGIN_L + pw + 15
        out.append(f'<g class="legend-entry"><line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>'
                   f'<text x="{lx + 26}" y="{ly + 4}">{escape(s.label)}</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_dat(series: list[Series]) -> str:
    """Gnuplot data: one index block per series, columns load, resources, exceeded(0/1)."""
    blocks = []
    for s in series:
        lines = [f"# {s.label}", "# load resources exceeded"]
        lines += [f"{x} {y} {int(e)}" for x, y, e in s.plotted()]
        blocks.append("\n".join(lines))
    return "\n\n\n".join(blocks) + "\n"


def plot_results(results_dir: Path, out_dir: Path | None = None) -> tuple[Path, Path]:
    series = load_series(results_dir)
    out_dir = out_dir or results_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    svg, dat = out_dir / "demand.svg", out_dir / "demand.dat"
    svg.write_text(render_svg(series), encoding="utf-8", newline="\n")
    dat.write_text(render_dat(series), encoding="utf-8", newline="\n")
    return svg, dat
