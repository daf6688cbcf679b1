"""Minimal SVG line charts for episode metrics.

Output is a pure function of the input series, so identical CSVs give
byte-identical SVG files.
"""

from __future__ import annotations

import csv
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

EPISODE_HEADER = ["episode", "phase", "accuracy", "gates", "reward", "y_target", "epsilon"]

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 55
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"]


def moving_average(series, window: int) -> np.ndarray:
    """Trailing mean over the last ``min(window, available)`` points."""
    if window < 1:
        raise ValueError("window must be >= 1")
    x = np.asarray(series, dtype=np.float64)
    return np.array([x[max(0, i - window + 1):i + 1].mean() for i in range(x.size)])


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [round(v, 10) for v in np.arange(start, hi + step * 1e-9, step)]


def line_chart(series, title: str, xlabel: str, ylabel: str) -> str:
    """Render ``series`` = [(label, xs, ys), ...] as an SVG document string."""
    xs_all = np.concatenate([np.asarray(s[1], float) for s in series])
    ys_all = np.concatenate([np.asarray(s[2], float) for s in series])
    x0, x1 = float(xs_all.min()), float(xs_all.max())
    y0, y1 = float(ys_all.min()), float(ys_all.max())
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN_T + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{escape(title)}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for t in _ticks(x0, x1):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{MARGIN_T + ph}" x2="{x:.2f}" y2="{MARGIN_T + ph + 5}" stroke="#333"/>')
        out.append(f'<text x="{x:.2f}" y="{MARGIN_T + ph + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{t:g}</text>')
    for t in _ticks(y0, y1):
        y = sy(t)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{y:.2f}" x2="{MARGIN_L + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{t:g}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MARGIN_T + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12" transform="rotate(-90 16 {MARGIN_T + ph / 2:.1f})">{escape(ylabel)}</text>')
    for i, (label, xs, ys) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline class="series" data-label="{escape(label)}" fill="none" '
                   f'stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN_T + 14 + 16 * i
        out.append(f'<line x1="{MARGIN_L + 10}" y1="{ly - 4}" x2="{MARGIN_L + 30}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{MARGIN_L + 35}" y="{ly}" font-family="sans-serif" '
                   f'font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def read_episodes(path) -> list[dict]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"{path} not found")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != EPISODE_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        records = []
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(EPISODE_HEADER):
                raise ValueError(f"{path}:{lineno}: expected {len(EPISODE_HEADER)} fields")
            try:
                records.append({
                    "episode": int(row[0]), "phase": row[1], "accuracy": float(row[2]),
                    "gates": int(row[3]), "reward": float(row[4]), "y_target": float(row[5]),
                    "epsilon": float(row[6]),
                })
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not records:
        raise ValueError(f"{path}: no episode records")
    return records


PANELS = [
    ("train_accuracy", "train", "accuracy", "Training accuracy", "accuracy"),
    ("test_accuracy", "test", "accuracy", "Testing accuracy", "accuracy"),
    ("train_gates", "train", "gates", "Training gate count", "number of gates"),
    ("test_gates", "test", "gates", "Testing gate count", "number of gates"),
    ("train_reward", "train", "reward", "Training reward", "cumulative reward"),
    ("test_reward", "test", "reward", "Testing reward", "cumulative reward"),
]


def emit_plots(run_dir, ma_train: int = 40, ma_test: int = 4, adaptive: bool | None = None) -> list[Path]:
    """Write the six metric charts for ``run_dir/episodes.csv`` into ``run_dir/plots``.

    All charts are rendered before any file is written. The training
    accuracy chart overlays y_target when the run is adaptive (detected from
    a varying y_target column unless ``adaptive`` is given).
    """
    run_dir = Path(run_dir)
    records = read_episodes(run_dir / "episodes.csv")
    by_phase = {p: [r for r in records if r["phase"] == p] for p in ("train", "test")}
    if adaptive is None:
        adaptive = len({r["y_target"] for r in records}) > 1
    rendered = {}
    for stem, phase, key, title, ylabel in PANELS:
        rows = by_phase[phase]
        if not rows:
            continue
        window = ma_train if phase == "train" else ma_test
        xs = [r["episode"] for r in rows]
        series = [(f"{key} ({window}-episode moving average)", xs,
                   moving_average([r[key] for r in rows], window))]
        if adaptive and stem == "train_accuracy":
            series.append(("y_target", xs, [r["y_target"] for r in rows]))
        rendered[stem] = line_chart(series, title, "episode", ylabel)
    plot_dir = run_dir / "plots"
    plot_dir.mkdir(exist_ok=True)
    paths = []
    for stem, svg in rendered.items():
        path = plot_dir / f"{stem}.svg"
        path.write_text(svg)
        paths.append(path)
    return paths
