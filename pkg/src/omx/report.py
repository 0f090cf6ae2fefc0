"""Grouped bar charts (SVG) for benchmark results.

Hand-rolled SVG keeps the output deterministic and dependency-free:
one bar per (model, task), grouped by task, one chart per metric.
"""

import math
from collections import OrderedDict

PALETTE = ["#4878cf", "#ee854a", "#6acc65", "#d65f5f", "#956cb4", "#8c613c"]

_W_BAR = 46
_GAP_BAR = 8
_GAP_GROUP = 48
_MARGIN_L = 64
_MARGIN_R = 24
_MARGIN_T = 56
_MARGIN_B = 44
_PLOT_H = 260


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _nice_ticks(lo, hi, n=5):
    span = hi - lo
    if span <= 0:
        span = 1.0
    raw = span / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    first = step * __import__("math").floor(lo / step)
    ticks = []
    t = first
    while t <= hi + 1e-12:
        if t >= lo - 1e-12:
            ticks.append(round(t, 10))
        t += step
    return ticks


def bar_chart_svg(title, grouped, y_label):
    """Render one chart.

    grouped: ordered mapping task -> list of (model, value); model
    order must be consistent across tasks.
    """
    models = []
    for pairs in grouped.values():
        for m, _ in pairs:
            if m not in models:
                models.append(m)
    values = [v for pairs in grouped.values() for _, v in pairs]
    lo = min(0.0, min(values))
    hi = max(values)
    if hi == lo:
        hi = lo + 1.0
    hi += 0.05 * (hi - lo)
    ticks = _nice_ticks(lo, hi)

    def y_of(v):
        return _MARGIN_T + _PLOT_H * (1.0 - (v - lo) / (hi - lo))

    group_w = lambda pairs: len(pairs) * _W_BAR + (len(pairs) - 1) * _GAP_BAR
    total_w = (
        _MARGIN_L
        + sum(group_w(p) for p in grouped.values())
        + _GAP_GROUP * (len(grouped) - 1)
        + _MARGIN_R
    )
    total_h = _MARGIN_T + _PLOT_H + _MARGIN_B
    color = {m: PALETTE[i % len(PALETTE)] for i, m in enumerate(models)}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{total_h}" '
        f'viewBox="0 0 {total_w} {total_h}" font-family="sans-serif">',
        f'<text x="{total_w / 2:.1f}" y="24" text-anchor="middle" font-size="16">{_esc(title)}</text>',
        f'<text x="16" y="{_MARGIN_T + _PLOT_H / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {_MARGIN_T + _PLOT_H / 2:.1f})">{_esc(y_label)}</text>',
    ]
    for t in ticks:
        y = y_of(t)
        parts.append(
            f'<line x1="{_MARGIN_L}" y1="{y:.2f}" x2="{total_w - _MARGIN_R}" y2="{y:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 6}" y="{y + 4:.2f}" text-anchor="end" font-size="11">{t:g}</text>'
        )
    x = _MARGIN_L
    zero_y = y_of(max(lo, 0.0))
    for task, pairs in grouped.items():
        gx = x
        for model, value in pairs:
            top = min(y_of(value), zero_y)
            h = abs(y_of(value) - zero_y)
            parts.append(
                f'<rect x="{x:.2f}" y="{top:.2f}" width="{_W_BAR}" height="{h:.2f}" '
                f'fill="{color[model]}"><title>{_esc(model)} / {_esc(task)}: {value:.6g}</title></rect>'
            )
            parts.append(
                f'<text x="{x + _W_BAR / 2:.2f}" y="{top - 4:.2f}" text-anchor="middle" '
                f'font-size="10">{value:.3g}</text>'
            )
            x += _W_BAR + _GAP_BAR
        x -= _GAP_BAR
        parts.append(
            f'<text x="{(gx + x) / 2:.2f}" y="{_MARGIN_T + _PLOT_H + 18}" '
            f'text-anchor="middle" font-size="12">{_esc(task)}</text>'
        )
        x += _GAP_GROUP
    lx = _MARGIN_L
    ly = _MARGIN_T + _PLOT_H + 34
    for m in models:
        parts.append(f'<rect x="{lx}" y="{ly - 9}" width="10" height="10" fill="{color[m]}"/>')
        parts.append(f'<text x="{lx + 14}" y="{ly}" font-size="11">{_esc(m)}</text>')
        lx += 14 + 7 * len(str(m)) + 18
    parts.append(
        f'<line x1="{_MARGIN_L}" y1="{zero_y:.2f}" x2="{total_w - _MARGIN_R}" y2="{zero_y:.2f}" '
        f'stroke="#333333" stroke-width="1"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_charts(rows):
    """Build (correlation_svg, mse_svg) from EvalRow-like records."""
    tasks = OrderedDict()
    for r in sorted(rows, key=lambda r: (r.task, r.model)):
        tasks.setdefault(r.task, []).append(r)
    corr = OrderedDict(
        (t, [(r.model, r.correlation_score) for r in rs]) for t, rs in tasks.items()
    )
    err = OrderedDict((t, [(r.model, r.mse) for r in rs]) for t, rs in tasks.items())
    corr_svg = bar_chart_svg("Correlation score by model and task", corr, "correlation score")
    mse_svg = bar_chart_svg("Mean squared error by model and task", err, "MSE")
    return corr_svg, mse_svg
