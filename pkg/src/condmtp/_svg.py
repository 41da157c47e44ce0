"""Tiny dependency-free SVG emitters for the figure subcommands."""

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2")

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 70, 180, 40, 55


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    return [lo + span * i / (n - 1) for i in range(n)]


def line_chart(series, title: str, xlabel: str, ylabel: str,
               y_range=None) -> str:
    """Render [(name, xs, ys), ...] as an SVG line chart."""
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    x_lo, x_hi = min(xs_all), max(xs_all)
    if y_range is None:
        y_lo, y_hi = min(ys_all), max(ys_all)
        pad = 0.05 * max(y_hi - y_lo, 1e-9)
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        y_lo, y_hi = y_range
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0

    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def px(x):
        return _ML + pw * (x - x_lo) / (x_hi - x_lo)

    def py(y):
        return _MT + ph * (1.0 - (y - y_lo) / (y_hi - y_lo))

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'font-family="sans-serif" font-size="12">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>',
             f'<text x="{_ML + pw / 2:.1f}" y="24" text-anchor="middle" '
             f'font-size="15">{title}</text>']
    # axes and ticks
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
                 f'fill="none" stroke="#333"/>')
    for tx in _ticks(x_lo, x_hi):
        parts.append(f'<line x1="{px(tx):.1f}" y1="{_MT + ph}" x2="{px(tx):.1f}" '
                     f'y2="{_MT + ph + 5}" stroke="#333"/>')
        parts.append(f'<text x="{px(tx):.1f}" y="{_MT + ph + 18}" '
                     f'text-anchor="middle">{tx:.3g}</text>')
    for ty in _ticks(y_lo, y_hi):
        parts.append(f'<line x1="{_ML - 5}" y1="{py(ty):.1f}" x2="{_ML}" '
                     f'y2="{py(ty):.1f}" stroke="#333"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py(ty) + 4:.1f}" '
                     f'text-anchor="end">{ty:.3g}</text>')
    parts.append(f'<text x="{_ML + pw / 2:.1f}" y="{_H - 12}" '
                 f'text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="18" y="{_MT + ph / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 18 {_MT + ph / 2:.1f})">{ylabel}</text>')

    for k, (name, xs, ys) in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.8"/>')
        ly = _MT + 16 * k + 10
        parts.append(f'<line x1="{_W - _MR + 10}" y1="{ly}" x2="{_W - _MR + 34}" '
                     f'y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_W - _MR + 40}" y="{ly + 4}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def region_map(cells, n: int, title: str) -> str:
    """Shade the covered (alpha, lam) cells of an n x n midpoint grid."""
    pw = _W - _ML - _MR
    ph = _H - _MT - _MB
    cw, ch = pw / n, ph / n
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'font-family="sans-serif" font-size="12">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>',
             f'<text x="{_ML + pw / 2:.1f}" y="24" text-anchor="middle" '
             f'font-size="15">{title}</text>']
    for cell in cells:
        i = int(cell["alpha"] * n)  # midpoints map back to their cell index
        j = int(cell["lam"] * n)
        if cell["covered"]:
            color = "#9ecae1" if "pqd-bound" in cell["certificates"] else "#c7e9c0"
            x = _ML + i * cw
            y = _MT + ph - (j + 1) * ch
            parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw + 0.5:.2f}" '
                         f'height="{ch + 0.5:.2f}" fill="{color}"/>')
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
                 f'fill="none" stroke="#333"/>')
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(f'<text x="{_ML + pw * t:.1f}" y="{_MT + ph + 18}" '
                     f'text-anchor="middle">{t:g}</text>')
        parts.append(f'<text x="{_ML - 8}" y="{_MT + ph * (1 - t) + 4:.1f}" '
                     f'text-anchor="end">{t:g}</text>')
    parts.append(f'<text x="{_ML + pw / 2:.1f}" y="{_H - 12}" '
                 f'text-anchor="middle">alpha</text>')
    parts.append(f'<text x="18" y="{_MT + ph / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 18 {_MT + ph / 2:.1f})">lambda</text>')
    parts.append(f'<text x="{_W - _MR + 10}" y="{_MT + 10}" fill="#555">shaded: '
                 f'certified</text>')
    parts.append("</svg>")
    return "\n".join(parts)
