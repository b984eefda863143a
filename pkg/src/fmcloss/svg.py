"""Minimal self-contained SVG line charts."""
import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")


def _nice_ticks(lo, hi, n=5):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return [0.0, 1.0]
    if hi <= lo:
        hi = lo + (abs(lo) or 1.0)
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.floor(lo / step) * step
    ticks = []
    t = start
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 12))
        t += step
    if ticks[-1] < hi:
        ticks.append(round(t, 12))
    return ticks


def _fmt(v):
    return f"{v:.4g}"


class Chart:
    """A single panel with numeric or categorical x and a numeric y axis.

    Series are ``(label, xs, ys, errs)``; ``errs`` may be None. With
    ``categories`` set, xs are indices into it.
    """

    def __init__(self, title, xlabel, ylabel, width=640, height=400, categories=None):
        self.title = title
        self.xlabel = xlabel
        self.ylabel = ylabel
        self.width = width
        self.height = height
        self.categories = list(categories) if categories is not None else None
        self.series = []

    def add(self, label, xs, ys, errs=None, markers=True):
        self.series.append((label, [float(x) for x in xs], [float(y) for y in ys],
                            None if errs is None else [float(e) for e in errs], markers))
        return self

    def _ranges(self):
        xs = [x for s in self.series for x in s[1]]
        lo_y, hi_y = [], []
        for _, _, ys, errs, _ in self.series:
            for i, y in enumerate(ys):
                e = errs[i] if errs else 0.0
                lo_y.append(y - e)
                hi_y.append(y + e)
        if self.categories is not None:
            x_lo, x_hi = -0.5, len(self.categories) - 0.5
        else:
            x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
            if x_hi == x_lo:
                x_hi = x_lo + 1.0
        y_lo, y_hi = (min(lo_y), max(hi_y)) if lo_y else (0.0, 1.0)
        pad = (y_hi - y_lo) * 0.05 or abs(y_hi) * 0.05 or 1.0
        return x_lo, x_hi, y_lo - pad, y_hi + pad

    def render(self):
        W, H = self.width, self.height
        left, right, top, bottom = 72, 150, 36, 70 if self.categories else 50
        pw, ph = W - left - right, H - top - bottom
        x_lo, x_hi, y_lo, y_hi = self._ranges()
        yt = _nice_ticks(y_lo, y_hi)
        y_lo, y_hi = min(y_lo, yt[0]), max(y_hi, yt[-1])

        def sx(x):
            return left + (x - x_lo) / (x_hi - x_lo) * pw

        def sy(y):
            return top + (1 - (y - y_lo) / (y_hi - y_lo)) * ph

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
               f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
               f'<rect width="{W}" height="{H}" fill="white"/>',
               f'<text x="{W / 2:.1f}" y="20" text-anchor="middle" font-size="14">'
               f'{escape(self.title)}</text>',
               f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>']
        for t in yt:
            y = sy(t)
            out.append(f'<line x1="{left - 4}" y1="{y:.1f}" x2="{left + pw}" y2="{y:.1f}" '
                       f'stroke="#ddd"/>')
            out.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
        if self.categories is not None:
            for i, c in enumerate(self.categories):
                x = sx(i)
                out.append(f'<text x="{x:.1f}" y="{top + ph + 12}" text-anchor="end" '
                           f'transform="rotate(-40 {x:.1f} {top + ph + 12})">{escape(str(c))}</text>')
        else:
            for t in _nice_ticks(x_lo, x_hi):
                if x_lo - 1e-9 <= t <= x_hi + 1e-9:
                    x = sx(t)
                    out.append(f'<line x1="{x:.1f}" y1="{top + ph}" x2="{x:.1f}" '
                               f'y2="{top + ph + 4}" stroke="#333"/>')
                    out.append(f'<text x="{x:.1f}" y="{top + ph + 16}" '
                               f'text-anchor="middle">{_fmt(t)}</text>')
        out.append(f'<text x="{left + pw / 2:.1f}" y="{H - 8}" text-anchor="middle">'
                   f'{escape(self.xlabel)}</text>')
        out.append(f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(self.ylabel)}</text>')
        for k, (label, xs, ys, errs, markers) in enumerate(self.series):
            color = PALETTE[k % len(PALETTE)]
            pts = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(xs, ys))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            for i, (x, y) in enumerate(zip(xs, ys)):
                if errs:
                    e = errs[i]
                    out.append(f'<line x1="{sx(x):.1f}" y1="{sy(y - e):.1f}" x2="{sx(x):.1f}" '
                               f'y2="{sy(y + e):.1f}" stroke="{color}"/>')
                if markers:
                    out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="2.5" fill="{color}"/>')
            ly = top + 10 + 16 * k
            out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 28}" y2="{ly}" '
                       f'stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{left + pw + 32}" y="{ly + 4}">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.render())
