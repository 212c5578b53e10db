"""File emission: CSV with metadata headers, JSON, and static SVG 1.1.

Every emitted file embeds the run configuration: CSV as '#'-prefixed
key = value lines before the header row, JSON under a "config" key, SVG in
a <desc> element.  Output is deterministic for a fixed configuration.
"""

import csv
import io
import json
import math


def config_lines(config):
    return [f"# {k} = {config[k]}" for k in sorted(config)]


def write_csv(path, header, rows, config=None):
    buf = io.StringIO()
    if config:
        for line in config_lines(config):
            buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    data = buf.getvalue()
    with open(path, "w") as f:
        f.write(data)
    return path


def write_json(path, payload, config=None):
    doc = {"config": config or {}, **payload}
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


class SvgCanvas:
    """Minimal SVG 1.1 document with a y-up math coordinate frame."""

    def __init__(self, width=480, height=840, xrange=(-0.1, 1.1), yrange=(-0.1, 2.1)):
        self.width = width
        self.height = height
        self.xr = xrange
        self.yr = yrange
        self.elements = []

    def _px(self, x, y):
        sx = (x - self.xr[0]) / (self.xr[1] - self.xr[0]) * self.width
        sy = (1 - (y - self.yr[0]) / (self.yr[1] - self.yr[0])) * self.height
        return sx, sy

    def line(self, x1, y1, x2, y2, stroke="black", width=1.0, dash=None):
        a = self._px(x1, y1)
        b = self._px(x2, y2)
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<line x1="{a[0]:.2f}" y1="{a[1]:.2f}" x2="{b[0]:.2f}" y2="{b[1]:.2f}" '
            f'stroke="{stroke}" stroke-width="{width}"{d}/>'
        )

    def rect(self, x, y, w, h, stroke="black", fill="none", width=1.0):
        a = self._px(x, y + h)
        ww = w / (self.xr[1] - self.xr[0]) * self.width
        hh = h / (self.yr[1] - self.yr[0]) * self.height
        self.elements.append(
            f'<rect x="{a[0]:.2f}" y="{a[1]:.2f}" width="{ww:.2f}" height="{hh:.2f}" '
            f'stroke="{stroke}" fill="{fill}" stroke-width="{width}"/>'
        )

    def polyline(self, points, stroke="black", width=1.5):
        pts = " ".join(f"{px:.2f},{py:.2f}" for px, py in (self._px(x, y) for x, y in points))
        self.elements.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{width}"/>'
        )

    def circle_marker(self, x, y, r=2.0, fill="black"):
        a = self._px(x, y)
        self.elements.append(f'<circle cx="{a[0]:.2f}" cy="{a[1]:.2f}" r="{r}" fill="{fill}"/>')

    def cell(self, x, y, w, h, gray):
        a = self._px(x, y + h)
        ww = w / (self.xr[1] - self.xr[0]) * self.width
        hh = h / (self.yr[1] - self.yr[0]) * self.height
        level = max(0, min(255, int(round(255 * (1 - gray)))))
        self.elements.append(
            f'<rect x="{a[0]:.2f}" y="{a[1]:.2f}" width="{ww:.2f}" height="{hh:.2f}" '
            f'fill="rgb({level},{level},{level})" stroke="none"/>'
        )

    def document(self, config=None):
        desc = ""
        if config:
            body = "\n".join(f"{k} = {config[k]}" for k in sorted(config))
            desc = f"<desc>{body}</desc>\n"
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{self.width}" height="{self.height}">\n'
            + desc
            + "\n".join(self.elements)
            + "\n</svg>\n"
        )


def curve_svg(path, curve_samples, tangent_lines=(), mc_samples=(), config=None):
    """Scene: the [0,1]x[0,2] rectangle, the analytic semicircle, the
    tangent-line family, and optional Monte Carlo contour points."""
    cv = SvgCanvas()
    cv.rect(0, 0, 1, 2, stroke="black", width=1.0)
    arc = [
        (1 - math.cos(t), 1 - math.sin(t))
        for t in [math.pi * (k / 400.0 - 0.5) for k in range(401)]
    ]
    cv.polyline(arc, stroke="#d62728", width=2.0)
    for tl in tangent_lines:
        # segment of y = slope x + intercept clipped to x in [-u, x_top]
        x0 = -tl.u
        x1 = min(1.0, (2.1 - tl.intercept) / tl.slope) if tl.slope > 0 else 1.0
        cv.line(x0, 0.0, x1, tl.slope * x1 + tl.intercept, stroke="#1f77b4", width=0.7)
    for s in curve_samples:
        cv.circle_marker(s.x, s.y, r=1.5, fill="#2ca02c")
    for s in mc_samples:
        cv.circle_marker(s.x, s.y, r=1.8, fill="#9467bd")
    with open(path, "w") as f:
        f.write(cv.document(config))
    return path


def heatmap_svg(path, field, config=None):
    """Grayscale cell map of a density field (white = 0, black = 1)."""
    N = field.N
    cv = SvgCanvas()
    w = 1.0 / N
    h = 2.0 / (2 * N + 1)
    for i in range(2 * N + 1):
        y = 2.0 - (i + 1) * h
        for j in range(N):
            cv.cell(j * w, y, w, h, float(field.density[i, j]))
    cv.rect(0, 0, 1, 2, stroke="black", width=1.0)
    with open(path, "w") as f:
        f.write(cv.document(config))
    return path
