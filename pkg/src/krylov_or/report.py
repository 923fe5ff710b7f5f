"""Experiment reports: CSV serialization and standalone SVG line charts."""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import List

__all__ = ["ExperimentReport", "write_csv", "parse_csv", "render_svg", "CSV_HEADER"]

CSV_HEADER = ("method", "k", "matvecs", "norm", "error")


@dataclass
class ExperimentReport:
    """Error curve of one method.

    ``errors[i]`` is the (normalized) error after ``ks[i]`` iterations, which
    cost ``matvecs[i]`` products with the operator. ``inf`` marks an iterate
    that is undefined.
    """

    method: str
    norm: str
    ks: List[int] = field(default_factory=list)
    matvecs: List[int] = field(default_factory=list)
    errors: List[float] = field(default_factory=list)

    def append(self, k, matvecs, error):
        self.ks.append(int(k))
        self.matvecs.append(int(matvecs))
        self.errors.append(float(error))

    def error_at(self, k):
        return self.errors[self.ks.index(int(k))]

    def error_at_matvecs(self, budget):
        """Last error reached with at most ``budget`` products; ``inf`` if none."""
        best = math.inf
        for mv, e in zip(self.matvecs, self.errors):
            if mv <= budget:
                best = e
        return best


def write_csv(reports, stream=None):
    """Write reports as ``method,k,matvecs,norm,error`` rows; returns the text.

    Errors are written with ``repr`` so that parsing recovers them exactly.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rep in reports:
        for k, mv, e in zip(rep.ks, rep.matvecs, rep.errors):
            w.writerow((rep.method, k, mv, rep.norm, repr(float(e))))
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def parse_csv(text):
    """Inverse of :func:`write_csv`; reports keep first-appearance order."""
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if tuple(header or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    reports = {}
    for lineno, row in enumerate(rows, 2):
        if not row:
            continue
        if len(row) != 5:
            raise ValueError(f"line {lineno}: expected 5 fields, got {len(row)}")
        method, k, mv, norm, err = row
        key = (method, norm)
        if key not in reports:
            reports[key] = ExperimentReport(method, norm)
        reports[key].append(int(k), int(mv), float(err))
    return list(reports.values())


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def render_svg(reports, title="", width=720, height=440, floor=1e-16):
    """Line chart of error against matrix-vector products on a log10 axis."""
    left, right, top, bottom = 70, 190, 40, 50
    pw, ph = width - left - right, height - top - bottom
    pts = [(mv, e) for r in reports for mv, e in zip(r.matvecs, r.errors) if math.isfinite(e)]
    xmax = max([mv for mv, _ in pts], default=1) or 1
    logs = [math.log10(max(e, floor)) for _, e in pts] or [0.0]
    ylo, yhi = math.floor(min(logs)), math.ceil(max(logs))
    if yhi == ylo:
        yhi = ylo + 1

    def sx(mv):
        return left + pw * mv / xmax

    def sy(e):
        return top + ph * (yhi - math.log10(max(e, floor))) / (yhi - ylo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left}" y="22" font-size="14">{_esc(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    step = max(1, (yhi - ylo) // 8)
    for p in range(ylo, yhi + 1, step):
        y = top + ph * (yhi - p) / (yhi - ylo)
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end">1e{p}</text>')
    for i in range(6):
        mv = xmax * i / 5
        out.append(f'<text x="{sx(mv):.2f}" y="{top + ph + 16}" text-anchor="middle">{mv:g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 12}" text-anchor="middle">matrix-vector products</text>')
    for i, rep in enumerate(reports):
        color = _PALETTE[i % len(_PALETTE)]
        segs, cur = [], []
        for mv, e in zip(rep.matvecs, rep.errors):
            if math.isfinite(e):
                cur.append(f"{sx(mv):.2f},{sy(e):.2f}")
            elif cur:
                segs.append(cur)
                cur = []
        if cur:
            segs.append(cur)
        for seg in segs:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(seg)}"/>')
        ly = top + 14 * i + 8
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 34}" y="{ly + 4}">{_esc(rep.method)} ({_esc(rep.norm)})</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
