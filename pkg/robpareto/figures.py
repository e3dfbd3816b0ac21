"""
CSV tables and standalone SVG scatter plots for reports and sweeps.
"""
import csv
import io
import logging
import os
import tempfile

import numpy as np

from .errors import DomainError, OutputError
from .geometry import DominanceMode

logger = logging.getLogger(__name__)

SVG_SIZE = 400
SVG_MARGIN = 40


def write_atomic(path, text):
    """Write through a temporary file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    tmp = None
    try:
        os.makedirs(directory, exist_ok=True)
        with tempfile.NamedTemporaryFile("w", encoding="utf-8", dir=directory, delete=False,
                                         prefix=".tmp-", suffix=os.path.basename(path), newline="") as handle:
            tmp = handle.name
            handle.write(text)
        os.replace(tmp, path)
    except OSError as err:
        if tmp is not None and os.path.exists(tmp):
            os.unlink(tmp)
        raise OutputError(f"cannot write {path}: {err.strerror or err}")
    logger.debug("wrote %s (%d bytes)", path, len(text))
    return path


def _csv(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _num(v):
    return repr(float(v))


def _flag(v):
    return "true" if v else "false"


def report_csv(report):
    header = ["candidate", "robust_efficient", "convex_hull_efficient", "objectivewise_efficient",
              "set_valued_minimizer", "dominator"]
    rows = []
    for e in report:
        dominators = ";".join(f"{name}={d.candidate}" for name, d in e.dominators.items())
        rows.append([e.candidate.label, _flag(e.robust_efficient), _flag(e.convex_hull_efficient),
                     _flag(e.objectivewise_efficient), _flag(e.set_valued_minimizer), dominators])
    return _csv(header, rows)


def solve_csv(results):
    """``results`` is a list of (scalarizer spec, SolveResult) pairs."""
    header = ["scalarizer", "candidate", "value", "method", "evaluations", "worst_scenario"]
    rows = [[spec, r.label, _num(r.value), r.method.value, r.evaluations, r.scenario] for spec, r in results]
    return _csv(header, rows)


def trace_csv(instance, u, candidate):
    img = instance.image(candidate)
    values = u.values(img.points)
    header = ["scenario"] + [f"f{i + 1}" for i in range(img.n)] + ["u"]
    rows = [[sid] + [_num(v) for v in point] + [_num(val)] for (sid, point), val in zip(img, values)]
    return _csv(header, rows)


def image_csv(instance, candidate):
    img = instance.image(candidate)
    header = ["scenario"] + [f"f{i + 1}" for i in range(img.n)]
    return _csv(header, [[sid] + [_num(v) for v in point] for sid, point in img])


def level_curve(u, level, samples=181):
    """Points of {y >= z* : u(y) = level} for a positively homogeneous two-objective scalarizer."""
    t = np.linspace(0.0, np.pi / 2.0, samples)
    directions = np.stack([np.cos(t), np.sin(t)], axis=1)
    reference = np.broadcast_to(getattr(u, "reference", 0.0), (2,))
    # u is positively homogeneous in y - z*
    radius = level / u.values(reference + directions)
    return reference + radius[:, None] * directions


def scatter_svg(points, u=None, level=None, scaled=False, title=""):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != 2:
        raise DomainError("scatter plots need two objectives")
    curve = level_curve(u, level) if u is not None and level is not None else np.zeros((0, 2))
    if scaled:
        lo, hi = np.zeros(2), np.ones(2)
    else:
        everything = np.vstack([points, curve])
        lo, hi = everything.min(axis=0), everything.max(axis=0)
    span = np.where(hi - lo > 0.0, hi - lo, 1.0)
    inner = SVG_SIZE - 2 * SVG_MARGIN

    def pixel(p):
        x = SVG_MARGIN + (p[0] - lo[0]) / span[0] * inner
        y = SVG_SIZE - SVG_MARGIN - (p[1] - lo[1]) / span[1] * inner
        return f"{x:.3f},{y:.3f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f"<title>{title}</title>",
        f'<rect x="{SVG_MARGIN}" y="{SVG_MARGIN}" width="{inner}" height="{inner}" fill="none" stroke="#444"/>',
        f'<text x="{SVG_SIZE / 2}" y="{SVG_SIZE - 8}" text-anchor="middle" font-size="12">f1</text>',
        f'<text x="12" y="{SVG_SIZE / 2}" text-anchor="middle" font-size="12">f2</text>',
    ]
    if curve.shape[0]:
        inside = curve[np.all((curve >= lo - 1e-12) & (curve <= hi + 1e-12), axis=1)] if scaled else curve
        if inside.shape[0]:
            parts.append('<polyline fill="none" stroke="#1f77b4" stroke-dasharray="4 3" points="'
                         + " ".join(pixel(p) for p in inside) + '"/>')
    for p in points:
        x, y = pixel(p).split(",")
        parts.append(f'<circle cx="{x}" cy="{y}" r="4" fill="#d62728"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def certificate_csv(rows):
    """Rows of (candidate, mode, efficient, own worst case, min worst case, argmin)."""
    header = ["candidate", "mode", "efficient", "own_worst_case", "min_worst_case", "argmin"]
    return _csv(header, [[label, DominanceMode(mode).value, _flag(efficient), _num(own), _num(low), argmin]
                         for label, mode, efficient, own, low, argmin in rows])
