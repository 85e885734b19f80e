"""Report document, file formats and plot emission.

Formats (all UTF-8, millimetres, radians in machine fields with degree
twins for reading):

* cloud CSV: header ``x,y,z`` or ``x,y,z,section``; ``#`` starts a comment;
* ground-truth sidecar CSV: ``section,phi,theta_x_true,theta_y_true,cx,cy,cz``;
* evaluation report: one JSON document, schema versioned, stable key order
  so identical evaluations are byte-identical and serialize/parse/serialize
  round-trips exactly;
* plots: standalone SVG scatter files, with the plotted numbers always
  emitted to CSV as well.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

import numpy as np

from ._version import __version__
from .errors import InputFormatError
from .pipeline import EvaluationResult

SCHEMA_VERSION = 1


def _fmt(value: float) -> str:
    return repr(float(value))


# ---------------------------------------------------------------------------
# cloud + ground truth CSV
# ---------------------------------------------------------------------------

def write_cloud_csv(path, points, labels=None) -> None:
    points = np.asarray(points, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if labels is None:
            fh.write("x,y,z\n")
            for p in points:
                fh.write(f"{_fmt(p[0])},{_fmt(p[1])},{_fmt(p[2])}\n")
        else:
            fh.write("x,y,z,section\n")
            for p, lab in zip(points, labels):
                fh.write(f"{_fmt(p[0])},{_fmt(p[1])},{_fmt(p[2])},{int(lab)}\n")


def read_cloud_csv(path):
    """Parse a cloud CSV into (points, labels or None).

    Raises InputFormatError naming the offending line on any malformed row.
    """
    points: list[list[float]] = []
    labels: list[int] = []
    has_labels = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f.strip() for f in line.split(",")]
            if has_labels is None:
                if fields == ["x", "y", "z"]:
                    has_labels = False
                elif fields == ["x", "y", "z", "section"]:
                    has_labels = True
                else:
                    raise InputFormatError(
                        f"line {lineno}: expected header 'x,y,z[,section]', got {line!r}",
                        line_number=lineno,
                    )
                continue
            expected = 4 if has_labels else 3
            if len(fields) != expected:
                raise InputFormatError(
                    f"line {lineno}: expected {expected} fields, got {len(fields)}",
                    line_number=lineno,
                )
            try:
                xyz = [float(fields[0]), float(fields[1]), float(fields[2])]
                if has_labels:
                    labels.append(int(fields[3]))
            except ValueError as exc:
                raise InputFormatError(
                    f"line {lineno}: {exc}", line_number=lineno
                ) from exc
            if not all(math.isfinite(v) for v in xyz):
                raise InputFormatError(
                    f"line {lineno}: non-finite coordinate", line_number=lineno
                )
            points.append(xyz)
    if has_labels is None:
        raise InputFormatError("no header line found (empty input?)", line_number=None)
    pts = np.array(points, dtype=float).reshape(-1, 3)
    return pts, (np.array(labels, dtype=int) if has_labels else None)


def write_truth_csv(path, truth) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("section,phi,theta_x_true,theta_y_true,cx,cy,cz\n")
        for i in range(len(truth.phi)):
            c = truth.centroids[i]
            fh.write(
                f"{i},{_fmt(truth.phi[i])},{_fmt(truth.theta_x[i])},"
                f"{_fmt(truth.theta_y[i])},{_fmt(c[0])},{_fmt(c[1])},{_fmt(c[2])}\n"
            )


def read_truth_csv(path):
    """Parse a ground-truth sidecar into arrays (phi, theta_x, theta_y, centroids)."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("section,"):
                continue
            fields = line.split(",")
            if len(fields) != 7:
                raise InputFormatError(
                    f"line {lineno}: expected 7 fields", line_number=lineno
                )
            rows.append([float(f) for f in fields])
    data = np.array(rows, dtype=float)
    return data[:, 1], data[:, 2], data[:, 3], data[:, 4:7]


# ---------------------------------------------------------------------------
# evaluation report document
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvaluationReport:
    """Machine-readable evaluation outcome.

    Kept as a plain dict tree in document order; building it from an
    EvaluationResult and re-parsing it from text both produce documents that
    serialize byte-identically.
    """

    document: dict

    @classmethod
    def from_result(
        cls, result: EvaluationResult, fitter: str, input_digest: str
    ) -> "EvaluationReport":
        geo = result.arc.geometry
        arc = {
            "radius_mm": geo.radius,
            "central_angle_rad": geo.central_angle,
            "central_angle_deg": math.degrees(geo.central_angle),
            "arc_length_mm": geo.arc_length,
            "helical_arc_length_mm": geo.helical_arc_length,
            "pitch_mm_per_rad": geo.pitch_per_radian,
            "sections": len(result.sections),
        }
        sections = []
        for s in result.sections:
            sections.append(
                {
                    "index": s.index,
                    "azimuth_rad": s.azimuth_phi,
                    "azimuth_deg": math.degrees(s.azimuth_phi),
                    "centroid_radius_mm": s.centroid_radius,
                    "theta_x_rad": s.direction.theta_x,
                    "theta_x_deg": math.degrees(s.direction.theta_x),
                    "theta_y_raw_rad": s.torsion.theta_y,
                    "theta_y_raw_deg": math.degrees(s.torsion.theta_y),
                    "theta_y_rect_rad": s.theta_y_rectified,
                    "theta_y_rect_deg": math.degrees(s.theta_y_rectified),
                    "circle_degenerate": s.torsion.circle_degenerate,
                    "line_rms_mm": s.direction.rms_orthogonal_residual,
                    "algebraic_rms": s.torsion.fit.rms_algebraic_residual,
                    "geometric_rms_mm": s.torsion.fit.rms_geometric_residual,
                    "fit_iterations": s.torsion.fit.iterations,
                    "fit_converged": s.torsion.fit.converged,
                }
            )
        document = {
            "schema_version": SCHEMA_VERSION,
            "tool": "helibend",
            "tool_version": __version__,
            "fitter": fitter,
            "input_digest": input_digest,
            "arcs": [arc],
            "sections": sections,
        }
        return cls(document)

    def to_text(self) -> str:
        return json.dumps(self.document, indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "EvaluationReport":
        return cls(json.loads(text))

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())


_SECTION_COLUMNS = (
    "index",
    "azimuth_rad",
    "azimuth_deg",
    "centroid_radius_mm",
    "theta_x_rad",
    "theta_x_deg",
    "theta_y_raw_rad",
    "theta_y_raw_deg",
    "theta_y_rect_rad",
    "theta_y_rect_deg",
    "circle_degenerate",
    "line_rms_mm",
    "algebraic_rms",
    "geometric_rms_mm",
    "fit_iterations",
    "fit_converged",
)


def sections_csv_text(report: EvaluationReport) -> str:
    buf = io.StringIO()
    buf.write(",".join(_SECTION_COLUMNS) + "\n")
    for row in report.document["sections"]:
        cells = []
        for col in _SECTION_COLUMNS:
            value = row[col]
            if isinstance(value, bool):
                cells.append("true" if value else "false")
            elif isinstance(value, int):
                cells.append(str(value))
            else:
                cells.append(_fmt(value))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def arc_csv_text(report: EvaluationReport) -> str:
    columns = (
        "radius_mm",
        "central_angle_rad",
        "central_angle_deg",
        "arc_length_mm",
        "helical_arc_length_mm",
        "pitch_mm_per_rad",
        "sections",
    )
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for arc in report.document["arcs"]:
        cells = []
        for col in columns:
            value = arc[col]
            if value is None:
                cells.append("")
            elif isinstance(value, int):
                cells.append(str(value))
            else:
                cells.append(_fmt(value))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# SVG scatter plots
# ---------------------------------------------------------------------------

def svg_scatter(
    x,
    y,
    title: str,
    xlabel: str,
    ylabel: str,
    xlim: tuple[float, float],
    ylim: tuple[float, float],
    diagonal: bool = True,
    size: int = 640,
) -> str:
    """Minimal standalone scatter plot, deterministic byte-for-byte."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    margin = 70.0
    span = size - 2 * margin

    def sx(v):
        return margin + (v - xlim[0]) / (xlim[1] - xlim[0]) * span

    def sy(v):
        return size - margin - (v - ylim[0]) / (ylim[1] - ylim[0]) * span

    out = io.StringIO()
    out.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
    )
    out.write(f'<rect width="{size}" height="{size}" fill="white"/>\n')
    out.write(
        f'<text x="{size / 2:.1f}" y="30" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>\n'
    )
    out.write(
        f'<rect x="{margin:.1f}" y="{margin:.1f}" width="{span:.1f}" height="{span:.1f}" '
        'fill="none" stroke="black" stroke-width="1"/>\n'
    )
    n_ticks = 5
    for k in range(n_ticks):
        xv = xlim[0] + (xlim[1] - xlim[0]) * k / (n_ticks - 1)
        yv = ylim[0] + (ylim[1] - ylim[0]) * k / (n_ticks - 1)
        out.write(
            f'<line x1="{sx(xv):.2f}" y1="{size - margin:.1f}" x2="{sx(xv):.2f}" '
            f'y2="{size - margin + 6:.1f}" stroke="black"/>\n'
        )
        out.write(
            f'<text x="{sx(xv):.2f}" y="{size - margin + 22:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{xv:g}</text>\n'
        )
        out.write(
            f'<line x1="{margin - 6:.1f}" y1="{sy(yv):.2f}" x2="{margin:.1f}" '
            f'y2="{sy(yv):.2f}" stroke="black"/>\n'
        )
        out.write(
            f'<text x="{margin - 10:.1f}" y="{sy(yv) + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{yv:g}</text>\n'
        )
    out.write(
        f'<text x="{size / 2:.1f}" y="{size - 15:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{xlabel}</text>\n'
    )
    out.write(
        f'<text x="20" y="{size / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14" transform="rotate(-90 20 {size / 2:.1f})">{ylabel}</text>\n'
    )
    if diagonal:
        lo = max(xlim[0], ylim[0])
        hi = min(xlim[1], ylim[1])
        out.write(
            f'<line x1="{sx(lo):.2f}" y1="{sy(lo):.2f}" x2="{sx(hi):.2f}" y2="{sy(hi):.2f}" '
            'stroke="#999999" stroke-width="1" stroke-dasharray="4 3"/>\n'
        )
    for xi, yi in zip(x, y):
        if xlim[0] <= xi <= xlim[1] and ylim[0] <= yi <= ylim[1]:
            out.write(f'<circle cx="{sx(xi):.2f}" cy="{sy(yi):.2f}" r="2" fill="#1f4e8c"/>\n')
    out.write("</svg>\n")
    return out.getvalue()
