"""Full evaluation pipeline: canonicalize, detect direction, observe
torsion, rectify and summarize arc geometry.

Per-section stages run on a thread pool with an ordered reduction, so the
output is identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .conicfit import GnSettings
from .geometry import CanonicalSection, canonicalize_section
from .helix import ArcReport, arc_parameters, segment_sections
from .linefit import DEFAULT_WINDOW, DirectionResult, detect_direction
from .torsion import TRACE_FITTER, TorsionResult, TorsionSeries, observe_torsion


@dataclass(frozen=True)
class SectionEvaluation:
    index: int
    azimuth_phi: float
    centroid_radius: float
    direction: DirectionResult
    torsion: TorsionResult
    theta_y_rectified: float


@dataclass(frozen=True)
class EvaluationResult:
    arc: ArcReport
    sections: tuple[SectionEvaluation, ...]
    canonical: tuple[CanonicalSection, ...]

    @property
    def all_converged(self) -> bool:
        return all(s.torsion.fit.converged for s in self.sections)


def _pool_map(fn, items, workers):
    if workers is not None and workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def evaluate_sections(
    section_points,
    fitter: str = TRACE_FITTER,
    window: int = DEFAULT_WINDOW,
    workers: int | None = None,
    gn_settings: GnSettings | None = None,
) -> EvaluationResult:
    """Run the evaluation stages over pre-segmented section point sets."""
    canonical = _pool_map(canonicalize_section, section_points, workers)
    directions = detect_direction(canonical, window=window)

    def _observe(pair):
        index, (section, direction) = pair
        return observe_torsion(
            section,
            direction.theta_x,
            fitter=fitter,
            section_index=index,
            gn_settings=gn_settings,
        )

    torsions = _pool_map(_observe, list(enumerate(zip(canonical, directions))), workers)
    series = TorsionSeries(tuple(torsions))
    rectified = series.rectified()

    sections = tuple(
        SectionEvaluation(
            index=i,
            azimuth_phi=canonical[i].azimuth_phi,
            centroid_radius=canonical[i].centroid_radius,
            direction=directions[i],
            torsion=torsions[i],
            theta_y_rectified=float(rectified[i]),
        )
        for i in range(len(canonical))
    )
    geometry = arc_parameters(list(canonical))
    arc = ArcReport(
        geometry=geometry,
        theta_x=np.array([s.direction.theta_x for s in sections]),
        theta_y_raw=np.array([s.torsion.theta_y for s in sections]),
        theta_y_rectified=rectified,
        line_rms=np.array([s.direction.rms_orthogonal_residual for s in sections]),
        algebraic_rms=np.array([s.torsion.fit.rms_algebraic_residual for s in sections]),
        geometric_rms=np.array([s.torsion.fit.rms_geometric_residual for s in sections]),
    )
    return EvaluationResult(arc=arc, sections=sections, canonical=tuple(canonical))


def evaluate_cloud(
    points,
    labels=None,
    expected_sections: int | None = None,
    fitter: str = TRACE_FITTER,
    window: int = DEFAULT_WINDOW,
    workers: int | None = None,
    gn_settings: GnSettings | None = None,
) -> EvaluationResult:
    """Segment a raw cloud and evaluate it."""
    groups = segment_sections(points, expected_sections=expected_sections, labels=labels)
    return evaluate_sections(
        groups, fitter=fitter, window=window, workers=workers, gn_settings=gn_settings
    )
