"""Surface torsion observation from fitted cross-section ellipses.

At the evaluation pose, with the surface-direction tilt removed, the
cross-section ellipse lies in the ZX plane and its major-axis angle from
the +Z axis is the torsion reading. The reading is a mod-pi/2-ambiguous
branch of the true twist (ellipse orientation wraps, and fits near a
circular section can swap major and minor axes), so series of adjacent
sections pass through a discrete rectification filter that picks, per
sample, the branch nearest the previous rectified value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .conicfit import FitResult, GnSettings, fit_bookstein, fit_gauss_newton, fit_trace
from .errors import AmbiguousBranch, LengthMismatch
from .geometry import CanonicalSection, direction_rotation, fold_half_open

TRACE_FITTER = "trace"
BOOKSTEIN_FITTER = "bookstein"
GAUSS_NEWTON_FITTER = "gauss-newton"
FITTERS = (TRACE_FITTER, BOOKSTEIN_FITTER, GAUSS_NEWTON_FITTER)

_HALF_PI = math.pi / 2.0
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class TorsionResult:
    theta_y: float
    fitter: str
    circle_degenerate: bool
    section_index: int
    fit: FitResult = field(compare=False, repr=False, default=None)


@dataclass(frozen=True)
class TorsionSeries:
    """Torsion readings of consecutive sections along the part."""

    results: tuple[TorsionResult, ...]
    unwrap_jump_threshold: float = math.pi / 4.0

    def __post_init__(self):
        object.__setattr__(self, "results", tuple(self.results))
        indices = [r.section_index for r in self.results]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("section indices must be strictly increasing")

    def raw_values(self) -> np.ndarray:
        return np.array([r.theta_y for r in self.results])

    def rectified(self) -> np.ndarray:
        values = rectify_torsion(self.raw_values())
        jumps = np.abs(np.diff(values))
        if jumps.size and float(jumps.max()) > self.unwrap_jump_threshold:
            warnings.warn(
                f"rectified torsion jumps by {float(jumps.max()):.3g} rad between "
                "adjacent sections; twist rate exceeds the filter's envelope",
                UserWarning,
                stacklevel=2,
            )
        return values


def fit_section_ellipse(
    points2d, fitter: str = TRACE_FITTER, gn_settings: GnSettings | None = None
) -> FitResult:
    """Dispatch to one of the three fitting methods by name."""
    if fitter == TRACE_FITTER:
        return fit_trace(points2d)
    if fitter == BOOKSTEIN_FITTER:
        return fit_bookstein(points2d)
    if fitter == GAUSS_NEWTON_FITTER:
        return fit_gauss_newton(points2d, settings=gn_settings)
    raise ValueError(f"unknown fitter {fitter!r}; expected one of {FITTERS}")


def observe_torsion(
    section: CanonicalSection,
    theta_x: float,
    fitter: str = TRACE_FITTER,
    section_index: int = 0,
    gn_settings: GnSettings | None = None,
) -> TorsionResult:
    """Torsion reading of one canonical section.

    Removes the surface-direction tilt, projects the points onto the ZX
    plane as (u, v) = (z, x) and fits an ellipse; the returned angle is the
    fitted major-axis angle from the +Z axis. Circle-degenerate fits report
    zero with the flag set instead of an arbitrary orientation.
    """
    untilt = direction_rotation(theta_x).T
    flat = section.points_canonical @ untilt.T
    pts2 = flat[:, [2, 0]]
    fit = fit_section_ellipse(pts2, fitter, gn_settings)
    degenerate = not fit.params.orientation_defined
    theta_y = 0.0 if degenerate else fit.params.orientation
    return TorsionResult(
        theta_y=theta_y,
        fitter=fitter,
        circle_degenerate=degenerate,
        section_index=section_index,
        fit=fit,
    )


def _nearest_branch(raw: float, anchor: float):
    """Branch of ``raw`` (offsets 0, +-pi/2) nearest ``anchor``.

    Ties are resolved toward zero; returns (value, ambiguous flag).
    """
    candidates = (raw - _HALF_PI, raw, raw + _HALF_PI)
    dists = [abs(c - anchor) for c in candidates]
    best = min(dists)
    tied = [c for c, d in zip(candidates, dists) if d - best <= _TIE_TOL]
    if len(tied) == 1:
        return tied[0], False
    toward_zero = min(abs(c) for c in tied)
    winners = [c for c in tied if abs(c) - toward_zero <= _TIE_TOL]
    # Prefer the uncorrected reading among symmetric leftovers.
    value = raw if any(abs(w - raw) <= _TIE_TOL for w in winners) else winners[0]
    return value, True


def rectify_torsion(raw_series) -> np.ndarray:
    """Continuity filter for a torsion series.

    Each raw reading in (-pi/2, pi/2] is shifted by k*(pi/2), k in
    {-1, 0, 1}, to the branch nearest the previous rectified value; the
    first sample anchors to the branch nearest zero. Corrects isolated
    major/minor axis swaps in otherwise slowly twisting series and is
    idempotent on already-continuous input.
    """
    values = np.asarray(raw_series, dtype=float)
    if values.ndim != 1:
        raise ValueError("expected a 1-D series of angles")
    if values.size and (values.min() <= -_HALF_PI - 1e-9 or values.max() > _HALF_PI + 1e-9):
        raise ValueError("raw torsion values must lie in (-pi/2, pi/2]")
    out = np.empty_like(values)
    anchor = 0.0
    for i, raw in enumerate(values):
        value, ambiguous = _nearest_branch(float(raw), anchor)
        if ambiguous:
            warnings.warn(
                f"torsion branch ambiguous at sample {i}; resolved toward zero",
                AmbiguousBranch,
                stacklevel=2,
            )
        out[i] = value
        anchor = value
    return out


def rectify_against(raw: float, reference: float) -> float:
    """Branch of ``raw`` (any integer multiple of pi/2) nearest ``reference``.

    Used when ground truth or a design value is available for each sample
    independently, e.g. in fitter-comparison sweeps where adjacent samples
    are unrelated measurements.
    """
    k = round((reference - raw) / _HALF_PI)
    return raw + k * _HALF_PI


def torsion_deviation(series: TorsionSeries, expected) -> np.ndarray:
    """Per-section deviation of rectified torsion from its design value.

    Element-wise difference folded into (-pi/2, pi/2].
    """
    expected = np.asarray(expected, dtype=float)
    rectified = series.rectified()
    if expected.shape != rectified.shape:
        raise LengthMismatch(
            f"series has {rectified.size} sections, expected values {expected.size}"
        )
    return np.array([fold_half_open(d) for d in rectified - expected])
