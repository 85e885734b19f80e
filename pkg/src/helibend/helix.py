"""Helical part model: synthetic surface generator, cross-section
segmentation and per-arc geometry.

The bent product is modeled as arcs rotated about the product axis Z_w.
``generate`` realizes that model exactly and doubles as the ground-truth
oracle for the rest of the package: every section is an ellipse placed at
its azimuth with a known surface-direction tilt and twist, optionally with
isotropic Gaussian measurement noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    EmptyCloud,
    InvalidSpec,
    NonMonotonicAzimuth,
    TooFewSections,
    UnderfilledSection,
)
from .geometry import (
    CanonicalSection,
    as_points,
    direction_rotation,
    rotation_z,
    twist_rotation,
)

_MIN_SECTION_POINTS = 6


@dataclass(frozen=True)
class HelixSpec:
    """Parameters of a synthetic elliptical helical part.

    ``twist_profile`` maps a section index to its injected surface twist in
    radians; None means an untwisted part. ``extent`` is the total central
    angle swept by the part about the product axis.
    """

    radius: float = 120.0
    pitch_per_turn: float = 60.0
    semi_major: float = 8.0
    semi_minor: float = 5.0
    helix_angle: float = 0.2
    twist_profile: Callable[[int], float] | None = None
    extent: float = math.pi
    sections: int = 40
    points_per_section: int = 48
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def validate(self):
        if not (self.semi_major >= self.semi_minor > 0.0):
            raise InvalidSpec("require semi_major >= semi_minor > 0", field="semi_minor")
        if self.radius <= self.semi_major:
            raise InvalidSpec(
                "helix radius must exceed the semi-major axis", field="radius"
            )
        if self.sections < 2:
            raise InvalidSpec("need at least 2 sections", field="sections")
        if self.points_per_section < _MIN_SECTION_POINTS:
            raise InvalidSpec(
                f"need at least {_MIN_SECTION_POINTS} points per section",
                field="points_per_section",
            )
        if not self.extent > 0.0:
            raise InvalidSpec("extent must be positive", field="extent")
        if not abs(self.helix_angle) < math.pi / 2:
            raise InvalidSpec("helix angle must lie in (-pi/2, pi/2)", field="helix_angle")
        if self.noise_sigma < 0.0:
            raise InvalidSpec("noise sigma cannot be negative", field="noise_sigma")

    def twist_at(self, index: int) -> float:
        return 0.0 if self.twist_profile is None else float(self.twist_profile(index))


@dataclass(frozen=True)
class GroundTruth:
    """Per-section design values emitted alongside a generated cloud."""

    phi: np.ndarray
    theta_x: np.ndarray
    theta_y: np.ndarray
    centroids: np.ndarray


@dataclass(frozen=True)
class SyntheticPart:
    points: np.ndarray
    labels: np.ndarray
    truth: GroundTruth


@dataclass(frozen=True)
class ArcGeometry:
    """Radius, central angle and arc lengths recovered from section poses.

    ``arc_length`` uses the planar arc convention s = R * dphi; the helical
    length corrected for pitch is reported alongside when the pitch can be
    estimated from the sections' axial drift.
    """

    radius: float
    central_angle: float
    arc_length: float
    helical_arc_length: float | None
    pitch_per_radian: float | None


@dataclass(frozen=True)
class ArcReport:
    """Arc geometry plus the per-section angle series and residuals."""

    geometry: ArcGeometry
    theta_x: np.ndarray
    theta_y_raw: np.ndarray
    theta_y_rectified: np.ndarray
    line_rms: np.ndarray
    algebraic_rms: np.ndarray
    geometric_rms: np.ndarray


def generate(spec: HelixSpec) -> SyntheticPart:
    """Sample an elliptical helical surface with known ground truth.

    Each section is built at the evaluation pose (twist about the local
    normal first, then the surface-direction tilt), rotated to its azimuth
    and translated onto the helix. Deterministic for a fixed seed.
    """
    spec.validate()
    rng = np.random.default_rng(spec.rng_seed)
    n = spec.points_per_section
    t = 2.0 * math.pi * np.arange(n) / n
    base = np.column_stack(
        (spec.semi_minor * np.sin(t), np.zeros(n), spec.semi_major * np.cos(t))
    )
    pitch_per_radian = spec.pitch_per_turn / (2.0 * math.pi)

    points = np.empty((spec.sections * n, 3))
    labels = np.repeat(np.arange(spec.sections), n)
    phi = np.empty(spec.sections)
    theta_y = np.empty(spec.sections)
    centroids = np.empty((spec.sections, 3))

    for i in range(spec.sections):
        phi_i = spec.extent * i / (spec.sections - 1)
        twist_i = spec.twist_at(i)
        center = np.array(
            (
                spec.radius * math.cos(phi_i),
                spec.radius * math.sin(phi_i),
                pitch_per_radian * phi_i,
            )
        )
        rot = rotation_z(phi_i) @ direction_rotation(spec.helix_angle) @ twist_rotation(twist_i)
        section = base @ rot.T + center
        if spec.noise_sigma > 0.0:
            section = section + rng.normal(0.0, spec.noise_sigma, section.shape)
        points[i * n : (i + 1) * n] = section
        phi[i] = phi_i
        theta_y[i] = twist_i
        centroids[i] = center

    truth = GroundTruth(
        phi=phi,
        theta_x=np.full(spec.sections, spec.helix_angle),
        theta_y=theta_y,
        centroids=centroids,
    )
    return SyntheticPart(points=points, labels=labels, truth=truth)


def segment_sections(cloud, expected_sections: int | None = None, labels=None):
    """Split a measured cloud into per-section point arrays.

    With labels, points are grouped by label and ordered by label value.
    Without labels the points are binned by azimuth about the product axis:
    the cloud is rebased past the largest circular gap (so parts spanning
    the -pi/pi seam work) and split at the ``expected_sections - 1`` widest
    remaining gaps, giving contiguous azimuth bins ordered along the part.
    """
    pts = np.asarray(cloud, dtype=float)
    if pts.size == 0:
        raise EmptyCloud("no points in input cloud")
    pts = as_points(pts, 3)

    if labels is not None:
        labels = np.asarray(labels)
        if len(labels) != len(pts):
            raise ValueError("labels length does not match point count")
        groups = [pts[labels == value] for value in np.unique(labels)]
    else:
        if expected_sections is None or expected_sections < 1:
            raise ValueError("expected_sections must be >= 1 for unlabeled input")
        if expected_sections == 1:
            groups = [pts]
        else:
            azimuth = np.arctan2(pts[:, 1], pts[:, 0])
            order = np.argsort(azimuth, kind="stable")
            sorted_az = azimuth[order]
            gaps = np.diff(sorted_az)
            wrap_gap = sorted_az[0] + 2.0 * math.pi - sorted_az[-1]
            start = 0 if wrap_gap >= (gaps.max() if gaps.size else 0.0) else int(np.argmax(gaps)) + 1
            rebased = np.mod(azimuth - sorted_az[start], 2.0 * math.pi)
            order = np.argsort(rebased, kind="stable")
            sorted_rebased = rebased[order]
            internal = np.diff(sorted_rebased)
            if expected_sections - 1 > internal.size:
                raise UnderfilledSection("fewer points than requested sections")
            cut_positions = np.sort(np.argsort(internal)[-(expected_sections - 1):])
            bounds = [0, *(int(c) + 1 for c in cut_positions), len(pts)]
            groups = [pts[order[bounds[k] : bounds[k + 1]]] for k in range(expected_sections)]

    for k, group in enumerate(groups):
        if len(group) < _MIN_SECTION_POINTS:
            raise UnderfilledSection(
                f"section {k} holds {len(group)} points; need {_MIN_SECTION_POINTS}"
            )
    return groups


def arc_parameters(sections: list[CanonicalSection]) -> ArcGeometry:
    """Arc geometry from the canonical poses of consecutive sections.

    The radius is the mean centroid radius, the central angle is the
    unwrapped azimuth sweep (monotone along the part by assumption), and
    the planar arc length is radius times central angle. When the sections
    drift along the product axis the pitch is estimated by a linear fit of
    axial position against azimuth and the helical arc length
    sqrt(R^2 + p^2) * dphi is reported as well.
    """
    if len(sections) < 2:
        raise TooFewSections("need at least 2 sections for arc geometry")
    radius = float(np.mean([s.centroid_radius for s in sections]))
    phi = [s.azimuth_phi for s in sections]
    diffs = [math.remainder(b - a, 2.0 * math.pi) for a, b in zip(phi, phi[1:])]
    has_positive = any(d > 1e-15 for d in diffs)
    has_negative = any(d < -1e-15 for d in diffs)
    if has_positive and has_negative:
        raise NonMonotonicAzimuth("section azimuths reverse direction along the part")
    central_angle = abs(math.fsum(diffs))
    arc_length = radius * central_angle

    pitch = None
    helical = None
    if central_angle > 1e-9:
        unwrapped = np.concatenate(([phi[0]], phi[0] + np.cumsum(diffs)))
        z = np.array([section_centroid(s)[2] for s in sections])
        du = unwrapped - unwrapped.mean()
        pitch = float(du @ (z - z.mean()) / (du @ du))
        helical = math.sqrt(radius * radius + pitch * pitch) * central_angle
    return ArcGeometry(
        radius=radius,
        central_angle=central_angle,
        arc_length=arc_length,
        helical_arc_length=helical,
        pitch_per_radian=pitch,
    )


def section_centroid(section: CanonicalSection) -> np.ndarray:
    """Product-frame centroid recovered from the canonicalizing transform."""
    t = section.to_canonical
    return -(t.rotation.T @ t.translation)
