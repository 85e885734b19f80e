"""Ellipse fitting: two constrained linear least-squares methods and a
nonlinear geometric-distance method.

All three minimize a residual of the implicit conic F(x) = x^T A x + b^T x + c:

* ``fit_bookstein`` minimizes sum F(x_i)^2 subject to lambda1^2 + lambda2^2 = 1
  (eigenvalues of A), solved as a partitioned QR/SVD problem;
* ``fit_trace`` minimizes the same objective subject to Trace(A) = 1, which
  eliminates one unknown and reduces to ordinary linear least squares;
* ``fit_gauss_newton`` minimizes the sum of squared orthogonal distances to
  the ellipse boundary over (center, semi-axes, orientation), with Levenberg
  damping so the geometric RMS never increases across accepted steps.

Input points are centered and scaled to unit RMS radius before the design
matrices are formed, purely for conditioning. Both constraints depend only
on A, which is unchanged by translation and scales uniformly under isotropic
scaling, so the normalized problem is the original one up to a constant
factor and the returned conic is the exact constrained minimizer in the
original coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CollapsedAxis,
    DegenerateConfiguration,
    NotAnEllipse,
    TooFewPoints,
)
from .geometry import (
    BOOKSTEIN,
    TRACE,
    UNCONSTRAINED,
    Conic2D,
    EllipseParams,
    as_points,
    conic_to_params,
    fold_half_open,
    normalize_conic,
    params_to_conic,
)

_RANK_TOL = 1e-10
_AXIS_FLOOR = 1e-9


@dataclass(frozen=True)
class GnSettings:
    """Iteration controls for the Gauss-Newton geometric fit."""

    max_iterations: int = 100
    step_tolerance: float = 1e-12
    residual_tolerance: float = 1e-12
    damping_floor: float = 1e-12

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if min(self.step_tolerance, self.residual_tolerance, self.damping_floor) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class FitResult:
    conic: Conic2D
    params: EllipseParams
    rms_algebraic_residual: float
    rms_geometric_residual: float
    iterations: int = 0
    converged: bool = True


def algebraic_residuals(points, conic: Conic2D) -> np.ndarray:
    """F(x_i) for each point; zero when the point lies on the conic."""
    return conic.evaluate(points)


def geometric_residuals(points, params: EllipseParams) -> np.ndarray:
    """Signed orthogonal distance to the ellipse boundary for each point."""
    pts = as_points(points, 2)
    local = _to_local(pts, params)
    _, dist = _foot_points(local, params.semi_major, params.semi_minor)
    return dist


def _rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(values))))


def _normalize_points(pts: np.ndarray):
    mean = pts.mean(axis=0)
    centered = pts - mean
    scale = math.sqrt(float(np.mean(np.sum(centered * centered, axis=1))))
    if scale <= 0.0:
        raise DegenerateConfiguration("all points coincide")
    return centered / scale, mean, scale


def _pull_back(conic: Conic2D, mean: np.ndarray, scale: float) -> Conic2D:
    """Rewrite a conic fitted in (x - mean)/scale coordinates in the originals."""
    a = conic.matrix / scale**2
    b = conic.linear / scale - 2.0 * (a @ mean)
    c = conic.c - float(conic.linear @ mean) / scale + float(mean @ a @ mean)
    return Conic2D(a[0, 0], a[0, 1], a[1, 1], b[0], b[1], c, UNCONSTRAINED)


def _finish_linear(conic: Conic2D, pts: np.ndarray, constraint: str) -> FitResult:
    if conic.det_a <= 0.0:
        raise NotAnEllipse("best-fit conic is not an ellipse", conic=conic)
    conic = normalize_conic(conic, constraint)
    params = conic_to_params(conic)
    return FitResult(
        conic=conic,
        params=params,
        rms_algebraic_residual=_rms(algebraic_residuals(pts, conic)),
        rms_geometric_residual=_rms(geometric_residuals(pts, params)),
        iterations=0,
        converged=True,
    )


def fit_bookstein(points) -> FitResult:
    """Least-squares conic fit under the eigenvalue-norm constraint.

    The constraint lambda1^2 + lambda2^2 = 1 equals a11^2 + 2 a12^2 + a22^2,
    so with the quadratic block written in the scaled basis
    (u^2, sqrt(2) u v, v^2) it becomes a unit-norm condition. Eliminating the
    linear coefficients via QR leaves a smallest-singular-vector problem on
    the 3x3 trailing block.
    """
    pts = as_points(points, 2)
    if len(pts) < 6:
        raise TooFewPoints(f"need at least 6 points, got {len(pts)}")
    norm, mean, scale = _normalize_points(pts)
    u, v = norm[:, 0], norm[:, 1]
    design = np.column_stack(
        (u, v, np.ones_like(u), u * u, math.sqrt(2.0) * u * v, v * v)
    )
    sv = np.linalg.svd(design, compute_uv=False)
    if np.sum(sv > _RANK_TOL * sv[0]) < 5:
        raise DegenerateConfiguration("points do not determine a conic")
    r = np.linalg.qr(design, mode="r")
    r11, r12, r22 = r[:3, :3], r[:3, 3:], r[3:, 3:]
    _, _, vt = np.linalg.svd(r22)
    p = vt[-1]
    q = np.linalg.lstsq(r11, -r12 @ p, rcond=None)[0]
    scaled = Conic2D(p[0], p[1] / math.sqrt(2.0), p[2], q[0], q[1], q[2])
    return _finish_linear(_pull_back(scaled, mean, scale), pts, BOOKSTEIN)


def fit_trace(points) -> FitResult:
    """Least-squares conic fit under Trace(A) = 1.

    Substituting a11 = 1 - a22 turns the constrained problem into an
    ordinary linear system in (a22, a12, b1, b2, c).
    """
    pts = as_points(points, 2)
    if len(pts) < 6:
        raise TooFewPoints(f"need at least 6 points, got {len(pts)}")
    norm, mean, scale = _normalize_points(pts)
    u, v = norm[:, 0], norm[:, 1]
    design = np.column_stack((v * v - u * u, 2.0 * u * v, u, v, np.ones_like(u)))
    rhs = -u * u
    sol, _, rank, _ = np.linalg.lstsq(design, rhs, rcond=None)
    if rank < 5:
        raise DegenerateConfiguration("points do not determine a conic")
    a22, a12, b1, b2, c = sol
    scaled = Conic2D(1.0 - a22, a12, a22, b1, b2, c)
    return _finish_linear(_pull_back(scaled, mean, scale), pts, TRACE)


def moment_init(points) -> EllipseParams:
    """Crude ellipse estimate from first and second moments.

    Exact for noise-free points sampled uniformly in parameter angle; used
    as the un-warm-started initializer for the Gauss-Newton comparison.
    """
    pts = as_points(points, 2)
    if len(pts) < 3:
        raise TooFewPoints("moment init needs at least 3 points")
    mean = pts.mean(axis=0)
    centered = pts - mean
    cov = centered.T @ centered / len(pts)
    evals, evecs = np.linalg.eigh(cov)
    if evals[0] <= 0.0:
        raise DegenerateConfiguration("points are collinear")
    semi_major = math.sqrt(2.0 * evals[1])
    semi_minor = math.sqrt(2.0 * evals[0])
    orientation = fold_half_open(math.atan2(evecs[1, 1], evecs[0, 1]))
    return EllipseParams(mean, semi_major, semi_minor, orientation)


def fit_gauss_newton(
    points,
    init: EllipseParams | None = None,
    settings: GnSettings | None = None,
) -> FitResult:
    """Geometric (orthogonal-distance) ellipse fit.

    Minimizes the sum of squared point-to-boundary distances over
    (center, semi-axes, orientation) with Levenberg damping; only steps that
    do not increase the geometric RMS are accepted. ``init`` defaults to the
    trace-constraint solution.
    """
    pts = as_points(points, 2)
    if len(pts) < 5:
        raise TooFewPoints(f"need at least 5 points, got {len(pts)}")
    if init is None:
        init = fit_trace(pts).params
    if settings is None:
        settings = GnSettings()

    theta = np.array(
        [init.center[0], init.center[1], init.semi_major, init.semi_minor, init.orientation]
    )
    residual, jac = _gn_residual_jacobian(pts, theta)
    rms = _rms(residual)
    mu = settings.damping_floor
    converged = False
    iterations = 0

    for iterations in range(1, settings.max_iterations + 1):
        g = jac.T @ residual
        h = jac.T @ jac
        accepted = False
        while mu < 1e18:
            try:
                delta = np.linalg.solve(h + mu * np.eye(5), -g)
            except np.linalg.LinAlgError:
                mu *= 10.0
                continue
            trial = theta + delta
            trial[2] = abs(trial[2])
            trial[3] = abs(trial[3])
            if min(trial[2], trial[3]) < _AXIS_FLOOR:
                raise CollapsedAxis("a semi-axis collapsed during iteration")
            trial_residual, trial_jac = _gn_residual_jacobian(pts, trial)
            trial_rms = _rms(trial_residual)
            if trial_rms <= rms:
                accepted = True
                break
            mu *= 10.0
        if not accepted:
            break
        step_small = float(np.linalg.norm(delta)) <= settings.step_tolerance * (
            1.0 + float(np.linalg.norm(theta))
        )
        residual_small = (rms - trial_rms) <= settings.residual_tolerance
        theta, residual, jac, rms = trial, trial_residual, trial_jac, trial_rms
        mu = max(settings.damping_floor, mu * 0.1)
        if step_small or residual_small:
            converged = True
            break

    cx, cy, sa, sb, phi = theta
    if sb > sa:
        sa, sb = sb, sa
        phi += math.pi / 2.0
    phi = fold_half_open(phi)
    if sa / sb - 1.0 <= 1e-6:
        params = EllipseParams(np.array([cx, cy]), sa, sb, 0.0, orientation_defined=False)
    else:
        params = EllipseParams(np.array([cx, cy]), sa, sb, phi)
    conic = params_to_conic(params, UNCONSTRAINED)
    return FitResult(
        conic=conic,
        params=params,
        rms_algebraic_residual=_rms(algebraic_residuals(pts, conic)),
        rms_geometric_residual=rms,
        iterations=iterations,
        converged=converged,
    )


def point_to_ellipse_distance(point, params: EllipseParams) -> float:
    """Signed orthogonal distance from a point to the ellipse boundary.

    Negative inside, positive outside. Solved by safeguarded Newton on the
    parametric foot-point angle with a bisection fallback, so it converges
    for every input.
    """
    pts = np.asarray(point, dtype=float).reshape(1, 2)
    local = _to_local(pts, params)
    _, dist = _foot_points(local, params.semi_major, params.semi_minor)
    return float(dist[0])


def ellipse_foot_point(point, params: EllipseParams) -> np.ndarray:
    """Closest boundary point to ``point``."""
    pts = np.asarray(point, dtype=float).reshape(1, 2)
    local = _to_local(pts, params)
    foot, _ = _foot_points(local, params.semi_major, params.semi_minor)
    ca, sa = math.cos(params.orientation), math.sin(params.orientation)
    rot = np.array([[ca, -sa], [sa, ca]])
    return foot[0] @ rot.T + params.center


def _to_local(pts: np.ndarray, params: EllipseParams) -> np.ndarray:
    """Rotate/translate points into the ellipse-aligned frame."""
    ca, sa = math.cos(params.orientation), math.sin(params.orientation)
    rot = np.array([[ca, sa], [-sa, ca]])
    return (pts - params.center) @ rot.T


def _foot_points(local: np.ndarray, a: float, b: float):
    """Vectorized foot points of ``local`` points on an axis-aligned ellipse.

    Returns (foot points in the local frame, signed distances). The
    foot-point condition in the first quadrant is
    g(t) = (a^2 - b^2) sin t cos t - a P sin t + b Q cos t = 0
    with g(0) = bQ >= 0 and g(pi/2) = -aP <= 0, so the root is bracketed;
    Newton steps that leave the bracket fall back to bisection. Points on a
    symmetry axis are resolved in closed form (the bracket endpoints can be
    spurious roots there).
    """
    sign_p = np.where(local[:, 0] >= 0.0, 1.0, -1.0)
    sign_q = np.where(local[:, 1] >= 0.0, 1.0, -1.0)
    p = np.abs(local[:, 0])
    q = np.abs(local[:, 1])
    t = np.arctan2(a * q, b * p)

    on_u_axis = q == 0.0
    on_v_axis = p == 0.0
    general = ~(on_u_axis | on_v_axis)

    if np.any(on_u_axis):
        # Interior root exists when the point is inside the evolute cusp.
        pu = p[on_u_axis]
        if a > b:
            cusp = (a * a - b * b) / a
            ct = np.where(pu < cusp, a * pu / (a * a - b * b), 1.0)
            t[on_u_axis] = np.arccos(np.clip(ct, -1.0, 1.0))
        else:
            t[on_u_axis] = 0.0
    if np.any(on_v_axis):
        qv = q[on_v_axis]
        if b > a:
            cusp = (b * b - a * a) / b
            st = np.where(qv < cusp, b * qv / (b * b - a * a), 1.0)
            t[on_v_axis] = np.arcsin(np.clip(st, -1.0, 1.0))
        else:
            t[on_v_axis] = math.pi / 2.0
    center = on_u_axis & on_v_axis
    if np.any(center):
        t[center] = 0.0 if a <= b else math.pi / 2.0

    if np.any(general):
        tg = t[general]
        pg, qg = p[general], q[general]
        lo = np.zeros_like(tg)
        hi = np.full_like(tg, math.pi / 2.0)
        diff = a * a - b * b
        for _ in range(90):
            st, ct = np.sin(tg), np.cos(tg)
            g = diff * st * ct - a * pg * st + b * qg * ct
            lo = np.where(g > 0.0, tg, lo)
            hi = np.where(g < 0.0, tg, hi)
            dg = diff * (ct * ct - st * st) - a * pg * ct - b * qg * st
            with np.errstate(divide="ignore", invalid="ignore"):
                newton = np.where(g == 0.0, tg, tg - g / dg)
            bad = ~np.isfinite(newton) | (newton < lo) | (newton > hi)
            t_next = np.where(bad, 0.5 * (lo + hi), newton)
            # One ulp at t ~ 1 is 2.2e-16, so a tighter bound never settles.
            if np.max(np.abs(t_next - tg)) < 1e-15:
                tg = t_next
                break
            tg = t_next
        t[general] = tg

    foot = np.column_stack((sign_p * a * np.cos(t), sign_q * b * np.sin(t)))
    delta = local - foot
    dist = np.hypot(delta[:, 0], delta[:, 1])
    inside = (local[:, 0] / a) ** 2 + (local[:, 1] / b) ** 2 < 1.0
    return foot, np.where(inside, -dist, dist)


def _gn_residual_jacobian(pts: np.ndarray, theta: np.ndarray):
    """Signed distances and their Jacobian w.r.t. (cx, cy, a, b, phi).

    By the envelope theorem the foot-point angle's dependence on the
    parameters drops out, leaving d(dist)/d(param) = -n . dq/d(param) with
    n the outward unit normal at the foot point q.
    """
    cx, cy, a, b, phi = theta
    ca, sa = math.cos(phi), math.sin(phi)
    rot = np.array([[ca, sa], [-sa, ca]])
    local = (pts - np.array([cx, cy])) @ rot.T
    foot, dist = _foot_points(local, a, b)

    ct = foot[:, 0] / a
    st = foot[:, 1] / b
    normal = np.column_stack((ct / a, st / b))
    normal /= np.hypot(normal[:, 0], normal[:, 1])[:, None]
    nlx, nly = normal[:, 0], normal[:, 1]

    jac = np.empty((len(pts), 5))
    # d q / d center is the identity, rotated back to the world frame.
    jac[:, 0] = -(nlx * ca - nly * sa)
    jac[:, 1] = -(nlx * sa + nly * ca)
    jac[:, 2] = -nlx * ct
    jac[:, 3] = -nly * st
    jac[:, 4] = nlx * b * st - nly * a * ct
    return dist, jac
