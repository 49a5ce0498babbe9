"""Curve preprocessing: centering, unit-length scaling, the square-root
velocity transform, and joint rotation + seed alignment.

Alignment searches all cyclic row shifts exhaustively and solves for the
optimal proper rotation per shift in closed form (SVD Procrustes on the
SRVF samples), returning the minimal-energy pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import Curve, polygon_length
from .errors import ValidationError


def center(curve: Curve) -> Curve:
    """Translate so the centroid of the sample points is the origin."""
    return curve.with_points(curve.points - curve.points.mean(axis=0))


def scale_to_unit_length(curve: Curve) -> Curve:
    """Scale so the enclosed polygon has total length 1."""
    return curve.with_points(curve.points / polygon_length(curve))


@dataclass(frozen=True)
class Srvf:
    """Piecewise-constant square-root velocity samples of a polygon.

    Under arc-length parameterization the velocity has unit speed, so each
    row of ``q`` is the unit tangent of one segment; ``weights`` are the
    segment lengths (the measure of each constant piece).
    """

    q: np.ndarray
    weights: np.ndarray

    @property
    def norm_sq(self) -> float:
        """Integral of |q|^2, which equals the total polygon length."""
        return float(self.weights @ np.sum(self.q ** 2, axis=1))

    def normalized(self) -> "Srvf":
        return Srvf(self.q / np.sqrt(self.norm_sq), self.weights)


def srvf(curve: Curve) -> Srvf:
    """Square-root velocity samples of the arc-length-parameterized polygon."""
    closed = curve.closed_points()
    diffs = np.diff(closed, axis=0)
    lengths = np.linalg.norm(diffs, axis=1)
    return Srvf(diffs / lengths[:, None], lengths)


@dataclass(frozen=True)
class AlignmentResult:
    """Optimal rotation and cyclic seed shift mapping a target onto a template."""

    rotation: np.ndarray
    shift: int
    residual: float


def _procrustes_rotation(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Proper rotation R minimizing sum_i ||b_i - R a_i||^2 over rows."""
    H = a.T @ b
    U, _, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    return Vt.T @ np.diag([1.0, d]) @ U.T


def rotation_seed_align(target: Curve, template: Curve) -> AlignmentResult:
    """Best (cyclic shift, rotation) mapping the target's SRVF onto the
    template's, by exhaustive shift search with closed-form rotation.

    Ties in energy break toward the smallest shift. Energy is the mean
    squared row residual between the SRVF sample matrices.
    """
    if target.n != template.n:
        raise ValidationError(
            f"alignment needs equal point counts ({target.n} vs {template.n}); "
            "resample the curves to a common size first")
    q_t = srvf(template).q
    q_s = srvf(target).q
    n = target.n
    best = None
    for shift in range(n):
        a = np.roll(q_s, -shift, axis=0)
        R = _procrustes_rotation(a, q_t)
        residual = float(np.mean(np.sum((q_t - a @ R.T) ** 2, axis=1)))
        if best is None or residual < best.residual - 1e-15:
            best = AlignmentResult(rotation=R, shift=shift, residual=residual)
    return best


def apply_alignment(curve: Curve, result: AlignmentResult) -> Curve:
    """Apply a cyclic seed shift then a rotation to the curve's points."""
    pts = np.roll(curve.points, -result.shift, axis=0)
    return curve.with_points(pts @ result.rotation.T)


def preprocess_collection(curves, template_index: int = 0):
    """Center, scale to unit length, and align every curve to the template.

    The template itself is only centered and scaled. Returns the processed
    curves plus one AlignmentResult per curve (identity for the template).
    """
    if not curves:
        raise ValidationError("need at least one curve")
    if not 0 <= template_index < len(curves):
        raise ValidationError("template index out of range")
    normalized = [scale_to_unit_length(center(c)) for c in curves]
    template = normalized[template_index]
    identity = AlignmentResult(rotation=np.eye(2), shift=0, residual=0.0)
    processed, results = [], []
    for i, curve in enumerate(normalized):
        if i == template_index:
            processed.append(curve)
            results.append(identity)
        else:
            res = rotation_seed_align(curve, template)
            processed.append(apply_alignment(curve, res))
            results.append(res)
    return processed, results
