"""Closed planar curves and arc-length parameterization.

A curve is an ordered set of planar sample points, always interpreted as a
closed polygon: the final segment joins the last point back to the first.
All arc-length computations here are with respect to that enclosed
piecewise-linear polygon.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CurveError, DegenerateCurveError

DEFAULT_OVERSAMPLE = 19


@dataclass(frozen=True)
class Curve:
    """Ordered planar sample points of a closed curve.

    Points are validated on construction: consecutive duplicates are merged
    (with a warning), an explicit closure row equal to the first point is
    dropped, and at least 3 distinct points are required.
    """

    points: np.ndarray
    name: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise CurveError(f"expected an (n, 2) point array, got shape {pts.shape}")
        if len(pts) > 1 and np.allclose(pts[-1], pts[0]):
            pts = pts[:-1]
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
        if not keep.all():
            warnings.warn("merged duplicated consecutive points", stacklevel=2)
            pts = pts[keep]
        if len(pts) < 3:
            raise CurveError(f"a closed curve needs at least 3 points, got {len(pts)}")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    def closed_points(self) -> np.ndarray:
        """Points with the first row appended as an explicit closure row."""
        return np.vstack([self.points, self.points[:1]])

    def segment_lengths(self) -> np.ndarray:
        """Length of each polygon segment, including the closing one."""
        closed = self.closed_points()
        return np.linalg.norm(np.diff(closed, axis=0), axis=1)

    def cumulative_arc(self) -> np.ndarray:
        """Arc-length parameter of each point plus the total length (n+1 values)."""
        return np.concatenate([[0.0], np.cumsum(self.segment_lengths())])

    def with_points(self, pts: np.ndarray) -> "Curve":
        return Curve(pts, name=self.name)


def polygon_length(curve: Curve) -> float:
    """Perimeter of the enclosed polygon through the sample points."""
    length = float(curve.segment_lengths().sum())
    if length <= 0.0:
        raise DegenerateCurveError("curve has zero total length")
    return length


def _oversampled_polygon(curve: Curve, n_oversample: int):
    """Dense points along each segment plus their arc-length parameters.

    Each of the n segments contributes its start point and ``n_oversample``
    interior points; the closure point is not repeated.
    """
    if n_oversample < 1:
        raise ValueError("n_oversample must be >= 1")
    pts = curve.points
    nxt = np.roll(pts, -1, axis=0)
    fracs = np.arange(n_oversample + 1) / (n_oversample + 1)  # 0, 1/(Nb+1), ...
    # shape (n, Nb+1, 2): start of each segment plus interior samples
    dense = pts[:, None, :] + fracs[None, :, None] * (nxt - pts)[:, None, :]
    seg_len = curve.segment_lengths()
    arc0 = curve.cumulative_arc()[:-1]
    arcs = arc0[:, None] + fracs[None, :] * seg_len[:, None]
    return dense.reshape(-1, 2), arcs.reshape(-1)


def xy_to_arc_param(curve: Curve, query, n_oversample: int = DEFAULT_OVERSAMPLE) -> float:
    """Arc-length parameter of the oversampled polygon point nearest to ``query``.

    Ties are broken toward the smallest arc parameter. The result lies in
    [0, total_length).
    """
    polygon_length(curve)  # degenerate check
    query = np.asarray(query, dtype=float)
    dense, arcs = _oversampled_polygon(curve, n_oversample)
    dist = np.linalg.norm(dense - query, axis=1)
    return float(arcs[np.argmin(dist)])


def arc_to_xy_param(curve: Curve, s: float) -> np.ndarray:
    """Point on the enclosed polygon at arc-length parameter ``s``.

    Values outside [0, total_length] are wrapped modulo the total length
    (the curve domain is circular).
    """
    length = polygon_length(curve)
    s = float(s) % length
    res = curve.cumulative_arc()
    previ = int(np.searchsorted(res, s, side="right") - 1)
    previ = min(previ, curve.n - 1)
    interval = res[previ + 1] - res[previ]
    rat = (s - res[previ]) / interval
    closed = curve.closed_points()
    return closed[previ] + rat * (closed[previ + 1] - closed[previ])


def resample_equally_spaced(curve: Curve, m: int) -> Curve:
    """Resample to ``m`` points equally spaced in arc length, keeping the seed."""
    if m < 3:
        raise CurveError("resampling needs m >= 3")
    length = polygon_length(curve)
    grid = np.arange(m) * length / m
    pts = np.array([arc_to_xy_param(curve, s) for s in grid])
    return Curve(pts, name=curve.name)


def _angles(n: int, scheme: str, cluster_center: float, cluster_width: float,
            cluster_frac: float) -> np.ndarray:
    if scheme == "equal":
        return 2.0 * np.pi * np.arange(n) / n
    if scheme == "clustered":
        n_in = max(int(round(cluster_frac * n)), 1)
        n_out = n - n_in
        lo = cluster_center - cluster_width / 2.0
        inside = lo + cluster_width * np.arange(n_in) / n_in
        outside = (lo + cluster_width
                   + (2.0 * np.pi - cluster_width) * np.arange(n_out) / max(n_out, 1))
        theta = np.sort(np.concatenate([inside, outside[:n_out]]) % (2.0 * np.pi))
        return theta
    raise ValueError(f"unknown sampling scheme {scheme!r}")


def generate_synthetic(shape: str, n: int, *, radius: float = 1.0,
                       axes: tuple = (1.0, 0.5), amplitude: float = 0.3,
                       petals: int = 5, scheme: str = "equal",
                       cluster_center: float = 0.0,
                       cluster_width: float = np.pi / 2,
                       cluster_frac: float = 0.8,
                       noise_sd: float = 0.0, rng_seed=None,
                       name: str = "") -> Curve:
    """Sample points from an analytic closed shape, optionally with noise.

    Shapes: ``circle`` (radius), ``ellipse`` (semi-axes), ``star`` with radial
    profile radius * (1 + amplitude*cos(petals*theta)). The ``clustered``
    scheme concentrates a fraction of the points in an angular window.
    Deterministic for a fixed ``rng_seed``.
    """
    if n < 3:
        raise CurveError("need n >= 3 sample points")
    if noise_sd < 0:
        raise ValueError("noise_sd must be nonnegative")
    theta = _angles(n, scheme, cluster_center, cluster_width, cluster_frac)
    if shape == "circle":
        pts = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    elif shape == "ellipse":
        a, b = axes
        pts = np.column_stack([a * np.cos(theta), b * np.sin(theta)])
    elif shape == "star":
        if not 0.0 <= amplitude < 1.0:
            raise ValueError("star amplitude must lie in [0, 1)")
        if petals < 1:
            raise ValueError("star needs at least one petal")
        r = radius * (1.0 + amplitude * np.cos(petals * theta))
        pts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    else:
        raise ValueError(f"unknown shape {shape!r}")
    if noise_sd > 0.0:
        rng = np.random.default_rng(rng_seed)
        pts = pts + rng.normal(scale=noise_sd, size=pts.shape)
    return Curve(pts, name=name or shape)
