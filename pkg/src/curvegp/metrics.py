"""Evaluation metrics for fitted and registered curves.

- imspe: integrated mean squared prediction error on a shared arc grid.
- iuea: integrated area of the pointwise predictive-uncertainty ellipses.
- wasserstein2: exact optimal-assignment squared-distance cost between
  equal-size point clouds.
- elastic_register / esd: elastic shape distance via alternating rotation +
  seed search and dynamic-programming re-parameterization of SRVFs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .curves import Curve, arc_to_xy_param, polygon_length, resample_equally_spaced
from .errors import NumericalError, ValidationError
from .preprocess import Srvf, _procrustes_rotation, center, scale_to_unit_length, srvf

MAX_ASSIGNMENT_SIZE = 512

# Allowed local (target-steps, source-steps) moves of the DP path; slopes
# stay within [1/3, 3] to prevent pinching.
DP_STEPS = ((1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2))


def _as_points(predicted) -> np.ndarray:
    means = getattr(predicted, "means", predicted)
    means = np.asarray(means, dtype=float)
    if means.ndim != 2 or means.shape[1] != 2:
        raise ValidationError(f"expected an (m, 2) point array, got {means.shape}")
    return means


def imspe(predicted, truth: Curve, m: int | None = None) -> float:
    """Mean over an equally spaced arc grid of the squared coordinate errors.

    ``predicted`` is a PredictedCurve or an (m, 2) array of means evaluated
    at grid fractions i/m of its domain; the truth curve is evaluated at the
    same fractions of its own polygon length.
    """
    pts = _as_points(predicted)
    m = len(pts) if m is None else m
    if len(pts) != m:
        raise ValidationError(f"predicted grid has {len(pts)} points, expected {m}")
    length = polygon_length(truth)
    truth_pts = np.array([arc_to_xy_param(truth, i * length / m) for i in range(m)])
    return float(np.sum((pts - truth_pts) ** 2) / m)


def iuea(predicted, scale: float = 1.0) -> float:
    """Average area of the 1-standard-deviation predictive ellipses.

    Each grid point contributes pi * sd1 * sqrt(sd2^2 - cross^2/sd1^2); a
    fully degenerate covariance contributes zero area. ``scale`` inflates
    the ellipse radii (e.g. a chi-square quantile factor).
    """
    covs = np.asarray(predicted.covariances, dtype=float)
    total = 0.0
    for cov in covs:
        cross = cov[0, 1]
        if cov[0, 0] == 0.0 and abs(cross) > 1e-12:
            raise NumericalError(
                "degenerate first coordinate with nonzero cross-covariance")
        # sd1 * sqrt(sd2^2 - cross^2/sd1^2) == sqrt(det); the determinant
        # form is exact for fully degenerate covariances
        det = cov[0, 0] * cov[1, 1] - cross ** 2
        total += np.sqrt(max(det, 0.0))
    return float(np.pi * scale ** 2 * total / len(covs))


def wasserstein2(a, b) -> float:
    """Minimum over bijections of the mean squared Euclidean distance.

    Solved exactly by optimal assignment; clouds must have equal size
    (at most 512 points).
    """
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    if len(a) != len(b):
        raise ValidationError(f"point clouds differ in size ({len(a)} vs {len(b)})")
    if len(a) > MAX_ASSIGNMENT_SIZE:
        raise ValidationError(
            f"exact assignment limited to {MAX_ASSIGNMENT_SIZE} points, got {len(a)}")
    cost = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].mean())


@dataclass(frozen=True)
class Registration:
    """Rotation, seed shift and re-parameterization aligning source to target.

    ``gamma`` holds the warp on a uniform grid as fractions of the domain:
    gamma[0] = 0, gamma[-1] = 1, strictly increasing.
    """

    rotation: np.ndarray
    gamma: np.ndarray
    shift: int
    energy: float
    energies: tuple
    offset: float = 0.0  # refined seed start as a fraction of the domain


def _q_at_offset(curve: Curve, n: int, offset: float) -> np.ndarray:
    """Normalized SRVF of the curve resampled from a fractional seed offset."""
    pts = np.array([arc_to_xy_param(curve, (offset + i / n) % 1.0)
                    for i in range(n)])
    return srvf(Curve(pts)).normalized().q


def _warp(q: np.ndarray, gamma_idx: np.ndarray) -> np.ndarray:
    """(q o gamma) * sqrt(gamma') on the uniform grid (gamma in index units)."""
    n = len(q)
    out = np.empty_like(q)
    for t in range(n):
        a, b = gamma_idx[t], gamma_idx[t + 1]
        slope = b - a
        idx = min(int((a + b) / 2.0), n - 1)
        out[t] = np.sqrt(slope) * q[idx]
    return out


def _energy(q1: np.ndarray, q2w: np.ndarray) -> float:
    return float(np.sum((q1 - q2w) ** 2) / len(q1))


def _dp_reparameterize(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Minimal-energy monotone warp gamma (index units, endpoints matched).

    Dynamic program over an (n+1) x (n+1) node grid with the local step set
    DP_STEPS; transition cost integrates ||q1 - (q2 o gamma) sqrt(gamma')||^2
    over the covered target columns.
    """
    n = len(q1)
    D = np.full((n + 1, n + 1), np.inf)
    D[0, 0] = 0.0
    parent = np.full((n + 1, n + 1), -1, dtype=int)
    for i in range(1, n + 1):
        for step_id, (di, dj) in enumerate(DP_STEPS):
            if di > i:
                continue
            slope = dj / di
            sq = np.sqrt(slope)
            j_prev = np.arange(0, n - dj + 1)
            cost = np.zeros(len(j_prev))
            for o in range(di):
                k_o = int(dj * (o + 0.5) / di)
                idx2 = np.minimum(j_prev + k_o, n - 1)
                diff = q1[i - di + o][None, :] - sq * q2[idx2]
                cost += np.sum(diff ** 2, axis=1)
            cand = D[i - di, j_prev] + cost / n
            j_new = j_prev + dj
            better = cand < D[i, j_new]
            D[i, j_new[better]] = cand[better]
            parent[i, j_new[better]] = step_id
    if not np.isfinite(D[n, n]):
        raise NumericalError("re-parameterization DP found no feasible path")
    path_i, path_j = [n], [n]
    i, j = n, n
    while i > 0:
        di, dj = DP_STEPS[parent[i, j]]
        i, j = i - di, j - dj
        path_i.append(i)
        path_j.append(j)
    path_i.reverse()
    path_j.reverse()
    return np.interp(np.arange(n + 1), path_i, path_j)


def elastic_register(source: Curve, target: Curve, grid_size: int = 100,
                     max_rounds: int = 20, tol: float = 1e-8) -> Registration:
    """Register the source curve onto the target under the elastic metric.

    Both curves are centered, scaled to unit length and resampled to
    ``grid_size`` points. Alternates a closed-form rotation step (plus an
    exhaustive seed search in the first round) with a DP re-parameterization;
    the energy trace is non-increasing (a worsening update is reverted).
    """
    import warnings
    if grid_size < 8:
        raise ValidationError("registration grid needs at least 8 points")
    target_n = scale_to_unit_length(center(target))
    source_n = scale_to_unit_length(center(source))
    c1 = resample_equally_spaced(target_n, grid_size)
    q1 = srvf(c1).normalized().q
    q2_full = srvf(resample_equally_spaced(source_n, grid_size)).normalized().q
    n = grid_size

    # Round 1: exhaustive integer seed + rotation on the unwarped SRVFs
    # (rolling the equally resampled SRVF shifts the seed by whole cells).
    best_shift, best_R, best_e = 0, np.eye(2), np.inf
    for shift in range(n):
        a = np.roll(q2_full, -shift, axis=0)
        R = _procrustes_rotation(a, q1)
        e = _energy(q1, a @ R.T)
        if e < best_e - 1e-15:
            best_shift, best_R, best_e = shift, R, e
    # Fractional seed refinement: the best seed usually falls between grid
    # cells; resample the source at sub-cell start offsets around the winner.
    q2 = np.roll(q2_full, -best_shift, axis=0)
    R, best_offset = best_R, best_shift / n
    half = 0.5 / n
    for _ in range(3):
        sweep_center = best_offset
        for frac in np.linspace(-half, half, 11):
            offset = (sweep_center + frac) % 1.0
            if offset == best_offset:
                continue
            cand = _q_at_offset(source_n, n, offset)
            R_cand = _procrustes_rotation(cand, q1)
            e = _energy(q1, cand @ R_cand.T)
            if e < best_e - 1e-15:
                best_offset, q2, R, best_e = offset, cand, R_cand, e
        half /= 5.0
    best_shift = int(round(best_offset * n)) % n

    gamma = np.arange(n + 1, dtype=float)
    energy = best_e
    energies = [energy]

    for _ in range(max_rounds):
        gamma_new = _dp_reparameterize(q1, q2 @ R.T)
        warped = _warp(q2, gamma_new)
        R_new = _procrustes_rotation(warped, q1)
        e_new = _energy(q1, warped @ R_new.T)
        if e_new > energy + 1e-12:
            break  # keep the previous (better) state
        gamma, R = gamma_new, R_new
        improved = energy - e_new
        energy = e_new
        energies.append(energy)
        if improved < tol:
            break
    else:
        warnings.warn("elastic registration hit the round limit before converging")

    return Registration(rotation=R, gamma=gamma / n, shift=best_shift,
                        energy=energy, energies=tuple(energies),
                        offset=best_offset)


def esd(c1: Curve, c2: Curve, grid_size: int = 100) -> float:
    """Elastic shape distance: arccos of the registered SRVF inner product.

    Invariant (to discretization tolerance) under translation, scaling,
    rotation and seed shift of either curve; value in [0, pi].
    """
    reg = elastic_register(c2, c1, grid_size=grid_size)
    n = grid_size
    c1p = resample_equally_spaced(scale_to_unit_length(center(c1)), n)
    q1 = srvf(c1p).normalized().q
    q2 = _q_at_offset(scale_to_unit_length(center(c2)), n, reg.offset)
    warped = _warp(q2, reg.gamma * n) @ reg.rotation.T
    norm = np.sqrt(np.sum(warped ** 2) / n)
    if norm > 0:
        warped = warped / norm
    inner = float(np.sum(q1 * warped) / n)
    return float(np.arccos(np.clip(inner, -1.0, 1.0)))
