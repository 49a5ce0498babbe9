"""Coregionalization matrices and the separable multi-level kernel.

Discrete levels (coordinate, curve, group) are coupled through low-rank-
plus-diagonal PSD matrices B = W W^T + diag(kappa). The full kernel is the
product of the periodic input kernel with one factor per active level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .kernels import NoiseSpec, PeriodicHyperparameters, periodic_eval, unit_correlation


@dataclass(frozen=True)
class CoregMatrix:
    """Low-rank-plus-diagonal PSD matrix W W^T + diag(kappa)."""

    w: np.ndarray
    kappa: np.ndarray

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.w, dtype=float))
        kappa = np.asarray(self.kappa, dtype=float).reshape(-1)
        if w.shape[0] != kappa.shape[0]:
            raise ValidationError(
                f"W has {w.shape[0]} rows but kappa has {kappa.shape[0]} entries")
        if np.any(kappa < 0):
            raise ValidationError("kappa entries must be nonnegative")
        w = w.copy(); w.setflags(write=False)
        kappa = kappa.copy(); kappa.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "kappa", kappa)

    @property
    def size(self) -> int:
        return self.w.shape[0]

    @property
    def rank(self) -> int:
        return self.w.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        return self.w @ self.w.T + np.diag(self.kappa)

    @classmethod
    def identity(cls, m: int) -> "CoregMatrix":
        return cls(np.zeros((m, 1)), np.ones(m))

    def to_dict(self) -> dict:
        return {"w": self.w.tolist(), "kappa": self.kappa.tolist()}


def build_coreg(w, kappa) -> CoregMatrix:
    """Validate and materialize a coregionalization matrix."""
    return CoregMatrix(np.asarray(w, dtype=float), np.asarray(kappa, dtype=float))


@dataclass(frozen=True)
class MultiLevelKernel:
    """Separable kernel: periodic input kernel times per-level coreg factors.

    ``curve`` and ``group`` levels are optional; an absent level contributes
    a factor of 1.
    """

    input_kernel: PeriodicHyperparameters
    coord: CoregMatrix
    curve: CoregMatrix | None = None
    group: CoregMatrix | None = None

    def __post_init__(self):
        if self.coord.size != 2:
            raise ValidationError("coordinate-level matrix must be 2x2")


def _level_factor(coreg: CoregMatrix | None, a, b):
    if coreg is None:
        return 1.0
    B = coreg.matrix
    a = np.asarray(a, dtype=int)
    b = np.asarray(b, dtype=int)
    if np.any(a < 0) or np.any(a >= coreg.size) or np.any(b < 0) or np.any(b >= coreg.size):
        raise ValidationError(f"level index out of range for size {coreg.size}")
    return B[a, b]


def multilevel_eval(kernel: MultiLevelKernel, a, b):
    """Kernel element between design rows a = (s, d, j, g) and b = (s', d', j', g').

    Curve/group indices are ignored for levels the kernel does not carry.
    """
    s_a, d_a, j_a, g_a = a
    s_b, d_b, j_b, g_b = b
    value = periodic_eval(kernel.input_kernel, s_a, s_b)
    value = value * _level_factor(kernel.coord, d_a, d_b)
    if kernel.curve is not None:
        value = value * _level_factor(kernel.curve, j_a, j_b)
    if kernel.group is not None:
        value = value * _level_factor(kernel.group, g_a, g_b)
    return float(value)


def multilevel_gram(kernel: MultiLevelKernel, noise: NoiseSpec,
                    s_a, d_a, j_a=None, g_a=None,
                    s_b=None, d_b=None, j_b=None, g_b=None) -> np.ndarray:
    """Cross-Gram between two row designs (or one design with itself).

    The jitter constant from ``noise`` is added at the input-kernel level, so
    it is modulated by the same coreg factors and vanishes across independent
    levels. Observation noise is not included.
    """
    hyp = kernel.input_kernel
    s_a = np.asarray(s_a, dtype=float)
    symmetric = s_b is None
    if symmetric:
        s_b, d_b, j_b, g_b = s_a, d_a, j_a, g_a
    s_b = np.asarray(s_b, dtype=float)
    r = np.abs(s_a[:, None] - s_b[None, :])
    base = hyp.sigma2 * unit_correlation(hyp.family, r, hyp.rho, hyp.tau)
    if noise.jitter_mode == "constant":
        base = base + noise.jitter
    elif symmetric:
        base = base + noise.jitter * np.eye(len(s_a))
    d_a = np.asarray(d_a, dtype=int); d_b = np.asarray(d_b, dtype=int)
    B = _level_factor(kernel.coord, d_a[:, None], d_b[None, :])
    if kernel.curve is not None:
        j_a = np.asarray(j_a, dtype=int); j_b = np.asarray(j_b, dtype=int)
        B = B * _level_factor(kernel.curve, j_a[:, None], j_b[None, :])
    if kernel.group is not None:
        g_a = np.asarray(g_a, dtype=int); g_b = np.asarray(g_b, dtype=int)
        B = B * _level_factor(kernel.group, g_a[:, None], g_b[None, :])
    return base * B
