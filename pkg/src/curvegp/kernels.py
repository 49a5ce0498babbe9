"""Periodic stationary covariance kernels on the circular curve domain.

The base construction warps the input distance r through sin(pi*r/tau),
making every kernel here tau-periodic. The RBF family uses the warped
squared distance directly in the exponent; the Matern families are applied
to the chordal distance d = 2*|sin(pi*r/tau)| of the circle embedding,
which preserves positive semi-definiteness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

FAMILIES = ("periodic_rbf", "periodic_matern32", "periodic_matern12")

DEFAULT_JITTER = 1e-3
DEFAULT_NOISE_BOX = (1e-6, 1e-4)


@dataclass(frozen=True)
class PeriodicHyperparameters:
    """Variance, length scale and period of a periodic kernel."""

    sigma2: float
    rho: float
    tau: float
    family: str = "periodic_matern32"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown kernel family {self.family!r}")
        for label, value in (("sigma2", self.sigma2), ("rho", self.rho), ("tau", self.tau)):
            if not np.isfinite(value) or value <= 0:
                raise ValidationError(f"hyperparameter {label} must be positive, got {value}")


@dataclass(frozen=True)
class NoiseSpec:
    """Observation-noise variance and the stabilizing jitter term.

    ``jitter_mode='constant'`` adds a constant kernel of the given variance
    to the input kernel; ``'nugget'`` puts it on the Gram diagonal instead.
    """

    noise_variance: float = 1e-5
    jitter: float = DEFAULT_JITTER
    jitter_mode: str = "constant"
    noise_box: tuple = DEFAULT_NOISE_BOX

    def __post_init__(self):
        if self.jitter_mode not in ("constant", "nugget"):
            raise ValidationError(f"unknown jitter mode {self.jitter_mode!r}")
        if self.noise_variance < 0 or self.jitter < 0:
            raise ValidationError("noise variance and jitter must be nonnegative")


def unit_correlation(family: str, r, rho: float, tau: float):
    """Kernel value at distance r for sigma2 = 1."""
    r = np.asarray(r, dtype=float)
    if family == "periodic_rbf":
        return np.exp(-np.sin(np.pi * r / tau) ** 2 / rho)
    d = 2.0 * np.abs(np.sin(np.pi * r / tau))
    if family == "periodic_matern32":
        a = np.sqrt(3.0) * d / rho
        return (1.0 + a) * np.exp(-a)
    if family == "periodic_matern12":
        return np.exp(-d / rho)
    raise ValidationError(f"unknown kernel family {family!r}")


def periodic_eval(hyp: PeriodicHyperparameters, s_i, s_j):
    """Covariance between arc parameters ``s_i`` and ``s_j``."""
    r = np.abs(np.asarray(s_i, dtype=float) - np.asarray(s_j, dtype=float))
    return hyp.sigma2 * unit_correlation(hyp.family, r, hyp.rho, hyp.tau)


def theorem1_bounds(hyp: PeriodicHyperparameters, length: float):
    """Lower/upper envelope of the periodic-RBF kernel for inputs within
    half the curve length.

    The lower bound may be negative (vacuous) for rough hyperparameters;
    it is returned as computed.
    """
    if length <= 0:
        raise ValidationError("curve length must be positive")
    sigma2, rho, tau = hyp.sigma2, hyp.rho, hyp.tau
    lower = sigma2 * (1.0 - np.pi ** 2 * length ** 2 / (4.0 * rho * tau ** 2))
    upper = sigma2 * (1.0 + (1.0 / 64.0) * (2.0 * np.pi ** 4 / (rho ** 2 * tau ** 4)
                                            + 4.0 * np.pi ** 4 / (3.0 * rho * tau ** 4))
                      * length ** 4)
    return float(lower), float(upper)


def gram(hyp: PeriodicHyperparameters, noise: NoiseSpec, inputs) -> np.ndarray:
    """Gram matrix over arc parameters, with the jitter term applied.

    Observation noise is *not* included; that is a model-level concern.
    """
    s = np.asarray(inputs, dtype=float).reshape(-1)
    if s.size == 0:
        raise ValidationError("gram needs at least one input")
    r = np.abs(s[:, None] - s[None, :])
    K = hyp.sigma2 * unit_correlation(hyp.family, r, hyp.rho, hyp.tau)
    if noise.jitter_mode == "constant":
        K = K + noise.jitter
    else:
        K = K + noise.jitter * np.eye(len(s))
    return K


@dataclass(frozen=True)
class ConstraintReport:
    """Outcome of hyperparameter constraint validation."""

    violations: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"passed": self.passed, "violations": list(self.violations)}


def validate_constraints(hyp: PeriodicHyperparameters, noise: NoiseSpec,
                         length_estimate: float, *, strict: bool = False) -> ConstraintReport:
    """Check the identifiability constraints tying rho, tau, the curve length
    and the noise-variance box. Violations are reported; ``strict`` raises."""
    violations = []
    if hyp.tau > length_estimate * (1 + 1e-12):
        violations.append(
            f"period tau={hyp.tau:g} exceeds curve length estimate {length_estimate:g}")
    if hyp.rho > hyp.tau / 2 * (1 + 1e-12):
        violations.append(
            f"length scale rho={hyp.rho:g} exceeds tau/2={hyp.tau / 2:g}")
    lo, hi = noise.noise_box
    if not (lo <= noise.noise_variance <= hi):
        violations.append(
            f"noise variance {noise.noise_variance:g} outside box ({lo:g}, {hi:g})")
    report = ConstraintReport(tuple(violations))
    if strict and not report.passed:
        raise ValidationError("; ".join(violations))
    return report
