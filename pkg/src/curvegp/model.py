"""Exact GP regression for closed curves: design assembly, marginal
likelihood with analytic gradients, constrained multi-start fitting, and
prediction with full per-point covariance."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize

from .coreg import CoregMatrix, MultiLevelKernel
from .curves import Curve
from .errors import NumericalError, ValidationError
from .kernels import (DEFAULT_JITTER, DEFAULT_NOISE_BOX, NoiseSpec,
                      PeriodicHyperparameters, unit_correlation,
                      validate_constraints)
from . import curves as _curves

NUGGET_LADDER = (0.0, 1e-8, 1e-6, 1e-4)

LOG2PI = np.log(2.0 * np.pi)


@dataclass
class TrainingDesign:
    """Flattened training rows: two scalar observations per sample point."""

    s: np.ndarray
    d: np.ndarray
    j: np.ndarray
    g: np.ndarray
    y: np.ndarray
    lengths: np.ndarray
    group_labels: tuple = ((),)

    @property
    def n_rows(self) -> int:
        return len(self.y)

    @property
    def n_curves(self) -> int:
        return int(self.j.max()) + 1

    @property
    def n_groups(self) -> int:
        return int(self.g.max()) + 1

    def group_of_curve(self, curve_index: int) -> int:
        return int(self.g[self.j == curve_index][0])

    @classmethod
    def from_curves(cls, curve_list, labels=None) -> "TrainingDesign":
        """Assemble a design from curves (arc parameters from their polygons).

        ``labels`` are optional per-curve group labels; they are encoded as
        contiguous integers in order of first appearance, so any injective
        relabeling yields an identical design.
        """
        if not curve_list:
            raise ValidationError("need at least one curve")
        if labels is None:
            labels = [0] * len(curve_list)
        if len(labels) != len(curve_list):
            raise ValidationError("one group label per curve required")
        encoding: dict = {}
        rows_s, rows_d, rows_j, rows_g, rows_y = [], [], [], [], []
        lengths = []
        for j, (curve, label) in enumerate(zip(curve_list, labels)):
            g = encoding.setdefault(label, len(encoding))
            arcs = curve.cumulative_arc()
            lengths.append(arcs[-1])
            for i in range(curve.n):
                for d in (0, 1):
                    rows_s.append(arcs[i])
                    rows_d.append(d)
                    rows_j.append(j)
                    rows_g.append(g)
                    rows_y.append(curve.points[i, d])
        return cls(s=np.array(rows_s), d=np.array(rows_d, dtype=int),
                   j=np.array(rows_j, dtype=int), g=np.array(rows_g, dtype=int),
                   y=np.array(rows_y), lengths=np.array(lengths),
                   group_labels=tuple(encoding))


@dataclass
class ModelConfig:
    """Structural choices for the multi-level kernel."""

    family: str = "periodic_matern32"
    tau: object = "auto"  # "auto" fixes tau to the mean polygon length
    jitter: float = DEFAULT_JITTER
    jitter_mode: str = "constant"
    fit_coord: bool = True
    coord_rank: int = 1
    fit_curve: bool = True
    curve_rank: int = 1
    fit_group: bool = False
    group_rank: int = 1
    noise_box: tuple = DEFAULT_NOISE_BOX
    sigma2_box: tuple = (1e-8, 10.0)
    rho_frac_box: tuple = (1e-3, 0.5)  # as a fraction of tau
    w_bound: float = 10.0
    kappa_box: tuple = (1e-8, 10.0)


@dataclass
class OptimizerConfig:
    restarts: int = 8
    seed: int = 0
    method: str = "lbfgs"  # or "anneal"
    maxiter: int = 200


@dataclass
class FittedModel:
    """Kernel with estimated hyperparameters plus cached training solve."""

    kernel: MultiLevelKernel
    noise: NoiseSpec
    design: TrainingDesign
    chol: np.ndarray
    alpha: np.ndarray
    log_marginal_likelihood: float
    diagnostics: dict = field(default_factory=dict)

    def predict(self, s, d, j=None, g=None):
        return predict(self, s, d, j, g)

    def predict_curve(self, curve_index: int = 0, m: int = 100):
        return predict_curve(self, curve_index, m)


@dataclass
class PredictedCurve:
    """Dense predictive summary of one curve: grid of arc parameters,
     2-vector means and 2x2 cross-coordinate covariances."""

    grid: np.ndarray
    means: np.ndarray
    covariances: np.ndarray

    @property
    def sd1(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.covariances[:, 0, 0], 0.0))

    @property
    def sd2(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.covariances[:, 1, 1], 0.0))

    @property
    def cross(self) -> np.ndarray:
        return self.covariances[:, 0, 1]


def _chol_with_ladder(K: np.ndarray):
    """Cholesky with escalating diagonal nugget; returns (L, nugget used)."""
    for nugget in NUGGET_LADDER:
        try:
            M = K if nugget == 0.0 else K + nugget * np.eye(len(K))
            c, low = cho_factor(M, lower=True)
            return np.tril(c), nugget
        except np.linalg.LinAlgError:
            continue
    raise NumericalError(
        f"covariance factorization failed after nugget ladder {NUGGET_LADDER}")


class MarginalLikelihoodObjective:
    """Negative log marginal likelihood and its analytic gradient in a packed
    parameter vector (log sigma2, log rho, log noise, then W / log kappa per
    free coregionalization level). The period tau is held fixed."""

    def __init__(self, design: TrainingDesign, config: ModelConfig):
        self.design = design
        self.config = config
        self.tau = (float(np.mean(design.lengths)) if config.tau == "auto"
                    else float(config.tau))
        self.r = np.abs(design.s[:, None] - design.s[None, :])
        self.eye = np.eye(design.n_rows)
        # level bookkeeping: (name, index array, size, rank, free)
        self.levels = [("coord", design.d, 2, config.coord_rank, config.fit_coord)]
        if design.n_curves > 1:
            self.levels.append(("curve", design.j, design.n_curves,
                                config.curve_rank, config.fit_curve))
        if design.n_groups > 1:
            self.levels.append(("group", design.g, design.n_groups,
                                config.group_rank, config.fit_group))
        lo, hi = config.noise_box
        rho_lo, rho_hi = (f * self.tau for f in config.rho_frac_box)
        self.bounds = [tuple(np.log(config.sigma2_box)),
                       (np.log(rho_lo), np.log(rho_hi)),
                       (np.log(lo), np.log(hi))]
        self.slices = {}
        pos = 3
        for name, _, size, rank, free in self.levels:
            if not free:
                continue
            self.slices[name] = (slice(pos, pos + size * rank),
                                 slice(pos + size * rank, pos + size * rank + size))
            self.bounds += [(-config.w_bound, config.w_bound)] * (size * rank)
            self.bounds += [tuple(np.log(config.kappa_box))] * size
            pos += size * rank + size
        self.n_params = pos

    # -- packing -----------------------------------------------------------

    def default_start(self) -> np.ndarray:
        theta = np.zeros(self.n_params)
        yvar = max(float(np.var(self.design.y)), 1e-6)
        theta[0] = np.log(np.clip(yvar, *self.config.sigma2_box))
        theta[1] = np.log(self.tau / 4.0)
        lo, hi = self.config.noise_box
        theta[2] = 0.5 * (np.log(lo) + np.log(hi))
        for name, _, size, rank, free in self.levels:
            if not free:
                continue
            w_sl, k_sl = self.slices[name]
            theta[w_sl] = 0.1
            theta[k_sl] = np.log(1.0)
        return np.clip(theta, [b[0] for b in self.bounds], [b[1] for b in self.bounds])

    def random_start(self, rng: np.random.Generator) -> np.ndarray:
        theta = self.default_start()
        lo0, hi0 = self.bounds[0]
        theta[0] = np.clip(theta[0] + rng.uniform(-2.0, 2.0), lo0, hi0)
        theta[1] = rng.uniform(*self.bounds[1])
        theta[2] = rng.uniform(*self.bounds[2])
        for name, _, size, rank, free in self.levels:
            if not free:
                continue
            w_sl, k_sl = self.slices[name]
            theta[w_sl] = rng.normal(scale=0.3, size=size * rank)
            theta[k_sl] = np.log(rng.uniform(0.1, 2.0, size=size))
        return theta

    def unpack(self, theta):
        hyp = PeriodicHyperparameters(sigma2=float(np.exp(theta[0])),
                                      rho=float(np.exp(theta[1])),
                                      tau=self.tau, family=self.config.family)
        noise = NoiseSpec(noise_variance=float(np.exp(theta[2])),
                          jitter=self.config.jitter,
                          jitter_mode=self.config.jitter_mode,
                          noise_box=self.config.noise_box)
        coregs = {}
        for name, _, size, rank, free in self.levels:
            if free:
                w_sl, k_sl = self.slices[name]
                coregs[name] = CoregMatrix(theta[w_sl].reshape(size, rank),
                                           np.exp(theta[k_sl]))
            else:
                coregs[name] = CoregMatrix.identity(size)
        kernel = MultiLevelKernel(input_kernel=hyp, coord=coregs["coord"],
                                  curve=coregs.get("curve"),
                                  group=coregs.get("group"))
        return kernel, noise

    # -- likelihood --------------------------------------------------------

    def _corr_and_dlogrho(self, rho: float):
        family = self.config.family
        if family == "periodic_rbf":
            u = np.sin(np.pi * self.r / self.tau) ** 2
            corr = np.exp(-u / rho)
            return corr, corr * u / rho
        dist = 2.0 * np.abs(np.sin(np.pi * self.r / self.tau))
        if family == "periodic_matern32":
            a = np.sqrt(3.0) * dist / rho
            e = np.exp(-a)
            return (1.0 + a) * e, a ** 2 * e
        a = dist / rho
        e = np.exp(-a)
        return e, a * e

    def gram_and_grads(self, theta, with_grads: bool = True):
        sigma2, rho, noise_var = np.exp(theta[:3])
        corr, dcorr = self._corr_and_dlogrho(rho)
        base = sigma2 * corr
        if self.config.jitter_mode == "constant":
            base_j = base + self.config.jitter
        else:
            base_j = base + self.config.jitter * self.eye
        factors = {}
        for name, idx, size, rank, free in self.levels:
            if free:
                w_sl, k_sl = self.slices[name]
                B = (theta[w_sl].reshape(size, rank) @ theta[w_sl].reshape(size, rank).T
                     + np.diag(np.exp(theta[k_sl])))
            else:
                B = np.eye(size)
            factors[name] = B[idx[:, None], idx[None, :]]
        Bfull = np.ones_like(base)
        for name, *_ in self.levels:
            Bfull = Bfull * factors[name]
        K = base_j * Bfull + noise_var * self.eye
        if not with_grads:
            return K, None
        grads = [base * Bfull,                 # d / d log sigma2
                 sigma2 * dcorr * Bfull,       # d / d log rho
                 noise_var * self.eye]         # d / d log noise
        for name, idx, size, rank, free in self.levels:
            if not free:
                continue
            others = np.ones_like(base)
            for other, *_ in self.levels:
                if other != name:
                    others = others * factors[other]
            pre = base_j * others
            w_sl, k_sl = self.slices[name]
            W = theta[w_sl].reshape(size, rank)
            kappa = np.exp(theta[k_sl])
            for a in range(size):
                mask_a = (idx == a)
                for k in range(rank):
                    dB = np.zeros((size, size))
                    dB[a, :] += W[:, k]
                    dB[:, a] += W[:, k]
                    grads.append(pre * dB[idx[:, None], idx[None, :]])
            for a in range(size):
                dB = np.zeros((size, size))
                dB[a, a] = kappa[a]
                grads.append(pre * dB[idx[:, None], idx[None, :]])
        return K, grads

    def value_and_grad(self, theta):
        K, grads = self.gram_and_grads(theta)
        L, _ = _chol_with_ladder(K)
        y = self.design.y
        alpha = cho_solve((L, True), y)
        nll = (0.5 * float(y @ alpha) + float(np.sum(np.log(np.diag(L))))
               + 0.5 * len(y) * LOG2PI)
        Kinv = cho_solve((L, True), self.eye)
        A = np.outer(alpha, alpha) - Kinv
        grad = np.array([-0.5 * np.sum(A * dK) for dK in grads])
        return nll, grad

    def value(self, theta):
        K, _ = self.gram_and_grads(theta, with_grads=False)
        L, _ = _chol_with_ladder(K)
        y = self.design.y
        alpha = cho_solve((L, True), y)
        return (0.5 * float(y @ alpha) + float(np.sum(np.log(np.diag(L))))
                + 0.5 * len(y) * LOG2PI)


def make_objective(design: TrainingDesign, config: ModelConfig | None = None):
    return MarginalLikelihoodObjective(design, config or ModelConfig())


def log_marginal_likelihood(design: TrainingDesign, kernel: MultiLevelKernel,
                            noise: NoiseSpec) -> float:
    """Log marginal likelihood of the design under fixed hyperparameters."""
    from .coreg import multilevel_gram
    K = multilevel_gram(kernel, noise, design.s, design.d, design.j, design.g)
    K = K + noise.noise_variance * np.eye(design.n_rows)
    L, _ = _chol_with_ladder(K)
    alpha = cho_solve((L, True), design.y)
    return -(0.5 * float(design.y @ alpha) + float(np.sum(np.log(np.diag(L))))
             + 0.5 * design.n_rows * LOG2PI)


def assemble_model(design: TrainingDesign, kernel: MultiLevelKernel,
                   noise: NoiseSpec, diagnostics: dict | None = None) -> FittedModel:
    """Cache the training factorization for a kernel with fixed hyperparameters."""
    from .coreg import multilevel_gram
    K = multilevel_gram(kernel, noise, design.s, design.d, design.j, design.g)
    K = K + noise.noise_variance * np.eye(design.n_rows)
    L, nugget = _chol_with_ladder(K)
    alpha = cho_solve((L, True), design.y)
    lml = -(0.5 * float(design.y @ alpha) + float(np.sum(np.log(np.diag(L))))
            + 0.5 * design.n_rows * LOG2PI)
    diag = dict(diagnostics or {})
    diag.setdefault("nugget", nugget)
    return FittedModel(kernel=kernel, noise=noise, design=design, chol=L,
                       alpha=alpha, log_marginal_likelihood=lml, diagnostics=diag)


def fit(design: TrainingDesign, model_config: ModelConfig | None = None,
        opt_config: OptimizerConfig | None = None) -> FittedModel:
    """Maximize the log marginal likelihood over box-constrained restarts.

    Deterministic for a fixed seed; the best restart is returned with all
    restart scores logged in the diagnostics.
    """
    import warnings
    model_config = model_config or ModelConfig()
    opt_config = opt_config or OptimizerConfig()
    obj = MarginalLikelihoodObjective(design, model_config)
    rng = np.random.default_rng(opt_config.seed)

    if opt_config.method == "anneal":
        from scipy.optimize import dual_annealing
        res = dual_annealing(obj.value, bounds=obj.bounds, seed=opt_config.seed,
                             maxiter=max(opt_config.maxiter, 100))
        scores, best_theta, best_index = [-float(res.fun)], res.x, 0
    elif opt_config.method == "lbfgs":
        scores, results = [], []
        for i in range(opt_config.restarts):
            theta0 = obj.default_start() if i == 0 else obj.random_start(rng)
            try:
                val0, _ = obj.value_and_grad(theta0)
            except NumericalError:
                val0 = np.inf
            if not np.isfinite(val0):
                warnings.warn(f"restart {i}: non-finite likelihood at start, skipped")
                continue
            try:
                res = minimize(obj.value_and_grad, theta0, jac=True,
                               method="L-BFGS-B", bounds=obj.bounds,
                               options={"maxiter": opt_config.maxiter})
            except NumericalError:
                warnings.warn(f"restart {i}: factorization failed, skipped")
                continue
            scores.append(-float(res.fun))
            results.append(res.x)
        if not results:
            raise NumericalError("all restarts failed to factorize or converge")
        best_index = int(np.argmax(scores))
        best_theta = results[best_index]
    else:
        raise ValidationError(f"unknown optimizer method {opt_config.method!r}")

    kernel, noise = obj.unpack(best_theta)
    report = validate_constraints(kernel.input_kernel, noise,
                                  float(np.mean(design.lengths)))
    diagnostics = {"restart_scores": scores, "best_restart": best_index,
                   "constraint_report": report.to_dict(),
                   "method": opt_config.method}
    return assemble_model(design, kernel, noise, diagnostics)


def predict(model: FittedModel, s, d, j=None, g=None):
    """Predictive mean and full covariance at query rows (s*, d, j, g)."""
    from .coreg import multilevel_gram
    s = np.atleast_1d(np.asarray(s, dtype=float))
    d = np.atleast_1d(np.asarray(d, dtype=int))
    j = np.zeros_like(d) if j is None else np.atleast_1d(np.asarray(j, dtype=int))
    g = np.zeros_like(d) if g is None else np.atleast_1d(np.asarray(g, dtype=int))
    dz = model.design
    cross = multilevel_gram(model.kernel, model.noise, s, d, j, g,
                            s_b=dz.s, d_b=dz.d, j_b=dz.j, g_b=dz.g)
    K_qq = multilevel_gram(model.kernel, model.noise, s, d, j, g)
    mean = cross @ model.alpha
    v = solve_triangular(model.chol, cross.T, lower=True)
    cov = K_qq - v.T @ v
    return mean, cov


def predict_curve(model: FittedModel, curve_index: int = 0, m: int = 100) -> PredictedCurve:
    """Dense predictive mean curve with per-point 2x2 covariance blocks."""
    if m < 3:
        raise ValidationError("prediction grid needs m >= 3")
    length = float(model.design.lengths[curve_index])
    grid = np.arange(m) * length / m
    s = np.repeat(grid, 2)
    d = np.tile([0, 1], m)
    j = np.full(2 * m, curve_index, dtype=int)
    g = np.full(2 * m, model.design.group_of_curve(curve_index), dtype=int)
    mean, cov = predict(model, s, d, j, g)
    means = mean.reshape(m, 2)
    covs = np.array([cov[2 * i:2 * i + 2, 2 * i:2 * i + 2] for i in range(m)])
    return PredictedCurve(grid=grid, means=means, covariances=covs)
