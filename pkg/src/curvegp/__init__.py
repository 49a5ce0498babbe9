"""Multi-output Gaussian-process modeling of closed planar curves.

Periodic kernels over arc length, coregionalization across coordinates,
curves and groups, SRVF-based preprocessing and elastic registration,
shape metrics, and curve-analysis workflows (reconstruction, pointwise
means, landmark selection, sub-population fits).
"""

from .curves import (Curve, arc_to_xy_param, generate_synthetic,
                     polygon_length, resample_equally_spaced, xy_to_arc_param)
from .kernels import (NoiseSpec, PeriodicHyperparameters, gram, periodic_eval,
                      theorem1_bounds, validate_constraints)
from .coreg import CoregMatrix, MultiLevelKernel, build_coreg, multilevel_eval, multilevel_gram
from .model import (FittedModel, ModelConfig, OptimizerConfig, PredictedCurve,
                    TrainingDesign, assemble_model, fit,
                    log_marginal_likelihood, predict, predict_curve)
from .preprocess import (AlignmentResult, Srvf, apply_alignment, center,
                         preprocess_collection, rotation_seed_align,
                         scale_to_unit_length, srvf)
from .metrics import Registration, elastic_register, esd, imspe, iuea, wasserstein2
from .applications import (LandmarkConfig, LandmarkResult, fit_subpopulations,
                           pointwise_mean, reconstruct, sequential_landmark,
                           simultaneous_landmarks)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
