"""Command-line interface.

Subcommands: simulate, preprocess, fit, predict, reconstruct, landmarks,
register, metrics, plot, config. Exit codes: 0 success, 2 validation
error, 3 numerical failure, 4 I/O error. The CURVEGP_OUTPUT_DIR environment
variable overrides output locations.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import applications, metrics as metrics_mod, model as model_mod
from .curves import Curve, generate_synthetic, resample_equally_spaced
from .errors import ConfigError, NumericalError, ValidationError
from .io import (atomic_write_text, fit_result_to_dict, kernel_from_dict,
                 load_curve_csv, load_json, predicted_curve_to_dict,
                 save_curve_csv, save_json)
from .model import ModelConfig, OptimizerConfig, TrainingDesign
from .preprocess import preprocess_collection
from .svg import emit_svg

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

OUTPUT_DIR_ENV = "CURVEGP_OUTPUT_DIR"

CONFIG_DEFAULTS = {
    "model.family": "periodic_matern32",
    "model.tau": "auto",
    "model.jitter": 1e-3,
    "model.jitter_mode": "constant",
    "model.fit_coord": True,
    "model.coord_rank": 1,
    "model.fit_curve": True,
    "model.curve_rank": 1,
    "model.fit_group": False,
    "model.group_rank": 1,
    "model.noise_lo": 1e-6,
    "model.noise_hi": 1e-4,
    "opt.restarts": 8,
    "opt.seed": 0,
    "opt.method": "lbfgs",
    "opt.maxiter": 200,
    "output.dir": ".",
}


def parse_config_text(text: str, path: str = "<config>") -> dict:
    """Parse the flat `section.key = value` config format; unknown keys and
    malformed lines are rejected with the file and line number."""
    values = dict(CONFIG_DEFAULTS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in CONFIG_DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        default = CONFIG_DEFAULTS[key]
        try:
            if isinstance(default, bool):
                if value.lower() not in ("true", "false"):
                    raise ValueError("expected true/false")
                values[key] = value.lower() == "true"
            elif isinstance(default, int):
                values[key] = int(value)
            elif isinstance(default, float):
                values[key] = float(value)
            elif key == "model.tau":
                values[key] = value if value == "auto" else float(value)
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def load_config(path: str | None) -> dict:
    if path is None:
        return dict(CONFIG_DEFAULTS)
    with open(path) as handle:
        return parse_config_text(handle.read(), path)


def configs_from_values(values: dict):
    model_config = ModelConfig(
        family=values["model.family"], tau=values["model.tau"],
        jitter=values["model.jitter"], jitter_mode=values["model.jitter_mode"],
        fit_coord=values["model.fit_coord"], coord_rank=values["model.coord_rank"],
        fit_curve=values["model.fit_curve"], curve_rank=values["model.curve_rank"],
        fit_group=values["model.fit_group"], group_rank=values["model.group_rank"],
        noise_box=(values["model.noise_lo"], values["model.noise_hi"]))
    opt_config = OptimizerConfig(
        restarts=values["opt.restarts"], seed=values["opt.seed"],
        method=values["opt.method"], maxiter=values["opt.maxiter"])
    return model_config, opt_config


def _out_path(path: str) -> str:
    override = os.environ.get(OUTPUT_DIR_ENV)
    if override:
        return os.path.join(override, os.path.basename(path))
    return path


def _load_curves(paths):
    return [load_curve_csv(p) for p in paths]


# -- subcommand handlers ----------------------------------------------------

def cmd_simulate(args) -> int:
    curve = generate_synthetic(
        args.shape, args.n, radius=args.radius, axes=tuple(args.axes),
        amplitude=args.amplitude, petals=args.petals, scheme=args.scheme,
        noise_sd=args.noise_sd, rng_seed=args.seed)
    save_curve_csv(curve, _out_path(args.out))
    return EXIT_OK


def cmd_preprocess(args) -> int:
    curves = _load_curves(args.inputs)
    processed, results = preprocess_collection(curves, args.template)
    report = []
    for path, curve, res in zip(args.inputs, processed, results):
        base = os.path.splitext(os.path.basename(path))[0]
        out_csv = _out_path(os.path.join(args.outdir, base + "_pre.csv"))
        save_curve_csv(curve, out_csv)
        report.append({"curve_id": base, "rotation": res.rotation.tolist(),
                       "shift": int(res.shift), "residual": res.residual})
    save_json(report, _out_path(os.path.join(args.outdir, "alignment.json")))
    return EXIT_OK


def cmd_fit(args) -> int:
    values = load_config(args.config)
    model_config, opt_config = configs_from_values(values)
    if args.seed is not None:
        opt_config.seed = args.seed
    curves = _load_curves(args.inputs)
    labels = args.labels.split(",") if args.labels else None
    design = TrainingDesign.from_curves(curves, labels)
    model = model_mod.fit(design, model_config, opt_config)
    save_json(fit_result_to_dict(model), _out_path(args.out))
    return EXIT_OK


def _model_from_fit(curve_paths, fit_path, labels=None):
    curves = _load_curves(curve_paths)
    kernel, noise = kernel_from_dict(load_json(fit_path))
    design = TrainingDesign.from_curves(curves, labels)
    return model_mod.assemble_model(design, kernel, noise)


def cmd_predict(args) -> int:
    model = _model_from_fit(args.inputs, args.fit)
    pred = model_mod.predict_curve(model, args.curve, args.m)
    save_json(predicted_curve_to_dict(pred), _out_path(args.out))
    if args.svg:
        atomic_write_text(_out_path(args.svg), emit_svg(pred))
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    values = load_config(args.config)
    model_config, opt_config = configs_from_values(values)
    curves = _load_curves(args.inputs)
    model, preds = applications.reconstruct(curves, model_config, opt_config,
                                            m=args.m)
    os.makedirs(_out_path(args.outdir) if os.environ.get(OUTPUT_DIR_ENV)
                else args.outdir, exist_ok=True)
    save_json(fit_result_to_dict(model),
              _out_path(os.path.join(args.outdir, "fit.json")))
    for path, pred in zip(args.inputs, preds):
        base = os.path.splitext(os.path.basename(path))[0]
        save_curve_csv(Curve(pred.means),
                       _out_path(os.path.join(args.outdir, base + "_mean.csv")))
        save_json(predicted_curve_to_dict(pred),
                  _out_path(os.path.join(args.outdir, base + "_pred.json")))
    return EXIT_OK


def cmd_landmarks(args) -> int:
    curves = _load_curves(args.inputs)
    values = load_config(args.config)
    model_config, opt_config = configs_from_values(values)
    if args.mode == "simultaneous":
        config = applications.LandmarkConfig(
            p=args.p, lam=args.lam, n_trials=args.n_trials,
            criterion=args.criterion, rng_seed=args.seed)
        result = applications.simultaneous_landmarks(curves, config,
                                                     model_config, opt_config)
        payload = {"p": args.p, "best_indices": list(result.indices),
                   "best_params": result.params.tolist(), "score": result.score,
                   "trials": [{"indices": list(sub), "score": score}
                              for sub, score in result.trials],
                   "criterion_trace": {str(k): v for k, v in
                                       result.criterion_trace.items()}}
    else:
        design = TrainingDesign.from_curves(curves)
        model = model_mod.fit(design, model_config, opt_config)
        s_star = applications.sequential_landmark(model, lam=args.lam,
                                                  n_candidates=args.candidates)
        payload = {"lambda": args.lam, "selected_param": s_star}
    save_json(payload, _out_path(args.out))
    return EXIT_OK


def cmd_register(args) -> int:
    source = load_curve_csv(args.source)
    target = load_curve_csv(args.target)
    reg = metrics_mod.elastic_register(source, target, grid_size=args.grid)
    payload = {"rotation": reg.rotation.tolist(), "gamma": reg.gamma.tolist(),
               "shift": int(reg.shift), "energy": reg.energy,
               "energies": list(reg.energies),
               "esd": metrics_mod.esd(target, source, grid_size=args.grid)}
    save_json(payload, _out_path(args.out))
    return EXIT_OK


def cmd_metrics(args) -> int:
    a = load_curve_csv(args.pair[0])
    b = load_curve_csv(args.pair[1])
    m = args.m
    ra = resample_equally_spaced(a, m)
    rb = resample_equally_spaced(b, m)
    payload = {"pair": [args.pair[0], args.pair[1]],
               "imspe": metrics_mod.imspe(ra.points, b, m),
               "wasserstein2": metrics_mod.wasserstein2(ra.points, rb.points),
               "esd": metrics_mod.esd(a, b, grid_size=min(m, 100))}
    save_json(payload, _out_path(args.out))
    return EXIT_OK


def cmd_plot(args) -> int:
    data = load_json(args.pred)
    pred = model_mod.PredictedCurve(grid=np.array(data["grid"]),
                                    means=np.array(data["means"]),
                                    covariances=np.array(data["covariances"]))
    observed = load_curve_csv(args.observed) if args.observed else None
    truth = load_curve_csv(args.truth) if args.truth else None
    atomic_write_text(_out_path(args.out),
                      emit_svg(pred, observed=observed, truth=truth,
                               title=args.title, scale=args.scale))
    return EXIT_OK


def cmd_config(args) -> int:
    if args.action == "print-defaults":
        for key, value in CONFIG_DEFAULTS.items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            print(f"{key} = {value}")
        return EXIT_OK
    raise ValidationError(f"unknown config action {args.action!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvegp",
        description="Gaussian-process modeling and shape analysis of closed "
                    "planar curves.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic curve CSV")
    p.add_argument("--shape", choices=["circle", "ellipse", "star"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-sd", type=float, default=0.0)
    p.add_argument("--scheme", choices=["equal", "clustered"], default="equal")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--axes", type=float, nargs=2, default=[1.0, 0.5])
    p.add_argument("--amplitude", type=float, default=0.3)
    p.add_argument("--petals", type=int, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("preprocess", help="center, scale and align curves")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--template", type=int, default=0)
    p.add_argument("--outdir", default=".")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("fit", help="fit the multi-output GP model")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--labels", default=None,
                   help="comma-separated group labels, one per curve")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="dense prediction from a saved fit")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--fit", required=True)
    p.add_argument("--curve", type=int, default=0)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("reconstruct", help="joint fit + dense resampling")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--m", type=int, default=200)
    p.add_argument("--outdir", default=".")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("landmarks", help="landmark selection")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--mode", choices=["simultaneous", "sequential"],
                   default="simultaneous")
    p.add_argument("--p", type=int, default=4)
    p.add_argument("--lam", type=float, default=0.5)
    p.add_argument("--n-trials", type=int, default=30)
    p.add_argument("--criterion", choices=["imspe", "iuea"], default="imspe")
    p.add_argument("--candidates", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_landmarks)

    p = sub.add_parser("register", help="elastic registration of two curves")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("metrics", help="distance report for a curve pair")
    p.add_argument("--pair", nargs=2, required=True)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("plot", help="render a prediction JSON as SVG")
    p.add_argument("--pred", required=True)
    p.add_argument("--observed", default=None)
    p.add_argument("--truth", default=None)
    p.add_argument("--title", default="")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("config", help="configuration utilities")
    p.add_argument("action", choices=["print-defaults"])
    p.set_defaults(func=cmd_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:  # ValidationError, CurveError, ConfigError, ...
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
