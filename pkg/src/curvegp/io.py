"""Serialization: curve CSV files, collection JSON, and fit-result JSON.

All writes are atomic (write to a temp file in the target directory, then
rename). Numbers are serialized in shortest round-trip decimal form, so a
load(save(x)) round trip reproduces values exactly.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .coreg import CoregMatrix, MultiLevelKernel
from .curves import Curve
from .errors import ValidationError
from .kernels import NoiseSpec, PeriodicHyperparameters


def atomic_write_text(path: str, text: str) -> None:
    """Write text to path via a temporary file + rename in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def curve_to_csv(curve: Curve) -> str:
    lines = ["x,y"]
    for x, y in curve.points:
        lines.append(f"{float(x)!r},{float(y)!r}")
    return "\n".join(lines) + "\n"


def save_curve_csv(curve: Curve, path: str) -> None:
    atomic_write_text(path, curve_to_csv(curve))


def load_curve_csv(path: str) -> Curve:
    with open(path) as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines or lines[0].replace(" ", "") != "x,y":
        raise ValidationError(f"{path}:1: expected header 'x,y'")
    points = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise ValidationError(f"{path}:{lineno}: expected two comma-separated values")
        try:
            points.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    name = os.path.splitext(os.path.basename(path))[0]
    return Curve(np.array(points), name=name)


def save_json(obj, path: str) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


def load_json(path: str):
    with open(path) as handle:
        return json.load(handle)


def collection_to_obj(curves, labels=None) -> list:
    labels = labels if labels is not None else [None] * len(curves)
    return [{"id": c.name or f"curve_{i}", "label": label,
             "points": c.points.tolist()}
            for i, (c, label) in enumerate(zip(curves, labels))]


def save_collection_json(curves, path: str, labels=None) -> None:
    save_json(collection_to_obj(curves, labels), path)


def load_collection_json(path: str):
    """Load a curve collection; returns (curves, labels)."""
    data = load_json(path)
    if not isinstance(data, list):
        raise ValidationError(f"{path}: collection JSON must be an array")
    curves, labels = [], []
    for i, entry in enumerate(data):
        if "points" not in entry:
            raise ValidationError(f"{path}: entry {i} missing 'points'")
        curves.append(Curve(np.array(entry["points"], dtype=float),
                            name=str(entry.get("id", f"curve_{i}"))))
        labels.append(entry.get("label"))
    if all(label is None for label in labels):
        labels = None
    return curves, labels


LEVEL_TAGS = {"coord": "D", "curve": "C", "group": "G"}


def fit_result_to_dict(model) -> dict:
    """JSON-ready summary of a fitted model (hyperparameters, coreg levels
    with D/C/G tags, noise, likelihood, diagnostics)."""
    hyp = model.kernel.input_kernel
    coreg = {}
    for name, tag in LEVEL_TAGS.items():
        level = getattr(model.kernel, name)
        if level is not None:
            coreg[tag] = level.to_dict()
    diag = model.diagnostics
    return {
        "hyperparameters": {"family": hyp.family, "sigma2": hyp.sigma2,
                            "rho": hyp.rho, "tau": hyp.tau},
        "noise": {"noise_variance": model.noise.noise_variance,
                  "jitter": model.noise.jitter,
                  "jitter_mode": model.noise.jitter_mode},
        "coregionalization": coreg,
        "log_marginal_likelihood": model.log_marginal_likelihood,
        "restart_scores": diag.get("restart_scores", []),
        "constraint_report": diag.get("constraint_report", {}),
        "group_labels": [str(label) for label in model.design.group_labels],
    }


def kernel_from_dict(data: dict):
    """Rebuild (MultiLevelKernel, NoiseSpec) from a fit-result dictionary."""
    h = data["hyperparameters"]
    hyp = PeriodicHyperparameters(sigma2=h["sigma2"], rho=h["rho"],
                                  tau=h["tau"], family=h["family"])
    n = data["noise"]
    noise = NoiseSpec(noise_variance=n["noise_variance"], jitter=n["jitter"],
                      jitter_mode=n.get("jitter_mode", "constant"))
    coreg = data.get("coregionalization", {})
    levels = {}
    for name, tag in LEVEL_TAGS.items():
        if tag in coreg:
            levels[name] = CoregMatrix(np.array(coreg[tag]["w"], dtype=float),
                                       np.array(coreg[tag]["kappa"], dtype=float))
    if "coord" not in levels:
        levels["coord"] = CoregMatrix.identity(2)
    kernel = MultiLevelKernel(input_kernel=hyp, coord=levels["coord"],
                              curve=levels.get("curve"),
                              group=levels.get("group"))
    return kernel, noise


def predicted_curve_to_dict(pred) -> dict:
    return {"grid": pred.grid.tolist(), "means": pred.means.tolist(),
            "covariances": pred.covariances.tolist()}
