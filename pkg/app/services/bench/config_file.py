"""
YAML experiment configs and instance files
"""

import logging
import os
from typing import Any, Dict

import numpy as np
import yaml
from pydantic import ValidationError

from app.models.experiment import ExperimentConfig
from app.models.instance import Instance, NoiseKind, NoiseModel
from app.services.instances.service import InstanceService
from app.utils.exceptions import InvalidInputError

# Set up logging
logger = logging.getLogger(__name__)

# Alternative spellings accepted in config files
KEY_ALIASES = {
    "lambda": "lam",
    "trace_sampling": "trace_every",
    "n0": "phase_initial",
}
LIST_KEYS = ("points", "algorithms")
PATH_KEYS = ("dataset", "instance_file")


def _read_mapping(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise InvalidInputError(f"File not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise InvalidInputError(f"Cannot parse {path}: {e}")
    if not isinstance(data, dict):
        raise InvalidInputError(f"{path} must contain key: value pairs")
    return data


def _split_list(value):
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    if isinstance(value, (int, float)):
        return [value]
    return value


def parse_config(data: Dict[str, Any], base_dir: str = ".") -> ExperimentConfig:
    """Build an ExperimentConfig from a flat mapping"""
    values = {}
    for key, value in data.items():
        key = KEY_ALIASES.get(key, key)
        if key in LIST_KEYS:
            value = _split_list(value)
        if key == "trace_every" and value in ("off", "none", False):
            value = None
        if key in PATH_KEYS and value and not os.path.isabs(str(value)):
            value = os.path.join(base_dir, str(value))
        values[key] = value

    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        messages = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in e.errors())
        raise InvalidInputError(f"Invalid experiment config: {messages}")


def load_config(path: str) -> ExperimentConfig:
    config = parse_config(_read_mapping(path),
                          os.path.dirname(os.path.abspath(path)))
    logger.info(f"Loaded {config.experiment.value} config from {path}")
    return config


def load_instance(path: str) -> Instance:
    """Instance file: features, theta, noise, sigma, R, S and an optional name"""
    data = _read_mapping(path)
    missing = [k for k in ("features", "theta", "R", "S") if k not in data]
    if missing:
        raise InvalidInputError(
            f"Instance file {path} is missing {', '.join(missing)}")

    try:
        kind = NoiseKind(data.get("noise", NoiseKind.GAUSSIAN.value))
    except ValueError:
        raise InvalidInputError(f"Unknown noise model {data.get('noise')!r}")
    noise = (NoiseModel.signflip() if kind == NoiseKind.SIGNFLIP
             else NoiseModel.gaussian(float(data.get("sigma", data["R"]))))

    return InstanceService.create_instance(
        data["features"], data["theta"], noise, R=float(data["R"]),
        S=float(data["S"]), name=data.get("name", os.path.basename(path)))


def dump_instance(instance: Instance, path: str) -> str:
    """Write an instance file readable by load_instance"""
    data = {
        "name": instance.name,
        "noise": instance.noise.kind.value,
        "R": float(instance.R),
        "S": float(instance.S),
        "theta": np.asarray(instance.theta).tolist(),
        "features": np.asarray(instance.arms.features).tolist(),
    }
    if instance.noise.kind == NoiseKind.GAUSSIAN:
        data["sigma"] = float(instance.noise.sigma)

    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(data, f, sort_keys=False)
    logger.info(f"Wrote instance with {instance.n_arms} arms to {path}")
    return path
