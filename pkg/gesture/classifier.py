"""
One-against-all recognition with small sigmoid networks.

Each class owns a 6-H-1 network trained by full-batch gradient descent on the
mean squared error of 0/1 targets; prediction takes the argmax of the K scores.
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from .errors import ModelFormatError, ModelVersionError
from .features import FEATURE_NAMES, FeatureVector
from .utils import atomic_write

logger = logging.getLogger(__name__)

N_INPUTS = len(FEATURE_NAMES)
MODEL_VERSION = 1
Activation = Literal["sigmoid", "step"]


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    learning_rate: float = Field(default=0.1, gt=0)
    epochs: int = Field(default=500, ge=1)
    init: Literal["uniform", "zero"] = "uniform"
    seed: int = 0
    tolerance: float = Field(default=1e-6, ge=0)
    hidden_units: int = Field(default=3, ge=1)
    workers: int = Field(default=1, ge=1)


@dataclass(frozen=True, eq=False)
class BinaryNet:
    hidden_weights: np.ndarray  # (hidden, inputs)
    hidden_bias: np.ndarray  # (hidden,)
    output_weights: np.ndarray  # (hidden,)
    output_bias: float
    activation: str = "sigmoid"

    def __post_init__(self):
        w = np.array(self.hidden_weights, dtype=np.float64, copy=True)
        b = np.array(self.hidden_bias, dtype=np.float64, copy=True).reshape(-1)
        v = np.array(self.output_weights, dtype=np.float64, copy=True).reshape(-1)
        if w.ndim != 2 or w.shape[0] != b.size or w.shape[0] != v.size:
            raise ValueError(f"Inconsistent network shapes {w.shape}, {b.shape}, {v.shape}")
        if self.activation not in ("sigmoid", "step"):
            raise ValueError(f"Unknown activation {self.activation!r}")
        for array in (w, b, v):
            if not np.all(np.isfinite(array)):
                raise ValueError("Network parameters must be finite")
            array.setflags(write=False)
        if not np.isfinite(self.output_bias):
            raise ValueError("Network parameters must be finite")
        object.__setattr__(self, "hidden_weights", w)
        object.__setattr__(self, "hidden_bias", b)
        object.__setattr__(self, "output_weights", v)
        object.__setattr__(self, "output_bias", float(self.output_bias))

    @property
    def hidden_units(self) -> int:
        return self.hidden_weights.shape[0]

    def with_activation(self, activation: str) -> "BinaryNet":
        return BinaryNet(self.hidden_weights, self.hidden_bias, self.output_weights, self.output_bias, activation)


@dataclass(frozen=True, eq=False)
class Normalizer:
    mean: np.ndarray
    std: np.ndarray
    degenerate: Tuple[int, ...] = ()  # feature indices whose std was replaced by 1

    @classmethod
    def fit(cls, samples: np.ndarray) -> "Normalizer":
        samples = np.asarray(samples, dtype=np.float64)
        mean = samples.mean(axis=0)
        std = samples.std(axis=0)
        degenerate = tuple(int(i) for i in np.nonzero(std == 0)[0])
        std = np.where(std == 0, 1.0, std)
        return cls(mean, std, degenerate)

    def transform(self, samples: np.ndarray) -> np.ndarray:
        return (np.asarray(samples, dtype=np.float64) - self.mean) / self.std


@dataclass(frozen=True, eq=False)
class OvAModel:
    class_names: Tuple[str, ...]
    nets: Tuple[BinaryNet, ...]
    normalizer: Normalizer
    metadata: Dict = field(default_factory=dict)

    def __post_init__(self):
        names = tuple(self.class_names)
        if len(names) < 2:
            raise ModelFormatError(f"A one-against-all model needs at least 2 classes, got {len(names)}")
        if len(set(names)) != len(names):
            raise ModelFormatError("Class names must be unique")
        if len(self.nets) != len(names):
            raise ModelFormatError(f"{len(names)} class names but {len(self.nets)} networks")
        object.__setattr__(self, "class_names", names)
        object.__setattr__(self, "nets", tuple(self.nets))


def _as_matrix(samples) -> np.ndarray:
    if isinstance(samples, FeatureVector):
        samples = [samples]
    rows = [s.as_array() if isinstance(s, FeatureVector) else np.asarray(s, dtype=np.float64) for s in samples]
    matrix = np.atleast_2d(np.array(rows, dtype=np.float64))
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Feature values must be finite")
    return matrix


def init_net(config: TrainConfig, n_inputs: int = N_INPUTS) -> BinaryNet:
    hidden = config.hidden_units
    if config.init == "zero":
        return BinaryNet(np.zeros((hidden, n_inputs)), np.zeros(hidden), np.zeros(hidden), 0.0)
    rng = np.random.default_rng(config.seed)
    return BinaryNet(
        rng.uniform(-0.5, 0.5, size=(hidden, n_inputs)),
        rng.uniform(-0.5, 0.5, size=hidden),
        rng.uniform(-0.5, 0.5, size=hidden),
        float(rng.uniform(-0.5, 0.5)),
    )


def _step(z: np.ndarray) -> np.ndarray:
    return (z >= 0).astype(np.float64)


def _hidden_preactivation(weights: np.ndarray, bias: np.ndarray, inputs: np.ndarray) -> np.ndarray:
    # Broadcast-and-sum keeps identical weight rows producing bit-identical columns
    return (inputs[:, None, :] * weights[None, :, :]).sum(axis=2) + bias


def forward_batch(net: BinaryNet, inputs: np.ndarray) -> np.ndarray:
    activate = expit if net.activation == "sigmoid" else _step
    hidden = activate(_hidden_preactivation(net.hidden_weights, net.hidden_bias, inputs))
    return activate((hidden * net.output_weights).sum(axis=1) + net.output_bias)


def forward(net: BinaryNet, x: Union[FeatureVector, Sequence[float], np.ndarray]) -> float:
    """Score of one normalized feature vector."""
    return float(forward_batch(net, _as_matrix(x))[0])


def loss_and_gradients(net: BinaryNet, inputs: np.ndarray, targets: np.ndarray) -> Tuple[float, Dict[str, np.ndarray]]:
    """
    Mean squared error of the sigmoid network and its analytic gradients.
    :return: (loss, {"hidden_weights", "hidden_bias", "output_weights", "output_bias"}).
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    hidden = expit(_hidden_preactivation(net.hidden_weights, net.hidden_bias, inputs))
    output = expit((hidden * net.output_weights).sum(axis=1) + net.output_bias)

    error = output - targets
    loss = float(np.mean(error ** 2))
    d_out = 2.0 * error / len(targets) * output * (1.0 - output)
    d_hidden = d_out[:, None] * net.output_weights[None, :] * hidden * (1.0 - hidden)
    gradients = {
        "hidden_weights": (d_hidden[:, :, None] * inputs[:, None, :]).sum(axis=0),
        "hidden_bias": d_hidden.sum(axis=0),
        "output_weights": (d_out[:, None] * hidden).sum(axis=0),
        "output_bias": np.array(d_out.sum()),
    }
    return loss, gradients


def train_binary(samples, labels: Sequence[int], config: TrainConfig) -> BinaryNet:
    """
    Full-batch gradient descent on MSE with sigmoid units. Sample order is
    fixed and no randomness enters after initialization.
    """
    inputs = _as_matrix(samples) if len(samples) else np.empty((0, N_INPUTS))
    targets = np.asarray(labels, dtype=np.float64)
    if len(inputs) == 0 or len(targets) == 0:
        raise ValueError("train_binary needs at least one sample")
    if len(inputs) != len(targets):
        raise ValueError(f"{len(inputs)} samples but {len(targets)} labels")

    net = init_net(config, n_inputs=inputs.shape[1])
    w, b, v, c = (np.array(net.hidden_weights), np.array(net.hidden_bias),
                  np.array(net.output_weights), net.output_bias)
    previous = None
    for epoch in range(config.epochs):
        loss, grads = loss_and_gradients(BinaryNet(w, b, v, c), inputs, targets)
        if previous is not None and abs(previous - loss) < config.tolerance:
            logger.debug(f"Early stop at epoch {epoch}: loss={loss:.6g}")
            break
        previous = loss
        w = w - config.learning_rate * grads["hidden_weights"]
        b = b - config.learning_rate * grads["hidden_bias"]
        v = v - config.learning_rate * grads["output_weights"]
        c = c - config.learning_rate * float(grads["output_bias"])
    return BinaryNet(w, b, v, c)


def train_ova(
    features, labels: Sequence[int], class_names: Sequence[str], config: TrainConfig
) -> OvAModel:
    """
    Fit the normalizer on `features`, then train one network per class on
    targets [label == k]. Networks are independent and may train concurrently.
    """
    class_names = tuple(class_names)
    labels = np.asarray(labels, dtype=np.int64)
    inputs = _as_matrix(features)
    if len(inputs) != len(labels):
        raise ValueError(f"{len(inputs)} samples but {len(labels)} labels")
    missing = [name for k, name in enumerate(class_names) if not np.any(labels == k)]
    if missing:
        raise ValueError(f"No training samples for classes: {', '.join(missing)}")
    if np.any(labels < 0) or np.any(labels >= len(class_names)):
        raise ValueError("Every label must index a class name")

    normalizer = Normalizer.fit(inputs)
    warnings: List[str] = []
    for index in normalizer.degenerate:
        message = f"Feature '{FEATURE_NAMES[index]}' has zero variance; using std=1"
        logger.warning(message)
        warnings.append(message)
    normalized = normalizer.transform(inputs)

    def fit_class(k: int) -> BinaryNet:
        # Each class gets its own seed so the networks start decorrelated
        class_config = config.model_copy(update={"seed": config.seed + k})
        return train_binary(normalized, (labels == k).astype(np.float64), class_config)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        nets = tuple(pool.map(fit_class, range(len(class_names))))

    metadata = {
        "train_config": config.model_dump(),
        "warnings": warnings,
        "degenerate_features": list(normalizer.degenerate),
    }
    logger.info(f"Trained {len(nets)} one-against-all networks on {len(inputs)} samples")
    return OvAModel(class_names, nets, normalizer, metadata)


def predict(
    model: OvAModel, x: Union[FeatureVector, Sequence[float]], activation: Optional[Activation] = None
) -> Tuple[int, np.ndarray]:
    """
    :param activation: Override the networks' activation (e.g. "step").
    :return: (argmax class index, lowest index on ties; the K raw scores).
    """
    normalized = model.normalizer.transform(_as_matrix(x))
    scores = np.array([
        forward_batch(net if activation is None else net.with_activation(activation), normalized)[0]
        for net in model.nets
    ])
    return int(np.argmax(scores)), scores


def _format_row(values) -> str:
    return " ".join(format(float(v), ".17g") for v in np.ravel(values))


def save_model(model: OvAModel, path: Union[str, Path]) -> None:
    """
    Versioned text format: header, normalizer mean and std lines, a metadata
    line, then per class its name and four parameter blocks.
    """
    activation = model.nets[0].activation
    hidden = model.nets[0].hidden_units
    lines = [
        f"ovamodel v{MODEL_VERSION} K={len(model.class_names)} activation={activation} hidden={hidden}",
        _format_row(model.normalizer.mean),
        _format_row(model.normalizer.std),
        "meta " + json.dumps(model.metadata, sort_keys=True),
    ]
    for name, net in zip(model.class_names, model.nets):
        lines.append(f"class {name}")
        lines.extend(_format_row(row) for row in net.hidden_weights)
        lines.append(_format_row(net.hidden_bias))
        lines.append(_format_row(net.output_weights))
        lines.append(_format_row([net.output_bias]))
    atomic_write(path, "\n".join(lines) + "\n")
    logger.info(f"Model with {len(model.class_names)} classes saved to {path}")


def _parse_row(line: str, expected: int, where: str) -> np.ndarray:
    try:
        values = np.array([float(token) for token in line.split()], dtype=np.float64)
    except ValueError:
        raise ModelFormatError(f"{where}: non-numeric value in {line!r}")
    if values.size != expected:
        raise ModelFormatError(f"{where}: expected {expected} values, found {values.size}")
    return values


def load_model(path: Union[str, Path]) -> OvAModel:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Model file {path} was not found")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ModelFormatError(f"{path}: empty model file")

    header = lines[0].split()
    if len(header) < 2 or header[0] != "ovamodel":
        raise ModelFormatError(f"{path}: not a model file")
    if header[1] != f"v{MODEL_VERSION}":
        raise ModelVersionError(f"{path}: unsupported model version {header[1]!r}")
    fields_ = dict(token.split("=", 1) for token in header[2:] if "=" in token)
    try:
        k = int(fields_["K"])
        hidden = int(fields_.get("hidden", 3))
        activation = fields_.get("activation", "sigmoid")
    except (KeyError, ValueError):
        raise ModelFormatError(f"{path}: malformed header {lines[0]!r}")

    if len(lines) < 4:
        raise ModelFormatError(f"{path}: truncated before the normalizer")
    mean = _parse_row(lines[1], N_INPUTS, f"{path}:2")
    std = _parse_row(lines[2], N_INPUTS, f"{path}:3")
    if not lines[3].startswith("meta "):
        raise ModelFormatError(f"{path}:4: missing metadata line")
    try:
        metadata = json.loads(lines[3][len("meta "):])
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{path}:4: metadata is not valid JSON: {e}")

    block = hidden + 4  # class line, hidden rows, hidden bias, output weights, output bias
    body = lines[4:]
    names, nets = [], []
    for start in range(0, len(body), block):
        chunk = body[start:start + block]
        where = f"{path}:{start + 5}"
        if not chunk[0].startswith("class "):
            raise ModelFormatError(f"{where}: expected a class line, found {chunk[0]!r}")
        if len(chunk) < block:
            raise ModelFormatError(f"{where}: truncated network block")
        weights = np.stack([_parse_row(row, N_INPUTS, where) for row in chunk[1:1 + hidden]])
        bias = _parse_row(chunk[1 + hidden], hidden, where)
        output_weights = _parse_row(chunk[2 + hidden], hidden, where)
        output_bias = _parse_row(chunk[3 + hidden], 1, where)[0]
        names.append(chunk[0][len("class "):])
        try:
            nets.append(BinaryNet(weights, bias, output_weights, output_bias, activation))
        except ValueError as e:
            raise ModelFormatError(f"{where}: {e}")

    if len(names) != k:
        raise ModelFormatError(f"{path}: header declares K={k} but {len(names)} networks follow")
    degenerate = tuple(metadata.get("degenerate_features", ()))
    return OvAModel(tuple(names), tuple(nets), Normalizer(mean, std, degenerate), metadata)
