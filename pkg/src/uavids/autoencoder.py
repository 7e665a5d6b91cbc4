"""Six-layer tanh autoencoder used as the feature extractor.

Encoder: M -> 40 (tanh) -> 20 (tanh) -> N (linear).
Decoder: N -> 20 (tanh) -> 40 (tanh) -> M (linear).

The reconstruction objective is ``1/(2T) * sum_j ||x_j - y_j||^2``; the 1/2
factor is kept, so reported loss values are half the usual per-row squared
error.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import serialization
from .errors import ConfigError, ModelFileError, ShapeError, TrainingError
from .nn import AdamState, DenseLayer, adam_step, backward_stack, forward_stack, init_layer, restore, snapshot
from .numkernel import seeded_rng

log = logging.getLogger(__name__)

HIDDEN_DIMS = (40, 20)


@dataclass(frozen=True)
class AEConfig:
    input_dim: int
    bottleneck_dim: int
    learning_rate: float = 1e-3
    batch_size: int = 64
    max_epochs: int = 200
    patience: int = 10
    seed: int = 1337
    val_fraction: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    hidden_dims: tuple = field(default=HIDDEN_DIMS)

    def __post_init__(self):
        if tuple(self.hidden_dims) != HIDDEN_DIMS:
            raise ConfigError(f"hidden_dims are fixed at {HIDDEN_DIMS}")
        if not 1 <= self.bottleneck_dim < self.input_dim:
            raise ConfigError(
                f"bottleneck_dim must satisfy 1 <= N < M, got N={self.bottleneck_dim}, M={self.input_dim}"
            )
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be >= 1")
        if not 1 <= self.patience <= self.max_epochs:
            raise ConfigError("patience must lie in [1, max_epochs]")
        if not 0.0 < self.val_fraction < 1.0:
            raise ConfigError("val_fraction must lie in (0, 1)")


@dataclass
class AEModel:
    encoder: list
    decoder: list
    config: AEConfig

    @property
    def layers(self) -> list:
        return self.encoder + self.decoder

    @property
    def input_dim(self) -> int:
        return self.encoder[0].n_in

    @property
    def bottleneck_dim(self) -> int:
        return self.encoder[-1].n_out

    @property
    def n_params(self) -> int:
        return sum(layer.n_params for layer in self.layers)


@dataclass
class TrainReport:
    train_loss: list
    val_loss: list
    stopped_epoch: int
    best_val_loss: float
    best_epoch: int


def _dims(M: int, N: int) -> list[int]:
    return [M, *HIDDEN_DIMS, N, *reversed(HIDDEN_DIMS), M]


_ACTS = ("tanh", "tanh", "linear", "tanh", "tanh", "linear")


def param_count(M: int, N: int) -> int:
    """Trainable scalars of the M/N autoencoder, counted layer by layer."""
    if M < 1 or N < 1:
        raise ConfigError("M and N must be >= 1")
    dims = _dims(M, N)
    return sum((dims[i] + 1) * dims[i + 1] for i in range(len(dims) - 1))


def build(config: AEConfig) -> AEModel:
    rng = seeded_rng(config.seed, 0)
    dims = _dims(config.input_dim, config.bottleneck_dim)
    layers = [init_layer(rng, dims[i], dims[i + 1], _ACTS[i]) for i in range(6)]
    return AEModel(layers[:3], layers[3:], config)


def _as_batch(model: AEModel, x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != model.input_dim:
        raise ShapeError(f"expected {model.input_dim} input features, got shape {np.shape(x)}")
    return arr, single


def forward(model: AEModel, x):
    """Return ``(h, y)``: latent code and reconstruction for a row or batch."""
    X, single = _as_batch(model, x)
    h = forward_stack(model.encoder, X)[-1]
    y = forward_stack(model.decoder, h)[-1]
    return (h[0], y[0]) if single else (h, y)


def encode(model: AEModel, X) -> np.ndarray:
    X, single = _as_batch(model, X)
    h = forward_stack(model.encoder, X)[-1]
    return h[0] if single else h


def decode(model: AEModel, H) -> np.ndarray:
    H = np.asarray(H, dtype=np.float64)
    single = H.ndim == 1
    H2 = H[None, :] if single else H
    if H2.ndim != 2 or H2.shape[1] != model.bottleneck_dim:
        raise ShapeError(f"expected {model.bottleneck_dim} latent features, got shape {H.shape}")
    y = forward_stack(model.decoder, H2)[-1]
    return y[0] if single else y


def mse_loss(X, Y) -> float:
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.shape != Y.shape:
        raise ShapeError(f"shape mismatch {X.shape} vs {Y.shape}")
    if X.ndim != 2 or X.shape[0] < 1:
        raise ShapeError("mse_loss expects a non-empty 2-D batch")
    diff = X - Y
    return float(np.sum(diff * diff) / (2.0 * X.shape[0]))


def _loss_and_grads(model: AEModel, X: np.ndarray):
    layers = model.layers
    acts = forward_stack(layers, X)
    Y = acts[-1]
    loss = mse_loss(X, Y)
    grads = backward_stack(layers, acts, (Y - X) / X.shape[0])
    return loss, grads


def backward(model: AEModel, X) -> list:
    """Gradients of the reconstruction loss, ``[(dW, db), ...]`` per layer
    in encoder-then-decoder order."""
    X, _ = _as_batch(model, X)
    if X.shape[0] == 0:
        raise ShapeError("empty batch")
    return _loss_and_grads(model, X)[1]


def reconstruction_loss(model: AEModel, X) -> float:
    X, _ = _as_batch(model, X)
    return mse_loss(X, forward_stack(model.layers, X)[-1])


def train(model: AEModel, X_train, X_val, config: AEConfig | None = None) -> TrainReport:
    """Mini-batch Adam with seeded shuffling and early stopping on
    validation loss. On return the model holds the best-validation weights."""
    config = config or model.config
    X_train, _ = _as_batch(model, X_train)
    X_val, _ = _as_batch(model, X_val)
    if X_train.shape[0] < config.batch_size:
        raise ConfigError(
            f"need at least batch_size={config.batch_size} training rows, got {X_train.shape[0]}"
        )
    if X_val.shape[0] == 0:
        raise ConfigError("validation set is empty")

    layers = model.layers
    state = AdamState.for_layers(
        layers, lr=config.learning_rate, beta1=config.beta1, beta2=config.beta2, eps=config.eps
    )
    rng = seeded_rng(config.seed, 1)
    n = X_train.shape[0]
    train_hist, val_hist = [], []
    best_val, best_epoch, best_weights, stale = np.inf, 0, snapshot(layers), 0

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = X_train[order[start:start + config.batch_size]]
            loss, grads = _loss_and_grads(model, batch)
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite autoencoder loss at epoch {epoch}, batch offset {start}")
            adam_step(layers, grads, state)
        tr = reconstruction_loss(model, X_train)
        va = reconstruction_loss(model, X_val)
        if not (np.isfinite(tr) and np.isfinite(va)):
            raise TrainingError(f"non-finite autoencoder loss at end of epoch {epoch}")
        train_hist.append(tr)
        val_hist.append(va)
        log.debug("epoch %d train %.6g val %.6g", epoch, tr, va)
        if va < best_val:
            best_val, best_epoch, best_weights, stale = va, epoch, snapshot(layers), 0
        else:
            stale += 1
            if stale >= config.patience:
                break

    restore(layers, best_weights)
    return TrainReport(train_hist, val_hist, len(val_hist), float(best_val), best_epoch)


def save_model(model: AEModel, path) -> None:
    arrays = {}
    for part, layers in (("encoder", model.encoder), ("decoder", model.decoder)):
        for i, layer in enumerate(layers):
            arrays[f"{part}.{i}.weights"] = layer.weights
            arrays[f"{part}.{i}.bias"] = layer.bias
    cfg = asdict(model.config)
    cfg["hidden_dims"] = list(cfg["hidden_dims"])
    meta = {
        "M": model.input_dim,
        "N": model.bottleneck_dim,
        "activations": list(_ACTS),
        "config": cfg,
    }
    serialization.write(path, "autoencoder", meta, arrays)


def load_model(path) -> AEModel:
    _, meta, arrays = serialization.read(path, "autoencoder")
    try:
        cfg = dict(meta["config"])
        cfg["hidden_dims"] = tuple(cfg["hidden_dims"])
        config = AEConfig(**cfg)
        M, N = int(meta["M"]), int(meta["N"])
    except (KeyError, TypeError, ConfigError) as exc:
        raise ModelFileError(f"bad autoencoder header: {exc}") from None
    if (M, N) != (config.input_dim, config.bottleneck_dim):
        raise ModelFileError("header M/N disagree with stored config")
    dims = _dims(M, N)
    layers = []
    for i in range(6):
        part, j = ("encoder", i) if i < 3 else ("decoder", i - 3)
        try:
            w = arrays[f"{part}.{j}.weights"]
            b = arrays[f"{part}.{j}.bias"]
        except KeyError as exc:
            raise ModelFileError(f"missing array {exc}") from None
        if w.shape != (dims[i + 1], dims[i]) or b.shape != (dims[i + 1],):
            raise ModelFileError(f"{part} layer {j}: stored shape {w.shape} does not match header M={M}, N={N}")
        layers.append(DenseLayer(w, b, _ACTS[i]))
    return AEModel(layers[:3], layers[3:], config)
