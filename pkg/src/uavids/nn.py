"""Dense layers, reverse-mode gradients and Adam, shared by the autoencoder
and the MLP classifier."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .numkernel import gaussian_matrix, tanh_map

ACTIVATIONS = ("tanh", "linear")


@dataclass
class DenseLayer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str = "tanh"

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ShapeError(
                f"bias shape {self.bias.shape} does not match weights {self.weights.shape}"
            )

    @property
    def n_in(self) -> int:
        return self.weights.shape[1]

    @property
    def n_out(self) -> int:
        return self.weights.shape[0]

    @property
    def n_params(self) -> int:
        return self.weights.size + self.bias.size

    def copy(self) -> "DenseLayer":
        return DenseLayer(self.weights.copy(), self.bias.copy(), self.activation)


def init_layer(rng, n_in: int, n_out: int, activation: str) -> DenseLayer:
    """Gaussian weights with stddev sqrt(1/fan_in), zero bias."""
    w = gaussian_matrix(rng, n_out, n_in, np.sqrt(1.0 / n_in))
    return DenseLayer(w, np.zeros(n_out), activation)


def forward_stack(layers, X: np.ndarray):
    """Run a batch (rows = samples) through ``layers``.

    Returns the list of activations, ``acts[0] == X`` and ``acts[-1]`` the
    output; the intermediate entries are kept for :func:`backward_stack`.
    """
    acts = [X]
    a = X
    for layer in layers:
        z = a @ layer.weights.T + layer.bias
        a = tanh_map(z) if layer.activation == "tanh" else z
        acts.append(a)
    return acts


def backward_stack(layers, acts, grad_out: np.ndarray):
    """Gradients of a scalar loss given dLoss/dOutput for the stack.

    Returns ``[(dW, db), ...]`` aligned with ``layers``.
    """
    grads = [None] * len(layers)
    delta = grad_out
    for i in range(len(layers) - 1, -1, -1):
        layer = layers[i]
        if layer.activation == "tanh":
            a = acts[i + 1]
            delta = delta * (1.0 - a * a)
        grads[i] = (delta.T @ acts[i], delta.sum(axis=0))
        if i:
            delta = delta @ layer.weights
    return grads


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    @classmethod
    def for_layers(cls, layers, **hyper) -> "AdamState":
        state = cls(**hyper)
        for layer in layers:
            state.m.append((np.zeros_like(layer.weights), np.zeros_like(layer.bias)))
            state.v.append((np.zeros_like(layer.weights), np.zeros_like(layer.bias)))
        return state


def adam_step(layers, grads, state: AdamState) -> None:
    """Bias-corrected Adam update, applied to ``layers`` in place."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** state.t
    c2 = 1.0 - b2 ** state.t
    for layer, (gw, gb), m, v in zip(layers, grads, state.m, state.v):
        for param, g, mi, vi in ((layer.weights, gw, m[0], v[0]), (layer.bias, gb, m[1], v[1])):
            if g.shape != param.shape:
                raise ShapeError(f"gradient shape {g.shape} != parameter shape {param.shape}")
            mi *= b1
            mi += (1.0 - b1) * g
            vi *= b2
            vi += (1.0 - b2) * (g * g)
            param -= state.lr * (mi / c1) / (np.sqrt(vi / c2) + state.eps)


def snapshot(layers):
    return [layer.copy() for layer in layers]


def restore(layers, saved) -> None:
    for layer, s in zip(layers, saved):
        layer.weights[...] = s.weights
        layer.bias[...] = s.bias
