"""Minimal dense layers with hand-written backprop (numpy, float64).

Just enough machinery for the two small feedforward models in this package:
linear layers, per-unit PReLU, batch normalization with running statistics,
and sigmoid + binary cross entropy fused at the output. Every layer exposes
its parameters and gradients by name so finite-difference checks can sweep
them, and ``MLP`` serializes parameters in a declared order for model files.
"""
from __future__ import annotations

import numpy as np

from .errors import NumericalError

__all__ = ["Linear", "PReLU", "BatchNorm", "MLP", "sigmoid", "bce_with_logits"]


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def bce_with_logits(
    logits: np.ndarray, targets: np.ndarray, weights: np.ndarray | None = None
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean (optionally per-item weighted) BCE; returns (loss, dlogits, probs).

    Loss = mean_i w_i * BCE(sigmoid(z_i), t_i); gradients match that mean.
    """
    z = logits.reshape(-1)
    t = targets.reshape(-1)
    w = np.ones_like(z) if weights is None else weights.reshape(-1)
    # log(1+exp(-|z|)) + max(z,0) - z*t is the stable form of the BCE
    losses = np.log1p(np.exp(-np.abs(z))) + np.maximum(z, 0.0) - z * t
    loss = float(np.mean(w * losses))
    probs = sigmoid(z)
    dlogits = (w * (probs - t) / z.shape[0]).reshape(logits.shape)
    return loss, dlogits, probs


class Linear:
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        scale = np.sqrt(2.0 / in_dim)
        self.W = rng.standard_normal((in_dim, out_dim)) * scale
        self.b = np.zeros(out_dim)
        self.gW = np.zeros_like(self.W)
        self.gb = np.zeros_like(self.b)
        self._x: np.ndarray | None = None

    def forward(self, x: np.ndarray, training: bool) -> np.ndarray:
        if training:
            self._x = x
        return x @ self.W + self.b

    def backward(self, grad: np.ndarray) -> np.ndarray:
        self.gW += self._x.T @ grad
        self.gb += grad.sum(axis=0)
        return grad @ self.W.T

    def params(self) -> dict[str, np.ndarray]:
        return {"W": self.W, "b": self.b}

    def grads(self) -> dict[str, np.ndarray]:
        return {"W": self.gW, "b": self.gb}


class PReLU:
    def __init__(self, units: int, init_slope: float = 0.25):
        self.a = np.full(units, init_slope)
        self.ga = np.zeros_like(self.a)
        self._z: np.ndarray | None = None

    def forward(self, z: np.ndarray, training: bool) -> np.ndarray:
        if training:
            self._z = z
        return np.where(z > 0, z, self.a * z)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        z = self._z
        self.ga += np.sum(grad * np.where(z > 0, 0.0, z), axis=0)
        return grad * np.where(z > 0, 1.0, self.a)

    def params(self) -> dict[str, np.ndarray]:
        return {"a": self.a}

    def grads(self) -> dict[str, np.ndarray]:
        return {"a": self.ga}


class BatchNorm:
    """Per-unit batch normalization; EMA running statistics for inference."""

    def __init__(self, units: int, momentum: float = 0.9, eps: float = 1e-5):
        self.gamma = np.ones(units)
        self.beta = np.zeros(units)
        self.running_mean = np.zeros(units)
        self.running_var = np.ones(units)
        self.momentum = momentum
        self.eps = eps
        self.ggamma = np.zeros_like(self.gamma)
        self.gbeta = np.zeros_like(self.beta)
        self._cache = None

    def forward(self, x: np.ndarray, training: bool) -> np.ndarray:
        if training:
            mean = x.mean(axis=0)
            var = x.var(axis=0)  # biased, matching the backward pass
            inv_std = 1.0 / np.sqrt(var + self.eps)
            xhat = (x - mean) * inv_std
            self._cache = (x, mean, inv_std, xhat)
            self.running_mean = self.momentum * self.running_mean + (1 - self.momentum) * mean
            self.running_var = self.momentum * self.running_var + (1 - self.momentum) * var
            return self.gamma * xhat + self.beta
        xhat = (x - self.running_mean) / np.sqrt(self.running_var + self.eps)
        return self.gamma * xhat + self.beta

    def backward(self, grad: np.ndarray) -> np.ndarray:
        x, mean, inv_std, xhat = self._cache
        batch = x.shape[0]
        self.ggamma += np.sum(grad * xhat, axis=0)
        self.gbeta += grad.sum(axis=0)
        dxhat = grad * self.gamma
        dvar = np.sum(dxhat * (x - mean) * -0.5 * inv_std**3, axis=0)
        dmean = np.sum(-dxhat * inv_std, axis=0) + dvar * np.sum(-2.0 * (x - mean), axis=0) / batch
        return dxhat * inv_std + dvar * 2.0 * (x - mean) / batch + dmean / batch

    def params(self) -> dict[str, np.ndarray]:
        return {"gamma": self.gamma, "beta": self.beta}

    def grads(self) -> dict[str, np.ndarray]:
        return {"gamma": self.ggamma, "beta": self.gbeta}

    def stats(self) -> dict[str, np.ndarray]:
        return {"running_mean": self.running_mean, "running_var": self.running_var}


class MLP:
    """A layer stack ending in a single logit; sigmoid applied by callers."""

    def __init__(self, layers: list):
        self.layers = layers

    def forward(self, x: np.ndarray, training: bool) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x, training)
        if not np.all(np.isfinite(x)):
            raise NumericalError("non-finite activations in forward pass")
        return x

    def backward(self, grad: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def zero_grads(self):
        for _, g in self.named_grads():
            g.fill(0.0)

    def named_params(self) -> list[tuple[str, np.ndarray]]:
        out = []
        for i, layer in enumerate(self.layers):
            for name, arr in layer.params().items():
                out.append((f"{i}.{name}", arr))
        return out

    def named_grads(self) -> list[tuple[str, np.ndarray]]:
        out = []
        for i, layer in enumerate(self.layers):
            for name, arr in layer.grads().items():
                out.append((f"{i}.{name}", arr))
        return out

    def sgd_step(self, lr: float):
        for (_, p), (_, g) in zip(self.named_params(), self.named_grads()):
            p -= lr * g

    def serialize_arrays(self, order: list[str]) -> list[np.ndarray]:
        """Arrays (params plus batchnorm statistics) in the declared file order."""
        table = dict(self.named_params())
        for i, layer in enumerate(self.layers):
            if isinstance(layer, BatchNorm):
                for name, arr in layer.stats().items():
                    table[f"{i}.{name}"] = arr
        return [table[name] for name in order]

    def load_arrays(self, order: list[str], arrays: list[np.ndarray]):
        table = dict(self.named_params())
        for i, layer in enumerate(self.layers):
            if isinstance(layer, BatchNorm):
                for name, arr in layer.stats().items():
                    table[f"{i}.{name}"] = arr
        for name, incoming in zip(order, arrays):
            target = table[name]
            target[...] = incoming.reshape(target.shape)
