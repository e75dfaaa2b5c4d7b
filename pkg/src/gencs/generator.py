"""Expansive ReLU generator: forward pass, activation masks, and the
row-masked weight product that acts as the local Jacobian.

A network is a chain of bias-free dense layers with entrywise
relu(a) = max(a, 0).  A unit is active only when its pre-activation is
strictly positive; an exact zero zeroes the corresponding row.
"""

import json
from dataclasses import dataclass

import numpy as np

from .numerics import STREAM_WEIGHTS, gaussian_matrix, substream

VARIANCE_RULE_ONE_OVER_ROWS = "one_over_rows"


@dataclass(frozen=True)
class ActivationPattern:
    """Strict-positivity masks of every layer's pre-activations."""

    masks: tuple

    def __iter__(self):
        return iter(self.masks)

    def __len__(self):
        return len(self.masks)

    def __getitem__(self, i):
        return self.masks[i]


@dataclass(frozen=True)
class GeneratorNetwork:
    """Bias-free ReLU network defined by its per-layer weight matrices.

    weights[i] has shape (n_{i+1}, n_i); consecutive shapes must chain.
    Instances are immutable and safe to share across threads.
    """

    weights: tuple

    def __post_init__(self):
        if len(self.weights) < 1:
            raise ValueError("network needs at least one layer")
        for i, W in enumerate(self.weights):
            if W.ndim != 2:
                raise ValueError(f"layer {i} weight is not a matrix")
            if not np.all(np.isfinite(W)):
                raise ValueError(f"layer {i} weight has non-finite entries")
            if i > 0 and W.shape[1] != self.weights[i - 1].shape[0]:
                raise ValueError(
                    f"layer {i} expects input dim {W.shape[1]}, "
                    f"previous layer outputs {self.weights[i - 1].shape[0]}"
                )

    @property
    def depth(self):
        return len(self.weights)

    @property
    def input_dim(self):
        return self.weights[0].shape[1]

    @property
    def output_dim(self):
        return self.weights[-1].shape[0]

    @property
    def layer_dims(self):
        """[input_dim, n_1, ..., n_d]."""
        return [self.input_dim] + [W.shape[0] for W in self.weights]

    @classmethod
    def random(cls, layer_dims, seed, variance_rule=VARIANCE_RULE_ONE_OVER_ROWS):
        """Network with layer i drawn i.i.d. N(0, 1/n_i), n_i = rows of layer i.

        Weights are derived deterministically from (layer_dims, seed), so a
        network never needs to be stored beyond this recipe.
        """
        if variance_rule != VARIANCE_RULE_ONE_OVER_ROWS:
            raise ValueError(f"unknown variance rule: {variance_rule!r}")
        if len(layer_dims) < 2:
            raise ValueError("layer_dims needs an input dim and one layer")
        weights = []
        for i in range(1, len(layer_dims)):
            rows, cols = layer_dims[i], layer_dims[i - 1]
            rng = substream(seed, STREAM_WEIGHTS, i)
            weights.append(gaussian_matrix(rows, cols, 1.0 / rows, rng))
        return cls(weights=tuple(weights))

    def to_spec(self, seed):
        """JSON-serializable recipe sufficient to regenerate the weights."""
        return {
            "dims": self.layer_dims,
            "seed": int(seed),
            "variance_rule": VARIANCE_RULE_ONE_OVER_ROWS,
        }

    @classmethod
    def from_spec(cls, spec):
        return cls.random(
            list(spec["dims"]),
            int(spec["seed"]),
            spec.get("variance_rule", VARIANCE_RULE_ONE_OVER_ROWS),
        )

    def save_spec(self, path, seed):
        with open(path, "w") as fh:
            json.dump(self.to_spec(seed), fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load_spec(cls, path):
        with open(path) as fh:
            return cls.from_spec(json.load(fh))


def forward(net, x):
    """Network output G(x) together with every layer's activation mask."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise ValueError(
            f"input has dim {x.shape}, network expects ({net.input_dim},)"
        )
    h = x
    masks = []
    for W in net.weights:
        pre = W @ h
        mask = pre > 0
        h = np.where(mask, pre, 0.0)
        masks.append(mask)
    return h, ActivationPattern(masks=tuple(masks))


def masked_weights(W, preactivation):
    """Copy of W with row j zeroed wherever preactivation[j] <= 0."""
    W = np.asarray(W, dtype=np.float64)
    pre = np.asarray(preactivation, dtype=np.float64)
    if W.shape[0] != pre.shape[0]:
        raise ValueError(
            f"matrix has {W.shape[0]} rows, preactivation has dim {pre.shape[0]}"
        )
    return np.where((pre > 0)[:, None], W, 0.0)


def active_product(net, x):
    """Explicit (output_dim, input_dim) product of the row-masked layers.

    This is the Jacobian of the network on the linear piece containing x.
    Intended for diagnostics; solvers apply the masked layers sequentially
    instead of forming the product.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise ValueError(
            f"input has dim {x.shape}, network expects ({net.input_dim},)"
        )
    if not np.any(x):
        raise ValueError("active_product requires a nonzero input")
    _, pattern = forward(net, x)
    product = np.eye(net.input_dim)
    for W, mask in zip(net.weights, pattern):
        product = np.where(mask[:, None], W, 0.0) @ product
    return product


def apply_jacobian_transpose(net, pattern, v):
    """Apply the transpose of the masked layer product to an output vector."""
    g = np.asarray(v, dtype=np.float64)
    for W, mask in zip(reversed(net.weights), reversed(pattern.masks)):
        g = W.T @ np.where(mask, g, 0.0)
    return g
