"""Empirical risk f(x) = 0.5 * ||A G(x) - y||^2, its explicit step
direction on the active linear piece, and a finite-difference oracle.
"""

from dataclasses import dataclass

import numpy as np

from .generator import apply_jacobian_transpose, forward


@dataclass(frozen=True)
class RecoveryProblem:
    """Measurement setup y = A G(x_*) + e with optional ground truth.

    ground_truth and noise are carried for diagnostics (relative errors,
    noiseless references); the solver itself only uses net, A, and y.
    """

    net: object
    A: np.ndarray
    y: np.ndarray
    ground_truth: np.ndarray = None
    noise: np.ndarray = None

    def __post_init__(self):
        if self.A.ndim != 2 or self.A.shape[1] != self.net.output_dim:
            raise ValueError(
                f"measurement matrix {self.A.shape} does not match "
                f"network output dim {self.net.output_dim}"
            )
        if self.y.shape != (self.A.shape[0],):
            raise ValueError(
                f"observation dim {self.y.shape} does not match "
                f"{self.A.shape[0]} measurement rows"
            )
        for name, v in (("A", self.A), ("y", self.y)):
            if not np.all(np.isfinite(v)):
                raise ValueError(f"{name} has non-finite entries")
        if self.ground_truth is not None and self.noise is not None:
            signal, _ = forward(self.net, self.ground_truth)
            resid = self.y - (self.A @ signal + self.noise)
            scale = max(float(np.linalg.norm(self.y)), 1.0)
            if np.linalg.norm(resid) > 1e-9 * scale:
                raise ValueError(
                    "y is inconsistent with A G(ground_truth) + noise"
                )

    @property
    def num_measurements(self):
        return self.A.shape[0]

    @property
    def latent_dim(self):
        return self.net.input_dim


def risk_value(p, x):
    """0.5 * ||A G(x) - y||^2."""
    signal, _ = forward(p.net, x)
    r = p.A @ signal - p.y
    return 0.5 * float(r @ r)


def step_direction(p, x):
    """Gradient of the active quadratic piece at x.

    Computed as a forward pass, residual, then backward application of the
    masked layer transposes.  At the measure-zero set where some
    pre-activation is exactly zero this returns the strict-mask direction
    rather than an element of the full subdifferential hull.
    """
    x = np.asarray(x, dtype=np.float64)
    if not np.any(x):
        raise ValueError("step direction is undefined at x = 0")
    signal, pattern = forward(p.net, x)
    r = p.A @ signal - p.y
    return apply_jacobian_transpose(p.net, pattern, p.A.T @ r)


def finite_difference_gradient(p, x, h):
    """Coordinate-wise central differences of the risk, step h."""
    if h <= 0:
        raise ValueError(f"step size must be positive, got {h}")
    x = np.asarray(x, dtype=np.float64)
    grad = np.empty_like(x)
    for j in range(x.shape[0]):
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        grad[j] = (risk_value(p, xp) - risk_value(p, xm)) / (2.0 * h)
    return grad
