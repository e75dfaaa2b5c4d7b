"""Constant-step (sub)gradient descent with the sign-flip check.

Each iteration first replaces the iterate by its negation when that
strictly lowers the objective (the flip steers runs away from the
spurious attractor on the negative ray), then takes an explicit gradient
step on the active quadratic piece.  Stops when the direction norm falls
below grad_tol or after max_iters steps.
"""

from dataclasses import dataclass

import numpy as np

from .generator import apply_jacobian_transpose, forward
from .numerics import STREAM_INIT, gaussian_vector, substream

MACHINE_EPS = float(np.finfo(np.float64).eps)
DEFAULT_MAX_ITERS = 50000


class DivergedError(RuntimeError):
    """Non-finite objective or direction; carries the trace so far."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def default_step_size(d):
    """Step size 2^d / d^2 for a depth-d network."""
    if d < 1:
        raise ValueError(f"depth must be >= 1, got {d}")
    return 2.0 ** d / d ** 2


@dataclass(frozen=True)
class SolverConfig:
    """Solver knobs.

    x0 takes precedence when given; otherwise the start point has
    i.i.d. N(0, 1/k) entries drawn from init_seed.  grad_tol defaults to
    float64 machine epsilon and max_iters to 50000.
    """

    step_size: float
    max_iters: int = DEFAULT_MAX_ITERS
    grad_tol: float = MACHINE_EPS
    negation_check: bool = True
    x0: np.ndarray = None
    init_seed: int = 0

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.grad_tol < 0:
            raise ValueError(f"grad_tol must be >= 0, got {self.grad_tol}")


@dataclass
class IterateTrace:
    """Per-iteration records plus the termination reason."""

    f_values: np.ndarray
    grad_norms: np.ndarray
    negated: np.ndarray
    rel_errors: np.ndarray
    termination: str
    perturbed_iters: tuple = ()

    def __len__(self):
        return len(self.f_values)

    def to_csv_text(self):
        lines = ["iter,f,grad_norm,negated,rel_err"]
        for i in range(len(self.f_values)):
            lines.append(
                f"{i},{self.f_values[i]:.11e},{self.grad_norms[i]:.11e},"
                f"{int(self.negated[i])},{self.rel_errors[i]:.11e}"
            )
        return "\n".join(lines) + "\n"

    def save_csv(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_csv_text())


@dataclass
class SolveResult:
    x_hat: np.ndarray
    trace: IterateTrace
    signal: np.ndarray

    @property
    def final_relative_error(self):
        return float(self.trace.rel_errors[-1])


def _initial_point(p, cfg):
    if cfg.x0 is not None:
        x = np.asarray(cfg.x0, dtype=np.float64).copy()
        if x.shape != (p.latent_dim,):
            raise ValueError(
                f"x0 has dim {x.shape}, problem expects ({p.latent_dim},)"
            )
    else:
        rng = substream(cfg.init_seed, STREAM_INIT)
        x = gaussian_vector(p.latent_dim, 1.0 / p.latent_dim, rng)
    if not np.any(x):
        x = _zero_escape(p, scale=1.0)
    return x


def _zero_escape(p, scale):
    # deterministic nudge off the origin, where the direction is undefined
    v = np.ones(p.latent_dim)
    return (1e-12 * scale / np.linalg.norm(v)) * v


def _evaluate(p, x):
    """Objective value, residual, and activation pattern at x."""
    signal, pattern = forward(p.net, x)
    r = p.A @ signal - p.y
    return 0.5 * float(r @ r), r, pattern


def solve(p, cfg):
    """Run the descent on a recovery problem; returns the full trace."""
    x = _initial_point(p, cfg)
    xstar = p.ground_truth
    xstar_norm = float(np.linalg.norm(xstar)) if xstar is not None else None

    f_values, grad_norms, negated_flags, rel_errors = [], [], [], []
    perturbed = []

    def trace(termination):
        return IterateTrace(
            f_values=np.asarray(f_values),
            grad_norms=np.asarray(grad_norms),
            negated=np.asarray(negated_flags, dtype=bool),
            rel_errors=np.asarray(rel_errors),
            termination=termination,
            perturbed_iters=tuple(perturbed),
        )

    for i in range(cfg.max_iters + 1):
        f_x, r, pattern = _evaluate(p, x)
        negated = False
        if cfg.negation_check:
            f_neg, r_neg, pattern_neg = _evaluate(p, -x)
            if f_neg < f_x:
                negated = True
                x = -x
                f_x, r, pattern = f_neg, r_neg, pattern_neg
        v = apply_jacobian_transpose(p.net, pattern, p.A.T @ r)
        grad_norm = float(np.linalg.norm(v))

        f_values.append(f_x)
        grad_norms.append(grad_norm)
        negated_flags.append(negated)
        if xstar is not None:
            rel_errors.append(float(np.linalg.norm(x - xstar)) / xstar_norm)
        else:
            rel_errors.append(float("nan"))

        if not np.isfinite(f_x) or not np.isfinite(grad_norm):
            raise DivergedError(
                f"non-finite objective or direction at iteration {i}",
                trace("diverged"),
            )
        if grad_norm < cfg.grad_tol:
            return _finish(p, x, trace("gradient-tol"))
        if i == cfg.max_iters:
            return _finish(p, x, trace("max-iters"))

        x = x - cfg.step_size * v
        if not np.any(x):
            scale = xstar_norm if xstar_norm else float(np.linalg.norm(v))
            x = x + _zero_escape(p, scale=scale or 1.0)
            perturbed.append(i + 1)


def _finish(p, x, trace):
    signal, _ = forward(p.net, x)
    return SolveResult(x_hat=x, trace=trace, signal=signal)
