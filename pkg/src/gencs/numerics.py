"""Dense float64 substrate: seeded Gaussian sampling, derived random
substreams, and power-iteration spectral norm estimation.

Matrices and vectors throughout the package are plain numpy float64
arrays, treated as immutable after construction.
"""

import numpy as np

# Fixed tags for deriving independent substreams from a base seed.
# These are part of the reproducibility contract: changing them changes
# every seeded artifact the package produces.
STREAM_WEIGHTS = 0
STREAM_MEASUREMENT = 1
STREAM_SIGNAL = 2
STREAM_NOISE = 3
STREAM_INIT = 4
STREAM_SAMPLE = 5
STREAM_PERTURBATION = 6

_POWER_ITER_SEED = 0x5EC7_0001


class SpectralNormError(RuntimeError):
    """Power iteration failed to converge; carries the last estimate."""

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


def make_rng(seed):
    """Seeded generator; identical seed gives an identical stream."""
    return np.random.default_rng(np.random.SeedSequence(seed))


def substream(seed, *path):
    """Independent generator derived from (seed, path of small ints).

    Built on numpy's SeedSequence spawn keys, so any (seed, path) pair can
    be reproduced in isolation without running through sibling streams.
    """
    if any(p < 0 for p in path):
        raise ValueError(f"substream path must be non-negative, got {path}")
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=tuple(path))
    )


def gaussian_matrix(rows, cols, variance, rng):
    """Dense (rows, cols) matrix with i.i.d. N(0, variance) entries."""
    if rows < 1 or cols < 1:
        raise ValueError(f"dimensions must be positive, got {rows}x{cols}")
    if variance <= 0:
        raise ValueError(f"variance must be positive, got {variance}")
    return np.sqrt(variance) * rng.standard_normal((rows, cols))


def gaussian_vector(dim, variance, rng):
    """Length-dim vector with i.i.d. N(0, variance) entries."""
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    if variance <= 0:
        raise ValueError(f"variance must be positive, got {variance}")
    return np.sqrt(variance) * rng.standard_normal(dim)


def spectral_norm(M, tol=1e-10, max_iter=5000):
    """Largest singular value of M by power iteration on the Gram matrix.

    The iteration runs on the smaller of M^T M and M M^T with a
    deterministic seeded start vector, so repeated calls on the same
    matrix return identical values.  Raises SpectralNormError (carrying
    the last estimate) if the relative change in the squared estimate
    does not drop below tol within max_iter sweeps.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim == 1:
        M = M[None, :]
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if not np.any(M):
        raise ValueError("spectral_norm requires a nonzero matrix")

    if M.shape[0] < M.shape[1]:
        gram = M @ M.T
    else:
        gram = M.T @ M
    k = gram.shape[0]

    rng = np.random.default_rng(_POWER_ITER_SEED)
    v = rng.standard_normal(k)
    v /= np.linalg.norm(v)

    rayleigh = 0.0
    for _ in range(max_iter):
        w = gram @ v
        rayleigh = float(v @ w)
        if rayleigh == 0.0:
            # start vector landed in the kernel; restart off a fresh draw
            v = rng.standard_normal(k)
            v /= np.linalg.norm(v)
            continue
        # eigenvalue residual certifies the estimate even when the top of
        # the spectrum is nearly degenerate and the iterate cannot settle
        if np.linalg.norm(w - rayleigh * v) <= tol * rayleigh:
            return float(np.sqrt(rayleigh))
        v = w / np.linalg.norm(w)
    raise SpectralNormError(
        f"power iteration did not converge in {max_iter} sweeps",
        estimate=float(np.sqrt(rayleigh)),
    )
