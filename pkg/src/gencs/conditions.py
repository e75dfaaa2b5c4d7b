"""Sampled estimators for the two deviation constants the recovery
guarantees rest on: how far masked row Grams of a weight matrix sit from
their expectation, and how far a measurement matrix is from an isometry
on differences of generator outputs.

Both quantities are defined as suprema over all nonzero inputs, which is
not checkable exactly; these estimators report the max over a seeded
sample (a lower bound on the true constant) plus fixed degenerate
geometries included deterministically.
"""

from dataclasses import dataclass

import numpy as np

from .generator import forward
from .landscape import q_matrix
from .numerics import STREAM_SAMPLE, spectral_norm, substream

DEGENERATE_NORM_TOL = 1e-12
DEFAULT_NUM_SAMPLES = 200


class DegenerateSamplesError(RuntimeError):
    """Every sampled tuple had a vanishing generator difference."""


@dataclass(frozen=True)
class ConditionReport:
    """Sampled lower bound on a deviation constant.

    max_deviation is a max over the listed samples only; witness holds the
    sampled points achieving it.  Reports are bit-reproducible given the
    same inputs, seed, and sample count.
    """

    kind: str
    samples: int
    max_deviation: float
    witness: tuple
    seed: int
    sample_indices: np.ndarray
    deviations: np.ndarray
    num_discarded: int = 0

    def to_csv_text(self):
        lines = ["sample_index,deviation"]
        for idx, dev in zip(self.sample_indices, self.deviations):
            lines.append(f"{idx},{dev:.11e}")
        return "\n".join(lines) + "\n"

    def summary(self):
        return {
            "kind": self.kind,
            "samples": int(self.samples),
            "max_deviation": float(self.max_deviation),
            "seed": int(self.seed),
        }


def _sphere_point(rng, k):
    while True:
        v = rng.standard_normal(k)
        n = np.linalg.norm(v)
        if n > 0:
            return v / n


def wdc_pair_deviation(W, x, y):
    """||sum over rows active for both x and y of w w^T - Q_{x,y}||.

    Depends on x and y only through their directions.
    """
    W = np.asarray(W, dtype=np.float64)
    mask = (W @ x > 0) & (W @ y > 0)
    active = W[mask]
    gram = active.T @ active if active.shape[0] else np.zeros((W.shape[1],) * 2)
    diff = gram - q_matrix(x, y)
    if not np.any(diff):
        return 0.0
    # deviation matrices often carry near-degenerate +/- eigenvalue pairs,
    # which slow the convergence certificate; the matrices are only k x k,
    # so a generous sweep budget is cheap
    return spectral_norm(diff, max_iter=200000)


def _wdc_canonical_pairs(k):
    e1 = np.zeros(k)
    e1[0] = 1.0
    pairs = [(e1, e1), (e1, -e1)]
    if k >= 2:
        e2 = np.zeros(k)
        e2[1] = 1.0
        pairs.append((e1, e2))
    return pairs


def wdc_deviation(W, num_samples=DEFAULT_NUM_SAMPLES, seed=0):
    """Sampled weight-distribution deviation of one weight matrix.

    Evaluates the fixed pairs (e1, e1), (e1, -e1), (e1, e2) and then
    num_samples pairs drawn uniformly on the sphere, each from its own
    substream so nested sample counts give nested sample sets.
    """
    if num_samples < 1:
        raise ValueError(f"num_samples must be >= 1, got {num_samples}")
    W = np.asarray(W, dtype=np.float64)
    k = W.shape[1]

    evaluations = list(_wdc_canonical_pairs(k))
    for j in range(num_samples):
        rng = substream(seed, STREAM_SAMPLE, j)
        evaluations.append((_sphere_point(rng, k), _sphere_point(rng, k)))

    deviations = np.array([wdc_pair_deviation(W, x, y) for x, y in evaluations])
    best = int(np.argmax(deviations))
    return ConditionReport(
        kind="WDC",
        samples=num_samples,
        max_deviation=float(deviations[best]),
        witness=evaluations[best],
        seed=seed,
        sample_indices=np.arange(len(evaluations)),
        deviations=deviations,
    )


def rric_tuple_deviation(A, u, v):
    """Normalized isometry defect of A on the difference pair (u, v)."""
    Au = A @ u
    Av = A @ v
    return abs(float(Au @ Av) - float(u @ v)) / (
        np.linalg.norm(u) * np.linalg.norm(v)
    )


def rric_deviation(A, net, num_samples=DEFAULT_NUM_SAMPLES, seed=0):
    """Sampled range-restricted isometry deviation of A with respect to net.

    Each sample draws four sphere points, forms the two generator-output
    differences, and evaluates the defect of the cross pair together with
    the two self pairs (the self pairs cover the parallel geometry, where
    pure rescalings of A show up at full strength).  Tuples with a
    vanishing difference are discarded.
    """
    if num_samples < 1:
        raise ValueError(f"num_samples must be >= 1, got {num_samples}")
    A = np.asarray(A, dtype=np.float64)
    k = net.input_dim

    indices, deviations, witnesses = [], [], []
    discarded = 0
    for j in range(num_samples):
        rng = substream(seed, STREAM_SAMPLE, j)
        points = [_sphere_point(rng, k) for _ in range(4)]
        outputs = [forward(net, z)[0] for z in points]
        u = outputs[0] - outputs[1]
        v = outputs[2] - outputs[3]
        if (
            np.linalg.norm(u) < DEGENERATE_NORM_TOL
            or np.linalg.norm(v) < DEGENERATE_NORM_TOL
        ):
            discarded += 1
            continue
        dev = max(
            rric_tuple_deviation(A, u, v),
            rric_tuple_deviation(A, u, u),
            rric_tuple_deviation(A, v, v),
        )
        indices.append(j)
        deviations.append(dev)
        witnesses.append(tuple(points))

    if not deviations:
        raise DegenerateSamplesError(
            f"all {num_samples} sampled tuples had vanishing differences"
        )
    deviations = np.asarray(deviations)
    best = int(np.argmax(deviations))
    return ConditionReport(
        kind="RRIC",
        samples=num_samples,
        max_deviation=float(deviations[best]),
        witness=witnesses[best],
        seed=seed,
        sample_indices=np.asarray(indices),
        deviations=deviations,
        num_discarded=discarded,
    )
