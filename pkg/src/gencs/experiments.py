"""Monte Carlo harness: seeded synthetic instances, recovery sweeps over
the latent dimension at several noise levels, shared-randomness
convergence traces, and the sign-flip escape study.

Seed discipline: every trial owns a seed derived from
(base_seed, k, noise level, trial index), so any single sweep cell can be
rerun in isolation and reproduce its trials bit-exactly.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .landscape import rho
from .numerics import (
    STREAM_MEASUREMENT,
    STREAM_NOISE,
    STREAM_PERTURBATION,
    STREAM_SIGNAL,
    gaussian_matrix,
    substream,
)
from .generator import GeneratorNetwork, forward
from .risk import RecoveryProblem
from .solver import (
    DEFAULT_MAX_ITERS,
    MACHINE_EPS,
    SolverConfig,
    default_step_size,
    solve,
)

# Reserved noise-level keys for seed derivation (must stay clear of any
# encoded dB value).
_SNR_KEY_INF = 2 ** 32 - 1
_TRACE_KEY = 2 ** 32 - 2
_ESCAPE_KEY = 2 ** 32 - 3


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep protocol: dimensions, noise levels, trial count, seeds.

    hidden_dims lists the layer widths after the input, so the network
    depth is len(hidden_dims).  snr_db entries use math.inf for noiseless
    cells.  step_size None means 2^d / d^2.
    """

    k_values: tuple
    hidden_dims: tuple
    m: int
    snr_db: tuple = (math.inf,)
    trials: int = 30
    base_seed: int = 0
    step_size: float = None
    max_iters: int = DEFAULT_MAX_ITERS
    grad_tol: float = MACHINE_EPS
    negation_check: bool = True
    success_threshold: float = 1e-3

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.success_threshold <= 0:
            raise ValueError(
                f"success_threshold must be positive, got {self.success_threshold}"
            )
        if not self.k_values:
            raise ValueError("k_values must be nonempty")
        if not self.hidden_dims:
            raise ValueError("hidden_dims must be nonempty")

    @property
    def depth(self):
        return len(self.hidden_dims)

    def resolved_step_size(self):
        if self.step_size is not None:
            return self.step_size
        return default_step_size(self.depth)

    def solver_config(self, init_seed, negation_check=None, x0=None):
        return SolverConfig(
            step_size=self.resolved_step_size(),
            max_iters=self.max_iters,
            grad_tol=self.grad_tol,
            negation_check=(
                self.negation_check if negation_check is None else negation_check
            ),
            x0=x0,
            init_seed=init_seed,
        )

    def to_json_dict(self):
        return {
            "k_values": list(self.k_values),
            "hidden_dims": list(self.hidden_dims),
            "m": self.m,
            "snr_db": ["inf" if math.isinf(s) else s for s in self.snr_db],
            "trials": self.trials,
            "base_seed": self.base_seed,
            "step_size": self.step_size,
            "max_iters": self.max_iters,
            "grad_tol": self.grad_tol,
            "negation_check": self.negation_check,
            "success_threshold": self.success_threshold,
        }

    @classmethod
    def from_json_dict(cls, data):
        known = {
            "k_values",
            "hidden_dims",
            "m",
            "snr_db",
            "trials",
            "base_seed",
            "step_size",
            "max_iters",
            "grad_tol",
            "negation_check",
            "success_threshold",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        kwargs["k_values"] = tuple(int(k) for k in data["k_values"])
        kwargs["hidden_dims"] = tuple(int(n) for n in data["hidden_dims"])
        if "snr_db" in data:
            kwargs["snr_db"] = tuple(_parse_snr(s) for s in data["snr_db"])
        return cls(**kwargs)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def _parse_snr(value):
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        raise ValueError(f"bad SNR value: {value!r}")
    return float(value)


def format_snr(snr_db):
    if math.isinf(snr_db):
        return "inf"
    if snr_db == int(snr_db):
        return str(int(snr_db))
    return repr(snr_db)


def _snr_key(snr_db):
    if math.isinf(snr_db):
        return _SNR_KEY_INF
    return int(round(snr_db * 1e6)) % (2 ** 32 - 4)


def trial_seed(base_seed, k, snr_db, trial):
    """64-bit seed for one trial, reproducible in isolation."""
    ss = np.random.SeedSequence(
        base_seed, spawn_key=(int(k), _snr_key(snr_db), int(trial))
    )
    return int(ss.generate_state(1, np.uint64)[0])


def make_problem(k, layer_dims, m, snr_db, seed):
    """Synthetic recovery instance, fully determined by the seed.

    Layer i weights are N(0, 1/n_i), the measurement matrix is N(0, 1/m),
    and the ground truth is standard normal.  Noise is a standard normal
    vector rescaled so 10 log10(||A G(x_*)|| / ||e||) equals snr_db;
    math.inf gives exactly e = 0.
    """
    if k < 1 or m < 1 or any(n < 1 for n in layer_dims):
        raise ValueError(
            f"invalid dimensions k={k}, layer_dims={layer_dims}, m={m}"
        )
    net = GeneratorNetwork.random([int(k)] + [int(n) for n in layer_dims], seed)
    A = gaussian_matrix(m, net.output_dim, 1.0 / m, substream(seed, STREAM_MEASUREMENT))
    xstar = substream(seed, STREAM_SIGNAL).standard_normal(k)
    signal, _ = forward(net, xstar)
    clean = A @ signal
    if math.isinf(snr_db):
        e = np.zeros(m)
        y = clean
    else:
        raw = substream(seed, STREAM_NOISE).standard_normal(m)
        tau = float(np.linalg.norm(clean)) * 10.0 ** (-snr_db / 10.0)
        e = tau * raw / np.linalg.norm(raw)
        y = clean + e
    return RecoveryProblem(net=net, A=A, y=y, ground_truth=xstar, noise=e)


@dataclass(frozen=True)
class TrialResult:
    k: int
    snr_db: float
    seed: int
    rel_error: float
    iterations: int
    success: bool
    termination: str


def run_trial(cfg, k, snr_db, trial):
    seed = trial_seed(cfg.base_seed, k, snr_db, trial)
    problem = make_problem(k, cfg.hidden_dims, cfg.m, snr_db, seed)
    result = solve(problem, cfg.solver_config(init_seed=seed))
    rel_error = result.final_relative_error
    return TrialResult(
        k=k,
        snr_db=snr_db,
        seed=seed,
        rel_error=rel_error,
        iterations=len(result.trace) - 1,
        success=bool(rel_error < cfg.success_threshold),
        termination=result.trace.termination,
    )


@dataclass(frozen=True)
class SweepRow:
    k: int
    snr_db: float
    trials: int
    successes: int
    success_prob: float
    mean_rel_err_successful: float


@dataclass(frozen=True)
class SweepTable:
    rows: tuple

    def to_csv_text(self):
        lines = ["k,snr_db,trials,successes,success_prob,mean_rel_err_successful"]
        for r in self.rows:
            lines.append(
                f"{r.k},{format_snr(r.snr_db)},{r.trials},{r.successes},"
                f"{r.success_prob:.11e},{r.mean_rel_err_successful:.11e}"
            )
        return "\n".join(lines) + "\n"

    def row_for(self, k, snr_db):
        for r in self.rows:
            if r.k == k and (
                r.snr_db == snr_db
                or (math.isinf(r.snr_db) and math.isinf(snr_db))
            ):
                return r
        raise KeyError(f"no row for k={k}, snr_db={snr_db}")


def _aggregate_cell(k, snr_db, results):
    good = [t.rel_error for t in results if t.success]
    return SweepRow(
        k=k,
        snr_db=snr_db,
        trials=len(results),
        successes=len(good),
        success_prob=len(good) / len(results),
        mean_rel_err_successful=(
            float(np.mean(good)) if good else float("nan")
        ),
    )


def _sweep_cell(cfg, k, snr_db):
    results = [run_trial(cfg, k, snr_db, t) for t in range(cfg.trials)]
    # trials carry their index implicitly; the aggregate is order-free
    return _aggregate_cell(k, snr_db, results)


def success_sweep(cfg):
    """Noiseless recovery probability for each latent dimension."""
    return SweepTable(
        rows=tuple(_sweep_cell(cfg, k, math.inf) for k in cfg.k_values)
    )


def noise_error_sweep(cfg):
    """Mean relative error of successful runs per (k, noise level).

    Failed trials are excluded from the mean but counted in the trials and
    successes columns, so every reported average has an auditable
    denominator.  Noiseless cells reuse the seeds of success_sweep.
    """
    if not cfg.snr_db:
        raise ValueError("snr_db must be nonempty")
    rows = []
    for k in cfg.k_values:
        for snr_db in cfg.snr_db:
            rows.append(_sweep_cell(cfg, k, snr_db))
    return SweepTable(rows=tuple(rows))


def convergence_trace(cfg):
    """Per-noise-level traces of one instance with shared randomness.

    Requires a single k.  The weights, measurement matrix, ground truth,
    raw noise direction, and starting point are identical across noise
    levels; only the noise magnitude differs.
    """
    if len(cfg.k_values) != 1:
        raise ValueError("convergence_trace expects exactly one k value")
    k = cfg.k_values[0]
    ss = np.random.SeedSequence(cfg.base_seed, spawn_key=(int(k), _TRACE_KEY, 0))
    seed = int(ss.generate_state(1, np.uint64)[0])
    traces = {}
    for snr_db in cfg.snr_db:
        problem = make_problem(k, cfg.hidden_dims, cfg.m, snr_db, seed)
        result = solve(problem, cfg.solver_config(init_seed=seed))
        traces[snr_db] = result.trace
    return traces


@dataclass(frozen=True)
class EscapeTrial:
    seed: int
    rel_error_negation_on: float
    rel_error_negation_off: float
    success_negation_on: bool
    success_negation_off: bool


@dataclass(frozen=True)
class NegationEscapeReport:
    trials: tuple
    perturbation_scale: float

    @property
    def on_rate(self):
        return sum(t.success_negation_on for t in self.trials) / len(self.trials)

    @property
    def off_rate(self):
        return sum(t.success_negation_off for t in self.trials) / len(self.trials)


def negation_escape_test(cfg, perturbation_scale):
    """Success rates with and without the sign-flip check when started
    next to the spurious point on the negative ray.

    Each trial starts both arms from the same x0 = -rho_d x_* + delta,
    with ||delta|| = perturbation_scale * ||x_*||, on the same noiseless
    instance.
    """
    if len(cfg.k_values) != 1:
        raise ValueError("negation_escape_test expects exactly one k value")
    k = cfg.k_values[0]
    rho_d = rho(cfg.depth)
    trials = []
    for t in range(cfg.trials):
        ss = np.random.SeedSequence(
            cfg.base_seed, spawn_key=(int(k), _ESCAPE_KEY, int(t))
        )
        seed = int(ss.generate_state(1, np.uint64)[0])
        problem = make_problem(k, cfg.hidden_dims, cfg.m, math.inf, seed)
        xstar = problem.ground_truth
        delta = substream(seed, STREAM_PERTURBATION).standard_normal(k)
        delta *= perturbation_scale * np.linalg.norm(xstar) / np.linalg.norm(delta)
        x0 = -rho_d * xstar + delta

        outcomes = {}
        for flip in (True, False):
            result = solve(
                problem,
                cfg.solver_config(init_seed=seed, negation_check=flip, x0=x0),
            )
            outcomes[flip] = result.final_relative_error
        trials.append(
            EscapeTrial(
                seed=seed,
                rel_error_negation_on=outcomes[True],
                rel_error_negation_off=outcomes[False],
                success_negation_on=outcomes[True] < cfg.success_threshold,
                success_negation_off=outcomes[False] < cfg.success_threshold,
            )
        )
    return NegationEscapeReport(
        trials=tuple(trials), perturbation_scale=perturbation_scale
    )
