"""Command-line entry point.

One command with subcommands that wire a JSON experiment config (plus
flag overrides) to the library and emit CSV/JSON artifacts.  Reruns with
identical arguments produce byte-identical CSVs; every run echoes its
resolved configuration into run_manifest.json next to the outputs.

Exit codes: 0 success, 1 runtime failure (divergence, degenerate
sampling, no convergence), 2 usage or configuration error.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import replace

from . import conditions, experiments, landscape
from .numerics import SpectralNormError
from .solver import DivergedError, solve

DEFAULT_SAMPLES = conditions.DEFAULT_NUM_SAMPLES
OUT_DIR_ENV = "GENCS_OUT_DIR"


class CliError(Exception):
    """Configuration or usage problem; maps to exit code 2."""


def _parse_number_list(text, parser=float):
    try:
        return tuple(
            math.inf if tok.strip().lower() == "inf" else parser(tok)
            for tok in text.split(",")
            if tok.strip()
        )
    except ValueError as exc:
        raise CliError(f"bad list value {text!r}: {exc}") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gencs",
        description=(
            "Gradient descent recovery for compressive sensing under "
            "expansive ReLU generative priors"
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, needs_config=True):
        p.add_argument(
            "--config",
            required=needs_config,
            help="JSON experiment config file",
        )
        p.add_argument(
            "--out-dir",
            default=None,
            help=f"output directory (default ${OUT_DIR_ENV} or '.')",
        )
        p.add_argument("--seed", type=int, default=None, help="override base seed")
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--k", default=None, help="comma-separated latent dims")
        p.add_argument("--dims", default=None, help="comma-separated layer widths")
        p.add_argument("--m", type=int, default=None, help="measurement count")
        p.add_argument("--snr", default=None, help="comma-separated SNR dB ('inf' allowed)")
        p.add_argument("--step-size", type=float, default=None)
        p.add_argument("--max-iters", type=int, default=None)
        p.add_argument("--threshold", type=float, default=None)
        return p

    add_common(sub.add_parser("recover", help="solve one seeded instance"))
    p = add_common(sub.add_parser("sweep-success", help="noiseless success sweep over k"))
    p.add_argument("--plot", action="store_true")
    p = add_common(sub.add_parser("sweep-noise", help="error sweep over k and SNR"))
    p.add_argument("--plot", action="store_true")
    p = add_common(sub.add_parser("trace", help="shared-randomness traces per SNR"))
    p.add_argument("--plot", action="store_true")
    p = add_common(sub.add_parser("check-wdc", help="sampled weight distribution deviation"))
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--layer", type=int, default=1, help="1-based layer index")
    p = add_common(sub.add_parser("check-rric", help="sampled restricted isometry deviation"))
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p = sub.add_parser("rho-table", help="spurious-point multipliers per depth")
    p.add_argument("--max-depth", type=int, default=50)
    p.add_argument(
        "--out-dir",
        default=None,
        help=f"output directory (default ${OUT_DIR_ENV} or '.')",
    )
    return parser


def _resolve_out_dir(args):
    return args.out_dir or os.environ.get(OUT_DIR_ENV) or "."


def _load_config(args):
    if not os.path.isfile(args.config):
        raise CliError(f"config file not found: {args.config}")
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"config is not valid JSON: {exc}") from None
    try:
        cfg = experiments.ExperimentConfig.from_json_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"bad config: {exc}") from None
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.k is not None:
        overrides["k_values"] = tuple(int(v) for v in _parse_number_list(args.k, int))
    if args.dims is not None:
        overrides["hidden_dims"] = tuple(
            int(v) for v in _parse_number_list(args.dims, int)
        )
    if args.m is not None:
        overrides["m"] = args.m
    if args.snr is not None:
        overrides["snr_db"] = _parse_number_list(args.snr)
    if args.step_size is not None:
        overrides["step_size"] = args.step_size
    if args.max_iters is not None:
        overrides["max_iters"] = args.max_iters
    if args.threshold is not None:
        overrides["success_threshold"] = args.threshold
    try:
        cfg = replace(cfg, **overrides)
    except ValueError as exc:
        raise CliError(f"bad override: {exc}") from None
    return cfg, overrides


def _write_text(out_dir, name, text):
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        fh.write(text)
    return name


def _write_json(out_dir, name, obj):
    return _write_text(
        out_dir, name, json.dumps(obj, indent=2, sort_keys=True) + "\n"
    )


def _write_manifest(out_dir, subcommand, cfg, overrides, outputs, extra=None):
    manifest = {
        "subcommand": subcommand,
        "config": cfg.to_json_dict() if cfg is not None else None,
        "overrides": {
            k: ("inf" if isinstance(v, float) and math.isinf(v) else v)
            if not isinstance(v, tuple)
            else ["inf" if isinstance(x, float) and math.isinf(x) else x for x in v]
            for k, v in overrides.items()
        },
        "outputs": sorted(outputs),
    }
    if extra:
        manifest.update(extra)
    _write_json(out_dir, "run_manifest.json", manifest)


def _cmd_recover(args, out_dir):
    cfg, overrides = _load_config(args)
    k = cfg.k_values[0]
    snr = cfg.snr_db[0]
    seed = experiments.trial_seed(cfg.base_seed, k, snr, 0)
    problem = experiments.make_problem(k, cfg.hidden_dims, cfg.m, snr, seed)
    result = solve(problem, cfg.solver_config(init_seed=seed))
    outputs = [
        _write_text(out_dir, "recover_trace.csv", result.trace.to_csv_text()),
        _write_json(
            out_dir,
            "recover_summary.json",
            {
                "k": int(k),
                "snr_db": "inf" if math.isinf(snr) else snr,
                "seed": seed,
                "iterations": len(result.trace) - 1,
                "termination": result.trace.termination,
                "final_rel_err": result.final_relative_error,
                "final_f": float(result.trace.f_values[-1]),
                "x_hat": [float(v) for v in result.x_hat],
            },
        ),
    ]
    _write_manifest(out_dir, "recover", cfg, overrides, outputs)
    return 0


def _cmd_sweep(args, out_dir, noiseless):
    cfg, overrides = _load_config(args)
    if noiseless:
        table = experiments.success_sweep(cfg)
        name = "success_sweep.csv"
    else:
        table = experiments.noise_error_sweep(cfg)
        name = "noise_sweep.csv"
    outputs = [_write_text(out_dir, name, table.to_csv_text())]
    if getattr(args, "plot", False):
        outputs.append(_plot_sweep(out_dir, table, noiseless))
    _write_manifest(
        out_dir, "sweep-success" if noiseless else "sweep-noise", cfg, overrides, outputs
    )
    return 0


def _cmd_trace(args, out_dir):
    cfg, overrides = _load_config(args)
    traces = experiments.convergence_trace(cfg)
    outputs = []
    for snr_db, trace in traces.items():
        label = experiments.format_snr(snr_db)
        outputs.append(
            _write_text(out_dir, f"trace_snr{label}.csv", trace.to_csv_text())
        )
    if getattr(args, "plot", False):
        outputs.append(_plot_traces(out_dir, traces))
    _write_manifest(out_dir, "trace", cfg, overrides, outputs)
    return 0


def _cmd_check_wdc(args, out_dir):
    cfg, overrides = _load_config(args)
    if not 1 <= args.layer <= cfg.depth:
        raise CliError(f"--layer must be in 1..{cfg.depth}, got {args.layer}")
    k = cfg.k_values[0]
    net_seed = experiments.trial_seed(cfg.base_seed, k, math.inf, 0)
    net = experiments.GeneratorNetwork.random(
        [k] + list(cfg.hidden_dims), net_seed
    )
    W = net.weights[args.layer - 1]
    report = conditions.wdc_deviation(
        W, num_samples=args.samples, seed=cfg.base_seed
    )
    outputs = [
        _write_text(out_dir, "wdc_samples.csv", report.to_csv_text()),
        _write_json(out_dir, "wdc_summary.json", report.summary()),
    ]
    _write_manifest(
        out_dir, "check-wdc", cfg, overrides, outputs, extra={"layer": args.layer}
    )
    return 0


def _cmd_check_rric(args, out_dir):
    cfg, overrides = _load_config(args)
    k = cfg.k_values[0]
    seed = experiments.trial_seed(cfg.base_seed, k, math.inf, 0)
    problem = experiments.make_problem(k, cfg.hidden_dims, cfg.m, math.inf, seed)
    report = conditions.rric_deviation(
        problem.A, problem.net, num_samples=args.samples, seed=cfg.base_seed
    )
    outputs = [
        _write_text(out_dir, "rric_samples.csv", report.to_csv_text()),
        _write_json(out_dir, "rric_summary.json", report.summary()),
    ]
    _write_manifest(out_dir, "check-rric", cfg, overrides, outputs)
    return 0


def _cmd_rho_table(args, out_dir):
    if args.max_depth < 1:
        raise CliError(f"--max-depth must be >= 1, got {args.max_depth}")
    table = landscape.rho_table(range(1, args.max_depth + 1))
    lines = ["d,rho_d,one_minus_rho_bound"]
    for d, rho_d, bound in table.rows():
        lines.append(f"{d},{rho_d:.11e},{bound:.11e}")
    outputs = [_write_text(out_dir, "rho_table.csv", "\n".join(lines) + "\n")]
    _write_manifest(
        out_dir, "rho-table", None, {}, outputs, extra={"max_depth": args.max_depth}
    )
    return 0


def _plot_setup():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "gencs"
    import matplotlib.pyplot as plt

    return plt


def _plot_traces(out_dir, traces):
    plt = _plot_setup()
    fig, ax = plt.subplots()
    for snr_db, trace in traces.items():
        ax.semilogy(trace.rel_errors, label=f"SNR {experiments.format_snr(snr_db)}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("relative error")
    ax.legend()
    fig.savefig(
        os.path.join(out_dir, "trace.svg"), metadata={"Date": None}
    )
    plt.close(fig)
    return "trace.svg"


def _plot_sweep(out_dir, table, noiseless):
    plt = _plot_setup()
    fig, ax = plt.subplots()
    by_snr = {}
    for r in table.rows:
        by_snr.setdefault(r.snr_db, []).append(r)
    for snr_db, rows in by_snr.items():
        ks = [r.k for r in rows]
        if noiseless:
            ax.plot(ks, [r.success_prob for r in rows], marker="o")
            ax.set_ylabel("success probability")
        else:
            ax.semilogy(
                ks,
                [r.mean_rel_err_successful for r in rows],
                marker="o",
                label=f"SNR {experiments.format_snr(snr_db)}",
            )
            ax.set_ylabel("mean relative error (successful runs)")
    ax.set_xlabel("latent dimension k")
    if not noiseless:
        ax.legend()
    name = "success_sweep.svg" if noiseless else "noise_sweep.svg"
    fig.savefig(os.path.join(out_dir, name), metadata={"Date": None})
    plt.close(fig)
    return name


_COMMANDS = {
    "recover": _cmd_recover,
    "sweep-success": lambda a, d: _cmd_sweep(a, d, noiseless=True),
    "sweep-noise": lambda a, d: _cmd_sweep(a, d, noiseless=False),
    "trace": _cmd_trace,
    "check-wdc": _cmd_check_wdc,
    "check-rric": _cmd_check_rric,
    "rho-table": _cmd_rho_table,
}


def run_cli(argv):
    """Parse argv (without the program name) and run one subcommand."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out_dir = _resolve_out_dir(args)
        os.makedirs(out_dir, exist_ok=True)
        return _COMMANDS[args.subcommand](args, out_dir)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DivergedError, conditions.DegenerateSamplesError, SpectralNormError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
