"""Command-line front end.

    spinboson {evolve,rates,boson,validate,spectral} --config scenario.yaml [--out DIR]

Exit codes: 0 success, 1 config error, 2 capacity error, 3 validation failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .bosons import boson_state
from .channel import apply_map, check_density_matrix, purity, sector_magnitudes
from .config import ConfigError, load_config
from .errors import (CapacityError, InvalidStateError, SpinBosonError,
                     UnsupportedVariantError, ValidationError)
from .linear import dephasing_matrix, ising_lamb_matrix
from .model import MAX_DENSE_QUBITS
from .oracle import FockTruncation, compare, thermal_cutoff
from .spectral import convergence_study, integral_curves
from .tables import write_table

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_VALIDATION = 0, 1, 2, 3

ORACLE_MAX_QUBITS = 3
ORACLE_MAX_MODES = 3
DEFAULT_TOLERANCE = 1e-6


def _map_times(fn, times, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, times))
    return [fn(t) for t in times]


def _out_dir(args, scenario):
    if args.out is not None:
        return Path(args.out)
    if scenario.output_dir is not None:
        return scenario.output_dir
    return Path.cwd()


def _require_spec(scenario):
    if scenario.spec is None:
        raise ConfigError("this subcommand needs a 'system' block")
    return scenario.spec


def run_evolve(scenario, out_dir, threads=1, timestamp=True):
    spec = _require_spec(scenario)
    if spec.n_qubits > MAX_DENSE_QUBITS:
        raise CapacityError(f"evolve builds dense 2^N matrices; N is capped at {MAX_DENSE_QUBITS}")
    rho0 = check_density_matrix(scenario.rho0, spec.dim)
    states = _map_times(lambda t: apply_map(spec, rho0, t, validate=False),
                        scenario.times, threads)
    obs = scenario.observables
    cols = ["t"]
    if "purity" in obs:
        cols.append("purity")
    if "elements" in obs:
        for a, b in scenario.elements:
            cols += [f"rho_{a}_{b}_re", f"rho_{a}_{b}_im"]
    sector_keys = list(range(-2 * spec.n_qubits, 2 * spec.n_qubits + 1, 2))
    if "sectors" in obs:
        cols += [f"sector_{m}" for m in sector_keys]
    rows = []
    for t, rho in zip(scenario.times, states):
        row = [t]
        if "purity" in obs:
            row.append(purity(rho))
        if "elements" in obs:
            for a, b in scenario.elements:
                row += [rho[a, b].real, rho[a, b].imag]
        if "sectors" in obs:
            mags = sector_magnitudes(rho)
            row += [mags[m] for m in sector_keys]
        rows.append(row)
    return [write_table(out_dir / "evolve.csv", cols, rows, timestamp)]


def run_rates(scenario, out_dir, threads=1, timestamp=True):
    spec = _require_spec(scenario)
    N = spec.n_qubits
    pairs = [(i, j) for i in range(N) for j in range(N)]
    cols = ["t"] + [f"W_{i}_{j}" for i, j in pairs] + [f"Gamma_{i}_{j}" for i, j in pairs]

    def row(t):
        W = ising_lamb_matrix(spec, t)
        G = dephasing_matrix(spec, t)
        return [t] + [W[i, j] for i, j in pairs] + [G[i, j] for i, j in pairs]

    rows = _map_times(row, scenario.times, threads)
    return [write_table(out_dir / "rates.csv", cols, rows, timestamp)]


def run_boson(scenario, out_dir, threads=1, timestamp=True):
    spec = _require_spec(scenario)
    rho0 = check_density_matrix(scenario.rho0, spec.dim)
    mixtures = _map_times(lambda t: boson_state(spec, rho0, t), scenario.times, threads)
    cols = ["t", "component", "weight", "mode", "mu_re", "mu_im"]
    rows = []
    for t, mix in zip(scenario.times, mixtures):
        for c in range(mix.n_components):
            for k in range(spec.n_modes):
                mu = mix.amplitudes[c, k]
                rows.append([t, c, mix.weights[c], k, mu.real, mu.imag])
    return [write_table(out_dir / "boson.csv", cols, rows, timestamp)]


def _oracle_cutoffs(spec, cutoff):
    if cutoff is not None:
        return FockTruncation.uniform(spec.n_modes, cutoff)
    bath = spec.bath
    nbar = bath.nbar if bath.is_product else np.diag(bath.covariance_matrix)[0::2]
    disp = np.max(np.abs(spec.coupling_table), axis=0) * 2.0 / bath.omega
    cuts = [max(thermal_cutoff(n), 10) + int(np.ceil(4 * d * d + 10 * d)) + 10
            for n, d in zip(np.atleast_1d(nbar), disp)]
    return FockTruncation(tuple(cuts))


def run_validate(scenario, out_dir, threads=1, timestamp=True, tolerance=None):
    spec = _require_spec(scenario)
    if spec.n_qubits > ORACLE_MAX_QUBITS or spec.n_modes > ORACLE_MAX_MODES:
        raise CapacityError(
            f"validate runs the brute-force oracle, limited to N <= {ORACLE_MAX_QUBITS} "
            f"and K <= {ORACLE_MAX_MODES} (got N={spec.n_qubits}, K={spec.n_modes}); "
            "use a smaller scenario")
    trunc = _oracle_cutoffs(spec, scenario.cutoff)
    trunc.check(spec)
    tol = tolerance if tolerance is not None else (scenario.tolerance or DEFAULT_TOLERANCE)
    rho0 = check_density_matrix(scenario.rho0, spec.dim)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        report = compare(spec, trunc, rho0, scenario.times)
    paths = [write_table(out_dir / "validate.csv", report.columns(), report.rows(), timestamp,
                         comments=[f"warning: {w}" for w in report.warnings])]
    summary_cols = ["max_trace_distance", "max_leakage", "norm_deficit", "tolerance", "passed"]
    summary = [[report.max_trace_distance, report.max_leakage, report.norm_deficit, tol,
                int(report.passed(tol))]]
    paths.append(write_table(out_dir / "validate_summary.csv", summary_cols, summary,
                             timestamp, comments=[f"cutoffs {list(trunc.cutoffs)}"]))
    return paths, report.passed(tol)


def run_spectral(scenario, out_dir, threads=1, timestamp=True):
    J = scenario.spectral
    if J is None:
        raise ConfigError("spectral needs a 'bath.spectral' block")
    T = scenario.temperature
    if T is None:
        raise ConfigError("spectral needs 'bath.temperature'")
    times = scenario.times
    curves = _map_times(lambda t: integral_curves(J, T, [t]), times, threads)
    W = np.array([c[0][0] for c in curves])
    G = np.array([c[1][0] for c in curves])
    paths = [write_table(out_dir / "spectral.csv", ["t", "W", "Gamma"],
                         np.column_stack([times, W, G]), timestamp)]
    if scenario.convergence:
        study = convergence_study(J, T, times, scenario.convergence, reference=(W, G))
        paths.append(write_table(
            out_dir / "spectral_convergence.csv",
            ["modes", "max_damping_error", "max_lamb_error"],
            [[int(k), g, w] for k, g, w in zip(study.n_modes, study.max_damping_error,
                                                study.max_lamb_error)], timestamp))
    return paths


COMMANDS = {
    "evolve": run_evolve,
    "rates": run_rates,
    "boson": run_boson,
    "validate": run_validate,
    "spectral": run_spectral,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spinboson", description="Exact dephasing dynamics of N qubits and K bosons.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="YAML scenario file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads over the time grid")
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit the generation timestamp header line")
        if name == "validate":
            p.add_argument("--tolerance", type=float, default=None,
                           help="maximum allowed trace distance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_config(args.config)
        out_dir = _out_dir(args, scenario)
        kwargs = dict(threads=args.threads, timestamp=not args.no_timestamp)
        if args.command == "validate":
            paths, ok = run_validate(scenario, out_dir, tolerance=args.tolerance, **kwargs)
        else:
            paths, ok = COMMANDS[args.command](scenario, out_dir, **kwargs), True
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConfigError, ValidationError, InvalidStateError, UnsupportedVariantError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpinBosonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for p in paths:
        print(p)
    if not ok:
        print("validation failed: trace distance above tolerance", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
