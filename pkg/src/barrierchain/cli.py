"""Command-line front end: deterministic sweep runner and dataset emission.

Each subcommand maps onto one analysis workflow and writes CSV (curves,
grids) or JSON (scalar summaries).  Headers embed the tool version and the
generating configuration, so re-running a config reproduces files
byte-for-byte.  `--out`, `--config`, and `--threads` are deliberately left
out of the embedded header: the first two are plumbing and the third never
affects results.

A config file uses the same `key = value` format as profile blocks; keys
mirror flag names with underscores.  Flags given on the command line win
over config values.  The `BARRIERCHAIN_OUTDIR` environment variable sets
the default output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from ._csvio import write_csv
from .chain import ChainSpec, barrier_profile, build_hamiltonian, ebit_barrier_profile, parse_config_block
from .disorder import BARRIER_LEAKAGE, BULK_UNIFORM, MAX_CONCURRENCE, MAX_FIDELITY, DisorderModel, monte_carlo
from .ebit import EbitState, ebit_window, evolve_ebit, pair_concurrence
from .effective import predicted_vs_exact_gap
from .metrics import (
    ipr,
    localization_report,
    max_fidelity,
    rabi_transfer_time,
    records_to_csv,
    transfer_series,
)
from .oracle import oracle_transition_amplitude
from .protocol import (
    SwitchingSchedule,
    optimal_interval,
    optimize_interval,
    simulate_protocol,
    storage_fidelity,
    two_level_interval,
)
from .spectral import eigendecompose, transition_amplitude

ENV_OUTDIR = "BARRIERCHAIN_OUTDIR"

# header/config keys that are plumbing, not physics
_UNLOGGED = {"out", "config", "threads", "experiment"}


def _float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(tok) for tok in str(text).split(",") if tok.strip()]


def _int_list(text) -> list[int]:
    return [int(v) for v in _float_list(text)]


def _outdir() -> str:
    return os.environ.get(ENV_OUTDIR, ".")


def _resolve_out(args, suffix: str = ".csv") -> str:
    if args.out:
        return args.out
    return os.path.join(_outdir(), args.experiment + suffix)


def _suffixed_out(args, tag: str) -> str:
    """Variant of _resolve_out for subcommands that write one file per sweep
    value; the tag lands before the extension."""
    stem, ext = os.path.splitext(_resolve_out(args))
    return f"{stem}_{tag}{ext or '.csv'}"


def _metadata(args) -> dict:
    meta: dict = {"tool": "barrierchain", "version": __version__, "experiment": args.experiment}
    for key in sorted(vars(args)):
        if key in _UNLOGGED or key.startswith("_"):
            continue
        meta[key] = getattr(args, key)
    return meta


def _write_json(path: str, args, payload: dict) -> None:
    body = {"config": {k: v for k, v in _metadata(args).items()}, **payload}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(body, indent=2, sort_keys=True, default=float) + "\n")


# ---------------------------------------------------------------------------
# subcommand handlers; each returns the list of files written


def _cmd_spectrum(args) -> list[str]:
    spec = ChainSpec(args.n)
    omegas = np.linspace(args.omega_min, args.omega_max, args.steps)
    col_omega, col_k, col_lam, col_neg = [], [], [], []
    for omega in omegas:
        decomp = eigendecompose(build_hamiltonian(spec, barrier_profile(spec, omega)))
        lam = decomp.eigenvalues
        col_omega.append(np.full(spec.n_sites, omega))
        col_k.append(np.arange(1, spec.n_sites + 1))
        col_lam.append(lam)
        # spectrum of the sign-flipped field profile (particle-hole partner)
        col_neg.append(-lam[::-1])
    meta = _metadata(args)
    meta["units_energy"] = "J"
    path = _resolve_out(args)
    write_csv(
        path,
        {
            "omega": np.concatenate(col_omega),
            "k": np.concatenate(col_k),
            "lambda": np.concatenate(col_lam),
            "lambda_flipped": np.concatenate(col_neg),
        },
        meta,
    )
    return [path]


def _cmd_ipr(args) -> list[str]:
    if args.omega_min <= 0:
        raise ValueError("ipr sweep needs omega_min > 0 (zero field has no barrier states)")
    spec = ChainSpec(args.n)
    omegas = np.linspace(args.omega_min, args.omega_max, args.steps)
    rows: dict[str, list] = {"omega": [], "role": [], "k": [], "lambda": [], "ipr": []}
    for omega in omegas:
        profile = barrier_profile(spec, omega)
        decomp = eigendecompose(build_hamiltonian(spec, profile))
        report = localization_report(decomp, profile)
        tracked = [("barrier", k) for k in report.barrier_pair]
        tracked += [("end", k) for k in report.bilocalized_pair]
        for role, k in tracked:
            rows["omega"].append(omega)
            rows["role"].append(role)
            rows["k"].append(k + 1)
            rows["lambda"].append(decomp.eigenvalues[k])
            rows["ipr"].append(ipr(decomp.eigenvectors[:, k]))
    meta = _metadata(args)
    meta["units_energy"] = "J"
    path = _resolve_out(args)
    write_csv(path, rows, meta)
    return [path]


def _cmd_transfer(args) -> list[str]:
    spec = ChainSpec(args.n)
    decomp = eigendecompose(build_hamiltonian(spec, barrier_profile(spec, args.omega)))
    times = np.linspace(0.0, args.big_t, args.points)
    records = transfer_series(decomp, times)
    meta = _metadata(args)
    meta["units_time"] = "1/J"
    path = _resolve_out(args)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(records_to_csv(records, meta))
    return [path]


def _cmd_maxfid(args) -> list[str]:
    omegas = np.linspace(args.omega_min, args.omega_max, args.omega_steps)
    rows: dict[str, list] = {"n": [], "omega": [], "t_star": [], "max_avg_fidelity": []}
    for n in range(args.n_min, args.n_max + 1, args.n_step):
        spec = ChainSpec(n)
        for omega in omegas:
            decomp = eigendecompose(build_hamiltonian(spec, barrier_profile(spec, omega)))
            t_star, fbar = max_fidelity(decomp, (0.0, args.big_t))
            rows["n"].append(n)
            rows["omega"].append(omega)
            rows["t_star"].append(t_star)
            rows["max_avg_fidelity"].append(fbar)
    meta = _metadata(args)
    meta["units_time"] = "1/J"
    path = _resolve_out(args)
    write_csv(path, rows, meta)
    return [path]


def _cmd_scaling(args) -> list[str]:
    if args.omega_min <= 0:
        raise ValueError("scaling sweep needs omega_min > 0")
    omegas = np.geomspace(args.omega_min, args.omega_max, args.steps)
    rows: dict[str, list] = {"n": [], "omega": [], "gap": [], "t_max": []}
    for n in _int_list(args.n_list):
        spec = ChainSpec(n)
        for omega in omegas:
            profile = barrier_profile(spec, omega)
            report = localization_report(eigendecompose(build_hamiltonian(spec, profile)), profile)
            rows["n"].append(n)
            rows["omega"].append(omega)
            rows["gap"].append(report.gap)
            rows["t_max"].append(rabi_transfer_time(report))
    meta = _metadata(args)
    meta["units_time"] = "1/J"
    meta["units_energy"] = "J"
    path = _resolve_out(args)
    write_csv(path, rows, meta)
    return [path]


def _window_from_factor(spec: ChainSpec, omega: float, factor: float) -> tuple[float, float]:
    profile = barrier_profile(spec, omega)
    report = localization_report(eigendecompose(build_hamiltonian(spec, profile)), profile)
    return (0.0, factor * rabi_transfer_time(report))


def _cmd_disorder(args) -> list[str]:
    spec = ChainSpec(args.n)
    rows: dict[str, list] = {
        "b": [], "omega": [], "mean": [], "stderr": [], "n_samples": [], "seed": [],
    }
    for omega in _float_list(args.omega_list):
        window = _window_from_factor(spec, omega, args.window_factor)
        for b in _float_list(args.b_list):
            model = DisorderModel(BULK_UNIFORM, b)
            result = monte_carlo(
                args.metric, model, spec, omega, window,
                n_samples=args.n_samples, seed=args.seed, threads=args.threads,
            )
            rows["b"].append(b)
            rows["omega"].append(omega)
            rows["mean"].append(result.mean_metric)
            rows["stderr"].append(result.std_error)
            rows["n_samples"].append(result.n_samples)
            rows["seed"].append(result.seed)
    meta = _metadata(args)
    path = _resolve_out(args)
    write_csv(path, rows, meta)
    return [path]


def _cmd_leakage(args) -> list[str]:
    omegas = np.linspace(args.omega_min, args.omega_max, args.steps)
    written = []
    for n in _int_list(args.n_list):
        spec = ChainSpec(n)
        rows: dict[str, list] = {
            "omega": [], "mean": [], "stderr": [], "n_samples": [], "seed": [],
        }
        for omega in omegas:
            window = _window_from_factor(spec, omega, args.window_factor)
            model = DisorderModel(BARRIER_LEAKAGE, omega)
            result = monte_carlo(
                args.metric, model, spec, omega, window,
                n_samples=args.n_samples, seed=args.seed, threads=args.threads,
            )
            rows["omega"].append(omega)
            rows["mean"].append(result.mean_metric)
            rows["stderr"].append(result.std_error)
            rows["n_samples"].append(result.n_samples)
            rows["seed"].append(result.seed)
        meta = _metadata(args)
        meta["n"] = n
        path = _suffixed_out(args, f"n{n}")
        write_csv(path, rows, meta)
        written.append(path)
    return written


def _cmd_ebit(args) -> list[str]:
    spec = ChainSpec(args.n)
    state = EbitState(args.alpha, args.beta)
    written = []
    for omega in _float_list(args.omega_list):
        profile = ebit_barrier_profile(spec, omega)
        decomp = eigendecompose(build_hamiltonian(spec, profile))
        lo, hi = ebit_window(spec, omega, state)
        rows: dict[str, list] = {
            "t": [], "abs_p_Nm1": [], "abs_p_N": [], "concurrence": [],
        }
        for t in np.linspace(lo, hi, args.points):
            p = evolve_ebit(spec, profile, state, t, decomp)
            rows["t"].append(t)
            rows["abs_p_Nm1"].append(abs(p[-2]))
            rows["abs_p_N"].append(abs(p[-1]))
            rows["concurrence"].append(pair_concurrence(p))
        meta = _metadata(args)
        meta["units_time"] = "1/J"
        meta["omega"] = omega
        meta["window_lo"] = lo
        meta["window_hi"] = hi
        path = _suffixed_out(args, f"omega{omega:g}")
        write_csv(path, rows, meta)
        written.append(path)
    return written


def _cmd_protocol(args) -> list[str]:
    spec = ChainSpec(args.n)
    closed = optimal_interval(args.n, args.k2)
    literal = two_level_interval(args.k2)
    delta_t = args.delta_t if args.delta_t is not None else closed
    optimized = None
    if args.optimize:
        seed_schedule = SwitchingSchedule(
            k1=args.k1, k2=args.k2, delta_t=delta_t, t1=args.t1,
        )
        optimized, _ = optimize_interval(spec, seed_schedule, window=args.window)
        delta_t = optimized
    schedule = SwitchingSchedule(
        k1=args.k1, k2=args.k2, delta_t=delta_t, t1=args.t1,
        smoothing_timescale=args.tau_s,
    )
    t_end = args.t_end if args.t_end is not None else schedule.t2 + args.window
    trajectory = simulate_protocol(spec, schedule, t_end=t_end, sample_dt=args.sample_dt)
    mean, drift = storage_fidelity(trajectory, min(args.window, t_end - schedule.t2))
    meta = _metadata(args)
    meta["units_time"] = "1/J"
    if args.out:
        csv_path = args.out
        json_path = os.path.splitext(args.out)[0] + ".json"
    else:
        csv_path = _resolve_out(args, ".csv")
        json_path = _resolve_out(args, ".json")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(trajectory.to_csv(meta))
    _write_json(
        json_path,
        args,
        {
            "closed_form_interval": closed,
            "two_level_interval": literal,
            "optimized_interval": optimized,
            "interval_used": schedule.delta_t,
            "storage_mean": mean,
            "storage_drift": drift,
            "final_avg_fidelity": trajectory.final_avg_fidelity,
            "survival_min_presend": trajectory.survival_min_presend,
            "t2": schedule.t2,
        },
    )
    return [csv_path, json_path]


def _cmd_effective(args) -> list[str]:
    rows: dict[str, list] = {"n": [], "omega": [], "gap_exact": [], "gap_effective": [], "ratio": []}
    for n in range(args.n_min, args.n_max + 1, args.n_step):
        for omega in _float_list(args.omega_list):
            cmp = predicted_vs_exact_gap(n, omega)
            rows["n"].append(n)
            rows["omega"].append(omega)
            rows["gap_exact"].append(cmp.gap_exact)
            rows["gap_effective"].append(cmp.gap_effective)
            rows["ratio"].append(cmp.ratio)
    meta = _metadata(args)
    meta["units_energy"] = "J"
    path = _resolve_out(args)
    write_csv(path, rows, meta)
    return [path]


def _cmd_oracle_check(args) -> list[str]:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    checks = 0
    for n in range(args.n_min, args.n_max + 1):
        spec = ChainSpec(n)
        for _ in range(args.pairs):
            omega = rng.uniform(0.0, args.omega_max)
            t = rng.uniform(0.0, args.t_max)
            profile = barrier_profile(spec, omega)
            decomp = eigendecompose(build_hamiltonian(spec, profile))
            f_spectral = transition_amplitude(decomp, 1, n, t)
            f_oracle = oracle_transition_amplitude(spec, profile, 1, n, t)
            worst = max(worst, abs(f_spectral - f_oracle))
            checks += 1
    path = _resolve_out(args, ".json")
    _write_json(
        path,
        args,
        {"max_abs_error": worst, "checks": checks, "tolerance": args.tol, "pass": bool(worst <= args.tol)},
    )
    if worst > args.tol:
        raise ValueError(
            f"oracle mismatch: max |f_spectral - f_oracle| = {worst:.3e} exceeds {args.tol:g}"
        )
    return [path]


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "ipr": _cmd_ipr,
    "transfer": _cmd_transfer,
    "maxfid": _cmd_maxfid,
    "scaling": _cmd_scaling,
    "disorder": _cmd_disorder,
    "leakage": _cmd_leakage,
    "ebit": _cmd_ebit,
    "protocol": _cmd_protocol,
    "effective": _cmd_effective,
    "oracle-check": _cmd_oracle_check,
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key = value file; flags override its entries")
    sub.add_argument("--out", help="output path (default <outdir>/<experiment>.csv)")


def _add_ensemble(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n-samples", type=int, default=1000)
    sub.add_argument("--seed", type=int, default=2024)
    sub.add_argument("--threads", type=int, default=os.cpu_count(),
                     help="worker threads; never affects the numbers")
    sub.add_argument("--metric", choices=[MAX_CONCURRENCE, MAX_FIDELITY],
                     default=MAX_CONCURRENCE)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barrierchain",
        description="Spin-chain transfer datasets: spectra, fidelities, disorder ensembles, protocols.",
    )
    parser.add_argument("--version", action="version", version=f"barrierchain {__version__}")
    subs = parser.add_subparsers(dest="experiment", required=True)

    s = subs.add_parser("spectrum", help="eigenvalues vs barrier height")
    s.add_argument("--n", type=int, default=17)
    s.add_argument("--omega-min", type=float, default=0.0)
    s.add_argument("--omega-max", type=float, default=10.0)
    s.add_argument("--steps", type=int, default=200)
    _add_common(s)

    s = subs.add_parser("ipr", help="tracked-state localization vs barrier height")
    s.add_argument("--n", type=int, default=18)
    s.add_argument("--omega-min", type=float, default=0.5)
    s.add_argument("--omega-max", type=float, default=50.0)
    s.add_argument("--steps", type=int, default=100)
    _add_common(s)

    s = subs.add_parser("transfer", help="end-to-end transfer time series")
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--omega", type=float, default=100.0)
    s.add_argument("--T", dest="big_t", type=float, default=4000.0)
    s.add_argument("--points", type=int, default=2001)
    _add_common(s)

    s = subs.add_parser("maxfid", help="peak average fidelity over an (N, omega) grid")
    s.add_argument("--n-min", type=int, default=10)
    s.add_argument("--n-max", type=int, default=100)
    s.add_argument("--n-step", type=int, default=1)
    s.add_argument("--omega-min", type=float, default=0.0)
    s.add_argument("--omega-max", type=float, default=20.0)
    s.add_argument("--omega-steps", type=int, default=41)
    s.add_argument("--T", dest="big_t", type=float, default=4000.0)
    _add_common(s)

    s = subs.add_parser("scaling", help="Rabi time and gap vs barrier height")
    s.add_argument("--n-list", type=_int_list, default=[22, 23])
    s.add_argument("--omega-min", type=float, default=5.0)
    s.add_argument("--omega-max", type=float, default=80.0)
    s.add_argument("--steps", type=int, default=25)
    _add_common(s)

    s = subs.add_parser("disorder", help="bulk-field disorder ensemble")
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--omega-list", type=_float_list, default=[20.0])
    s.add_argument("--b-list", type=_float_list, default=[0.0, 1.0, 2.0, 4.0])
    s.add_argument("--window-factor", type=float, default=3.0)
    _add_ensemble(s)
    _add_common(s)

    s = subs.add_parser("leakage", help="barrier-leakage disorder ensemble")
    s.add_argument("--n-list", type=_int_list, default=[10, 20, 30])
    s.add_argument("--omega-min", type=float, default=2.0)
    s.add_argument("--omega-max", type=float, default=20.0)
    s.add_argument("--steps", type=int, default=10)
    s.add_argument("--window-factor", type=float, default=1.2)
    _add_ensemble(s)
    _add_common(s)

    s = subs.add_parser("ebit", help="entangled-pair transport time series")
    s.add_argument("--n", type=int, default=33)
    s.add_argument("--omega-list", type=_float_list, default=[5.0, 15.0, 45.0])
    s.add_argument("--points", type=int, default=1200)
    s.add_argument("--alpha", type=float, default=0.7071067811865476)
    s.add_argument("--beta", type=float, default=-0.7071067811865476)
    _add_common(s)

    s = subs.add_parser("protocol", help="switched-field trap/store/release run")
    s.add_argument("--n", type=int, default=30)
    s.add_argument("--k1", type=float, default=60.0)
    s.add_argument("--k2", type=float, default=30.0)
    s.add_argument("--delta-t", type=float, default=None,
                   help="hold interval; default = closed-form optimum")
    s.add_argument("--t1", type=float, default=50.0)
    s.add_argument("--tau-s", type=float, default=0.0,
                   help="switch smoothing timescale; 0 = ideal steps")
    s.add_argument("--optimize", action="store_true",
                   help="numerically tune delta_t around its seed")
    s.add_argument("--window", type=float, default=500.0,
                   help="storage window after t2")
    s.add_argument("--t-end", type=float, default=None)
    s.add_argument("--sample-dt", type=float, default=0.05)
    _add_common(s)

    s = subs.add_parser("effective", help="reduced-model gap vs exact gap")
    s.add_argument("--n-min", type=int, default=6)
    s.add_argument("--n-max", type=int, default=40)
    s.add_argument("--n-step", type=int, default=1)
    s.add_argument("--omega-list", type=_float_list, default=[5.0, 10.0, 20.0])
    _add_common(s)

    s = subs.add_parser("oracle-check", help="spectral path vs full Hilbert-space oracle")
    s.add_argument("--n-min", type=int, default=4)
    s.add_argument("--n-max", type=int, default=8)
    s.add_argument("--pairs", type=int, default=10)
    s.add_argument("--omega-max", type=float, default=60.0)
    s.add_argument("--t-max", type=float, default=30.0)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--tol", type=float, default=1e-10)
    _add_common(s)

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Load --config (if present) into the chosen subparser's defaults."""
    if not argv or argv[0].startswith("-"):
        return
    experiment = argv[0]
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return
    with open(path, encoding="utf-8") as fh:
        entries = parse_config_block(fh.read())
    if "T" in entries:
        entries["big_t"] = entries.pop("T")
    declared = entries.pop("experiment", None)
    if declared is not None and declared != experiment:
        raise ValueError(f"config declares experiment {declared!r}, command line says {experiment!r}")
    sub = None
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            sub = action.choices.get(experiment)
    if sub is None:
        raise ValueError(f"unknown experiment {experiment!r}")
    actions = {a.dest: a for a in sub._actions}
    unknown = set(entries) - set(actions)
    if unknown:
        raise ValueError(f"config keys not understood: {sorted(unknown)}")
    # run config values through the same converters as command-line strings,
    # so a config run and a flag run produce identical headers
    for key, value in entries.items():
        convert = actions[key].type
        if convert is not None:
            entries[key] = convert(value)
    sub.set_defaults(**entries)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        written = _HANDLERS[args.experiment](args)
    except (KeyboardInterrupt, SystemExit):
        raise
    except Exception as exc:
        record = {
            "error": type(exc).__name__,
            "message": str(exc),
            "argv": argv,
        }
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
