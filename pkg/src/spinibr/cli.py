"""Command-line front end: every figure's data as deterministic CSV + JSON.

Subcommands
-----------
nqcrb-curve    exact and closed-form noisy bounds over a sigma/N grid
cfi-sweep      phi-optimized noisy Fisher information per readout and sigma
prob-snapshot  paired outcome distributions (the eight bar panels)
opt-verify     hill-climb traces from the three reference starts
bound-cert     random constrained distributions vs the bound
husimi         Q-function field of a prepared state
state-report   outcome distributions in the x/y/z bases plus state summary

Each CSV gets a same-name .json sidecar carrying the resolved parameters
and the library version; identical configuration and seed give
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .csvio import write_csv, write_sidecar
from .ibr import ReadoutKind, SweepRecord, build_readout, cfi_sweep, sweep_setup
from .metrology import (
    ProbDist,
    hellinger,
    measurement_distribution,
    optimal_phase_axis,
    phase_axis,
    qfi_mixed,
    qfi_pure,
)
from .noise import apply_noise, evaluate_nqcrb, noise_kernel
from .optimizer import hill_climb, random_constrained_dist, reference_starts
from .spin_core import MixedState, Unitary, build_spin_ops, expm_generator, husimi_q
from .state_prep import prepared_state, scheme_from_dict

DEFAULT_READOUTS = {
    "oat": ["linear", "echo", "flip_echo", "optimal"],
    "tnt": ["linear", "echo", "flip_echo", "optimal"],
    "tact": ["linear", "echo", "flip_echo", "optimal"],
    "cat": ["linear", "echo", "flip_echo", "optimal"],
    "css": ["linear", "echo", "flip_echo", "optimal"],
    "qpt": ["linear", "echo", "flip_prime_echo", "optimal"],
    "qnd": ["linear", "echo", "flip_echo"],
}


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _scheme_from_args(args, cfg: dict):
    spec = dict(cfg.get("scheme", {}))
    if args.scheme is not None:
        spec["kind"] = args.scheme
    if args.n is not None:
        spec["n"] = args.n
    for key in ("r", "chi_t0", "delta", "steps"):
        val = getattr(args, key, None)
        if val is not None:
            spec[key] = val
    if "kind" not in spec:
        raise ValueError("no scheme given (use --scheme or a config file)")
    if "n" not in spec:
        raise ValueError("no particle number given (use --n or a config file)")
    return scheme_from_dict(spec)


def _scheme_payload(prep) -> dict:
    return {
        "kind": prep.kind,
        "n": prep.n_particles,
        "r": prep.r,
        "chi_t0": prep.chi_t0,
        "delta": prep.delta,
        "steps": prep.steps,
    }


def _base_payload(command: str, config: dict) -> dict:
    return {"command": command, "config": config, "version": __version__}


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("config file must hold a JSON object")
    return obj


def _pick(args_value, cfg: dict, key: str, default):
    if args_value is not None:
        return args_value
    if key in cfg:
        return cfg[key]
    return default


# ---------------------------------------------------------------- commands

def cmd_nqcrb_curve(args) -> int:
    cfg = _load_config(args.config)
    ns = args.n if args.n else cfg.get("n", [10, 100, 1000])
    points = _pick(args.points, cfg, "points", 50)
    lo = _pick(args.sigma_over_n_min, cfg, "sigma_over_n_min", 1e-2)
    hi = _pick(args.sigma_over_n_max, cfg, "sigma_over_n_max", 1.0)
    out = Path(args.out)
    grid = np.logspace(np.log10(lo), np.log10(hi), points)
    written = []
    for n in ns:
        f_q = float(n) ** 2
        rows = []
        for s in grid:
            res = evaluate_nqcrb(n, f_q, s * n)
            rows.append([s, res.f_numeric, res.f_analytic, f_q])
        path = out / f"nqcrb_n{n}.csv"
        write_csv(path, ["sigma_over_n", "f_numeric", "f_analytic", "f_q"], rows)
        config = {"n": n, "f_q": f_q, "points": points,
                  "sigma_over_n_min": lo, "sigma_over_n_max": hi}
        write_sidecar(path, _base_payload("nqcrb-curve", config))
        written.append(str(path))
    print("\n".join(written))
    return 0


def _sigma_list(args, cfg) -> list[float]:
    raw = _pick(args.sigmas, cfg, "sigmas", None)
    if raw is None:
        return [x / 2.0 for x in range(0, 21)]  # 0, 0.5, ..., 10
    if isinstance(raw, str):
        return [float(x) for x in raw.split(",") if x.strip()]
    return [float(x) for x in raw]


def _parse_phi_grid(raw):
    """Either "lo:hi:count" or a comma list / JSON array of phi values."""
    if raw is None:
        return None
    if isinstance(raw, str):
        if ":" in raw:
            lo, hi, count = raw.split(":")
            return np.linspace(float(lo), float(hi), int(count))
        return np.array([float(x) for x in raw.split(",") if x.strip()])
    return np.asarray([float(x) for x in raw])


def cmd_cfi_sweep(args) -> int:
    cfg = _load_config(args.config)
    prep = _scheme_from_args(args, cfg)
    sigmas = _sigma_list(args, cfg)
    raw_readouts = _pick(args.readouts, cfg, "readouts", None)
    if raw_readouts is None:
        readouts = DEFAULT_READOUTS[prep.kind]
    elif isinstance(raw_readouts, str):
        readouts = [r.strip() for r in raw_readouts.split(",") if r.strip()]
    else:
        readouts = list(raw_readouts)
    threads = args.threads or 1
    phi_grid = _parse_phi_grid(_pick(args.phi_grid, cfg, "phi_grid", None))
    setup = sweep_setup(prep)
    records: list[SweepRecord] = []
    for name in readouts:
        records.extend(cfi_sweep(prep, ReadoutKind(name), sigmas, phi_grid,
                                 setup=setup, threads=threads))
    records.sort(key=lambda r: (r.scheme, r.readout, r.sigma))
    out = Path(args.out)
    path = out / f"sweep_{prep.kind}.csv"
    rows = [[r.scheme, r.readout, r.sigma, r.phi_opt, r.f_c, r.f_n, r.f_q]
            for r in records]
    write_csv(path, ["scheme", "readout", "sigma", "phi_opt", "f_c", "f_n", "f_q"], rows)
    if phi_grid is None:
        grid_echo = {"points": 201, "upper": "2*phi0", "floor": 4e-6}
    else:
        grid_echo = [float(x) for x in phi_grid]
    config = {"scheme": _scheme_payload(prep), "sigmas": sigmas,
              "readouts": readouts, "threads": threads,
              "phi_grid": grid_echo,
              "f_q": setup.f_q, "phi0": setup.phi0,
              "axis": [float(x) for x in setup.axis.n]}
    write_sidecar(path, _base_payload("cfi-sweep", config))
    print(path)
    return 0


SNAPSHOT_PANELS = (
    # (panel, readout, at_phi0, noisy)
    ("a", "echo", True, False),
    ("b", "optimal", True, False),
    ("c", "echo", False, False),
    ("d", "flip_echo", False, False),
    ("e", "echo", True, True),
    ("f", "optimal", True, True),
    ("g", "echo", False, True),
    ("h", "flip_echo", False, True),
)


def cmd_prob_snapshot(args) -> int:
    cfg = _load_config(args.config)
    prep = _scheme_from_args(args, cfg)
    sigma = _pick(args.sigma, cfg, "sigma", 3.0)
    dphi = _pick(args.dphi, cfg, "dphi", 1.0 / prep.n_particles)
    setup = sweep_setup(prep)
    kern = noise_kernel(prep.n_particles, sigma)
    state = prepared_state(prep, setup.ops)
    out = Path(args.out)

    def dist_at(u2: Unitary, phi: float) -> ProbDist:
        from .metrology import encode_phase
        encoded = encode_phase(state, setup.axis, phi)
        return measurement_distribution(encoded, u2, setup.axis)

    readout_cache: dict[str, Unitary] = {}
    hell = {}
    written = []
    m_vals = setup.ops.m_values
    for panel, readout, at_phi0, noisy in SNAPSHOT_PANELS:
        if readout not in readout_cache:
            readout_cache[readout] = build_readout(ReadoutKind(readout), setup)
        u2 = readout_cache[readout]
        phi = setup.phi0 if at_phi0 else 0.0
        d1 = dist_at(u2, phi)
        d2 = dist_at(u2, phi + dphi)
        if noisy:
            d1 = apply_noise(d1, kern)
            d2 = apply_noise(d2, kern)
        hell[panel] = hellinger(d1, d2)
        rows = [[m_vals[i], d1.p[i], d1.dp[i], d2.p[i], d2.dp[i]]
                for i in range(setup.ops.dim)]
        path = out / f"snapshot_{panel}.csv"
        write_csv(path, ["m", "p_phi", "dp_phi", "p_phi_delta", "dp_phi_delta"], rows)
        config = {"scheme": _scheme_payload(prep), "sigma": sigma, "dphi": dphi,
                  "panel": panel, "readout": readout,
                  "phi": phi, "noisy": noisy, "phi0": setup.phi0}
        payload = _base_payload("prob-snapshot", config)
        payload["hellinger"] = hell[panel]
        write_sidecar(path, payload)
        written.append(str(path))
    summary = out / "snapshot_summary.json"
    with open(summary, "w", newline="\n") as fh:
        json.dump(_base_payload("prob-snapshot", {
            "scheme": _scheme_payload(prep), "sigma": sigma, "dphi": dphi,
            "phi0": setup.phi0, "hellinger": hell}), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print("\n".join(written + [str(summary)]))
    return 0


def cmd_opt_verify(args) -> int:
    cfg = _load_config(args.config)
    n = _pick(args.n, cfg, "n", 10)
    sigma = _pick(args.sigma, cfg, "sigma", 4.0)
    f0 = _pick(args.f0, cfg, "f0", 1.0)
    iterations = int(_pick(args.iterations, cfg, "iterations", 100_000))
    max_angle = _pick(args.max_angle, cfg, "max_angle", 0.1)
    seed = _pick(args.seed, cfg, "seed", 7)
    out = Path(args.out)
    bound = evaluate_nqcrb(n, f0, sigma).f_numeric
    written = []
    for idx, (name, start) in enumerate(sorted(reference_starts(n, f0).items())):
        final, trace = hill_climb(start, sigma, iterations, max_angle, seed + idx)
        path = out / f"opt_trace_{name}.csv"
        write_csv(path, ["iteration", "f_sigma", "f_zero", "d_h"],
                  ([t.iteration, t.f_sigma, t.f_zero, t.d_h_to_popt] for t in trace))
        config = {"n": n, "sigma": sigma, "f0": f0, "iterations": iterations,
                  "max_angle": max_angle, "seed": seed + idx, "start": name}
        payload = _base_payload("opt-verify", config)
        payload["final_f_sigma"] = trace[-1].f_sigma
        payload["final_d_h"] = trace[-1].d_h_to_popt
        payload["nqcrb_numeric"] = bound
        write_sidecar(path, payload)
        written.append(str(path))
    print("\n".join(written))
    return 0


def cmd_bound_cert(args) -> int:
    cfg = _load_config(args.config)
    n = _pick(args.n, cfg, "n", 10)
    sigma = _pick(args.sigma, cfg, "sigma", 4.0)
    f0 = _pick(args.f0, cfg, "f0", 1.0)
    samples = int(_pick(args.samples, cfg, "samples", 10_000))
    seed = int(_pick(args.seed, cfg, "seed", 7))
    out = Path(args.out)
    bound = evaluate_nqcrb(n, f0, sigma).f_numeric
    kern = noise_kernel(n, sigma)
    from .metrology import cfi
    rows = []
    violations = 0
    for k in range(samples):
        d = random_constrained_dist(n, f0, seed + k)
        f_sig = cfi(apply_noise(d, kern))
        if f_sig > bound + 1e-9:
            violations += 1
        rows.append([seed + k, f_sig, bound])
    path = out / "bound_cert.csv"
    write_csv(path, ["seed", "f_sigma", "bound"], rows)
    config = {"n": n, "sigma": sigma, "f0": f0, "samples": samples, "seed": seed}
    payload = _base_payload("bound-cert", config)
    payload["violations"] = violations
    payload["nqcrb_numeric"] = bound
    write_sidecar(path, payload)
    print(path)
    return 0


def cmd_husimi(args) -> int:
    cfg = _load_config(args.config)
    prep = _scheme_from_args(args, cfg)
    n_theta = _pick(args.theta_points, cfg, "theta_points", 200)
    n_phi = _pick(args.phi_points, cfg, "phi_points", 400)
    ops = build_spin_ops(prep.n_particles)
    state = prepared_state(prep, ops)
    field = husimi_q(state, ops, grid=(n_theta, n_phi))
    out = Path(args.out)
    path = out / f"husimi_{prep.kind}.csv"
    rows = ([field.theta[i], field.phi[j], field.q[i, j]]
            for i in range(n_theta) for j in range(n_phi))
    write_csv(path, ["theta", "phi", "q"], rows)
    config = {"scheme": _scheme_payload(prep),
              "theta_points": n_theta, "phi_points": n_phi}
    payload = _base_payload("husimi", config)
    payload["integral"] = field.integral()
    write_sidecar(path, payload)
    print(path)
    return 0


def cmd_state_report(args) -> int:
    cfg = _load_config(args.config)
    prep = _scheme_from_args(args, cfg)
    ops = build_spin_ops(prep.n_particles)
    state = prepared_state(prep, ops)
    if isinstance(state, MixedState):
        axis = phase_axis(np.array([0.0, 1.0, 0.0]), ops)
        f_q = qfi_mixed(state, axis)
        purity = state.purity()
    else:
        axis = optimal_phase_axis(state, ops)
        f_q = qfi_pure(state, axis)
        purity = 1.0
    rot_for = {
        "z": None,
        "x": expm_generator(ops.jy, np.pi / 2),
        "y": expm_generator(ops.jx, -np.pi / 2),
    }
    out = Path(args.out)
    written = []
    for basis, rot in rot_for.items():
        d = measurement_distribution(state, rot, axis)
        path = out / f"dist_{prep.kind}_{basis}.csv"
        rows = [[ops.m_values[i], d.p[i], d.dp[i]] for i in range(ops.dim)]
        write_csv(path, ["m", "p", "dp"], rows)
        config = {"scheme": _scheme_payload(prep), "basis": basis}
        payload = _base_payload("state-report", config)
        payload["f_q"] = f_q
        payload["axis"] = [float(x) for x in axis.n]
        payload["purity"] = purity
        write_sidecar(path, payload)
        written.append(str(path))
    print("\n".join(written))
    return 0


# ---------------------------------------------------------------- parser

def _add_scheme_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=["oat", "tact", "tnt", "cat", "qpt", "qnd", "css"])
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--chi-t0", dest="chi_t0", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--steps", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinibr", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--config", help="JSON config file (flags override)")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)

    p = sub.add_parser("nqcrb-curve", help="noisy bound curves vs sigma/N")
    common(p)
    p.add_argument("--n", type=int, action="append")
    p.add_argument("--points", type=int)
    p.add_argument("--sigma-over-n-min", dest="sigma_over_n_min", type=float)
    p.add_argument("--sigma-over-n-max", dest="sigma_over_n_max", type=float)
    p.set_defaults(func=cmd_nqcrb_curve)

    p = sub.add_parser("cfi-sweep", help="phi-optimized CFI per readout and sigma")
    common(p)
    _add_scheme_flags(p)
    p.add_argument("--readouts", help="comma list from "
                   "{linear,echo,flip_echo,flip_prime_echo,optimal}")
    p.add_argument("--sigmas", help="comma list of sigma values")
    p.add_argument("--phi-grid", dest="phi_grid",
                   help="'lo:hi:count' or comma list (default [0, 2 phi0], 201 pts)")
    p.set_defaults(func=cmd_cfi_sweep)

    p = sub.add_parser("prob-snapshot", help="paired distributions for the bar panels")
    common(p)
    _add_scheme_flags(p)
    p.add_argument("--sigma", type=float)
    p.add_argument("--dphi", type=float)
    p.set_defaults(func=cmd_prob_snapshot)

    p = sub.add_parser("opt-verify", help="hill-climb traces from reference starts")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--f0", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--max-angle", dest="max_angle", type=float)
    p.set_defaults(func=cmd_opt_verify)

    p = sub.add_parser("bound-cert", help="random constrained distributions vs the bound")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--f0", type=float)
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_bound_cert)

    p = sub.add_parser("husimi", help="Q-function field of a prepared state")
    common(p)
    _add_scheme_flags(p)
    p.add_argument("--theta-points", dest="theta_points", type=int)
    p.add_argument("--phi-points", dest="phi_points", type=int)
    p.set_defaults(func=cmd_husimi)

    p = sub.add_parser("state-report", help="x/y/z distributions and state summary")
    common(p)
    _add_scheme_flags(p)
    p.set_defaults(func=cmd_state_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
