"""Render the solver's CSV outputs into publication-style figure images.

Figure ids and their expected inputs:

    fig1    nqcrb_n*.csv files (one numeric curve each + one analytic curve)
    fig2    sweep_*.csv files (one panel per file, guide lines at F=N, F=F_Q)
    fig3    eight snapshot_*.csv files (2x4 grid of paired bar charts)
    supp1   opt_trace_*.csv files (noisy CFI and Hellinger vs iteration)
    supp2   bound_cert.csv (scatter of noisy CFI vs the bound)
    husimi  husimi_*.csv (theta-phi heat map)

Inputs are read-only; rendering twice produces the same image.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_IDS = ("fig1", "fig2", "fig3", "supp1", "supp2", "husimi")


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    inputs: tuple[Path, ...]
    output: Path
    log_sigma: bool = False
    n_particles: int | None = None

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure_id!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def read_columns(path: Path, expected: list[str]) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input CSV missing: {path}")
    lines = path.read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].split(",")
    if header != expected:
        raise ValueError(f"{path}: header {header} != expected {expected}")
    if len(lines) < 2:
        raise ValueError(f"{path}: no data rows")
    data = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return {name: data[:, k] for k, name in enumerate(header)}


def read_sweep(path: Path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input CSV missing: {path}")
    lines = path.read_text().splitlines()
    expected = ["scheme", "readout", "sigma", "phi_opt", "f_c", "f_n", "f_q"]
    if not lines or lines[0].split(",") != expected:
        raise ValueError(f"{path}: not a sweep CSV")
    if len(lines) < 2:
        raise ValueError(f"{path}: no data rows")
    rows = [line.split(",") for line in lines[1:]]
    return [
        {"scheme": r[0], "readout": r[1], "sigma": float(r[2]),
         "phi_opt": float(r[3]), "f_c": float(r[4]), "f_n": float(r[5]),
         "f_q": float(r[6])}
        for r in rows
    ]


def sidecar_config(path: Path) -> dict:
    side = Path(path).with_suffix(".json")
    if side.exists():
        return json.loads(side.read_text()).get("config", {})
    return {}


def render_fig1(inputs, output) -> plt.Figure:
    """Bound curves vs sigma/N: one numeric line per input plus the analytic form."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    analytic = None
    for path in inputs:
        cols = read_columns(path, ["sigma_over_n", "f_numeric", "f_analytic", "f_q"])
        n = sidecar_config(path).get("n")
        label = f"exact, N={n}" if n else f"exact, {Path(path).stem}"
        ax.plot(cols["sigma_over_n"], cols["f_numeric"] / cols["f_q"], label=label)
        analytic = (cols["sigma_over_n"], cols["f_analytic"] / cols["f_q"])
    ax.plot(analytic[0], analytic[1], "k--", label="closed form")
    ax.set_xscale("log")
    ax.set_xlabel(r"$\sigma / N$")
    ax.set_ylabel(r"$F_n / F_Q$")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    return fig


READOUT_STYLE = {
    "linear": dict(color="tab:green", marker="^", ls="--"),
    "echo": dict(color="tab:orange", marker="s", ls="-"),
    "flip_echo": dict(color="tab:red", marker="+", ls="-"),
    "flip_prime_echo": dict(color="tab:red", marker="+", ls="-"),
    "optimal": dict(color="tab:blue", marker="o", ls="-"),
}


def render_fig2(inputs, output, log_sigma: bool = False,
                n_particles: int | None = None) -> plt.Figure:
    """CFI vs sigma per readout with SNL and QCRB guide lines per panel."""
    panels = [read_sweep(p) for p in inputs]
    fig, axes = plt.subplots(1, len(panels), figsize=(4.5 * len(panels), 3.6),
                             squeeze=False)
    for ax, rows, path in zip(axes[0], panels, inputs):
        f_q = rows[0]["f_q"]
        n = n_particles or sidecar_config(path).get("scheme", {}).get("n")
        if n is None:
            raise ValueError(f"{path}: particle number unavailable "
                             "(no sidecar; pass n_particles)")
        sigmas = sorted({r["sigma"] for r in rows})
        by_readout: dict[str, list] = {}
        for r in rows:
            by_readout.setdefault(r["readout"], []).append(r)
        for name, recs in sorted(by_readout.items()):
            recs = sorted(recs, key=lambda r: r["sigma"])
            style = READOUT_STYLE.get(name, {})
            ax.plot([r["sigma"] for r in recs], [r["f_c"] for r in recs],
                    label=name, markersize=4, **style)
        first = sorted(by_readout[next(iter(by_readout))], key=lambda r: r["sigma"])
        ax.plot([r["sigma"] for r in first], [r["f_n"] for r in first],
                color="k", ls="-", lw=1, label="noisy bound")
        ax.axhline(float(n), color="k", ls=":", lw=1)    # shot-noise limit
        ax.axhline(f_q, color="k", ls=":", lw=1)         # QCRB
        if log_sigma:
            ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(r"$\sigma$")
        ax.set_ylabel(r"$F_C$")
        ax.set_title(rows[0]["scheme"])
        ax.legend(frameon=False, fontsize=7)
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    return fig


def render_fig3(inputs, output) -> plt.Figure:
    """2 x len/2 grid of paired outcome distributions."""
    cols = ["m", "p_phi", "dp_phi", "p_phi_delta", "dp_phi_delta"]
    panels = [read_columns(p, cols) for p in inputs]
    half = (len(panels) + 1) // 2
    fig, axes = plt.subplots(2, half, figsize=(2.6 * half, 4.4), squeeze=False)
    for k, (data, path) in enumerate(zip(panels, inputs)):
        ax = axes[k // half][k % half]
        meta = sidecar_config(path)
        ax.bar(data["m"], data["p_phi_delta"], width=0.9, color="violet",
               label=r"$\phi + \delta\phi$")
        ax.bar(data["m"], data["p_phi"], width=0.45, color="tab:blue",
               label=r"$\phi$")
        title = Path(path).stem.replace("snapshot_", "(") + ")"
        if meta.get("readout"):
            title += f" {meta['readout']}"
        ax.set_title(title, fontsize=8)
        ax.set_xlabel("m", fontsize=8)
        ax.tick_params(labelsize=7)
    axes[0][0].legend(frameon=False, fontsize=7)
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    return fig


def render_supp1(inputs, output) -> plt.Figure:
    """Optimizer traces: noisy CFI and distance to the extremal distribution."""
    cols = ["iteration", "f_sigma", "f_zero", "d_h"]
    traces = [read_columns(p, cols) for p in inputs]
    fig, axes = plt.subplots(2, len(traces), figsize=(3.4 * len(traces), 5),
                             squeeze=False)
    for k, (data, path) in enumerate(zip(traces, inputs)):
        side = Path(path).with_suffix(".json")
        bound = None
        if side.exists():
            bound = json.loads(side.read_text()).get("nqcrb_numeric")
        top, bot = axes[0][k], axes[1][k]
        top.plot(data["iteration"], data["f_sigma"], color="tab:blue",
                 label=r"$F_C(\sigma)$")
        top.plot(data["iteration"], data["f_zero"], "k-.", lw=1, label=r"$F_C(0)$")
        if bound is not None:
            top.axhline(bound, color="tab:red", ls=":", lw=1, label="bound")
        top.set_xscale("log")
        top.set_title(Path(path).stem.replace("opt_trace_", ""), fontsize=9)
        top.legend(frameon=False, fontsize=7)
        bot.plot(data["iteration"], data["d_h"], color="tab:purple")
        bot.set_xscale("log")
        bot.set_xlabel("iteration", fontsize=8)
        bot.set_ylabel(r"$d_H$", fontsize=8)
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    return fig


def render_supp2(inputs, output) -> plt.Figure:
    """Random constrained distributions: noisy CFI never above the bound."""
    data = read_columns(inputs[0], ["seed", "f_sigma", "bound"])
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    ax.plot(np.arange(data["f_sigma"].size), data["f_sigma"], ".",
            markersize=2, color="tab:blue", label="random distributions")
    ax.axhline(data["bound"][0], color="tab:red", ls="--", label="noisy bound")
    ax.set_xlabel("sample")
    ax.set_ylabel(r"$F_C(\sigma)$")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    return fig


def render_husimi(inputs, output) -> plt.Figure:
    """theta-phi heat map of the Q function."""
    data = read_columns(inputs[0], ["theta", "phi", "q"])
    theta = np.unique(data["theta"])
    phi = np.unique(data["phi"])
    q = data["q"].reshape(theta.size, phi.size)
    fig, ax = plt.subplots(figsize=(5.5, 3.2))
    mesh = ax.pcolormesh(phi, theta, q, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="Q")
    ax.set_xlabel(r"$\phi$")
    ax.set_ylabel(r"$\theta$")
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    return fig


def render(spec: FigureSpec) -> plt.Figure:
    """Dispatch a FigureSpec to its renderer; raises before any file is written."""
    handlers = {
        "fig1": lambda: render_fig1(spec.inputs, spec.output),
        "fig2": lambda: render_fig2(spec.inputs, spec.output,
                                    log_sigma=spec.log_sigma,
                                    n_particles=spec.n_particles),
        "fig3": lambda: render_fig3(spec.inputs, spec.output),
        "supp1": lambda: render_supp1(spec.inputs, spec.output),
        "supp2": lambda: render_supp2(spec.inputs, spec.output),
        "husimi": lambda: render_husimi(spec.inputs, spec.output),
    }
    try:
        return handlers[spec.figure_id]()
    finally:
        plt.close("all")
