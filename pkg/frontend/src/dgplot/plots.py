"""Figure builders.  Every figure is a pure function of the CSV contents
(plus an optional matplotlib style mapping); nothing is recomputed."""

import json
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .csvdata import CsvError, Runs, read_runs

_MARKERS = ("o", "s", "^", "d", "v", "*")


def _apply_style(style_path):
    if style_path:
        with open(style_path) as fh:
            matplotlib.rcParams.update(json.load(fh))


def convergence_figure(runs: Runs):
    """Error against sqrt(DoF), log y, one line per method and error norm.

    Falls back to a bar chart when the CSV holds a single run per method.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    multi = any(len(runs.column(m, "dofs")) > 1 for m in runs.methods)
    if multi:
        for k, method in enumerate(runs.methods):
            sqrt_dofs = [math.sqrt(d) for d in runs.column(method, "dofs")]
            for norm, dash in (("err_dg", "-"), ("err_h1", "--")):
                ax.semilogy(
                    sqrt_dofs,
                    runs.column(method, norm),
                    dash,
                    marker=_MARKERS[k % len(_MARKERS)],
                    label=f"{method} {norm[4:].upper()}",
                )
        ax.set_xlabel(r"$\sqrt{\mathrm{DoF}}$")
    else:
        labels = []
        for k, method in enumerate(runs.methods):
            for norm in ("err_dg", "err_h1"):
                labels.append(f"{method} {norm[4:].upper()}")
        values = [
            runs.column(method, norm)[0]
            for method in runs.methods
            for norm in ("err_dg", "err_h1")
        ]
        ax.bar(range(len(values)), values)
        ax.set_xticks(range(len(values)), labels, rotation=30)
        ax.set_yscale("log")
    ax.set_ylabel("error")
    ax.grid(True, which="both", alpha=0.3)
    if multi:
        ax.legend()
    fig.tight_layout()
    return fig


def plot_convergence(csv_path, out_path, style_path=None):
    _apply_style(style_path)
    fig = convergence_figure(read_runs(csv_path))
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def penalty_condition_figure(runs: Runs, penalty_column="max_sigma_interior",
                             cond_column="cond2"):
    """Two panels against the polynomial degree: max penalty (left) and
    condition number (right), both log y, one line per method."""
    for col in (penalty_column, cond_column):
        if col not in runs.rows[0]:
            raise CsvError(f"no column {col!r}")
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    for k, method in enumerate(runs.methods):
        ps = runs.column(method, "p_max")
        marker = _MARKERS[k % len(_MARKERS)]
        axes[0].semilogy(ps, runs.column(method, penalty_column), marker=marker, label=method)
        axes[1].semilogy(ps, runs.column(method, cond_column), marker=marker, label=method)
    axes[0].set_ylabel(penalty_column)
    axes[1].set_ylabel(cond_column)
    for ax in axes:
        ax.set_xlabel("p")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    fig.tight_layout()
    return fig


def plot_penalty_condition(csv_path, out_path, style_path=None,
                           penalty_column="max_sigma_interior", cond_column="cond2"):
    _apply_style(style_path)
    fig = penalty_condition_figure(
        read_runs(csv_path), penalty_column=penalty_column, cond_column=cond_column
    )
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
