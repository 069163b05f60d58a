"""Figure rendering for report runs.

Figures are written next to the delimited output (same stem, .png).  They
are a reading aid only: every number in a figure comes from the CSV/JSON
artifacts, which remain the deterministic record.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .meansquare import MeanSquareReport


def render_mean_square_figure(report: MeanSquareReport, path: str | Path) -> None:
    """Two panels: the leading-coefficient convergence I(T)/T against the
    squared-series reference, and |residual| on log-log axes with the
    fitted slope."""
    Ts = np.array([p[0] for p in report.I_values])
    coeffs = np.array(report.coefficient_estimates)
    resid = np.array(report.residuals)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))

    ax1.plot(Ts, coeffs, "o-", label="I(T)/T")
    ax1.axhline(report.zeta_sq_ref, color="k", lw=0.8, ls="--",
                label="squared-series reference")
    ax1.set_xlabel("T")
    ax1.set_ylabel("I(T)/T")
    ax1.set_title(f"{report.regime.target} leading coefficient")
    ax1.legend(fontsize=8)

    mag = np.abs(resid)
    ok = mag > 0
    ax2.loglog(Ts[ok], mag[ok], "s-", label="|I(T) - ref T|")
    if np.isfinite(report.fitted_exponent) and ok.sum() >= 2:
        anchor = mag[ok][-1] / Ts[ok][-1] ** report.fitted_exponent
        ax2.loglog(Ts, anchor * Ts ** report.fitted_exponent, "k--", lw=0.8,
                   label=f"slope {report.fitted_exponent:.3f}")
    reg = report.regime
    if reg.theorem != "none" and np.isfinite(reg.error_exponent):
        label = f"T^{reg.error_exponent:.3g}"
        if reg.log_power:
            label = f"(T log T)^0.5" if reg.log_inside_sqrt else \
                f"T^{reg.error_exponent:.3g} (log T)^{reg.log_power}"
        anchor = mag[ok][-1] / Ts[ok][-1] ** reg.error_exponent if ok.sum() else 1.0
        ax2.loglog(Ts, anchor * Ts ** reg.error_exponent, "r:", lw=0.8,
                   label=f"predicted {label}")
    ax2.set_xlabel("T")
    ax2.set_ylabel("|residual|")
    ax2.set_title(f"regime {reg.theorem}")
    ax2.legend(fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def render_mv_figure(rows: list[dict], kappa: float, path: str | Path) -> None:
    """Scatter of |lhs - main| against the budget, with the kappa line."""
    budgets = np.array([r["budget"] for r in rows])
    diffs = np.array([abs(r["lhs"] - r["main"]) for r in rows])
    fig, ax = plt.subplots(figsize=(4.6, 3.6))
    ax.scatter(budgets, diffs, s=14)
    lim = max(budgets.max(), 1e-12)
    xs = np.linspace(0, lim, 64)
    ax.plot(xs, kappa * xs, "k--", lw=0.8, label=f"kappa = {kappa:g}")
    ax.set_xlabel("sum n |a_n|^2")
    ax.set_ylabel("|lhs - T sum|a_n|^2|")
    ax.set_title("Dirichlet polynomial mean value")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def render_relation_figure(rows: list[dict], path: str | Path) -> None:
    """Per-point |residual| against its budget for the three-term relation."""
    idx = np.arange(len(rows))
    res = np.array([r["residual_abs"] for r in rows])
    bud = np.array([r["budget"] for r in rows])
    fig, ax = plt.subplots(figsize=(4.6, 3.6))
    ax.semilogy(idx, np.maximum(res, 1e-300), "o", label="|residual|")
    ax.semilogy(idx, bud, "k_", markersize=12, label="budget")
    ax.set_xlabel("point index")
    ax.set_ylabel("magnitude")
    ax.set_title("three-term relation check")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
