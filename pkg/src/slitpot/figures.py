"""Figure rendering for scenario tables (PNG next to each CSV).

One generic dispatcher keyed on the table's plot hint; everything draws on
the Agg backend so the runner works headless.  Figures are a convenience
view of the delimited output, never the canonical record.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .reports import Table  # noqa: E402

__all__ = ["render_table"]


def _numeric_columns(table: Table) -> list[int]:
    out = []
    for j in range(len(table.columns)):
        try:
            ok = all(isinstance(r[j], (int, float)) and r[j] == r[j] for r in table.rows[:5])
        except IndexError:
            ok = False
        if ok:
            out.append(j)
    return out


def _plot_density(table: Table, ax) -> None:
    # expected columns: component, center, density, stderr, model
    cols = {c: i for i, c in enumerate(table.columns)}
    comps = sorted({r[cols["component"]] for r in table.rows})
    for comp in comps:
        rows = [r for r in table.rows if r[cols["component"]] == comp]
        x = [r[cols["center"]] for r in rows]
        y = [r[cols["density"]] for r in rows]
        e = [r[cols["stderr"]] for r in rows]
        ax.errorbar(x, y, yerr=e, fmt=".", ms=3, lw=0.6, alpha=0.8)
        if "model" in cols:
            ax.plot(x, [r[cols["model"]] for r in rows], "k-", lw=0.8, alpha=0.6)
    ax.set_yscale("log")
    ax.set_xlabel(table.columns[cols.get("center", 1)])


def _plot_scatter_fit(table: Table, ax) -> None:
    cols = _numeric_columns(table)
    x = [r[cols[0]] for r in table.rows]
    for j in cols[1:3]:
        ax.plot(x, [r[j] for r in table.rows], "o-", ms=4, lw=0.8,
                label=table.columns[j])
    ax.set_xlabel(table.columns[cols[0]])
    ax.legend(fontsize=7)


def _plot_lines(table: Table, ax, semilogy: bool = False) -> None:
    cols = _numeric_columns(table)
    if len(cols) < 2:
        raise ValueError("nothing numeric to plot")
    x = [r[cols[0]] for r in table.rows]
    for j in cols[1:6]:
        y = [r[j] for r in table.rows]
        if semilogy:
            y = [max(v, 1e-300) for v in y]
        ax.plot(x, y, "o-", ms=3, lw=0.9, label=table.columns[j])
    if semilogy:
        ax.set_yscale("log")
    ax.set_xlabel(table.columns[cols[0]])
    ax.legend(fontsize=7)


def render_table(table: Table, path: Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6.0, 3.6), dpi=130)
    try:
        if table.plot_hint == "density":
            _plot_density(table, ax)
        elif table.plot_hint == "scatter_fit":
            _plot_scatter_fit(table, ax)
        elif table.plot_hint == "semilogy":
            _plot_lines(table, ax, semilogy=True)
        else:
            _plot_lines(table, ax)
        ax.set_title(title, fontsize=9)
        ax.grid(True, alpha=0.25, lw=0.4)
        fig.tight_layout()
        fig.savefig(path)
    finally:
        plt.close(fig)
