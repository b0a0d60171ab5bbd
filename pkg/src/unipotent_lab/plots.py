"""Matplotlib figures for the series and comparison reports.

Rendered next to the delimited table dump when a command is given a
figures directory.  Orders of filtration terms are p-powers, so the
plots show the exact exponent per level.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def p_exponent(order: int, p: int) -> int:
    e = 0
    while order > 1:
        order //= p
        e += 1
    return e


def render_series_figure(path: str, title: str, p: int, orders: list[int]) -> None:
    levels = list(range(1, len(orders) + 1))
    exps = [p_exponent(o, p) for o in orders]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.step(levels, exps, where="mid", marker="o", color="#1f567a")
    ax.set_xlabel("level n")
    ax.set_ylabel(f"log_{p} |level|")
    ax.set_xticks(levels)
    ax.set_yticks(range(0, max(exps) + 1 if exps else 1))
    ax.grid(alpha=0.3)
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_compare_figure(path: str, title: str, p: int,
                          pcentral: list[int], zassenhaus: list[int]) -> None:
    levels = list(range(1, len(pcentral) + 1))
    pc = [p_exponent(o, p) for o in pcentral]
    za = [p_exponent(o, p) for o in zassenhaus]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(levels, pc, marker="o", label="p-central", color="#1f567a")
    ax.plot(levels, za, marker="s", label="zassenhaus", color="#b0413e")
    ax.set_xlabel("level n")
    ax.set_ylabel(f"log_{p} |level|")
    ax.set_xticks(levels)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
