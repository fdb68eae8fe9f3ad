"""PNG figures for CLI reports.

Figures are built on :class:`matplotlib.figure.Figure` directly, so nothing
here touches the global pyplot state or needs a display.
"""
from __future__ import annotations

import numpy as np
from matplotlib.colors import ListedColormap
from matplotlib.figure import Figure

from .pattern import SparsityPattern

# outside pattern, in A, fill-in
_PATTERN_CMAP = ListedColormap(["#d62728", "#2ca02c", "#ffd92f"])


def pattern_codes(a_pattern: SparsityPattern, l_pattern: SparsityPattern) -> np.ndarray:
    """Lower-triangle codes: 0 outside ``l_pattern``, 1 in ``a_pattern``, 2 fill-in.

    The strict upper triangle is ``nan`` so it renders blank.
    """
    n = a_pattern.n
    codes = np.full((n, n), np.nan)
    codes[np.tril_indices(n)] = 0
    for i, j in l_pattern:
        codes[i - 1, j - 1] = 2
    for i, j in a_pattern:
        codes[i - 1, j - 1] = 1
    return codes


def plot_pattern(a_pattern, l_pattern, path, title: str | None = None) -> None:
    n = a_pattern.n
    fig = Figure(figsize=(4.5, 4.5))
    ax = fig.add_subplot()
    ax.imshow(pattern_codes(a_pattern, l_pattern), cmap=_PATTERN_CMAP, vmin=0, vmax=2,
              interpolation="nearest")
    ticks = np.arange(n) if n <= 25 else np.linspace(0, n - 1, 6).astype(int)
    ax.set_xticks(ticks, [str(t + 1) for t in ticks])
    ax.set_yticks(ticks, [str(t + 1) for t in ticks])
    fill = len(l_pattern) - len(a_pattern)
    ax.set_title(title or f"pattern of A and L ({fill} fill-in)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)


def plot_secondary(c_basic, g_basic, c_ult, g_ult, k: int, path) -> None:
    """Nonzero structure of C and G under the basic and ultimate orders.

    ``k`` is the number of pairs outside the pattern; the ultimate panels get
    a block divider there.
    """
    fig = Figure(figsize=(8, 8))
    panels = [(c_basic, "C, basic order"), (g_basic, "G, basic order"),
              (c_ult, "C, ultimate order"), (g_ult, "G, ultimate order")]
    for idx, (mat, title) in enumerate(panels):
        ax = fig.add_subplot(2, 2, idx + 1)
        ax.imshow(mat != 0, cmap="Greys", interpolation="nearest")
        ax.set_title(title)
        ax.set_xticks([])
        ax.set_yticks([])
        if idx >= 2 and 0 < k < mat.shape[0]:
            ax.axhline(k - 0.5, color="tab:red", lw=1)
            ax.axvline(k - 0.5, color="tab:red", lw=1)
    fig.tight_layout()
    fig.savefig(path, dpi=120)


def plot_fillin_histogram(counts: dict[int, int], path, max_fill: int | None = None,
                          title: str | None = None) -> None:
    total = sum(counts.values())
    xs = sorted(counts)
    fig = Figure(figsize=(6, 3.5))
    ax = fig.add_subplot()
    ax.bar(xs, [counts[x] / total for x in xs], width=0.8, color="tab:blue")
    if max_fill is not None:
        ax.set_xlim(-1, max_fill + 1)
    ax.set_xlabel("fill-in entries")
    ax.set_ylabel("empirical probability")
    ax.set_title(title or f"fill-in over {total} orders")
    fig.tight_layout()
    fig.savefig(path, dpi=120)


def plot_convergence(rows, path, title: str | None = None, floor: float = 1e-17) -> None:
    """Semilog error curves from ``ConvergenceTrace.rows()``-style rows.

    Exact zeros are drawn at ``floor`` so they stay on the log axis.
    """
    data = np.array([r[:-1] for r in rows], dtype=float)
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    for col, name in enumerate(("S", "L", "w", "x", "y"), start=1):
        ax.semilogy(data[:, 0], np.maximum(data[:, col], floor), marker=".", label=name)
    ax.set_xlabel("round")
    ax.set_ylabel("error norm")
    ax.set_title(title or "local message passing")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
