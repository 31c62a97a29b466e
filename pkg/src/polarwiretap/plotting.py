"""Figures written next to the CSV/JSON outputs (Agg backend, PNG files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .channel import make_bsc, secrecy_capacity  # noqa: E402


def plot_rate_table(rows, path, main_p: float | None = None) -> None:
    ok = [r for r in rows if r["rate"] is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    if ok:
        p2 = np.array([r["p2"] for r in ok])
        ax.plot(p2, [r["rate"] for r in ok], "o-", label="achieved rate")
        ax.plot(p2, [r["secrecy_capacity"] for r in ok], "s", mfc="none", label="secrecy capacity")
        if main_p is not None:
            grid = np.linspace(min(main_p, p2.min()), 0.5, 200)
            cs = [secrecy_capacity(make_bsc(main_p), make_bsc(q)) for q in grid]
            ax.plot(grid, cs, "-", color="0.6", lw=1)
        for r in ok:
            if r["X"]:
                ax.annotate(f"|X|={r['X']}", (r["p2"], r["rate"]), fontsize=7,
                            textcoords="offset points", xytext=(4, -10))
    ax.set_xlabel("tap-channel crossover probability")
    ax.set_ylabel("rate (bits per channel use)")
    ax.legend(loc="upper left")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_profile(bob, eve, code, path) -> None:
    """Sorted bit-channel capacity bounds of both channels with the code's sets marked."""
    n = bob.n
    order = np.argsort(0.5 * (bob.c_lo + bob.c_hi), kind="stable")
    fig, ax = plt.subplots(figsize=(7, 4))
    x = np.arange(n)
    ax.fill_between(x, bob.c_lo[order], bob.c_hi[order], color="C0", alpha=0.5, step="mid",
                    label="main channel")
    ax.fill_between(x, eve.c_lo[order], eve.c_hi[order], color="C3", alpha=0.5, step="mid",
                    label="tap channel")
    role = np.zeros(n, dtype=int)
    role[code.A] = 1
    role[code.R] = 2
    ax.scatter(x, -0.04 + 0.0 * x, c=np.array(["0.8", "C2", "C1"])[role[order]], s=2,
               marker="|")
    ax.set_ylim(-0.08, 1.02)
    ax.set_xlabel("bit-channel rank (sorted by main-channel capacity)")
    ax.set_ylabel("capacity bounds")
    ax.set_title(f"n={n}, k={code.k}, r={code.r}, |X|={code.X.size}")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
