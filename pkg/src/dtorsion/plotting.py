"""Matplotlib figures written next to the delimited reports."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_phase_histogram(hist, path: str, title: str = "") -> str:
    """Bar chart of exact weight per phase exponent k (phase exp(2 pi i k/m))."""
    m = hist.modulus
    ks = list(range(m))
    weights = [float(hist.counts.get(k, 0)) for k in ks]
    fig, ax = plt.subplots(figsize=(max(4, 0.5 * m + 2), 3.2))
    ax.bar(ks, weights, color="tab:blue")
    ax.set_xticks(ks)
    ax.set_xlabel(f"phase exponent k  (m = {m})")
    ax.set_ylabel("weight  sum 1/|C(g)|")
    z = hist.value
    ax.set_title(f"{title}  Z = {z.real:.6g}{z.imag:+.6g}i".strip())
    fig.tight_layout()
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_scan(rows: list, path: str, n: int) -> str:
    """|H_n| next to |H_{0n}| for every scanned group that succeeded."""
    ok = [r for r in rows if "error" not in r and "homology" in r]
    labels = [r["group"] for r in ok]
    h = [_order(r["homology"]) for r in ok]
    h0 = [_order(r["h0n"]) if "h0n" in r else 0 for r in ok]
    x = range(len(ok))
    fig, ax = plt.subplots(figsize=(max(4, 0.8 * len(ok) + 2), 3.6))
    ax.bar([i - 0.2 for i in x], h, width=0.4, label=f"|H_{n}|")
    ax.bar([i + 0.2 for i in x], h0, width=0.4, label=f"|H_0{n}|")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_yscale("log", base=2)
    ax.legend()
    fig.tight_layout()
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _order(inv: dict) -> int:
    out = 1
    for d in inv["torsion"]:
        out *= d
    return out
