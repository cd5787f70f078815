"""Figures written next to the CSV/JSON artifacts.  Non-interactive (Agg) only."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .potential import a_n  # noqa: E402


def _figure(width=6.0, height=None):
    golden = (np.sqrt(5) - 1.0) / 2.0
    fig, ax = plt.subplots(figsize=(width, height or width * golden), dpi=120)
    return fig, ax


def _mark_e_pm(ax, count=12):
    pts = [0.5] + [float(a_n(n)) for n in range(1, count + 1)]
    ax.plot(pts, [0] * len(pts), "k+", ms=5, label="E+")
    ax.plot([-p for p in pts], [0] * len(pts), "kx", ms=4, label="E-")


def _unit_circle(ax):
    t = np.linspace(0, 2 * np.pi, 400)
    ax.plot(np.cos(t), np.sin(t), color="0.6", lw=0.8)
    ax.set_aspect("equal")


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def disc_scalar(z, values, path, label, title=""):
    z = np.asarray(z)
    fig, ax = _figure(5.5, 5.0)
    sc = ax.scatter(z.real, z.imag, c=values, s=6, cmap="viridis", marker="s")
    fig.colorbar(sc, ax=ax, label=label)
    _unit_circle(ax)
    _mark_e_pm(ax)
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    if title:
        ax.set_title(title)
    _save(fig, path)


def fiber_loop(loop_vertices, center, radius, path, title=""):
    v = np.asarray(loop_vertices)
    fig, ax = _figure(5.0, 5.0)
    ax.plot(v.real, v.imag, "-", color="C0", lw=1.2, label="loop")
    if radius > 0:
        t = np.linspace(0, 2 * np.pi, 200)
        ax.fill(center.real + radius * np.cos(t), center.imag + radius * np.sin(t),
                color="C3", alpha=0.4, label="obstacle")
    else:
        ax.plot([center.real], [center.imag], "o", color="C3", label="obstacle")
    ax.plot([0], [0], "k*", label="w = 0")
    ax.set_aspect("equal")
    ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("Re w")
    ax.set_ylabel("Im w")
    if title:
        ax.set_title(title)
    _save(fig, path)


def certificate_panel(report, path):
    n = np.arange(1, len(report.s_values) + 1)
    s = np.abs(np.array(report.s_values))
    fig, ax = _figure()
    floor = np.finfo(float).tiny
    ax.semilogy(n, np.maximum(s, floor), "o-", ms=3, label="|s(a_n)|")
    ax.axhline(report.tol_zero, color="C3", ls="--", lw=1, label="tol_zero")
    ax.set_xlabel("n")
    ax.set_ylabel("Schwarzian in log chart")
    ax.set_title(f"{report.family}: {report.verdict}")
    ax.legend(fontsize=8)
    _save(fig, path)
