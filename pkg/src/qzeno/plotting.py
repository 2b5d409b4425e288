"""Figure rendering for sweep output.

Renders the loss-current curves I_loss(gamma) grouped by enhancement and
bias to an image file next to the CSV.  Headless backend; no display
required.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["render_sweep_figure"]


def render_sweep_figure(records, path, title=None, logy=False):
    """One panel, one line per (e_nh, delta_mu) combination.

    ``records`` is any iterable of objects with gamma, e_nh, delta_mu and
    I_loss attributes (SweepRecord, or rows read back from CSV).
    Returns the path written.
    """
    groups = {}
    for r in records:
        groups.setdefault((r.e_nh, r.delta_mu), []).append(r)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    enh_values = sorted({k[0] for k in groups})
    dmu_values = sorted({k[1] for k in groups})
    styles = ["-", "--", ":", "-."]

    for (enh, dmu), rows in sorted(groups.items()):
        rows.sort(key=lambda r: r.gamma)
        color = colors[enh_values.index(enh) % len(colors)]
        style = styles[dmu_values.index(dmu) % len(styles)]
        ax.plot([r.gamma for r in rows], [r.I_loss for r in rows],
                style, color=color,
                label=rf"$e_{{\rm nh}}={enh:g},\ \Delta\mu={dmu:g}$")

    ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(r"drive intensity $\gamma$")
    ax.set_ylabel(r"loss current $I_{\rm loss}$")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8, ncol=max(1, len(groups) // 6))
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path
