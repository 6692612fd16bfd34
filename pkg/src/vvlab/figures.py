"""Figure rendering for the report path.

Reads the delimited run report and writes PNG figures next to it.  Only the
`report` subcommand touches matplotlib; compute paths never import it.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["read_report_csv", "render_report"]

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def read_report_csv(path) -> dict[str, np.ndarray]:
    """Columns of a run-report CSV; numeric columns as float arrays."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows:
        raise ValueError(f"empty report: {path}")
    cols: dict[str, np.ndarray] = {}
    for name in rows[0]:
        raw = [r[name] for r in rows]
        if name == "equation":
            cols[name] = np.array(raw)
        else:
            cols[name] = np.array([float(v) if v else np.nan for v in raw])
    return cols


def _finite(*arrays):
    mask = np.ones(arrays[0].shape, dtype=bool)
    for a in arrays:
        mask &= np.isfinite(a)
    return mask


def _fig_sup_vs_time(cols, out: Path):
    t, sup = cols["t"], cols["sup_norm"]
    mask = _finite(t, sup)
    if not mask.any():
        return None
    fig, ax = plt.subplots()
    for key in sorted(set(zip(cols["m"][mask], cols["nu"][mask]))):
        sel = mask & (cols["m"] == key[0]) & (cols["nu"] == key[1])
        order = np.argsort(t[sel])
        ax.plot(t[sel][order], sup[sel][order], "o-", ms=3,
                label=f"m={key[0]:g}, nu={key[1]:.2g}")
    ax.set_xlabel("t")
    ax.set_ylabel("sup norm")
    if len(ax.get_lines()) <= 10:
        ax.legend(fontsize=7)
    fig.savefig(out)
    plt.close(fig)
    return out


def _fig_slack_vs_m(cols, out: Path):
    m, slack, bound = cols["m"], cols["slack"], cols["bound"]
    mask = _finite(m, slack, bound) & (bound > 0)
    if not mask.any() or len(set(m[mask])) < 2:
        return None
    fig, ax = plt.subplots()
    ax.semilogx(m[mask], slack[mask] / bound[mask], "o", ms=4)
    ax.axhline(0.0, color="k", lw=0.8)
    ax.axhline(-0.05, color="r", lw=0.8, ls="--", label="-5% tolerance")
    ax.set_xlabel("mollification scale m")
    ax.set_ylabel("slack / bound")
    ax.legend(fontsize=8)
    fig.savefig(out)
    plt.close(fig)
    return out


def _fig_residual_decay(cols, out: Path):
    m, res = cols["m"], cols["residual"]
    mask = _finite(m, res) & (res > 0)
    if not mask.any() or len(set(m[mask])) < 2:
        return None
    fig, ax = plt.subplots()
    order = np.argsort(m[mask])
    ax.loglog(m[mask][order], res[mask][order], "o-", ms=4)
    ax.set_xlabel("mollification scale m")
    ax.set_ylabel("residual / gap")
    fig.savefig(out)
    plt.close(fig)
    return out


def render_report(csv_path, out_dir=None) -> list[Path]:
    """Render the standard figures for a run-report CSV; returns the paths."""
    csv_path = Path(csv_path)
    out_dir = csv_path.parent if out_dir is None else Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cols = read_report_csv(csv_path)
    needed = {"t", "sup_norm", "m", "nu", "slack", "bound", "residual"}
    missing = needed - set(cols)
    if missing:
        raise ValueError(f"{csv_path} is not a run report: missing columns "
                         f"{sorted(missing)}")
    stem = csv_path.stem
    written = []
    with plt.rc_context(_STYLE):
        for maker, suffix in ((_fig_sup_vs_time, "sup_vs_time"),
                              (_fig_slack_vs_m, "slack_vs_m"),
                              (_fig_residual_decay, "residual_decay")):
            out = maker(cols, out_dir / f"{stem}_{suffix}.png")
            if out is not None:
                written.append(out)
    return written
