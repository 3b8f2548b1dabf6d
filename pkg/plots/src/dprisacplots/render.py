"""Figure builders for the six experiment families.

Every renderer accepts either the per-seed CSV or the aggregated summary CSV
(where one exists); per-seed data is averaged here and drawn with error bars.
Input files are read only, never modified.
"""

from collections import defaultdict
from dataclasses import dataclass
import math

import numpy as np

from .schemas import EXPERIMENTS, SchemaError, load_rows
from . import style


@dataclass
class FigureSpec:
    experiment: str
    csv_path: str
    out_path: str

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise SchemaError(f"unknown experiment {self.experiment!r}")


def _aggregate(rows, key_idx, value_idx):
    """(mean, stderr) of the value column per key tuple, insertion-ordered."""
    groups = defaultdict(list)
    for row in rows:
        groups[tuple(row[i] for i in key_idx)].append(float(row[value_idx]))
    out = {}
    for key, vals in groups.items():
        arr = np.asarray(vals)
        se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
        out[key] = (float(arr.mean()), se)
    return out


def _series_color(i):
    return style.SERIES_COLORS[i % len(style.SERIES_COLORS)]


def _render_convergence(header, rows, ax):
    if header[0] == "iteration":  # penalty residual trace
        it = [int(r[0]) for r in rows]
        for i, (col, label) in enumerate([(2, "||X - F||^2"), (3, "||Y - V1F||^2"),
                                          (4, "||Z - V2F||^2")]):
            vals = [max(float(r[col]), 1e-16) for r in rows]
            ax.semilogy(it, vals, color=_series_color(i), label=label)
        ax.set_xlabel("penalty outer iteration")
        ax.set_ylabel("coupling residual")
    else:
        series = defaultdict(list)
        for r in rows:
            series[(r[0], r[1])].append((int(r[2]), float(r[3])))
        for i, ((l, seed), pts) in enumerate(sorted(series.items())):
            pts.sort()
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    color=_series_color(i), label=f"L={l} (seed {seed})")
        ax.set_xlabel("iteration")
        ax.set_ylabel("sum rate [nats/s/Hz]")
    ax.legend()


def _render_sp_comparison(header, rows, ax):
    if header[2] == "mean_rate_nats":
        stats = {(r[0], r[1]): (float(r[2]), float(r[3])) for r in rows}
    else:
        stats = _aggregate(rows, (0, 1), 3)
    nts = sorted({k[0] for k in stats}, key=float)
    variants = ["sp1x", "dp", "sp2x"]
    present = [v for v in variants if any(k[1] == v for k in stats)]
    width = 0.8 / max(len(present), 1)
    x = np.arange(len(nts))
    for i, var in enumerate(present):
        means = [stats.get((nt, var), (np.nan, 0.0))[0] for nt in nts]
        errs = [stats.get((nt, var), (np.nan, 0.0))[1] for nt in nts]
        ax.bar(x + (i - (len(present) - 1) / 2) * width, means, width,
               yerr=errs if any(errs) else None, capsize=3,
               color=_series_color(i), label=var)
    ax.set_xticks(x)
    ax.set_xticklabels(nts)
    ax.set_xlabel("transmit elements n_t")
    ax.set_ylabel("sum rate [nats/s/Hz]")
    ax.legend()


def _render_quantization(header, rows, ax):
    if header[4] == "mean_rate_nats":
        stats = {(r[0], r[1], r[2], r[3]): (float(r[4]), float(r[5])) for r in rows}
    else:
        stats = _aggregate(rows, (0, 1, 2, 3), 5)
    curves = sorted({(k[0], k[1]) for k in stats})
    for i, (nt, var) in enumerate(curves):
        color = _series_color(i)
        bits = sorted({int(k[3]) for k in stats
                       if k[0] == nt and k[1] == var and k[2] == "quantized"})
        means = [stats[(nt, var, "quantized", str(b))][0] for b in bits]
        errs = [stats[(nt, var, "quantized", str(b))][1] for b in bits]
        ax.errorbar(bits, means, yerr=errs if any(errs) else None, capsize=3,
                    color=color, marker="o", label=f"{var}, n_t={nt} (quantized)")
        cont = stats.get((nt, var, "continuous", "0"))
        if cont:
            ax.axhline(cont[0], color=color, linestyle="--", linewidth=1.0,
                       label=f"{var}, n_t={nt} (continuous)")
    ax.set_xlabel("quantization bits")
    ax.set_ylabel("sum rate [nats/s/Hz]")
    ax.legend()


def _render_xpd(header, rows, ax):
    if header[3] == "mean_rate_nats":
        stats = {(r[0], r[1]): (float(r[3]), float(r[4])) for r in rows}
    else:
        stats = _aggregate(rows, (0, 1), 4)
    ls = sorted({k[0] for k in stats}, key=float)
    for i, l in enumerate(ls):
        xs = sorted({float(k[1]) for k in stats if k[0] == l})
        means = [stats[(l, _fmt_like(stats, l, x))][0] for x in xs]
        errs = [stats[(l, _fmt_like(stats, l, x))][1] for x in xs]
        ax.errorbar(xs, means, yerr=errs if any(errs) else None, capsize=3,
                    color=_series_color(i), marker="o", label=f"L={l}")
    ax.set_xlabel("LoS XPD [dB]")
    ax.set_ylabel("sum rate [nats/s/Hz]")
    ax.legend()


def _fmt_like(stats, first, x):
    for k in stats:
        if k[0] == first and float(k[1]) == x:
            return k[1]
    raise KeyError((first, x))


def _render_snr(header, rows, ax):
    if header[2] == "mean_rate_nats":
        stats = {(r[0], r[1]): (float(r[2]), float(r[3])) for r in rows}
    else:
        stats = _aggregate(rows, (0, 1), 3)
    nts = sorted({k[0] for k in stats}, key=float)
    for i, nt in enumerate(nts):
        xs = sorted({float(k[1]) for k in stats if k[0] == nt})
        means = [stats[(nt, _fmt_like(stats, nt, x))][0] for x in xs]
        errs = [stats[(nt, _fmt_like(stats, nt, x))][1] for x in xs]
        ax.errorbar(xs, means, yerr=errs if any(errs) else None, capsize=3,
                    color=_series_color(i), marker="o", label=f"n_t={nt}")
    ax.set_xlabel("sensing SNR threshold [dB]")
    ax.set_ylabel("sum rate [nats/s/Hz]")
    ax.legend()


def _render_beampattern(header, rows, ax):
    ang = np.array([float(r[0]) for r in rows])
    pv = np.array([float(r[1]) for r in rows])
    ph = np.array([float(r[2]) for r in rows])
    pt = np.array([float(r[3]) for r in rows])
    peak = max(pt.max(), 1e-300)

    def to_db(p):
        return np.maximum(10.0 * np.log10(np.maximum(p / peak, 1e-30)), style.DB_FLOOR)

    ax.plot(ang, to_db(pv), color=style.COLOR_V, label="vertical")
    ax.plot(ang, to_db(ph), color=style.COLOR_H, label="horizontal")
    ax.plot(ang, to_db(pt), color=style.COLOR_TOTAL, linewidth=1.0, label="total")
    ax.set_xlim(-90.0, 90.0)
    ax.set_ylim(style.DB_FLOOR, 3.0)
    ax.set_xlabel("angle [deg]")
    ax.set_ylabel("normalized pattern [dB]")
    ax.legend(loc="lower right")


_RENDERERS = {
    "convergence": _render_convergence,
    "sp_comparison": _render_sp_comparison,
    "quantization": _render_quantization,
    "xpd_sweep": _render_xpd,
    "snr_tradeoff": _render_snr,
    "beampattern": _render_beampattern,
}


def render(spec: FigureSpec) -> str:
    """Validate the CSV against the experiment's schema and write the figure."""
    header, rows = load_rows(spec.experiment, spec.csv_path)
    fig, ax = style.new_figure()
    _RENDERERS[spec.experiment](header, rows, ax)
    style.save(fig, spec.out_path)
    return spec.out_path
