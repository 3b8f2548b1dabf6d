"""Single styling point for every figure.

Fixed geometry and pure primary colors keep renders byte-deterministic and let
the smoke tests locate curves in pixel space.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

FIGSIZE = (8.0, 5.0)
DPI = 100
AXES_RECT = (0.10, 0.11, 0.86, 0.82)

# pure colors: the beampattern pixel test keys on these
COLOR_V = "#0000ff"
COLOR_H = "#ff0000"
COLOR_TOTAL = "#777777"
SERIES_COLORS = ("#0000ff", "#ff0000", "#008000", "#ff9900", "#9900cc", "#006666")

DB_FLOOR = -60.0  # clamp for log-scale beampattern values


def new_figure():
    fig = plt.figure(figsize=FIGSIZE, dpi=DPI)
    ax = fig.add_axes(AXES_RECT)
    ax.grid(True, alpha=0.3)
    return fig, ax


def save(fig, path: str):
    # empty Software tag keeps PNG bytes identical across renders
    fig.savefig(path, dpi=DPI, metadata={"Software": None})
    plt.close(fig)
