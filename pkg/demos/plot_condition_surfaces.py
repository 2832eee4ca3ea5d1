"""
Condition surfaces over (ln K, R)
=================================

Evaluate F_min and the three competing conditions on a grid and ask how well
each one predicts a fidelity drop. Only Wu's C3 follows F_min everywhere,
through the identity F_min = 1 / sqrt(1 + 4 C3^2).
"""

import numpy as np

from adiabatic_probe.sweep import GridSpec, log_range, surface_sweep

grid = GridSpec(log_range(0.1, 30.0, 120), np.linspace(0.01, 0.5, 100))
table = surface_sweep(grid)

f_min = table.grid("f_min")
bad = f_min < 0.9
print(f"{bad.sum()} of {f_min.size} grid points have F_min < 0.9")

###############################################################################
# How many of the bad points does each condition flag with a threshold of 0.1?

for name in ("c1", "tong_b", "wu_c3"):
    flagged = table.grid(name) > 0.1
    caught = (flagged & bad).sum() / bad.sum()
    false_alarm = (flagged & ~bad).sum() / max((~bad).sum(), 1)
    print(f"{name:7s} flags {caught:6.1%} of bad points, false alarms on {false_alarm:6.1%} of good ones")

###############################################################################
# The identity behind Wu's condition holds to rounding away from resonance.

c3 = table.grid("wu_c3")
finite = np.isfinite(c3)
gap = np.max(np.abs(f_min[finite] - 1 / np.sqrt(1 + 4 * c3[finite] ** 2)))
print(f"max |F_min - 1/sqrt(1 + 4 C3^2)| = {gap:.1e}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    lnk, r = np.meshgrid(np.log(table.k_values), table.r_values, indexing="ij")
    fig, axes = plt.subplots(1, 4, figsize=(14, 3.2), sharey=True)
    for ax, name in zip(axes, ("f_min", "c1", "tong_b", "wu_c3")):
        data = table.grid(name)
        if name == "wu_c3":
            data = np.log10(np.where(np.isfinite(data), data, np.nan))
        im = ax.pcolormesh(lnk, r, data, shading="auto")
        ax.set_title(name if name != "wu_c3" else "log10 wu_c3")
        ax.set_xlabel("ln K")
        fig.colorbar(im, ax=ax)
    axes[0].set_ylabel("R")
    fig.tight_layout()
    fig.savefig("condition_surfaces.png", dpi=120)
