"""
Slices through the resonance
============================

Hold R fixed and scan K with points clustered around K = 1 + R^2, where the
effective field in the rotating frame is purely transverse and the spin is
driven all the way across (F_min = 0). Then hold K fixed and scan R.
"""

import numpy as np

from adiabatic_probe.sweep import clustered_range, slice_vs_k, slice_vs_r

R = 0.06
ks = clustered_range(0.5, 1.5, 401, center=1 + R * R, width=0.005)
along_k = slice_vs_k(R, ks)
f = along_k.grid("f_min")[:, 0]
t = along_k.grid("t_min")[:, 0]
i = int(np.argmin(f))
print(f"R = {R}: smallest F_min = {f[i]:.2e} at K = {ks[i]:.5f} (1 + R^2 = {1 + R * R:.5f})")
print(f"  time to reach it: {t[i] * 1e3:.3f} ms")
half = ks[f < 0.5]
print(f"  F_min < 0.5 for K in [{half.min():.4f}, {half.max():.4f}]")

###############################################################################
# Along R at K = 0.75 the dip deepens steadily as the drive strengthens.

rs = np.linspace(0.01, 0.5, 50)
along_r = slice_vs_r(0.75, rs)
for R_, f_, t_ in list(zip(rs, along_r.grid("f_min")[0], along_r.grid("t_min")[0]))[::7]:
    print(f"K = 0.75, R = {R_:.3f}: F_min = {f_:.4f}, t_min = {t_ * 1e6:8.1f} us")
