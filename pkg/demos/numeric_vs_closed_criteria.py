"""
Conditions from eigenvector trajectories alone
==============================================

The numeric pipeline never sees the closed forms: it differentiates the
eigenvectors with finite differences and integrates with adaptive
quadrature. Here we feed it an eigenbasis scrambled by arbitrary smooth
phases and show that the gauge-invariant conditions do not change, while the
Berry connections do.
"""

import math

import numpy as np

from adiabatic_probe import criteria
from adiabatic_probe.spin import FieldParams, eigensystem

p = FieldParams.from_ratios(1.0, 0.06, omega0=1700.0)


def scrambled(t):
    es = eigensystem(t, p)
    return (
        es.v_plus * np.exp(1j * 0.7 * math.sin(2 * math.pi * 900.0 * t)),
        es.v_minus * np.exp(-1j * 1.3 * math.cos(2 * math.pi * 400.0 * t)),
    )


closed = criteria.full_report(p)
print(f"{'':14s}{'closed':>14s}{'numeric':>14s}{'scrambled':>14s}")
rows = [
    ("c1", closed.c1, criteria.c1_numeric(p, 1e-4), criteria.c1_numeric(p, 1e-4, scrambled)),
    ("wu_c3", closed.wu_c3, criteria.wu_condition_numeric(p, 1e-4).c3, criteria.wu_condition_numeric(p, 1e-4, scrambled).c3),
    ("tong_b", closed.tong_b, criteria.tong_conditions_numeric(p).b, criteria.tong_conditions_numeric(p, basis=scrambled).b),
]
for name, *vals in rows:
    print(f"{name:14s}" + "".join(f"{v:14.8f}" for v in vals))

print()
print("Berry connection <E+|dE+/dt> (gauge dependent):")
print(f"  canonical  {criteria.connection_numeric(1e-4, p, 0):.4f}")
print(f"  scrambled  {criteria.connection_numeric(1e-4, p, 0, scrambled):.4f}")

###############################################################################
# Parallel transport removes the connection on a grid and reproduces Tong's
# condition (B) from the gauged vectors directly.

traj = criteria.parallel_transport(np.linspace(0.0, 1 / p.omega_prime, 4001), p, scrambled)
print(f"residual connection after transport: {traj.residual:.1e}")
print(f"tong_b from the gauged grid: {criteria.tong_b_on_grid(traj, p):.6f}")
