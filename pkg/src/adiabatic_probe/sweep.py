"""Parameter scans over (K, R): the surfaces, slices and traces behind the figures.

The rf strength ``omega1`` is held fixed and R is varied through the offset,
``omega0 = omega1 / R``; ``omega_prime = K * omega0``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import criteria
from .integrators import make_schedule, pulse_sequence_evolve
from .spin import FidelityTrace, FieldParams, f_min_closed, fidelity_trace_closed, t_min

QUANTITIES = ("c1", "f_min", "t_min", "tong_b", "wu_c3")
SLICE_QUANTITIES = ("f_min", "t_min")
DEFAULT_OMEGA1 = 100.0


class SweepRow(NamedTuple):
    K: float
    R: float
    quantity: str
    value: float
    resonant: bool


@dataclass(frozen=True)
class GridSpec:
    k_values: tuple
    r_values: tuple
    omega1: float = DEFAULT_OMEGA1
    quantities: tuple = QUANTITIES

    def __post_init__(self):
        k = tuple(float(x) for x in self.k_values)
        r = tuple(float(x) for x in self.r_values)
        if not k or not r:
            raise ValueError("k_values and r_values must be non-empty")
        for name, vals in (("k_values", k), ("r_values", r)):
            if any(not math.isfinite(v) or v <= 0 for v in vals):
                raise ValueError(f"{name} must be finite and > 0")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        if self.omega1 <= 0:
            raise ValueError(f"omega1 must be > 0, got {self.omega1}")
        unknown = set(self.quantities) - set(QUANTITIES)
        if unknown or not self.quantities:
            raise ValueError(f"quantities must be a non-empty subset of {QUANTITIES}, got {self.quantities}")
        object.__setattr__(self, "k_values", k)
        object.__setattr__(self, "r_values", r)
        object.__setattr__(self, "quantities", tuple(sorted(set(self.quantities))))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.k_values), len(self.r_values)


@dataclass
class SweepTable:
    """Rows ordered by K, then R, then quantity name."""

    rows: list
    k_values: tuple
    r_values: tuple
    quantities: tuple
    params: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.rows)

    def grid(self, quantity: str) -> np.ndarray:
        """Values of one quantity as an array of shape (len(K), len(R))."""
        if quantity not in self.quantities:
            raise KeyError(quantity)
        vals = [row.value for row in self.rows if row.quantity == quantity]
        return np.array(vals, dtype=float).reshape(len(self.k_values), len(self.r_values))

    def resonant_grid(self) -> np.ndarray:
        q = self.quantities[0]
        flags = [row.resonant for row in self.rows if row.quantity == q]
        return np.array(flags, dtype=bool).reshape(len(self.k_values), len(self.r_values))


def log_range(lo: float, hi: float, n: int) -> np.ndarray:
    """``n`` points evenly spaced in ln K between ``lo`` and ``hi``."""
    if lo <= 0 or hi <= lo or n < 1:
        raise ValueError(f"need 0 < lo < hi and n >= 1, got {lo}, {hi}, {n}")
    if n == 1:
        return np.array([lo])
    pts = np.exp(np.linspace(math.log(lo), math.log(hi), n))
    pts[0], pts[-1] = lo, hi
    return pts


def clustered_range(lo: float, hi: float, n: int, center: float, width: float) -> np.ndarray:
    """``n`` points on [lo, hi], denser within roughly ``width`` of ``center``."""
    if not lo < center < hi or width <= 0 or n < 2:
        raise ValueError("need lo < center < hi, width > 0 and n >= 2")
    u = np.linspace(math.asinh((lo - center) / width), math.asinh((hi - center) / width), n)
    pts = center + width * np.sinh(u)
    pts[0], pts[-1] = lo, hi
    return pts


def point_values(K: float, R: float, omega1: float, quantities: Sequence[str]) -> list:
    p = FieldParams.from_ratios(K, R, omega1=omega1)
    wu = criteria.wu_condition(p)
    out = []
    for q in quantities:
        if q == "f_min":
            v = f_min_closed(p)
        elif q == "t_min":
            v = t_min(p)
        elif q == "c1":
            v = criteria.c1_traditional(p)
        elif q == "tong_b":
            v = criteria.tong_conditions(p).b
        elif q == "wu_c3":
            v = wu.c3
        else:
            raise ValueError(f"unknown quantity {q!r}")
        out.append(SweepRow(K, R, q, float(v), wu.resonant))
    return out


def _row_block(args) -> list:
    K, r_values, omega1, quantities = args
    rows = []
    for R in r_values:
        rows.extend(point_values(K, R, omega1, quantities))
    return rows


def _run(k_values: Iterable[float], r_values, omega1, quantities, jobs: int) -> list:
    tasks = [(K, r_values, omega1, quantities) for K in k_values]
    if jobs <= 1 or len(tasks) <= 1:
        blocks = map(_row_block, tasks)
        return [row for block in blocks for row in block]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order, so the table is independent of jobs
        chunksize = max(1, len(tasks) // (4 * jobs))
        blocks = pool.map(_row_block, tasks, chunksize=chunksize)
        return [row for block in blocks for row in block]


def surface_sweep(g: GridSpec, jobs: int = 1) -> SweepTable:
    """Evaluate ``g.quantities`` at every (K, R) grid point from the closed forms."""
    rows = _run(g.k_values, g.r_values, g.omega1, g.quantities, jobs)
    return SweepTable(
        rows=rows,
        k_values=g.k_values,
        r_values=g.r_values,
        quantities=g.quantities,
        params={"omega1": g.omega1},
    )


def slice_vs_k(r: float, k_values: Sequence[float], omega1: float = DEFAULT_OMEGA1, jobs: int = 1) -> SweepTable:
    """f_min and t_min along K at fixed R; any (e.g. clustered) K list is accepted."""
    return surface_sweep(GridSpec(tuple(k_values), (r,), omega1, SLICE_QUANTITIES), jobs)


def slice_vs_r(k: float, r_values: Sequence[float], omega1: float = DEFAULT_OMEGA1, jobs: int = 1) -> SweepTable:
    """f_min and t_min along R at fixed K."""
    return surface_sweep(GridSpec((k,), tuple(r_values), omega1, SLICE_QUANTITIES), jobs)


@dataclass
class Figure1Trace:
    K: float
    stroboscopic: FidelityTrace
    dense: FidelityTrace


def figure1_traces(
    r: float = 0.06,
    omega0: float = 1700.0,
    k_values: Sequence[float] = (1.0, 10.0),
    n_cycles: int = 15,
    dense_points: int = 4001,
) -> list:
    """Pulse-train fidelity at t = n tau plus the continuous closed-form curve.

    The dense curve spans the same total time as the stroboscopic samples.
    """
    out = []
    for K in k_values:
        p = FieldParams.from_ratios(K, r, omega0=omega0)
        sched = make_schedule(p, n_cycles)
        strobe = pulse_sequence_evolve(p, sched).trace
        span = max(n_cycles * sched.tau, sched.tau)
        dense = fidelity_trace_closed(p, np.linspace(0.0, span, dense_points))
        out.append(Figure1Trace(K=float(K), stroboscopic=strobe, dense=dense))
    return out


def default_jobs() -> int:
    """Worker count from ADIABATIC_PROBE_JOBS, else 1."""
    raw = os.environ.get("ADIABATIC_PROBE_JOBS")
    if not raw:
        return 1
    try:
        jobs = int(raw)
    except ValueError:
        raise ValueError(f"ADIABATIC_PROBE_JOBS must be an integer, got {raw!r}") from None
    if jobs < 1:
        raise ValueError("ADIABATIC_PROBE_JOBS must be >= 1")
    return jobs
