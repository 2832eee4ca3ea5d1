"""Numerical propagation: midpoint exact stepping and the discrete pulse sequence.

Each step is an exact 2x2 exponential, so propagation is unitary regardless of
the step size; the step size only controls how well the piecewise-constant
Hamiltonian approximates the continuously rotating one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .spin import (
    TWO_PI,
    FidelityTrace,
    FieldParams,
    field_components,
    fidelity,
    initial_state,
    su2_propagator,
    upper_eigenstates,
)

PHASE_STEP = math.pi / 36
PULSES_PER_CYCLE = 72
STEPS_PER_PERIOD = 200
COARSE_STEPS_PER_PERIOD = 10
_CHUNK = 1 << 15


class CoarseStepWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class PulseSchedule:
    """Timing of the flip-angle pulse train that emulates the rotating field."""

    delta_t: float
    n_cycles: int
    phase_step: float = PHASE_STEP
    pulses_per_cycle: int = PULSES_PER_CYCLE

    def __post_init__(self):
        if self.delta_t <= 0:
            raise ValueError(f"delta_t must be > 0, got {self.delta_t}")
        if self.n_cycles < 0:
            raise ValueError(f"n_cycles must be >= 0, got {self.n_cycles}")
        if not math.isclose(self.pulses_per_cycle * self.phase_step, TWO_PI, rel_tol=1e-12):
            raise ValueError("pulses_per_cycle * phase_step must be one full turn")

    @property
    def tau(self) -> float:
        """Duration of one full rf revolution."""
        return self.pulses_per_cycle * self.delta_t

    @property
    def n_pulses(self) -> int:
        return self.pulses_per_cycle * self.n_cycles

    def phases(self) -> NDArray[np.float64]:
        """rf phase held during each pulse of one cycle, starting at zero."""
        return self.phase_step * np.arange(self.pulses_per_cycle)


@dataclass
class PropagationResult:
    trace: FidelityTrace
    final_state: NDArray[np.complex128]
    step_count: int
    method: str
    norm_drift: float
    coarse_step: bool = False


def _round_significant(x: float, digits: int) -> float:
    if x == 0:
        return 0.0
    return round(x, digits - 1 - int(math.floor(math.log10(abs(x)))))


def make_schedule(p: FieldParams, n_cycles: int, width_digits: Optional[int] = None) -> PulseSchedule:
    """Pulse schedule realizing rotation at ``p.omega_prime``.

    delta_t = (pi/36) / (2 pi w'). With ``width_digits`` the pulse width is
    rounded to that many significant digits, as it would be when programmed
    on an instrument; tau then follows from the rounded width.
    """
    if p.omega_prime <= 0:
        raise ValueError("a pulse schedule needs omega_prime > 0")
    delta_t = PHASE_STEP / (TWO_PI * p.omega_prime)
    if width_digits is not None:
        delta_t = _round_significant(delta_t, width_digits)
    return PulseSchedule(delta_t=delta_t, n_cycles=int(n_cycles))


def _project_su2(m: NDArray) -> NDArray:
    """Nearest matrix of the form [[a, -conj(b)], [b, conj(a)]], |a|^2 + |b|^2 = 1."""
    a = 0.5 * (m[..., 0, 0] + np.conj(m[..., 1, 1]))
    b = 0.5 * (m[..., 1, 0] - np.conj(m[..., 0, 1]))
    norm = np.sqrt(np.abs(a) ** 2 + np.abs(b) ** 2)
    a = a / norm
    b = b / norm
    out = np.empty_like(m)
    out[..., 0, 0] = a
    out[..., 0, 1] = -np.conj(b)
    out[..., 1, 0] = b
    out[..., 1, 1] = np.conj(a)
    return out


def _scan_products(u: NDArray) -> NDArray:
    """Running products P_j = U_j ... U_1 U_0 by log-depth doubling.

    Products are projected back onto SU(2) after every level; without this the
    rounding of ~N matrix products drifts the norm by ~N * eps.
    """
    p = u.copy()
    shift = 1
    n = len(p)
    while shift < n:
        p[shift:] = _project_su2(p[shift:] @ p[:-shift])
        shift <<= 1
    return p


def apply_sequence(unitaries: NDArray, psi0: NDArray) -> NDArray[np.complex128]:
    """States after each of the given step unitaries, shape (n_steps, 2)."""
    out = np.empty((len(unitaries), 2), dtype=complex)
    psi = np.asarray(psi0, dtype=complex)
    for start in range(0, len(unitaries), _CHUNK):
        products = _scan_products(unitaries[start : start + _CHUNK])
        block = products @ psi
        out[start : start + len(block)] = block
        psi = block[-1]
    return out


def step_exact(s: ArrayLike, t: float, dt: float, p: FieldParams) -> NDArray[np.complex128]:
    """One midpoint step: exp(-i H(t + dt/2) dt) s."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    bx, by, bz = field_components(t + 0.5 * dt, p)
    return su2_propagator(bx, by, bz, dt) @ np.asarray(s, dtype=complex)


def default_dt(p: FieldParams, sample_times: Optional[ArrayLike] = None) -> float:
    dt = 1.0 / (STEPS_PER_PERIOD * p.max_frequency)
    if sample_times is not None:
        gaps = np.diff(np.unique(np.asarray(sample_times, dtype=float)))
        gaps = gaps[gaps > 0]
        if len(gaps):
            dt = min(dt, float(gaps.min()))
    return dt


def _step_edges(breakpoints: NDArray, dt: float):
    """Uniform substeps on each interval so every breakpoint is a step edge.

    Returns (left edges, widths, index of the step ending at each breakpoint).
    """
    spans = np.diff(breakpoints)
    counts = np.maximum(np.ceil(spans / dt - 1e-9).astype(int), 1)
    widths = np.repeat(spans / counts, counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    lefts = np.repeat(breakpoints[:-1], counts) + offsets * widths
    ends = np.cumsum(counts) - 1
    return lefts, widths, ends


def evolve(
    p: FieldParams,
    t_end: float,
    dt: Optional[float] = None,
    sample_times: Optional[ArrayLike] = None,
) -> PropagationResult:
    """Propagate ``initial_state(p)`` to ``t_end`` with midpoint exact steps.

    The step is shrunk locally so that every requested sample time is hit
    exactly. If ``dt`` is at least a tenth of the fastest period the result
    is flagged (and a ``CoarseStepWarning`` raised) since the
    piecewise-constant approximation is then unreliable.
    """
    if t_end < 0:
        raise ValueError(f"t_end must be >= 0, got {t_end}")
    if sample_times is None:
        sample_times = np.array([0.0, t_end]) if t_end > 0 else np.array([0.0])
    samples = np.unique(np.asarray(sample_times, dtype=float))
    if len(samples) and (samples[0] < 0 or samples[-1] > t_end):
        raise ValueError("sample_times must lie within [0, t_end]")
    if dt is None:
        dt = default_dt(p, samples)
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")

    coarse = dt >= 1.0 / (COARSE_STEPS_PER_PERIOD * p.max_frequency)
    if coarse:
        warnings.warn(
            f"dt={dt:g}s is at least a tenth of the fastest period; accuracy unreliable",
            CoarseStepWarning,
            stacklevel=2,
        )

    psi0 = initial_state(p)
    breakpoints = np.unique(np.concatenate([[0.0], samples, [t_end]]))
    if len(breakpoints) == 1:
        states = psi0[None, :]
        n_steps = 0
        times = breakpoints
    else:
        lefts, widths, ends = _step_edges(breakpoints, dt)
        bx, by, bz = field_components(lefts + 0.5 * widths, p)
        stepped = apply_sequence(su2_propagator(bx, by, bz, widths), psi0)
        states = np.vstack([psi0[None, :], stepped[ends]])
        n_steps = len(widths)
        times = breakpoints

    keep = np.isin(times, samples)
    values = fidelity(upper_eigenstates(times[keep], p), states[keep])
    norms = np.linalg.norm(states, axis=1)
    return PropagationResult(
        trace=FidelityTrace(times[keep], np.atleast_1d(values), "integrator", p),
        final_state=states[-1],
        step_count=n_steps,
        method="integrator",
        norm_drift=float(np.max(np.abs(norms - 1.0))),
        coarse_step=bool(coarse),
    )


def pulse_unitaries(p: FieldParams, sched: PulseSchedule) -> NDArray:
    """Propagators of the pulses in one cycle, each under a constant rf phase."""
    phases = sched.phases()
    return su2_propagator(
        math.pi * p.omega1 * np.cos(phases),
        math.pi * p.omega1 * np.sin(phases),
        math.pi * p.omega0,
        sched.delta_t,
    )


def pulse_sequence_evolve(
    p: FieldParams, sched: PulseSchedule, every_pulse: bool = False
) -> PropagationResult:
    """Simulate the flip-angle pulse train built from ``sched``.

    Pulse k runs for ``delta_t`` with the rf phase held at k * phase_step.
    By default the fidelity is recorded stroboscopically at t = n tau,
    n = 0..n_cycles; ``every_pulse`` records it after every pulse, against the
    eigenstate of the field direction of the pulse that follows.
    """
    psi0 = initial_state(p)
    cycle = pulse_unitaries(p, sched)
    if every_pulse:
        steps = np.tile(cycle, (sched.n_cycles, 1, 1))
        states = np.vstack([psi0[None, :], apply_sequence(steps, psi0)]) if len(steps) else psi0[None, :]
        k = np.arange(len(states))
        times = k * sched.delta_t
        phase = (k % sched.pulses_per_cycle) * sched.phase_step
    else:
        cycle_u = _scan_products(cycle)[-1]
        states = np.empty((sched.n_cycles + 1, 2), dtype=complex)
        states[0] = psi0
        for n in range(sched.n_cycles):
            states[n + 1] = cycle_u @ states[n]
        times = np.arange(sched.n_cycles + 1) * sched.tau
        phase = np.zeros(len(times))

    half = 0.5 * p.theta
    reference = np.stack(
        [np.full(len(times), math.cos(half), dtype=complex), np.exp(1j * phase) * math.sin(half)],
        axis=-1,
    )
    values = np.atleast_1d(fidelity(reference, states))
    norms = np.linalg.norm(states, axis=1)
    return PropagationResult(
        trace=FidelityTrace(times, values, "pulse-sequence", p),
        final_state=states[-1],
        step_count=sched.n_pulses,
        method="pulse-sequence",
        norm_drift=float(np.max(np.abs(norms - 1.0))),
    )
