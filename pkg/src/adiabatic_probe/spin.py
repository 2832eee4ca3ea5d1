"""Spin-1/2 in a rotating transverse field: Hamiltonian, eigenbasis, exact dynamics.

All user-facing frequencies are in Hz. Matrix entries and energies are angular
(rad/s); the factor 2*pi is applied where a frequency enters a Hamiltonian.

    H(t) = 2*pi * [w0 sz/2 + w1 (sx cos(2 pi w' t) + sy sin(2 pi w' t)) / 2]
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

TWO_PI = 2.0 * math.pi

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

NORM_TOL = 1e-12
METHODS = ("closed-form", "integrator", "pulse-sequence")


@dataclass(frozen=True)
class FieldParams:
    """Physical parameters of the rotating-field Hamiltonian (all in Hz).

    Attributes
    ----------
    omega0:
        Larmor frequency of the static field.
    omega1:
        Strength of the rf coupling.
    omega_prime:
        Rotation frequency of the rf field.
    """

    omega0: float
    omega1: float
    omega_prime: float

    def __post_init__(self):
        for name in ("omega0", "omega1", "omega_prime"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        if self.omega1 < 0:
            raise ValueError(f"omega1 must be >= 0, got {self.omega1}")
        if self.omega_prime < 0:
            raise ValueError(f"omega_prime must be >= 0, got {self.omega_prime}")

    @classmethod
    def from_ratios(
        cls,
        K: float,
        R: float,
        omega0: Optional[float] = None,
        omega1: Optional[float] = None,
    ) -> "FieldParams":
        """Build from K = w'/w0 and R = w1/w0 plus exactly one absolute scale.

        Giving ``omega1`` mirrors the experiment, where the rf strength is held
        fixed and the offset ``omega0 = omega1 / R`` is varied.
        """
        if (omega0 is None) == (omega1 is None):
            raise ValueError("give exactly one of omega0 or omega1")
        if K < 0 or R < 0:
            raise ValueError(f"K and R must be >= 0, got K={K}, R={R}")
        if omega1 is not None:
            if R <= 0:
                raise ValueError("R must be > 0 when the scale is set by omega1")
            omega0 = omega1 / R
        else:
            omega1 = R * omega0
        return cls(omega0=omega0, omega1=omega1, omega_prime=K * omega0)

    @property
    def R(self) -> float:
        return self.omega1 / self.omega0

    @property
    def K(self) -> float:
        return self.omega_prime / self.omega0

    @property
    def theta(self) -> float:
        """Tilt of the t=0 field from the z axis, arctan(R)."""
        return math.atan2(self.omega1, self.omega0)

    @property
    def omega_total(self) -> float:
        """Lab-frame field magnitude sqrt(w0^2 + w1^2) in Hz."""
        return math.hypot(self.omega0, self.omega1)

    @property
    def f_eff(self) -> float:
        """Precession frequency in the frame co-rotating with the rf (Hz)."""
        return math.hypot(self.omega0 - self.omega_prime, self.omega1)

    @property
    def theta_eff(self) -> float:
        """Tilt of the rotating-frame field, in [0, pi]."""
        return math.atan2(self.omega1, self.omega0 - self.omega_prime)

    @property
    def max_frequency(self) -> float:
        return max(self.omega0, self.omega_prime, self.f_eff)


@dataclass(frozen=True)
class EigenSystem:
    """Instantaneous eigenpairs of H(t); energies in rad/s."""

    e_plus: float
    e_minus: float
    v_plus: NDArray[np.complex128]
    v_minus: NDArray[np.complex128]
    t: float

    @property
    def gap(self) -> float:
        return self.e_plus - self.e_minus


@dataclass
class FidelityTrace:
    """Fidelity samples F(t) together with the method that produced them."""

    times: NDArray[np.float64]
    values: NDArray[np.float64]
    method: str
    params: FieldParams

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any((self.values < 0) | (self.values > 1)):
            raise ValueError("fidelity values must lie in [0, 1]")

    def __len__(self):
        return len(self.times)

    def minimum(self) -> tuple[float, float]:
        """Return ``(t, F)`` at the smallest sample."""
        i = int(np.argmin(self.values))
        return float(self.times[i]), float(self.values[i])


def spinor(a: complex, b: complex) -> NDArray[np.complex128]:
    """Two-component state; raises if it is not normalized to 1e-12."""
    v = np.array([a, b], dtype=complex)
    norm = np.vdot(v, v).real
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"spinor is not normalized: |a|^2 + |b|^2 = {norm!r}")
    return v


def su2_propagator(bx: ArrayLike, by: ArrayLike, bz: ArrayLike, dt: ArrayLike) -> NDArray:
    """exp(-i dt (bx sx + by sy + bz sz)) for (broadcast) arrays of rad/s fields.

    Uses the cos/sin form of the exponential of a traceless Hermitian 2x2
    matrix, so every result is unitary to rounding.
    """
    bx, by, bz, dt = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (bx, by, bz, dt)))
    norm = np.sqrt(bx**2 + by**2 + bz**2)
    angle = norm * dt
    # unit quaternion (cos, s bx, s by, s bz) with s = sin(|b| dt) / |b|
    q = np.stack([np.cos(angle), *(dt * np.sinc(angle / math.pi) * b for b in (bx, by, bz))])
    # renormalizing removes the systematic rounding bias that otherwise
    # accumulates linearly over long products
    q /= np.sqrt(np.sum(q**2, axis=0))
    c, x, y, z = q
    u = np.empty(bx.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c - 1j * z
    u[..., 0, 1] = -(y + 1j * x)
    u[..., 1, 0] = y - 1j * x
    u[..., 1, 1] = c + 1j * z
    return u


def field_components(t: ArrayLike, p: FieldParams):
    """(bx, by, bz) in rad/s such that H(t) = bx sx + by sy + bz sz."""
    phase = TWO_PI * p.omega_prime * np.asarray(t, dtype=float)
    return (
        math.pi * p.omega1 * np.cos(phase),
        math.pi * p.omega1 * np.sin(phase),
        math.pi * p.omega0 + 0.0 * phase,
    )


def hamiltonian_matrix(t: float, p: FieldParams) -> NDArray[np.complex128]:
    """H(t) as a 2x2 Hermitian matrix in rad/s."""
    bx, by, bz = field_components(t, p)
    return bx * SIGMA_X + by * SIGMA_Y + bz * SIGMA_Z


def _rotor_phase(t: float, p: FieldParams) -> complex:
    return complex(np.exp(1j * TWO_PI * p.omega_prime * t))


def canonical_phase(v: NDArray) -> NDArray:
    """Rephase so the |0> component is real and >= 0 (|1> if |0> vanishes)."""
    ref = v[0] if v[0] != 0 else v[1]
    if ref == 0:
        raise ValueError("zero vector has no phase")
    return v * (abs(ref) / ref)


def eigensystem(t: float, p: FieldParams) -> EigenSystem:
    """Closed-form instantaneous eigensystem at time ``t``.

    v_plus = (cos(theta/2), e^{i phi} sin(theta/2)) and
    v_minus = (sin(theta/2), -e^{i phi} cos(theta/2)) with phi = 2 pi w' t,
    both in the canonical phase convention.
    """
    half = 0.5 * p.theta
    c, s = math.cos(half), math.sin(half)
    rot = _rotor_phase(t, p)
    v_plus = canonical_phase(np.array([c, rot * s], dtype=complex))
    v_minus = canonical_phase(np.array([s, -rot * c], dtype=complex))
    e = math.pi * p.omega_total
    return EigenSystem(e_plus=e, e_minus=-e, v_plus=v_plus, v_minus=v_minus, t=float(t))


def initial_state(p: FieldParams) -> NDArray[np.complex128]:
    """Upper eigenstate of H(0): (cos(theta/2), sin(theta/2))."""
    half = 0.5 * p.theta
    return np.array([math.cos(half), math.sin(half)], dtype=complex)


def rotating_frame_propagator(t: ArrayLike, p: FieldParams) -> NDArray:
    """Exact U(t) = exp(-i 2pi w' t sz/2) exp(-i H_eff t) for an array of times.

    H_eff = 2pi [(w0 - w') sz/2 + w1 sx/2] is the time-independent Hamiltonian
    in the frame co-rotating with the rf field.
    """
    t = np.asarray(t, dtype=float)
    zero = np.zeros_like(t)
    frame = su2_propagator(zero, zero, math.pi * p.omega_prime, t)
    rotating = su2_propagator(math.pi * p.omega1, zero, math.pi * (p.omega0 - p.omega_prime), t)
    return frame @ rotating


def exact_state(t: float, p: FieldParams) -> NDArray[np.complex128]:
    """Solution of i d|phi>/dt = H(t)|phi> started from ``initial_state(p)``."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    psi = rotating_frame_propagator(t, p) @ initial_state(p)
    return psi / np.linalg.norm(psi)


def fidelity(x: ArrayLike, y: ArrayLike) -> float | NDArray:
    """|<x|y>|, clipped to [0, 1]; broadcasts over leading axes."""
    x = np.asarray(x)
    y = np.asarray(y)
    overlap = np.abs(np.sum(np.conj(x) * y, axis=-1))
    overlap = np.minimum(overlap, 1.0)
    return float(overlap) if overlap.ndim == 0 else overlap


def closed_form_fidelity(times: ArrayLike, p: FieldParams) -> NDArray[np.float64]:
    """F(t) = sqrt(1 - sin^2(theta_eff - theta) sin^2(pi f_eff t))."""
    times = np.asarray(times, dtype=float)
    tilt = math.sin(p.theta_eff - p.theta) ** 2
    f2 = 1.0 - tilt * np.sin(math.pi * p.f_eff * times) ** 2
    return np.sqrt(np.clip(f2, 0.0, 1.0))


def fidelity_trace_closed(p: FieldParams, times: ArrayLike) -> FidelityTrace:
    return FidelityTrace(
        times=np.asarray(times, dtype=float),
        values=closed_form_fidelity(times, p),
        method="closed-form",
        params=p,
    )


def _check_not_degenerate(p: FieldParams):
    if p.f_eff == 0.0:
        raise ValueError(
            "rotating-frame field vanishes (K = 1 and R = 0): minimum fidelity is undefined"
        )


def f_min_closed(p: FieldParams) -> float:
    """Minimum fidelity over the evolution.

    |(1 - K) cos(theta) + R sin(theta)| / sqrt((1 - K)^2 + R^2), the absolute
    value keeping the result a valid overlap for K > 1.
    """
    _check_not_degenerate(p)
    # same quantity as |cos(theta_eff - theta)|; the angle form is exact at K = 0
    return min(abs(math.cos(p.theta_eff - p.theta)), 1.0)


def t_min(p: FieldParams) -> float:
    """First time of minimum fidelity, 1 / (2 f_eff), in seconds."""
    _check_not_degenerate(p)
    return 1.0 / (2.0 * p.f_eff)


def upper_eigenstates(times: ArrayLike, p: FieldParams) -> NDArray[np.complex128]:
    """Stack of v_plus(t) for an array of times, shape (len(times), 2)."""
    times = np.asarray(times, dtype=float)
    half = 0.5 * p.theta
    out = np.empty(times.shape + (2,), dtype=complex)
    out[..., 0] = math.cos(half)
    out[..., 1] = np.exp(1j * TWO_PI * p.omega_prime * times) * math.sin(half)
    return out
