"""Adiabatic conditions for the rotating-field spin: traditional, Tong, Wu.

Every condition is available twice:

* closed forms derived from the analytic eigenstates, and
* a numeric pipeline that only sees eigenvectors as a function of time
  (finite differences plus quadrature), so it can be fed an arbitrarily
  re-phased basis to check gauge behaviour.

Derivatives of eigenvectors use 5-point central stencils. The coupling
<E+|dE-/dt> is formed after aligning the shifted vectors' phase to the
centre point; the Berry connections <En|dEn/dt> are by definition
gauge-dependent and are differenced without alignment.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from .spin import TWO_PI, FieldParams, eigensystem

Basis = Callable[[float], tuple]

RESONANCE_TOL = 1e-9
MIN_STEP_OVERLAP = 0.999
# phase advance of the eigenvectors per stencil step
INNER_STEP = 1e-3
OUTER_STEP = 1e-2


class TongConditions(NamedTuple):
    a: float
    b: float
    c: float


class WuCondition(NamedTuple):
    c3: float
    denominator: float
    resonant: bool


@dataclass(frozen=True)
class ConditionReport:
    """Values of every condition at one parameter point.

    ``tong_b`` is the quantity usually plotted as C2. ``wu_denominator`` is in
    rad/s and keeps its sign; ``wu_c3`` is ``inf`` on resonance.
    """

    K: float
    R: float
    c1: float
    tong_a: float
    tong_b: float
    tong_c: float
    wu_c3: float
    wu_denominator: float
    resonant: bool
    horizon: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class GaugedTrajectory:
    """Eigenstates on a time grid after parallel-transport re-phasing."""

    times: NDArray[np.float64]
    v_plus: NDArray[np.complex128]
    v_minus: NDArray[np.complex128]
    gamma_plus: NDArray[np.float64]
    gamma_minus: NDArray[np.float64]
    # relative size of <v|dv/dt> left after re-phasing, per branch
    residual: float


def default_basis(p: FieldParams) -> Basis:
    def basis(t):
        es = eigensystem(t, p)
        return es.v_plus, es.v_minus

    return basis


def default_horizon(p: FieldParams) -> float:
    """One rf period 1/w'; falls back to 1/w0 for a static field."""
    return 1.0 / (p.omega_prime if p.omega_prime > 0 else p.omega0)


def _gap(p: FieldParams) -> float:
    return TWO_PI * p.omega_total


def _steps(p: FieldParams) -> tuple[float, float]:
    scale = TWO_PI * max(p.omega0, p.omega_prime, p.omega1)
    return INNER_STEP / scale, OUTER_STEP / scale


def five_point(f: Callable, t: float, h: float):
    """Fourth-order central difference of ``f`` at ``t``."""
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)


def _align(ref: NDArray, v: NDArray) -> NDArray:
    overlap = np.vdot(ref, v)
    if overlap == 0:
        return v
    return v * (np.conj(overlap) / abs(overlap))


def vector_derivative(vec: Callable, t: float, h: float, align: bool) -> NDArray:
    if not align:
        return five_point(vec, t, h)
    ref = vec(t)
    return five_point(lambda s: _align(ref, vec(s)), t, h)


# -- closed forms -------------------------------------------------------------


def coupling_term(t: float, p: FieldParams) -> complex:
    """<E+(t)|dE-(t)/dt> in the canonical gauge (1/s): -i 2pi w' sin(theta)/2."""
    return -1j * TWO_PI * p.omega_prime * math.sin(p.theta) / 2


def berry_connections(p: FieldParams) -> tuple[complex, complex]:
    """(<E+|dE+/dt>, <E-|dE-/dt>) in the canonical gauge."""
    rate = TWO_PI * p.omega_prime
    half = 0.5 * p.theta
    return 1j * rate * math.sin(half) ** 2, 1j * rate * math.cos(half) ** 2


def c1_traditional(p: FieldParams) -> float:
    """|<E+|dE-/dt>| / (E+ - E-) = K R / (2 (1 + R^2)); constant in time."""
    K, R = p.K, p.R
    return K * R / (2 * (1 + R * R))


def tong_conditions(p: FieldParams, T: Optional[float] = None) -> TongConditions:
    """Tong's three conditions over [0, T] in the parallel-transport gauge.

    For T = 1/w' these reduce to (c1, pi K sin(th) cos^2(th),
    (pi/2) K sin^2(th) cos(th)).
    """
    if T is None:
        T = default_horizon(p)
    if T <= 0:
        raise ValueError(f"horizon must be > 0, got {T}")
    theta = p.theta
    scale = math.pi * p.omega_prime**2 / p.omega_total
    return TongConditions(
        a=c1_traditional(p),
        b=T * scale * math.sin(theta) * math.cos(theta),
        c=T * scale * math.sin(theta) ** 2 / 2,
    )


def wu_condition(p: FieldParams) -> WuCondition:
    """Wu's condition for the +/- pair.

    The denominator E+ - E- + i<E-|dE-/dt> - i<E+|dE+/dt> equals
    2pi w0 (1 + R^2 - K) / sqrt(1 + R^2), which vanishes on the resonance
    K = 1 + R^2; there C3 is reported as ``inf``.
    """
    K, R = p.K, p.R
    s = math.sqrt(1 + R * R)
    denominator = TWO_PI * p.omega0 * (1 + R * R - K) / s
    return _wu_from(abs(coupling_term(0.0, p)), denominator, _gap(p))


def _wu_from(coupling: float, denominator: float, gap: float) -> WuCondition:
    resonant = abs(denominator) < RESONANCE_TOL * gap
    if resonant:
        c3 = math.inf if coupling > 0 else 0.0
    else:
        c3 = coupling / abs(denominator)
    return WuCondition(c3=c3, denominator=denominator, resonant=resonant)


def full_report(p: FieldParams, T: Optional[float] = None, numeric: bool = False) -> ConditionReport:
    """All conditions at ``p``; ``numeric`` switches to the finite-difference pipeline."""
    if T is None:
        T = default_horizon(p)
    if numeric:
        c1 = c1_numeric(p)
        tong = tong_conditions_numeric(p, T)
        wu = wu_condition_numeric(p)
    else:
        c1 = c1_traditional(p)
        tong = tong_conditions(p, T)
        wu = wu_condition(p)
    return ConditionReport(
        K=p.K,
        R=p.R,
        c1=c1,
        tong_a=tong.a,
        tong_b=tong.b,
        tong_c=tong.c,
        wu_c3=wu.c3,
        wu_denominator=wu.denominator,
        resonant=wu.resonant,
        horizon=T,
    )


# -- numeric pipeline ---------------------------------------------------------


def coupling_term_numeric(t: float, p: FieldParams, basis: Optional[Basis] = None) -> complex:
    """<E+|dE-/dt> by phase-aligned finite differences of ``basis``."""
    basis = basis or default_basis(p)
    h, _ = _steps(p)
    v_plus = basis(t)[0]
    d_minus = vector_derivative(lambda s: basis(s)[1], t, h, align=True)
    return complex(np.vdot(v_plus, d_minus))


def connection_numeric(t: float, p: FieldParams, branch: int, basis: Optional[Basis] = None) -> complex:
    """<En|dEn/dt> for branch 0 (+) or 1 (-), differenced in the given gauge."""
    basis = basis or default_basis(p)
    h, _ = _steps(p)
    v = basis(t)[branch]
    dv = vector_derivative(lambda s: basis(s)[branch], t, h, align=False)
    return complex(np.vdot(v, dv))


def c1_numeric(p: FieldParams, t: float = 0.0, basis: Optional[Basis] = None) -> float:
    return abs(coupling_term_numeric(t, p, basis)) / _gap(p)


def arg_rate_numeric(t: float, p: FieldParams, basis: Optional[Basis] = None) -> float:
    """d/dt arg <E+|dE-/dt>; zero when the coupling vanishes."""
    _, H = _steps(p)
    centre = coupling_term_numeric(t, p, basis)
    if centre == 0:
        return 0.0

    def relative_arg(s):
        return np.angle(coupling_term_numeric(s, p, basis) * np.conj(centre))

    return float(five_point(relative_arg, t, H))


def wu_condition_numeric(p: FieldParams, t: float = 0.0, basis: Optional[Basis] = None) -> WuCondition:
    """Wu's condition with every term, including the arg-derivative, differenced.

    The arg-derivative enters with a real unit coefficient, which is what makes
    the denominator invariant under t-dependent re-phasing of either branch.
    """
    coupling = coupling_term_numeric(t, p, basis)
    conn_plus = connection_numeric(t, p, 0, basis)
    conn_minus = connection_numeric(t, p, 1, basis)
    shift = 1j * conn_minus - 1j * conn_plus + arg_rate_numeric(t, p, basis)
    denominator = _gap(p) + shift.real
    return _wu_from(abs(coupling), denominator, _gap(p))


def _pt_coupling_rate(t: float, p: FieldParams, basis: Basis, gap: float) -> complex:
    """d/dt (<E+|dE-/dt> / gap) in the parallel-transport gauge at time t.

    Re-phasing by gamma_n with d(gamma_n)/dt = i<En|dEn/dt> multiplies the
    coupling by exp(i (gamma_- - gamma_+)), so only the local connections are
    needed, not the accumulated phases.
    """
    _, H = _steps(p)
    ratio = coupling_term_numeric(t, p, basis) / gap
    d_ratio = five_point(lambda s: coupling_term_numeric(s, p, basis) / gap, t, H)
    gauge_rate = 1j * connection_numeric(t, p, 1, basis) - 1j * connection_numeric(t, p, 0, basis)
    return 1j * gauge_rate.real * ratio + d_ratio


def tong_conditions_numeric(
    p: FieldParams,
    T: Optional[float] = None,
    basis: Optional[Basis] = None,
    rtol: float = 1e-8,
    sup_points: int = 33,
) -> TongConditions:
    """Tong's conditions from finite differences and adaptive quadrature."""
    if T is None:
        T = default_horizon(p)
    basis = basis or default_basis(p)
    gap = _gap(p)
    sup = max(abs(coupling_term_numeric(t, p, basis)) / gap for t in np.linspace(0.0, T, sup_points))

    def integrand_b(t):
        return abs(_pt_coupling_rate(t, p, basis, gap))

    def integrand_c(t):
        h, _ = _steps(p)
        v_plus, v_minus = basis(t)
        d_plus = vector_derivative(lambda s: basis(s)[0], t, h, align=True)
        other = np.vdot(v_minus, d_plus)
        return abs(coupling_term_numeric(t, p, basis) * other) / gap

    b, _ = integrate.quad(integrand_b, 0.0, T, epsrel=rtol, epsabs=0.0, limit=200)
    c, _ = integrate.quad(integrand_c, 0.0, T, epsrel=rtol, epsabs=0.0, limit=200)
    return TongConditions(a=float(sup), b=float(b), c=float(c))


def parallel_transport(times: ArrayLike, p: FieldParams, basis: Optional[Basis] = None) -> GaugedTrajectory:
    """Re-phase both eigenvector branches so that <n|dn/dt> = 0 along ``times``.

    gamma_n(t) = integral of i<En|dEn/dt> (trapezoidal), and the returned
    states are exp(i gamma_n) |En>. Raises if consecutive eigenvectors on the
    grid overlap by less than 0.999, i.e. the grid is too coarse to follow them.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be a strictly increasing grid of at least two points")
    basis = basis or default_basis(p)
    raw = np.array([np.stack(basis(t)) for t in times])  # (N, branch, 2)
    overlaps = np.abs(np.einsum("ibk,ibk->ib", raw[:-1].conj(), raw[1:]))
    if np.any(overlaps < MIN_STEP_OVERLAP):
        raise ValueError(
            f"grid too coarse: consecutive eigenvector overlap {overlaps.min():.6f} "
            f"< {MIN_STEP_OVERLAP}; refine the time grid"
        )

    connection = np.array([[connection_numeric(t, p, b, basis) for b in (0, 1)] for t in times])
    rate = (1j * connection).real  # d(gamma)/dt
    gamma = integrate.cumulative_trapezoid(rate, times, axis=0, initial=0.0)
    gauged = raw * np.exp(1j * gamma)[:, :, None]

    # connection left over in the new gauge: i d(gamma)/dt + <v|dv/dt>, with
    # d(gamma)/dt recovered from the accumulated phase itself
    residual = 1j * np.gradient(gamma, times, axis=0, edge_order=2) + connection
    # measured against the larger of the raw connection and the field's rate
    # scale, so a vanishing connection (no rf) does not inflate the ratio
    scale = max(float(np.max(np.abs(connection))), TWO_PI * p.max_frequency)
    rel = float(np.max(np.abs(residual)) / scale)
    return GaugedTrajectory(
        times=times,
        v_plus=gauged[:, 0],
        v_minus=gauged[:, 1],
        gamma_plus=gamma[:, 0],
        gamma_minus=gamma[:, 1],
        residual=rel,
    )


def tong_b_on_grid(traj: GaugedTrajectory, p: FieldParams) -> float:
    """Tong's condition (B) directly from a gauged trajectory (second-order accurate)."""
    d_minus = np.gradient(traj.v_minus, traj.times, axis=0, edge_order=2)
    pt = np.einsum("ik,ik->i", traj.v_plus.conj(), d_minus) / _gap(p)
    rate = np.gradient(pt, traj.times, edge_order=2)
    return float(integrate.trapezoid(np.abs(rate), traj.times))
