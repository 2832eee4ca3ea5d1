import numpy as np
import pytest
from scipy.integrate import solve_ivp

from adiabatic_probe.spin import FieldParams, hamiltonian_matrix, initial_state


@pytest.fixture
def fig1_k1():
    """K = 1, R = 0.06 at omega0 = 1700 Hz."""
    return FieldParams.from_ratios(1.0, 0.06, omega0=1700.0)


@pytest.fixture
def fig1_k10():
    return FieldParams.from_ratios(10.0, 0.06, omega0=1700.0)


def ode_state(p: FieldParams, t_end: float, rtol: float = 1e-12):
    """Reference solution of the Schrodinger equation by adaptive RK (DOP853)."""

    def rhs(t, y):
        psi = y[:2] + 1j * y[2:]
        d = -1j * hamiltonian_matrix(t, p) @ psi
        return np.concatenate([d.real, d.imag])

    psi0 = initial_state(p)
    y0 = np.concatenate([psi0.real, psi0.imag])
    if t_end == 0:
        return psi0
    sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", rtol=rtol, atol=rtol * 1e-2)
    y = sol.y[:, -1]
    return y[:2] + 1j * y[2:]


def pytest_terminal_summary(terminalreporter):
    """Print one PASS/FAIL line per acceptance criterion (tests/test_acceptance.py)."""
    lines = {}
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_criterion_" not in rep.nodeid or rep.when != "call":
                continue
            number = int(rep.nodeid.split("test_criterion_")[1][:2])
            details = [text for key, text in rep.user_properties if key == "acceptance"]
            status = "PASS" if outcome == "passed" else "FAIL"
            lines[number] = f"criterion {number}: {status}  {details[0] if details else '(raised before reporting)'}"
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
