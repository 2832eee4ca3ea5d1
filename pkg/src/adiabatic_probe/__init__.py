"""Spin-1/2 in a rotating field: exact and numerical dynamics, adiabatic conditions, (K, R) sweeps."""

from .criteria import (
    ConditionReport,
    c1_traditional,
    coupling_term,
    full_report,
    parallel_transport,
    tong_conditions,
    wu_condition,
)
from .integrators import PulseSchedule, evolve, make_schedule, pulse_sequence_evolve, step_exact
from .spin import (
    EigenSystem,
    FidelityTrace,
    FieldParams,
    eigensystem,
    exact_state,
    f_min_closed,
    fidelity,
    fidelity_trace_closed,
    hamiltonian_matrix,
    initial_state,
    t_min,
)
from .sweep import GridSpec, SweepTable, figure1_traces, slice_vs_k, slice_vs_r, surface_sweep

__version__ = "0.1.0"
