"""Command-line front end: ``adiabatic-probe {trace,sweep,conditions,validate}``.

Exit codes: 0 success, 1 numeric or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import criteria, serialize, sweep
from .integrators import evolve, make_schedule, pulse_sequence_evolve
from .spin import FieldParams, fidelity_trace_closed
from .validation import run_checks

DEFAULT_OMEGA1 = 100.0


class UsageError(Exception):
    pass


def _add_param_flags(parser: argparse.ArgumentParser):
    g = parser.add_argument_group("field parameters (explicit frequencies win over ratios)")
    g.add_argument("--k", type=float, help="K = omega'/omega0")
    g.add_argument("--r", type=float, help="R = omega1/omega0")
    g.add_argument("--omega0", type=float, help="Larmor frequency (Hz)")
    g.add_argument("--omega1", type=float, help="rf strength (Hz)")
    g.add_argument("--omega-prime", dest="omega_prime", type=float, help="rf rotation frequency (Hz)")


def resolve_params(args) -> FieldParams:
    """Combine ratio and frequency flags into one parameter set.

    Frequencies given explicitly are used as-is. Missing ones are derived from
    K and R; if only ratios are given the rf strength defaults to 100 Hz.
    A ratio that disagrees with the result is an error unless all three
    frequencies were given.
    """
    w0, w1, wp = args.omega0, args.omega1, args.omega_prime
    K, R = args.k, args.r
    full = None not in (w0, w1, wp)
    if w0 is None:
        if w1 is not None and R:
            w0 = w1 / R
        elif wp is not None and K:
            w0 = wp / K
        elif w1 is None and wp is None and R:
            w1 = DEFAULT_OMEGA1
            w0 = w1 / R
    if w0 is None:
        raise UsageError("cannot determine omega0: give --omega0, or --r with --omega1")
    if w1 is None:
        if R is None:
            raise UsageError("missing --r or --omega1")
        w1 = R * w0
    if wp is None:
        if K is None:
            raise UsageError("missing --k or --omega-prime")
        wp = K * w0
    try:
        p = FieldParams(w0, w1, wp)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not full:
        for name, given, actual in (("K", K, p.K), ("R", R, p.R)):
            if given is not None and not math.isclose(given, actual, rel_tol=1e-9, abs_tol=1e-12):
                raise UsageError(f"--{name.lower()} {given} conflicts with the given frequencies ({name} = {actual})")
    return p


def parse_range(text: str, default_scale: str) -> np.ndarray:
    """Parse ``a:b:n`` with optional ``:log``/``:lin`` suffix."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise UsageError(f"malformed range {text!r}; expected a:b:n[:log|lin]")
    scale = parts[3] if len(parts) == 4 else default_scale
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"malformed range {text!r}") from None
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)) or lo <= 0 or hi < lo or (n > 1 and hi == lo):
        raise UsageError(f"invalid range {text!r}: need 0 < a < b and n >= 1")
    if scale == "log":
        return sweep.log_range(lo, hi, n) if n > 1 else np.array([lo])
    if scale == "lin":
        return np.linspace(lo, hi, n)
    raise UsageError(f"unknown range scale {scale!r}")


def _write(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _encode(record: serialize.OutputRecord, fmt: str) -> str:
    return serialize.to_json(record) if fmt == "json" else serialize.to_csv(record)


def cmd_trace(args) -> int:
    p = resolve_params(args)
    if args.cycles is None and args.t_end is None:
        raise UsageError("give --cycles or --t-end")
    if args.cycles is not None and args.cycles < 0:
        raise UsageError("--cycles must be >= 0")
    if args.t_end is not None and args.t_end < 0:
        raise UsageError("--t-end must be >= 0")

    provenance = {}
    if args.method == "pulse":
        if p.omega_prime <= 0:
            raise UsageError("the pulse method needs a rotating field (omega' > 0)")
        probe = make_schedule(p, 0)
        cycles = args.cycles if args.cycles is not None else int(args.t_end // probe.tau)
        sched = make_schedule(p, cycles)
        trace = pulse_sequence_evolve(p, sched).trace
        provenance = {"delta_t": sched.delta_t, "tau": sched.tau, "phase_step": sched.phase_step}
    else:
        if args.cycles is not None:
            if p.omega_prime <= 0:
                raise UsageError("--cycles needs omega' > 0; use --t-end")
            period = 1.0 / p.omega_prime
            if args.points:
                times = np.linspace(0.0, args.cycles * period, args.points)
            else:
                times = np.arange(args.cycles + 1) * period
        else:
            times = np.linspace(0.0, args.t_end, args.points or 201) if args.t_end > 0 else np.array([0.0])
        if args.method == "closed":
            trace = fidelity_trace_closed(p, times)
        else:
            res = evolve(p, float(times[-1]), dt=args.dt, sample_times=times)
            trace = res.trace
            provenance = {"step_count": res.step_count, "norm_drift": res.norm_drift, "coarse_step": res.coarse_step}
    _write(_encode(serialize.trace_record(trace, provenance), args.format), args.out)
    return 0


def cmd_sweep(args) -> int:
    ks = parse_range(args.k_range, "log")
    rs = parse_range(args.r_range, "lin")
    quantities = tuple(q.strip() for q in args.quantities.split(",") if q.strip())
    jobs = args.jobs if args.jobs is not None else sweep.default_jobs()
    if jobs < 1:
        raise UsageError("--jobs must be >= 1")
    try:
        grid = sweep.GridSpec(tuple(ks), tuple(rs), args.omega1, quantities)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    table = sweep.surface_sweep(grid, jobs=jobs)
    record = serialize.table_record(table, {"method": "closed-form", "resonance_tol": criteria.RESONANCE_TOL})
    _write(_encode(record, args.format), args.out)
    return 0


def cmd_conditions(args) -> int:
    p = resolve_params(args)
    if args.horizon is not None and args.horizon <= 0:
        raise UsageError("--horizon must be > 0")
    report = criteria.full_report(p, args.horizon, numeric=args.numeric)
    obj = {
        "schema": serialize.SCHEMA,
        "kind": "conditions",
        "params": serialize.params_dict(p),
        "provenance": {"method": "finite-difference" if args.numeric else "closed-form"},
        "report": report.as_dict(),
    }
    _write(json.dumps(serialize.encode_value(obj), indent=1) + "\n", args.out)
    return 0


def cmd_validate(args) -> int:
    start = time.perf_counter()
    results = run_checks(quick=args.quick)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed in {time.perf_counter() - start:.1f} s")
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adiabatic-probe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="fidelity trace F(t)")
    _add_param_flags(p)
    p.add_argument("--cycles", type=int, help="number of rf cycles (samples at t = n tau)")
    p.add_argument("--t-end", dest="t_end", type=float, help="end time in seconds")
    p.add_argument("--points", type=int, help="number of evenly spaced samples")
    p.add_argument("--dt", type=float, help="integrator step (s)")
    p.add_argument("--method", choices=("closed", "integrator", "pulse"), default="closed")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("sweep", help="quantities over a (K, R) grid")
    p.add_argument("--k-range", dest="k_range", default="0.1:30:200", help="a:b:n, log-spaced by default")
    p.add_argument("--r-range", dest="r_range", default="0.01:0.5:200", help="a:b:n, linear by default")
    p.add_argument("--omega1", type=float, default=DEFAULT_OMEGA1)
    p.add_argument("--quantities", default=",".join(sweep.QUANTITIES))
    p.add_argument("--jobs", type=int, help="worker processes (default: $ADIABATIC_PROBE_JOBS or 1)")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("conditions", help="adiabatic condition report as JSON")
    _add_param_flags(p)
    p.add_argument("--horizon", type=float, help="evolution time T in seconds (default 1/omega')")
    p.add_argument("--numeric", action="store_true", help="use the finite-difference pipeline")
    p.add_argument("--out")
    p.set_defaults(func=cmd_conditions)

    p = sub.add_parser("validate", help="cross-check all propagation and criteria routes")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"adiabatic-probe {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"adiabatic-probe {args.command}: numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
