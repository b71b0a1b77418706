"""Command-line front end.

Exit status: 0 success, 1 usage or parse error, 2 numerical failure
(including unconverged points under ``--strict``), 3 I/O error.
"""

import argparse
import io
import os
import sys

import numpy as np

from . import io as fio
from ._validation import check_grid, log_grid
from .chain import frequency_response
from .exceptions import (
    FracredError,
    IndexOutOfRange,
    NumericalError,
    ParseError,
    ValidationError,
)
from .fractional import PolarResponse, steady_state, to_polar
from .numerics import NewtonConfig
from .oracle import stable_steps, steady_response
from .reduction import reduce_to_fndof, sweep_fsdof
from .svg import Axes, emit_svg
from .sysid import BodeDataset, identify_fndof, identify_fsdof

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3
VERIFY_TOL = 1e-3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# argument parsing helpers

def parse_grid(text):
    """``min:max:count[:log|lin]`` to a frequency array."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise UsageError(f"grid must be min:max:count[:log|lin], got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    scale = parts[3] if len(parts) == 4 else "log"
    if scale not in ("log", "lin"):
        raise UsageError(f"grid scale must be log or lin, got {scale!r}")
    if count == 1 and lo == hi and lo > 0:
        return check_grid([lo])
    if not (0 < lo < hi) or count < 2:
        raise UsageError("grid needs 0 < min < max and count >= 2 (or min:min:1)")
    if scale == "log":
        return log_grid(lo, hi, count)
    w = np.linspace(lo, hi, count)
    w[-1] = hi
    return check_grid(w)


def parse_int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def parse_float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def parse_partition(text):
    """``"1,2|3,4"`` to ``[[1, 2], [3, 4]]``."""
    return [parse_int_list(block) for block in text.split("|")]


def build_parser():
    p = _Parser(prog="fracred", description="Fractional reduction and identification of "
                "mass-spring-damper chains.")
    common = _Parser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument("--grid", default="0.01:100:100:log",
                        help="min:max:count[:log|lin] (default 0.01:100:100:log)")
    common.add_argument("--tol", type=float, default=1e-12, help="Newton tolerance")
    common.add_argument("--max-iter", type=int, default=100, help="Newton iteration cap")
    common.add_argument("--plot", dest="plot", action="store_true", default=True,
                        help="write SVG plots (default)")
    common.add_argument("--no-plot", dest="plot", action="store_false")
    common.add_argument("--strict", action="store_true",
                        help="exit 2 if any point fails instead of flagging it")
    common.add_argument("--parallel", action="store_true",
                        help="solve frequencies independently in parallel (identify-sdof only)")

    model_args = _Parser(add_help=False)
    model_args.add_argument("model", help="model JSON file")
    model_args.add_argument("--force-dof", type=int, help="override force_dof from the file")
    model_args.add_argument("--active", type=parse_int_list,
                            help="comma-separated active DOFs (overrides the file)")

    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("bode", parents=[common, model_args],
                   help="integer transfer functions at the active DOFs")
    sub.add_parser("reduce-sdof", parents=[common, model_args],
                   help="F-SDOF order schedule for one active DOF")
    sp = sub.add_parser("reduce-ndof", parents=[common, model_args],
                        help="F-NDOF schedules matching all active DOFs")
    sp.add_argument("--partition", type=parse_partition,
                    help='mass blocks, e.g. "1,2|3,4" (default: blocks starting at active DOFs)')

    sp = sub.add_parser("identify-sdof", parents=[common], help="F-SDOF from one Bode CSV")
    sp.add_argument("bode", help="Bode CSV (omega,magnitude,phase_rad|phase_deg)")
    sp.add_argument("--m-bar", type=float, required=True)
    sp.add_argument("--k-bar", type=float, help="estimated from the lowest frequency if omitted")

    sp = sub.add_parser("identify-ndof", parents=[common], help="F-NDOF from N Bode CSVs")
    sp.add_argument("bode", nargs="+", help="one Bode CSV per fractional DOF")
    sp.add_argument("--masses", type=parse_float_list, required=True)
    sp.add_argument("--k-bar", type=float, required=True)
    sp.add_argument("--forced-dof", type=int, default=1)

    sp = sub.add_parser("steady-state", parents=[common, model_args],
                        help="time-domain steady state under sinusoidal forcing")
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--f0", type=float, default=1.0)
    sp.add_argument("--periods", type=int, default=200)

    sp = sub.add_parser("verify", parents=[common, model_args],
                        help="cross-check transfer functions and reductions against the oracle")
    sp.add_argument("--omega", type=float, action="append",
                    help="check frequency (repeatable, default 1.0)")
    sp.add_argument("--f0", type=float, default=1.0)
    return p


# shared pieces

def _config(args):
    try:
        return NewtonConfig(tol=args.tol, max_iter=args.max_iter)
    except ValidationError as exc:
        raise UsageError(str(exc)) from None


def _load_model(args):
    model, force_dof, active = fio.parse_model_file(args.model)
    if args.force_dof is not None:
        force_dof = args.force_dof
    if args.active:
        active = args.active
    return model, force_dof, active


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _out_path(args, name):
    return os.path.join(args.out, name)


def _report_unconverged(args, result):
    jumps = np.flatnonzero(result.branch_jumps())
    if jumps.size:
        where = ", ".join(f"{w:g}" for w in result.omegas[jumps][:5])
        print(f"warning: schedule jumps (possible branch change) at omega = {where}",
              file=sys.stderr)
    bad = int(np.count_nonzero(~result.converged))
    if bad:
        print(f"warning: {bad} of {result.converged.size} points did not converge",
              file=sys.stderr)
    return EXIT_NUMERIC if bad and args.strict else EXIT_OK


def _plot_bode(args, stem, omegas, curves):
    """``curves`` is a list of (label, complex array)."""
    mag = [(omegas, np.abs(H), label) for label, H in curves]
    ph = [(omegas, np.angle(H), label) for label, H in curves]
    _write(_out_path(args, f"{stem}-magnitude.svg"),
           emit_svg(mag, Axes(xlog=True, ylog=True, xlabel="omega [rad/s]",
                              ylabel="magnitude", title=f"{stem}: magnitude")))
    _write(_out_path(args, f"{stem}-phase.svg"),
           emit_svg(ph, Axes(xlog=True, xlabel="omega [rad/s]", ylabel="phase [rad]",
                             title=f"{stem}: phase")))


def _plot_schedules(args, stem, result):
    curves = [(result.omegas, result.alphas.real, "Re alpha"),
              (result.omegas, result.alphas.imag, "Im alpha")]
    _write(_out_path(args, f"{stem}-alpha.svg"),
           emit_svg(curves, Axes(xlog=True, xlabel="omega [rad/s]", ylabel="alpha",
                                 title=f"{stem}: fractional order")))
    if result.n_beta:
        curves = []
        for j in range(result.n_beta):
            curves += [(result.omegas, result.betas[:, j].real, f"Re beta{j + 1}"),
                       (result.omegas, result.betas[:, j].imag, f"Im beta{j + 1}")]
        _write(_out_path(args, f"{stem}-beta.svg"),
               emit_svg(curves, Axes(xlog=True, xlabel="omega [rad/s]", ylabel="beta",
                                     title=f"{stem}: coupling parameters")))


def _plot_safe(fn, *a):
    # plots are inspection aids; an all-NaN schedule must not fail the run
    try:
        fn(*a)
    except FracredError as exc:
        print(f"warning: plot skipped ({exc})", file=sys.stderr)


# subcommands

def cmd_bode(args):
    model, force_dof, active = _load_model(args)
    grid = parse_grid(args.grid)
    H = frequency_response(model, force_dof, grid, active, on_singular="nan")
    singular = ~np.all(np.isfinite(H), axis=1) | np.any(H == 0, axis=1)
    for j, dof in enumerate(active):
        ok = ~singular
        lines = []
        if ok.any():
            buf = io.StringIO()
            fio.write_bode_csv(BodeDataset.from_complex(grid[ok], H[ok, j]), buf)
            lines.append(buf.getvalue())
        else:
            lines.append("omega,magnitude,phase_rad\n")
        lines += [f"# singular,{fio.fmt(w)}\n" for w in grid[singular]]
        _write(_out_path(args, f"bode-dof{dof}.csv"), "".join(lines))
    if args.plot and (~singular).any():
        _plot_safe(_plot_bode, args, "bode", grid[~singular],
                   [(f"H{d}", H[~singular, j]) for j, d in enumerate(active)])
    if singular.any():
        print(f"warning: {int(singular.sum())} singular frequencies", file=sys.stderr)
        return EXIT_NUMERIC if args.strict else EXIT_OK
    return EXIT_OK


def cmd_reduce_sdof(args):
    model, force_dof, active = _load_model(args)
    if len(active) != 1:
        if args.active:
            raise UsageError("reduce-sdof takes exactly one --active DOF")
        active = active[:1]
    result = sweep_fsdof(model, force_dof, active[0], parse_grid(args.grid))
    _write(_out_path(args, "reduce-sdof.csv"), fio.result_to_csv(result))
    if args.plot:
        H = frequency_response(model, force_dof, result.omegas, active, on_singular="nan")[:, 0]
        G = result.response()[:, 0]
        _plot_safe(_plot_schedules, args, "reduce-sdof", result)
        _plot_safe(_plot_bode, args, "reduce-sdof", result.omegas,
                   [(f"integer H{active[0]}", H), ("fractional G", G)])
    return _report_unconverged(args, result)


def cmd_reduce_ndof(args):
    model, force_dof, active = _load_model(args)
    result = reduce_to_fndof(model, force_dof, active, args.partition, parse_grid(args.grid),
                             _config(args))
    _write(_out_path(args, "reduce-ndof.csv"), fio.result_to_csv(result))
    if args.plot:
        H = frequency_response(model, force_dof, result.omegas, active, on_singular="nan")
        G = result.response()
        curves = []
        for j, d in enumerate(active):
            curves += [(f"integer H{d}", H[:, j]), (f"fractional G{j + 1}", G[:, j])]
        _plot_safe(_plot_schedules, args, "reduce-ndof", result)
        _plot_safe(_plot_bode, args, "reduce-ndof", result.omegas, curves)
    return _report_unconverged(args, result)


def _read_bode(path):
    with open(path, encoding="utf-8") as fh:
        return fio.read_bode_csv(fh)


def _identified_outputs(args, stem, result, datasets):
    _write(_out_path(args, f"{stem}.csv"), fio.result_to_csv(result))
    print(f"max reconstruction error: {result.max_reconstruction_error:.3e}")
    if args.plot:
        G = result.response()
        curves = []
        for j, ds in enumerate(datasets):
            curves += [(f"data {j + 1}", ds.to_complex()), (f"fractional G{j + 1}", G[:, j])]
        _plot_safe(_plot_schedules, args, stem, result)
        _plot_safe(_plot_bode, args, stem, result.omegas, curves)
    return _report_unconverged(args, result)


def cmd_identify_sdof(args):
    data = _read_bode(args.bode)
    result = identify_fsdof(data, args.m_bar, args.k_bar, _config(args),
                            continuation=not args.parallel,
                            n_jobs=-1 if args.parallel else None)
    if result.k_bar_estimated:
        print(f"k_bar estimated from the lowest frequency: {result.k_bar:.6g}")
    return _identified_outputs(args, "identify-sdof", result, [data])


def cmd_identify_ndof(args):
    datasets = [_read_bode(p) for p in args.bode]
    if args.parallel:
        # independent seeds can land on other roots; only continuation tracks one branch
        print("note: --parallel ignored, identify-ndof needs frequency continuation",
              file=sys.stderr)
    result = identify_fndof(datasets, args.masses, args.k_bar, args.forced_dof, _config(args))
    return _identified_outputs(args, "identify-ndof", result, datasets)


def _check_omega(omega):
    if not (np.isfinite(omega) and omega > 0):
        raise UsageError("--omega must be positive")
    return omega


def cmd_steady_state(args):
    model, force_dof, active = _load_model(args)
    omega = _check_omega(args.omega)
    steps = stable_steps(model, force_dof, omega)
    amps, phases, resid, tail = steady_response(model, force_dof, args.f0, omega, args.periods, steps)
    H = frequency_response(model, force_dof, [omega], on_singular="nan")[0]
    rows = ["dof,amplitude,phase,tf_amplitude,tf_phase,fit_residual"]
    for d in range(model.n_dof):
        rows.append(",".join([str(d + 1), fio.fmt(amps[d]), fio.fmt(phases[d]),
                              fio.fmt(abs(args.f0) * abs(H[d])), fio.fmt(np.angle(H[d])),
                              fio.fmt(resid[d])]))
    _write(_out_path(args, "steady-state.csv"), "\n".join(rows) + "\n")
    with open(_out_path(args, "trajectory.csv"), "w", encoding="utf-8", newline="") as fh:
        fio.write_trajectory_csv(tail, fh)
    for d in active:
        print(f"dof {d}: amplitude {amps[d - 1]:.6e}, phase {phases[d - 1]:+.6f} rad, "
              f"fit residual {resid[d - 1]:.1e}")
    if args.plot:
        curves = [(tail.times, tail.displacements[:, d - 1], f"x{d}") for d in active]
        _plot_safe(lambda: _write(_out_path(args, "steady-state.svg"), emit_svg(
            curves, Axes(xlabel="t [s]", ylabel="displacement", title="steady state"))))
    return EXIT_OK


def _verify_rows(model, force_dof, active, omega, f0, config):
    """(label, deviation) pairs at one frequency."""
    steps = stable_steps(model, force_dof, omega)
    amps, phases, _, tail = steady_response(model, force_dof, f0, omega, 200, steps)
    H = frequency_response(model, force_dof, [omega], active)[0]
    t = tail.times
    rows = []
    for j, d in enumerate(active):
        ref = abs(f0) * abs(H[j])
        rows.append((f"omega={omega:g} dof {d} amplitude vs |H|", abs(amps[d - 1] - ref) / ref))
        rows.append((f"omega={omega:g} dof {d} phase vs arg H",
                     abs(np.angle(np.exp(1j * (phases[d - 1] - np.angle(H[j])))))))

    def waveform_dev(G, d):
        pol = to_polar(G)
        x_frac = steady_state(t, omega, f0, PolarResponse(float(pol.magnitude), float(pol.phase)))
        x_int = tail.displacements[:, d - 1]
        return float(np.max(np.abs(x_frac - x_int)) / (abs(f0) * pol.magnitude))

    for d in active:
        sd = sweep_fsdof(model, force_dof, d, [omega])
        if not sd.converged[0]:
            rows.append((f"omega={omega:g} F-SDOF dof {d} waveform", np.inf))
            continue
        rows.append((f"omega={omega:g} F-SDOF dof {d} waveform",
                     waveform_dev(sd.response()[0, 0], d)))
    if len(active) > 1:
        # continuation needs a path from the high-frequency seed
        grid = log_grid(omega, max(100.0, 10 * omega), 60)
        nd = reduce_to_fndof(model, force_dof, active, grid=grid, config=config)
        G = nd.response()[0]
        for j, d in enumerate(active):
            dev = waveform_dev(G[j], d) if nd.converged[0] else np.inf
            rows.append((f"omega={omega:g} F-{len(active)}DOF G{j + 1} waveform vs dof {d}", dev))
    return rows


def cmd_verify(args):
    model, force_dof, active = _load_model(args)
    omegas = [_check_omega(w) for w in (args.omega or [1.0])]
    worst = 0.0
    for w in omegas:
        for label, dev in _verify_rows(model, force_dof, active, w, args.f0, _config(args)):
            status = "ok" if dev < VERIFY_TOL else "FAIL"
            print(f"{label}: max deviation {dev:.3e} [{status}]")
            worst = max(worst, dev)
    print(f"worst deviation {worst:.3e} (limit {VERIFY_TOL:g})")
    return EXIT_OK if worst < VERIFY_TOL else EXIT_NUMERIC


COMMANDS = {
    "bode": cmd_bode,
    "reduce-sdof": cmd_reduce_sdof,
    "reduce-ndof": cmd_reduce_ndof,
    "identify-sdof": cmd_identify_sdof,
    "identify-ndof": cmd_identify_ndof,
    "steady-state": cmd_steady_state,
    "verify": cmd_verify,
}


def run(argv=None):
    """Parse ``argv`` and execute; returns the exit status."""
    try:
        args = build_parser().parse_args(argv)
        if args.command not in ("verify",) and not os.path.isdir(args.out):
            os.makedirs(args.out, exist_ok=True)
        return COMMANDS[args.command](args)
    except (UsageError, ParseError, ValidationError, IndexOutOfRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FracredError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
