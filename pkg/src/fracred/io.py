"""File formats: model JSON, result/Bode/trajectory CSV.

CSV numbers are written with 17 significant digits so they round-trip
exactly. Metadata goes in trailing ``#`` lines, after the data rows.
"""

import csv
import io
import json
import math
import numbers

import numpy as np

from .chain import ChainModel
from .exceptions import FracredError, IndexOutOfRange, ParseError, ValidationError
from .reduction import ReductionResult
from .sysid import BodeDataset, IdentifiedModel

MODEL_KEYS = ("masses", "stiffnesses", "dampers", "force_dof", "active_dofs")


def fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _reject_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ParseError(f"duplicate key {key!r}")
        seen[key] = value
    return seen


def _reject_constant(name):
    raise ParseError(f"non-finite number {name} not allowed")


def parse_model_text(text):
    """Parse model JSON text; see :func:`parse_model_file`."""
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicates, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object")
    unknown = sorted(set(data) - set(MODEL_KEYS))
    if unknown:
        raise ValidationError(f"unknown key(s): {', '.join(unknown)}", unknown[0])

    arrays = {}
    for key in ("masses", "stiffnesses", "dampers"):
        if key not in data:
            raise ValidationError(f"missing required key {key!r}", key)
        value = data[key]
        if not isinstance(value, list) or not all(_is_number(v) for v in value):
            raise ValidationError(f"{key} must be an array of numbers", key)
        arrays[key] = value
    model = ChainModel(tuple(arrays["masses"]), tuple(arrays["stiffnesses"]), tuple(arrays["dampers"]))

    force_dof = data.get("force_dof", 1)
    active = data.get("active_dofs", [force_dof])
    if not isinstance(active, list):
        raise ValidationError("active_dofs must be an array of integers", "active_dofs")
    for key, values in (("force_dof", [force_dof]), ("active_dofs", active)):
        for v in values:
            if not _is_integer(v) or not 1 <= v <= model.n_dof:
                raise ValidationError(f"{key} entries must be integers in 1..{model.n_dof}", key)
    if not active or any(b <= a for a, b in zip(active, active[1:])):
        raise ValidationError("active_dofs must be non-empty and strictly increasing", "active_dofs")
    return model, int(force_dof), [int(v) for v in active]


def parse_model_file(path):
    """Read a chain model file.

    Returns ``(model, force_dof, active_dofs)``. Unknown keys, duplicate
    keys and malformed values are rejected.
    """
    with open(path, encoding="utf-8") as fh:
        return parse_model_text(fh.read())


def model_to_json(model, force_dof=1, active_dofs=None):
    return json.dumps({
        "masses": list(model.masses),
        "stiffnesses": list(model.stiffnesses),
        "dampers": list(model.dampers),
        "force_dof": force_dof,
        "active_dofs": list(active_dofs or [force_dof]),
    }, indent=2)


def _is_number(v):
    return isinstance(v, numbers.Real) and not isinstance(v, bool) and math.isfinite(v)


def _is_integer(v):
    return isinstance(v, int) and not isinstance(v, bool)


# result tables

def result_header(n_beta):
    cols = ["omega", "re_alpha", "im_alpha"]
    for j in range(1, n_beta + 1):
        cols += [f"re_beta{j}", f"im_beta{j}"]
    return cols + ["residual", "converged"]


def write_result_csv(result, fh):
    """Write a ReductionResult (or IdentifiedModel) to an open text file."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(result_header(result.n_beta))
    for i, w in enumerate(result.omegas):
        row = [fmt(w), fmt(result.alphas[i].real), fmt(result.alphas[i].imag)]
        for b in result.betas[i]:
            row += [fmt(b.real), fmt(b.imag)]
        row += [fmt(result.residuals[i]), "true" if result.converged[i] else "false"]
        writer.writerow(row)
    fh.write("# masses," + ",".join(fmt(m) for m in result.masses) + "\n")
    fh.write(f"# k_bar,{fmt(result.k_bar)}\n")
    fh.write(f"# forced_dof,{result.forced_dof}\n")
    if isinstance(result, IdentifiedModel):
        fh.write(f"# k_bar_estimated,{'true' if result.k_bar_estimated else 'false'}\n")
        fh.write(f"# max_reconstruction_error,{fmt(result.max_reconstruction_error)}\n")


def result_to_csv(result):
    buf = io.StringIO()
    write_result_csv(result, buf)
    return buf.getvalue()


def read_result_csv(fh):
    """Parse a table written by :func:`write_result_csv`."""
    lines = fh.read().splitlines()
    data = [ln for ln in lines if ln and not ln.startswith("#")]
    meta = {}
    for ln in lines:
        if ln.startswith("#"):
            key, *values = ln[1:].strip().split(",")
            meta[key] = values
    if not data:
        raise ParseError("empty result table")
    header = data[0].split(",")
    n_cols = len(header)
    if header[:3] != ["omega", "re_alpha", "im_alpha"] or header[-2:] != ["residual", "converged"] \
            or (n_cols - 5) % 2:
        raise ParseError(f"unrecognized header {data[0]!r}", 1, 1)
    n_beta = (n_cols - 5) // 2
    if header != result_header(n_beta):
        raise ParseError(f"unrecognized header {data[0]!r}", 1, 1)

    rows = []
    for lineno, ln in enumerate(data[1:], start=2):
        cells = ln.split(",")
        if len(cells) != n_cols:
            raise ParseError(f"expected {n_cols} fields, got {len(cells)}", lineno, 1)
        try:
            nums = [float(c) for c in cells[:-1]]
        except ValueError as exc:
            raise ParseError(str(exc), lineno, 1) from exc
        if cells[-1] not in ("true", "false"):
            raise ParseError(f"converged must be true/false, got {cells[-1]!r}", lineno, n_cols)
        rows.append((nums, cells[-1] == "true"))

    nums = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), n_cols - 1)
    omegas = nums[:, 0]
    alphas = nums[:, 1] + 1j * nums[:, 2]
    betas = nums[:, 3:3 + 2 * n_beta:2] + 1j * nums[:, 4:4 + 2 * n_beta:2]
    residuals = nums[:, -1]
    converged = np.array([r[1] for r in rows], dtype=bool)
    masses = tuple(float(v) for v in meta.get("masses", []))
    k_bar = float(meta["k_bar"][0]) if "k_bar" in meta else float("nan")
    forced = int(meta["forced_dof"][0]) if "forced_dof" in meta else 1
    kwargs = dict(masses=masses, k_bar=k_bar, forced_dof=forced)
    if "max_reconstruction_error" in meta:
        estimated = meta.get("k_bar_estimated", ["false"])[0] == "true"
        return IdentifiedModel(
            omegas, alphas, betas, residuals, converged, **kwargs,
            meta={"k_bar_estimated": estimated,
                  "max_reconstruction_error": float(meta["max_reconstruction_error"][0])},
            k_bar_estimated=estimated,
        )
    return ReductionResult(omegas, alphas, betas, residuals, converged, **kwargs)


# Bode data

def write_bode_csv(dataset, fh, degrees=False):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["omega", "magnitude", "phase_deg" if degrees else "phase_rad"])
    phases = np.degrees(dataset.phases) if degrees else dataset.phases
    for w, m, p in zip(dataset.omegas, dataset.magnitudes, phases):
        writer.writerow([fmt(w), fmt(m), fmt(p)])


def read_bode_csv(fh):
    """Parse ``omega,magnitude,phase_rad`` (or ``phase_deg``) into a BodeDataset."""
    reader = csv.reader(line for line in fh if not line.startswith("#"))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty Bode file") from None
    header = [h.strip() for h in header]
    if header not in (["omega", "magnitude", "phase_rad"], ["omega", "magnitude", "phase_deg"]):
        raise ParseError(f"unrecognized header {','.join(header)!r}", 1, 1)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", lineno, 1)
        try:
            rows.append([float(c) for c in row])
        except ValueError as exc:
            raise ParseError(str(exc), lineno, 1) from exc
    if not rows:
        raise ParseError("Bode file has no data rows")
    arr = np.array(rows)
    phases = np.radians(arr[:, 2]) if header[2] == "phase_deg" else arr[:, 2]
    try:
        return BodeDataset(arr[:, 0], arr[:, 1], phases)
    except (FracredError, IndexOutOfRange) as exc:
        raise ValidationError(str(exc)) from exc


def write_trajectory_csv(traj, fh):
    n = traj.states.shape[1] // 2
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t"] + [f"x{i}" for i in range(1, n + 1)] + [f"v{i}" for i in range(1, n + 1)])
    for t, x, v in zip(traj.times, traj.displacements, traj.velocities):
        writer.writerow([fmt(t)] + [fmt(a) for a in x] + [fmt(a) for a in v])
