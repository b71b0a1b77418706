"""Acceptance criteria, one test each.

Every test prints a ``PASS``/``FAIL`` line (visible even under output
capture) before asserting, so ``pytest -m acceptance`` gives a one-line
summary per criterion.
"""

import numpy as np
import pytest

from fracred._validation import log_grid
from fracred.chain import ChainModel, frequency_response
from fracred.fractional import steady_state, to_polar
from fracred.oracle import stable_steps, steady_response
from fracred.reduction import _fndof_response, alpha_isdof, reduce_to_fndof, sweep_fsdof
from fracred.sysid import BodeDataset, fit_integer_peak, identify_fndof, identify_fsdof, \
    integer_sdof_tf

pytestmark = pytest.mark.acceptance

BENCH = ChainModel((1, 2, 1, 2), (1, 2, 1, 2), (1, 2, 1, 2))
ACTIVE = [1, 3]


@pytest.fixture
def report(capsys):
    def _report(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {title} ({detail})")
        assert ok, f"criterion {number}: {detail}"
    return _report


def _components_within(value, expected, tol):
    return abs(value.real - expected.real) < tol and abs(value.imag - expected.imag) < tol


def _rel(G, H):
    return float(np.max(np.abs(G - H) / np.abs(H)))


@pytest.fixture(scope="module")
def fndof_schedule():
    return reduce_to_fndof(BENCH, 1, ACTIVE, grid=log_grid(0.01, 100, 100))


def test_criterion_1_isdof_order(report):
    a = alpha_isdof(2, 1, 10, 10)
    report(1, "I-SDOF order at omega=10", _components_within(a, 1.9903 - 0.0151j, 5e-5),
           f"alpha={a:.6f}, expected 1.9903-0.0151j")


def test_criterion_2_fsdof_at_one(report):
    a = sweep_fsdof(BENCH, 1, 1, [1.0]).alphas[0]
    report(2, "4-DOF to F-SDOF at omega=1", _components_within(a, 1.3807 + 0.7731j, 5e-5),
           f"alpha={a:.6f}, expected 1.3807+0.7731j")


def test_criterion_3_f2dof_at_one(report):
    res = reduce_to_fndof(BENCH, 1, ACTIVE, grid=log_grid(1.0, 100, 60))
    a, b = res.alphas[0], res.betas[0, 0]
    ok = bool(res.converged[0]) and _components_within(a, 1.5834 + 0.4983j, 5e-5) \
        and _components_within(b, 1.5896 + 1.0440j, 5e-5)
    report(3, "4-DOF to F-2DOF at omega=1", ok,
           f"alpha={a:.6f}, beta={b:.6f}, expected 1.5834+0.4983j and 1.5896+1.0440j")


def test_criterion_4_exact_match(report, fndof_schedule):
    grid = log_grid(0.01, 100, 100)
    H = frequency_response(BENCH, 1, grid, ACTIVE)
    devs = []
    for j, d in enumerate(ACTIVE):
        res = sweep_fsdof(BENCH, 1, d, grid)
        devs.append(_rel(res.response()[:, 0], H[:, j]))
    G = fndof_schedule.response()
    devs.append(max(_rel(G[:, j], H[:, j]) for j in range(2)))
    worst = max(devs)
    ok = fndof_schedule.converged.all() and worst < 1e-10
    report(4, "exact match over the 100-point grid", ok,
           f"F-SDOF dof1 {devs[0]:.1e}, dof3 {devs[1]:.1e}, F-2DOF {devs[2]:.1e}")


def test_criterion_5_undamped_degeneracy(report):
    grid = log_grid(0.01, 100, 100)
    closed = max(abs(alpha_isdof(m, 0.0, k, w) - 2) for w in grid for m, k in [(1, 1), (2, 10)])
    # resonance of the m=k=1 oscillator is not on this grid
    sweep = sweep_fsdof(ChainModel((1.0,), (1.0,), (0.0,)), 1, 1, grid, tol=1e-12)
    dev = float(np.nanmax(np.abs(sweep.alphas - 2)))
    ok = closed < 1e-12 and dev < 1e-12 and sweep.converged.all()
    report(5, "zero damping gives alpha=2", ok, f"closed form {closed:.1e}, sweep {dev:.1e}")


def test_criterion_6_asymptote(report):
    dev = abs(alpha_isdof(2, 1, 10, 1000) - 2)
    report(6, "I-SDOF order tends to 2", dev < 1e-3, f"|alpha-2|={dev:.2e} at omega=1000")


def test_criterion_7_oracle(report, fndof_schedule):
    w, f0 = 1.0, 1.0
    amps, phases, _, tail = steady_response(BENCH, 1, f0, w,
                                            steps_per_period=stable_steps(BENCH, 1, w))
    H = frequency_response(BENCH, 1, [w], ACTIVE)[0]
    nd = reduce_to_fndof(BENCH, 1, ACTIVE, grid=log_grid(1.0, 100, 60))
    G2 = nd.response()[0]
    devs = {}
    for j, d in enumerate(ACTIVE):
        x = tail.displacements[:, d - 1]
        devs[f"amp{d}"] = abs(amps[d - 1] - abs(H[j])) / abs(H[j])
        devs[f"phase{d}"] = abs(np.angle(np.exp(1j * (phases[d - 1] - np.angle(H[j])))))
        g1 = sweep_fsdof(BENCH, 1, d, [w]).response()[0, 0]
        for name, g in ((f"F-SDOF{d}", g1), (f"F-2DOF{d}", G2[j])):
            wave = steady_state(tail.times, w, f0, to_polar(g))
            devs[name] = float(np.max(np.abs(wave - x)) / (f0 * abs(g)))
    worst = max(devs.values())
    report(7, "time-domain oracle at omega=1", nd.converged[0] and worst < 1e-3,
           f"worst {max(devs, key=devs.get)} {worst:.1e}")


def test_criterion_8_sysid_sdof(report):
    # 101 points so that omega=1 lies on the grid
    grid = log_grid(0.01, 100, 101)
    H = frequency_response(BENCH, 1, grid, [1])[:, 0]
    ident = identify_fsdof(BodeDataset.from_complex(grid, H), 6.0, 1 / 3)
    G = ident.response()[:, 0]
    mag = float(np.max(np.abs(np.abs(G) - np.abs(H)) / np.abs(H)))
    ph = float(np.max(np.abs(np.angle(G / H))))
    i = int(np.flatnonzero(grid == 1.0)[0])
    ref = sweep_fsdof(BENCH, 1, 1, [1.0]).alphas[0]
    gap = abs(ident.alphas[i] - ref)
    ok = ident.converged.all() and mag < 1e-8 and ph < 1e-8 and gap < 1e-6
    report(8, "F-SDOF identification round trip", ok,
           f"magnitude {mag:.1e}, phase {ph:.1e}, alpha(1) vs reduction {gap:.1e}")


def test_criterion_9_sysid_ndof(report, fndof_schedule):
    grid = fndof_schedule.omegas
    alphas, betas = fndof_schedule.alphas, fndof_schedule.betas
    G = np.array([_fndof_response(w, (3.0, 3.0), 1 / 3, b, a, 0)
                  for w, a, b in zip(grid, alphas, betas)])
    data = [BodeDataset.from_complex(grid, G[:, j]) for j in range(2)]
    ident = identify_fndof(data, (3.0, 3.0), 1 / 3)
    ok_pts = ident.converged
    err = np.maximum(
        np.maximum(np.abs(ident.alphas.real - alphas.real), np.abs(ident.alphas.imag - alphas.imag)),
        np.max(np.maximum(np.abs(ident.betas.real - betas.real),
                          np.abs(ident.betas.imag - betas.imag)), axis=1))
    worst = float(np.max(err[ok_pts])) if ok_pts.any() else np.inf
    n_ok = int(ok_pts.sum())
    report(9, "F-2DOF identification round trip", n_ok >= 99 and worst < 1e-8,
           f"{n_ok}/100 converged, worst component error {worst:.1e}")


def test_criterion_10_integer_baseline(report):
    chain = ChainModel((2, 4, 2, 4), (1.25, 2.5, 1.25, 2.5), (1, 2, 1, 2))
    grid = log_grid(0.01, 100, 100)
    H = frequency_response(chain, 1, grid, [1])[:, 0]
    data = BodeDataset.from_complex(grid, H)
    frac = identify_fsdof(data, 12.0)
    Gf = frac.response()[:, 0]
    e_frac = float(np.max(np.abs(np.abs(Gf) - np.abs(H)) / np.abs(H)))
    # fit the single resonance near the first mode of the chain
    m, c, k = fit_integer_peak(data, 0.3)
    Gi = integer_sdof_tf(grid, m, c, k)
    e_int = float(np.max(np.abs(np.abs(Gi) - np.abs(H)) / np.abs(H)))
    report(10, "fractional fit beats the second-order baseline",
           frac.converged.all() and e_frac <= 1e-6 and e_int > 1e-2,
           f"fractional {e_frac:.1e}, integer baseline {e_int:.2f}")
