"""Acceptance suite: one test per release criterion.

Each test prints a single ``[criterion-N] PASS/FAIL`` line summarising the
measured figure of merit against its budget (run pytest with ``-s`` to see
the lines on passing runs).  The criteria pin down, end to end:

1. critical-coupling ordering and the small-loss splitting law;
2. closed-form Bogoliubov frames against the numeric diagonalizer;
3. soft-mode closure rate at both stability boundaries;
4. relaxation of arbitrary Gaussian states onto the closed-form attractor;
5. jet-derived counting cumulants against finite differences of the rate;
6. the rate formula against an exact single-mode counting Liouvillian;
7. finite-size emission rates approaching the thermodynamic limit;
8. CSV scans reproducing the published phase-diagram features bit-stably.
"""

import math
import time

import numpy as np

from dicke_fcs.bogoliubov import numeric_diagonalize
from dicke_fcs.cli import main as cli_main
from dicke_fcs.model import ModelParams, critical_couplings
from dicke_fcs.oracle import (build_dicke_liouvillian, build_rwa_liouvillian,
                              dominant_eigenvalue, finite_difference_weights,
                              steady_state_vector)
from dicke_fcs.prep_dynamics import (GaussianIC, evolve, log_gaussian_mass,
                                     ode_coefficients, steady_state)
from dicke_fcs.statistics import (cgf_rate, cumulants, mode_cgf_rate,
                                  occupations, relaxation_times, system_frame)

SEED = 20260814
DESK = ModelParams(omega0=2.0, omega=1.0, lam=0.3, gamma_loss=1.0)


def _finish(number: int, label: str, failures: list, elapsed: float,
            budget: float | None = None):
    if budget is not None and elapsed >= budget:
        failures.append(f"runtime {elapsed:.2f}s exceeds budget {budget:g}s")
    status = "FAIL" if failures else "PASS"
    line = f"[criterion-{number}] {status} {label} ({elapsed:.2f}s)"
    if failures:
        line += " :: " + "; ".join(failures)
    print(line)
    assert not failures, line


# ---------------------------------------------------------------------------
# 1. critical couplings
# ---------------------------------------------------------------------------

def test_critical_coupling_suite():
    start = time.perf_counter()
    failures = []
    rng = np.random.default_rng(SEED)
    n_small = 0
    worst_rel = 0.0
    for i in range(100):
        omega0, omega = rng.uniform(0.1, 5.0, size=2)
        gamma = rng.uniform(0.0, 2.0)
        if i % 10 == 0:
            gamma = 0.0          # exercise the closed-system coincidence
        elif i % 4 == 0:
            gamma = rng.uniform(0.0, 0.1)   # feed the splitting-law check
        crit = critical_couplings(ModelParams(
            omega0=omega0, omega=omega, lam=0.0, gamma_loss=gamma))
        if gamma == 0.0:
            if not crit.lambda1 == crit.lambda2 == crit.lambda3:
                failures.append(f"gamma=0 couplings split at draw {i}")
        elif not crit.lambda1 < crit.lambda2 < crit.lambda3:
            failures.append(f"ordering violated at draw {i} gamma={gamma:g}")
        if 0.0 < gamma <= 0.1:
            n_small += 1
            got = crit.lambda3 ** 2 - crit.lambda1 ** 2
            want = 3.0 * gamma * gamma * omega0 / (32.0 * omega)
            worst_rel = max(worst_rel, abs(got - want) / want)
    if n_small < 20:
        failures.append(f"only {n_small} small-loss draws")
    if worst_rel >= 0.05:
        failures.append(f"splitting law off by {worst_rel:.3e} (tol 0.05)")
    _finish(1, f"critical couplings: 100 draws, splitting-law worst rel "
               f"{worst_rel:.2e} (tol 5e-2)",
            failures, time.perf_counter() - start, budget=1.0)


# ---------------------------------------------------------------------------
# 2. closed-form frames vs numeric diagonalizer
# ---------------------------------------------------------------------------

def test_diagonalizer_equivalence():
    start = time.perf_counter()
    failures = []
    rng = np.random.default_rng(SEED)
    fields = ("eps_minus", "eps_plus", "gamma_angle",
              "A", "B", "G", "D", "A2", "B2", "G2", "D2")
    worst = 0.0
    for i in range(200):
        omega0, omega, gamma = 10.0 ** rng.uniform(-0.7, 0.7, size=3)
        probe = ModelParams(omega0=omega0, omega=omega, lam=0.0,
                            gamma_loss=gamma)
        crit = critical_couplings(probe)
        if i % 2 == 0:
            lam = crit.lambda1 * rng.uniform(0.05, 0.95)
        else:
            lam = crit.lambda3 * rng.uniform(1.05, 3.0)
        sf = system_frame(probe.with_lam(float(lam)))
        numeric = numeric_diagonalize(sf.quadratic)
        for field in fields:
            worst = max(worst, abs(getattr(sf.frame, field)
                                   - getattr(numeric, field)))
    if worst >= 1e-10:
        failures.append(f"worst residual {worst:.3e} (tol 1e-10)")
    _finish(2, f"closed vs numeric frames: 200 points, worst residual "
               f"{worst:.2e} (tol 1e-10)",
            failures, time.perf_counter() - start, budget=5.0)


# ---------------------------------------------------------------------------
# 3. soft-mode closure at both boundaries
# ---------------------------------------------------------------------------

def test_soft_mode_closure():
    start = time.perf_counter()
    failures = []
    crit = critical_couplings(DESK)

    def eps_minus(lam: float) -> float:
        return system_frame(DESK.with_lam(lam), eps_tol=0.0).frame.eps_minus

    gaps = {}
    exponents = {}
    for side, lam_c, sign in (("normal", crit.lambda1, -1.0),
                              ("superradiant", crit.lambda3, +1.0)):
        gaps[side] = eps_minus(lam_c + sign * 1e-9)
        if gaps[side] >= 1e-4:
            failures.append(f"{side} gap {gaps[side]:.3e} at offset 1e-9 "
                            "(tol 1e-4)")
        deltas = np.geomspace(1e-10, 1e-6, 9)
        eps = [eps_minus(lam_c + sign * d) for d in deltas]
        exponents[side] = float(np.polyfit(np.log(deltas), np.log(eps), 1)[0])
        if abs(exponents[side] - 0.5) > 0.05:
            failures.append(f"{side} closing exponent {exponents[side]:.4f} "
                            "outside 0.5 +- 0.05")
    _finish(3, "soft-mode closure: gaps "
               f"{gaps['normal']:.2e}/{gaps['superradiant']:.2e} at 1e-9 "
               f"(tol 1e-4), exponents {exponents['normal']:.3f}/"
               f"{exponents['superradiant']:.3f} (0.5 +- 0.05)",
            failures, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# 4. Gaussian relaxation onto the closed-form attractor
# ---------------------------------------------------------------------------

def test_steady_state_consistency():
    start = time.perf_counter()
    failures = []
    sf = system_frame(DESK)
    taus = relaxation_times(sf.frame, DESK.gamma_loss)
    t_end = 20.0 * max(taus.tau1, taus.tau2)
    coeffs = ode_coefficients(sf.frame, DESK.gamma_loss, order=6)
    target = steady_state(coeffs)
    ics = [GaussianIC(0.05), GaussianIC(0.09, gamma1_0=1.0 + 0.5j),
           GaussianIC(0.135), GaussianIC(0.17, gamma1_0=-2.0j),
           GaussianIC(0.21, gamma1_0=0.3)]
    grid = np.linspace(0.0, t_end, 41)
    worst_disp = worst_width = worst_trace = 0.0
    for ic in ics:
        trajectory = evolve(ic, coeffs, t_end, sf.frame, t_eval=grid)
        for state in trajectory:
            worst_trace = max(worst_trace,
                              abs(log_gaussian_mass(state).coefficients[0]))
        final = trajectory[-1]
        # displacements die out entirely (every counting order)
        for name in ("b1", "b2", "c1", "c2"):
            worst_disp = max(worst_disp,
                             np.abs(getattr(final, name).coefficients).max())
        # physical widths land on the closed-form values
        for name in ("d1", "d2"):
            got = getattr(final, name).coefficients[0]
            want = getattr(target, name).coefficients[0]
            err = abs(got - want) / max(1.0, abs(want))
            worst_width = max(worst_width, err)
    for value, what in ((worst_disp, "displacement"),
                        (worst_width, "width"),
                        (worst_trace, "trace drift")):
        if value >= 1e-8:
            failures.append(f"{what} residual {value:.3e} (tol 1e-8)")
    _finish(4, "steady-state consistency: 5 Gaussian starts by t=20*max(tau), "
               f"residuals disp {worst_disp:.1e} width {worst_width:.1e} "
               f"trace {worst_trace:.1e} (tol 1e-8)",
            failures, time.perf_counter() - start, budget=10.0)


# ---------------------------------------------------------------------------
# 5. jet cumulants vs finite differences of the rate
# ---------------------------------------------------------------------------

def _singularity_radius(frame) -> float:
    """Distance from s = 0 to the nearest branch point of the rate.

    Each mode root vanishes where e^{2s} = (cool+heat)^2/(4 cool heat); the
    step of any finite-difference stencil must stay well inside this radius
    or the truncation error explodes.
    """
    radius = math.inf
    for cool, heat in ((frame.A ** 2, frame.B ** 2),
                       (frame.G ** 2, frame.D ** 2)):
        if heat > 0.0:
            radius = min(radius, 0.5 * math.log(
                (cool + heat) ** 2 / (4.0 * cool * heat)))
    return radius


def _fd_cumulant(params: ModelParams, k: int, h: float) -> float:
    """k-th cumulant rate from 4th-order central differences of the scalar
    rate along real counting angle, Richardson-extrapolated (h and h/2) and
    rotated by (-i)^k to convert d/d(chi) into d/d(i chi)."""
    def stencil(step: float) -> complex:
        half = (k + 1) // 2 + 1
        offsets = np.arange(-half, half + 1)
        weights = finite_difference_weights(k, offsets)
        total = sum(weights[i] * cgf_rate(params, float(offsets[i] * step))
                    for i in range(offsets.size))
        return total / step ** k

    rich = (16.0 * stencil(h / 2) - stencil(h)) / 15.0
    return ((-1j) ** k * rich).real


def test_cumulant_engine_vs_finite_differences():
    start = time.perf_counter()
    failures = []
    base = DESK.with_lam(0.0)
    crit = critical_couplings(base)
    lams = np.concatenate([np.linspace(0.05, 0.95, 10) * crit.lambda1,
                           np.linspace(1.05, 1.5, 10) * crit.lambda3])
    worst_fd = worst_first = 0.0
    for lam in lams:
        params = base.with_lam(float(lam))
        h = min(0.05, _singularity_radius(system_frame(params).frame) / 30.0)
        jet_set = cumulants(params)
        for k in range(1, 6):
            want = jet_set.total(k)
            rel = abs(_fd_cumulant(params, k, h) - want) / abs(want)
            worst_fd = max(worst_fd, rel)
        occ = occupations(params)
        emission = params.gamma_loss * (occ.photon_fluct + occ.photon_macro)
        worst_first = max(worst_first, abs(jet_set.total(1) - emission)
                          / abs(emission))
    if worst_fd >= 1e-6:
        failures.append(f"cumulant orders 1-5 off by {worst_fd:.3e} "
                        "(tol 1e-6)")
    if worst_first >= 1e-10:
        failures.append(f"first cumulant vs emission rate off by "
                        f"{worst_first:.3e} (tol 1e-10)")
    _finish(5, "cumulant engine: 20 points across both phases, worst FD rel "
               f"{worst_fd:.2e} (tol 1e-6), first-cumulant identity "
               f"{worst_first:.2e} (tol 1e-10)",
            failures, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# 6. rate formula vs exact single-mode counting Liouvillian
# ---------------------------------------------------------------------------

def test_single_mode_counting_oracle():
    start = time.perf_counter()
    failures = []
    sf = system_frame(DESK)
    worst = 0.0
    for chi in (0.05, 0.1, 0.2, 0.4):
        for mode in (1, 2):
            lv = build_rwa_liouvillian(sf.frame, mode, DESK.gamma_loss,
                                       chi, cutoff=60)
            eig = dominant_eigenvalue(lv)
            closed = mode_cgf_rate(sf.frame, DESK.gamma_loss, mode, chi)
            worst = max(worst, abs(eig - closed))
    if worst >= 1e-6:
        failures.append(f"worst eigenvalue residual {worst:.3e} (tol 1e-6)")
    _finish(6, "single-mode counting oracle: cutoff 60, chi in "
               f"{{0.05,0.1,0.2,0.4}}, both modes, worst residual "
               f"{worst:.2e} (tol 1e-6)",
            failures, time.perf_counter() - start, budget=60.0)


# ---------------------------------------------------------------------------
# 7. finite-size emission rates approach the limit
# ---------------------------------------------------------------------------

def _emission_rate(params: ModelParams, photon_cutoff: int) -> float:
    lv = build_dicke_liouvillian(params, photon_cutoff, 0.0)
    rho_vec = steady_state_vector(lv)
    n_photon = photon_cutoff + 1
    number = np.tile(np.arange(n_photon, dtype=float), lv.side // n_photon)
    populations = rho_vec[:: lv.side + 1].real
    return params.gamma_loss * float(populations @ number)


def test_finite_size_convergence():
    start = time.perf_counter()
    failures = []
    occ = occupations(DESK)
    limit = DESK.gamma_loss * (occ.photon_fluct + occ.photon_macro)
    if abs(limit / DESK.gamma_loss - 0.0274390) >= 1e-6:
        failures.append(f"limit rate {limit:.7g} disagrees with 0.0274390")
    errors = {}
    for j_atoms in (1.0, 4.0):
        params = ModelParams(omega0=DESK.omega0, omega=DESK.omega,
                             lam=DESK.lam, gamma_loss=DESK.gamma_loss,
                             j_atoms=j_atoms)
        rate = _emission_rate(params, photon_cutoff=24)
        errors[j_atoms] = abs(rate - limit)
    if not errors[4.0] < errors[1.0]:
        failures.append(f"no improvement: err(j=4)={errors[4.0]:.3e} vs "
                        f"err(j=1)={errors[1.0]:.3e}")
    rel4 = errors[4.0] / limit
    if rel4 >= 0.25:
        failures.append(f"j=4 rate off by {rel4:.3f} (tol 0.25)")
    _finish(7, "finite-size convergence: photon cutoff 24, "
               f"err(j=1)={errors[1.0]:.2e} > err(j=4)={errors[4.0]:.2e}, "
               f"j=4 rel {rel4:.3f} (tol 0.25)",
            failures, time.perf_counter() - start, budget=300.0)


# ---------------------------------------------------------------------------
# 8. CSV scans reproduce the phase-diagram features, byte-stable
# ---------------------------------------------------------------------------

def _run_cli(args: list, path) -> list:
    code = cli_main(args + ["--out", str(path)])
    assert code == 0, f"cli exited {code} for {args}"
    lines = [line for line in path.read_text().splitlines()
             if line and not line.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, row.split(","))) for row in lines[1:]]


def test_scan_reproduces_phase_diagram(tmp_path):
    start = time.perf_counter()
    failures = []
    # CLI defaults: omega0=0.5, omega=2, gamma=1, j=1e6
    base = ModelParams(omega0=0.5, omega=2.0, lam=0.0, gamma_loss=1.0)
    crit = critical_couplings(base)

    # (a) spectral-gap window flagged exactly between the two boundaries
    args_a = ["scan", "--quantity", "energies", "--lambda-range",
              "0.9:1.1:41", "--lambda-units", "lambda2"]
    rows_a = _run_cli(args_a, tmp_path / "energies.csv")
    flagged = [float(r["lambda_over_lambda2"]) for r in rows_a
               if r["gap"] == "1"]
    lo_ratio = crit.lambda1 / crit.lambda2
    hi_ratio = crit.lambda3 / crit.lambda2
    step = 0.2 / 40
    if not flagged:
        failures.append("no gap rows flagged")
    else:
        inside = lo_ratio <= min(flagged) and max(flagged) <= hi_ratio
        covers = (min(flagged) - step <= lo_ratio
                  and hi_ratio <= max(flagged) + step)
        if not (inside and covers):
            failures.append(
                f"gap flags [{min(flagged):.4f}, {max(flagged):.4f}] do not "
                f"bracket [{lo_ratio:.4f}, {hi_ratio:.4f}]")

    # (b) occupation divergence on both sides of the gap
    lo = crit.lambda1 * (1.0 - 1e-7)
    hi = crit.lambda3 * (1.0 + 1e-7)
    rows_b = _run_cli(["scan", "--quantity", "occupations", "--lambda-range",
                       f"{lo:.17g}:{hi:.17g}:5"], tmp_path / "occupations.csv")
    for row in (rows_b[0], rows_b[-1]):
        if not float(row["photon_fluct"]) > 1e3:
            failures.append(f"no divergence at lambda={row['lambda']}: "
                            f"photon_fluct={row['photon_fluct']}")
    if not all(r["gap"] == "1" for r in rows_b[1:-1]):
        failures.append("interior rows not flagged as the undefined window")

    # (c) macroscopic channel exactly Poissonian: equal across orders
    rows_c = _run_cli(["scan", "--quantity", "cumulants", "--lambda-range",
                       "2:3:5", "--lambda-units", "lambda2"],
                      tmp_path / "cumulants.csv")
    worst_macro = 0.0
    for row in rows_c:
        macro = [float(row[f"macro_{k}"]) for k in range(1, 6)]
        for value in macro[1:]:
            worst_macro = max(worst_macro,
                              abs(value - macro[0]) / abs(macro[0]))
    if worst_macro >= 1e-12:
        failures.append(f"macroscopic cumulants split by {worst_macro:.3e} "
                        "(tol 1e-12)")

    # (d) third Fano factor grows with coupling deep in the bright phase
    rows_d = _run_cli(["scan", "--quantity", "fano", "--lambda-range",
                       "2:3:5", "--lambda-units", "lambda2"],
                      tmp_path / "fano.csv")
    fano3 = [float(row["fano_3"]) for row in rows_d]
    if not all(b > a for a, b in zip(fano3, fano3[1:])):
        failures.append(f"fano_3 not increasing: {fano3}")

    # byte identity on re-run, every emitted file
    for name, args in (("energies.csv", args_a),
                       ("occupations.csv",
                        ["scan", "--quantity", "occupations",
                         "--lambda-range", f"{lo:.17g}:{hi:.17g}:5"]),
                       ("cumulants.csv",
                        ["scan", "--quantity", "cumulants", "--lambda-range",
                         "2:3:5", "--lambda-units", "lambda2"]),
                       ("fano.csv",
                        ["scan", "--quantity", "fano", "--lambda-range",
                         "2:3:5", "--lambda-units", "lambda2"])):
        path = tmp_path / name
        first = path.read_bytes()
        assert cli_main(args + ["--out", str(path)]) == 0
        if path.read_bytes() != first:
            failures.append(f"{name} not byte-identical on re-run")

    _finish(8, "scan reproduction: gap window flagged, occupations "
               f"{float(rows_b[0]['photon_fluct']):.2e}/"
               f"{float(rows_b[-1]['photon_fluct']):.2e} > 1e3, macro split "
               f"{worst_macro:.1e} (tol 1e-12), fano_3 rising, byte-stable",
            failures, time.perf_counter() - start)
