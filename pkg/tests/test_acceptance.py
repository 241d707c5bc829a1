"""Acceptance suite: one test per criterion, one printed line per criterion.

Run with ``python3 -m pytest tests/test_acceptance.py -v -s`` to see the
per-criterion pass/fail lines. The instance populations are seeded, so
the suite is deterministic.
"""

import time

import numpy as np
import pytest

from qmaxamp.dynamics import StateKind, TimeSpan, evolve, make_state
from qmaxamp.exceptions import VanishingDenominatorError
from qmaxamp.generators import gen_hamiltonian, gen_q_hermitian_observable
from qmaxamp.harness import ScenarioConfig, run_scenario, report_to_json
from qmaxamp.linalg import commutator, eigendecompose, mat_exp
from qmaxamp.maximize import (
    MaxFamilyParams,
    analytic_max_pair,
    gradient_ascent_max,
    imag_max_subset,
    rat_maximize_b,
    svd_oracle_max,
)
from qmaxamp.qmetric import build_q, identity_metric, q_adjoint, q_inner, split_h
from qmaxamp.weakvalue import (
    ehrenfest_check,
    normalized_matrix_element,
    rat_collapse_check,
    tilde_equivalence,
    verify_reality,
)

N_INSTANCES = 100
HBAR = 1.0


def _verdict(label, ok):
    print(f"[{'PASS' if ok else 'FAIL'}] {label}")
    assert ok, label


def _span(seed):
    frac = ((seed * 37) % N_INSTANCES) / (N_INSTANCES - 1)
    return TimeSpan(0.0, 0.5 + 4.5 * frac)


@pytest.fixture(scope="module")
def nonnormal_instances():
    """100 seeded non-normal diagonalizable instances, fully prepared."""
    instances = []
    for seed in range(N_INSTANCES):
        n = 2 + seed % 7
        imag_max = 0.1 + 1.9 * seed / (N_INSTANCES - 1)
        degeneracy = 1 + seed % min(3, n)
        h = gen_hamiltonian("nonnormal", n, seed, imag_max=imag_max,
                            degeneracy=degeneracy)
        decomp = eigendecompose(h)
        metric = build_q(decomp)
        span = _span(seed)
        subset = imag_max_subset(decomp)
        params = MaxFamilyParams.random(len(subset.indices),
                                        np.random.default_rng(seed + 500))
        analytic = analytic_max_pair(decomp, metric, span, params, hbar=HBAR)
        oracle = svd_oracle_max(h, metric, span, hbar=HBAR)
        instances.append({
            "seed": seed, "n": n, "h": h, "decomp": decomp, "metric": metric,
            "span": span, "subset": subset, "analytic": analytic,
            "oracle": oracle,
            "predicted": np.exp(subset.imag_max * span.duration / HBAR),
        })
    return instances


@pytest.fixture(scope="module")
def hermitian_instances():
    """100 Hermitian instances with a fixed random normalized past state."""
    instances = []
    for seed in range(N_INSTANCES):
        n = 2 + seed % 7
        h = gen_hamiltonian("hermitian", n, seed)
        metric = identity_metric(n)
        span = _span(seed)
        rng = np.random.default_rng(seed + 300)
        a_ket = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        a_state = make_state(a_ket, span.t_start, StateKind.A_TYPE, metric)
        result = rat_maximize_b(a_state, h, span, theta_c=0.7, hbar=HBAR)
        instances.append({"seed": seed, "n": n, "h": h, "metric": metric,
                          "span": span, "a_state": a_state, "result": result})
    return instances


@pytest.fixture(scope="module")
def degenerate_instances():
    """Instances with a 2- or 3-fold degenerate maximal band."""
    instances = []
    for degeneracy in (2, 3):
        for j in range(5):
            seed = 700 + 10 * degeneracy + j
            n = 4 + j % 3
            h = gen_hamiltonian("nonnormal", n, seed, degeneracy=degeneracy)
            decomp = eigendecompose(h)
            metric = build_q(decomp)
            span = TimeSpan(0.0, 1.0 + 0.3 * j)
            instances.append({"seed": seed, "h": h, "decomp": decomp,
                              "metric": metric, "span": span,
                              "degeneracy": degeneracy})
    return instances


def test_criterion_1_amplitude_attainment(nonnormal_instances):
    """Analytic pair and SVD oracle both achieve exp(B*T/hbar), fast."""
    worst = 0.0
    start = time.perf_counter()
    for inst in nonnormal_instances:
        decomp = eigendecompose(inst["h"])
        metric = build_q(decomp)
        subset = imag_max_subset(decomp)
        params = MaxFamilyParams.random(len(subset.indices),
                                        np.random.default_rng(inst["seed"] + 500))
        analytic = analytic_max_pair(decomp, metric, inst["span"], params, hbar=HBAR)
        oracle = svd_oracle_max(inst["h"], metric, inst["span"], hbar=HBAR)
        predicted = np.exp(subset.imag_max * inst["span"].duration / HBAR)
        worst = max(worst,
                    abs(analytic.achieved_amplitude - predicted) / predicted,
                    abs(oracle.achieved_amplitude - predicted) / predicted)
        assert decomp.cond_p <= 1e4
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 10.0
    _verdict(f"criterion 1 amplitude attainment: worst rel err {worst:.3e}, "
             f"{elapsed:.2f}s over {N_INSTANCES} instances", ok)


def test_criterion_2_no_better_pair(nonnormal_instances):
    """Random metric-normalized pairs never beat the bound; gradient
    ascent reaches the oracle value on small instances."""
    start = time.perf_counter()
    worst_excess = -np.inf
    for inst in nonnormal_instances:
        metric, span, n = inst["metric"], inst["span"], inst["n"]
        m = mat_exp(-1j * inst["h"] * span.duration / HBAR)
        nmat = metric.q_sqrt @ m @ metric.q_sqrt_inv
        rng = np.random.default_rng(inst["seed"] + 1000)
        # unit vectors in the whitened coordinates are exactly the
        # metric-normalized states, so sampling there is equivalent
        x = rng.standard_normal((n, 1000)) + 1j * rng.standard_normal((n, 1000))
        y = rng.standard_normal((n, 1000)) + 1j * rng.standard_normal((n, 1000))
        x /= np.linalg.norm(x, axis=0)
        y /= np.linalg.norm(y, axis=0)
        amps = np.abs(np.einsum("in,ij,jn->n", y.conj(), nmat, x))
        worst_excess = max(worst_excess,
                           float(amps.max() / inst["predicted"] - 1.0))
    bound_ok = worst_excess <= 1e-8

    worst_gap = 0.0
    small = [inst for inst in nonnormal_instances if inst["n"] <= 4]
    for inst in small:
        res = gradient_ascent_max(inst["h"], inst["metric"], inst["span"],
                                  restarts=32, seed=inst["seed"], hbar=HBAR)
        worst_gap = max(worst_gap,
                        abs(res.achieved_amplitude - inst["oracle"].achieved_amplitude)
                        / inst["oracle"].achieved_amplitude)
    elapsed = time.perf_counter() - start
    ok = bound_ok and worst_gap <= 1e-6 and elapsed < 60.0
    _verdict(f"criterion 2 no-better-pair: max bound excess {worst_excess:.3e}, "
             f"gradient gap {worst_gap:.3e} on {len(small)} instances, "
             f"{elapsed:.2f}s", ok)


def test_criterion_3_weak_value_reality(nonnormal_instances, hermitian_instances):
    """Im of the weak value vanishes for maximizing pairs, and only for
    them: random future states give order-one imaginary parts."""
    worst = 0.0
    for inst in nonnormal_instances:
        times = inst["span"].sample(11)
        for j in range(3):
            o = gen_q_hermitian_observable(inst["metric"], inst["n"],
                                           inst["seed"] * 10 + j)
            reports = verify_reality(o, inst["analytic"], inst["metric"],
                                     inst["h"], times, hbar=HBAR)
            worst = max(worst, max(r.imag_residual for r in reports))
    for inst in hermitian_instances:
        times = inst["span"].sample(11)
        for j in range(3):
            o = gen_q_hermitian_observable(inst["metric"], inst["n"],
                                           inst["seed"] * 10 + j)
            reports = verify_reality(o, inst["result"], inst["metric"],
                                     inst["h"], times, hbar=HBAR)
            worst = max(worst, max(r.imag_residual for r in reports))

    control = []
    for inst in nonnormal_instances[:10]:
        o = gen_q_hermitian_observable(inst["metric"], inst["n"], inst["seed"] * 10)
        rng = np.random.default_rng(inst["seed"] + 2000)
        t_mid = 0.5 * (inst["span"].t_start + inst["span"].t_end)
        for _ in range(100):
            ket = rng.standard_normal(inst["n"]) + 1j * rng.standard_normal(inst["n"])
            b = make_state(ket, inst["span"].t_end, StateKind.B_TYPE, inst["metric"])
            try:
                value = normalized_matrix_element(o, b, inst["analytic"].a_state,
                                                  inst["metric"], inst["h"], t_mid)
            except VanishingDenominatorError:
                continue
            control.append(abs(value.imag))
    median_control = float(np.median(control))
    ok = worst <= 1e-8 and median_control > 1e-3
    _verdict(f"criterion 3 weak-value reality: worst residual {worst:.3e}, "
             f"control median {median_control:.3e}", ok)


def test_criterion_4_tilde_and_time_development(nonnormal_instances,
                                                degenerate_instances):
    """Weak value equals the reduced-state expectation, whose time
    development obeys the commutator law at second order in dt."""
    worst = 0.0
    for inst in nonnormal_instances:
        split = split_h(inst["h"], inst["metric"])
        o = gen_q_hermitian_observable(inst["metric"], inst["n"], inst["seed"] * 10)
        worst = max(worst, tilde_equivalence(o, inst["analytic"], split,
                                             inst["metric"],
                                             inst["span"].sample(11), hbar=HBAR))
    tilde_ok = worst <= 1e-8

    dts = np.array([1e-2, 5e-3, 2.5e-3, 1.25e-3])
    slopes = []
    for inst in degenerate_instances:
        subset = imag_max_subset(inst["decomp"])
        params = MaxFamilyParams.random(len(subset.indices),
                                        np.random.default_rng(inst["seed"]))
        res = analytic_max_pair(inst["decomp"], inst["metric"], inst["span"],
                                params, hbar=HBAR)
        split = split_h(inst["h"], inst["metric"])
        o = gen_q_hermitian_observable(inst["metric"], inst["h"].shape[0],
                                       inst["seed"] + 1)
        t_mid = 0.5 * (inst["span"].t_start + inst["span"].t_end)
        errs = np.array([ehrenfest_check(o, res, split, inst["metric"],
                                         t_mid, dt, hbar=HBAR)[2] for dt in dts])
        if errs.max() < 1e-10:
            continue  # derivative matches to roundoff, nothing to fit
        slopes.append(float(np.polyfit(np.log(dts), np.log(errs), 1)[0]))
    slope_ok = len(slopes) >= 5 and all(abs(s - 2.0) <= 0.2 for s in slopes)
    ok = tilde_ok and slope_ok
    _verdict(f"criterion 4 tilde equivalence {worst:.3e} and Ehrenfest slopes "
             f"{min(slopes):.2f}..{max(slopes):.2f} over {len(slopes)} fits", ok)


def test_criterion_5_hermitian_collapse(hermitian_instances):
    """Fixed-past maximization: unit amplitude, collinear future state,
    weak value equal to the ordinary expectation, phase-choice invariant."""
    worst_amp = 0.0
    worst_col = 0.0
    worst_collapse = 0.0
    worst_theta = 0.0
    for inst in hermitian_instances:
        h, metric, span = inst["h"], inst["metric"], inst["span"]
        a_state, result = inst["a_state"], inst["result"]
        worst_amp = max(worst_amp, abs(result.achieved_amplitude - 1.0))
        evolved = mat_exp(-1j * h * span.duration / HBAR) @ a_state.ket
        worst_col = max(worst_col,
                        1.0 - abs(np.vdot(result.b_state.ket, evolved)))
        t_mid = 0.5 * (span.t_start + span.t_end)
        for j in range(3):
            o = gen_q_hermitian_observable(metric, inst["n"], inst["seed"] * 10 + j)
            worst_collapse = max(worst_collapse,
                                 rat_collapse_check(o, a_state, result, h, t_mid))
        o = gen_q_hermitian_observable(metric, inst["n"], inst["seed"] * 10)
        values = []
        for theta_c in (0.0, 1.3, -2.1):
            r = rat_maximize_b(a_state, h, span, theta_c=theta_c, hbar=HBAR)
            values.append(normalized_matrix_element(o, r.b_state, a_state,
                                                    metric, h, t_mid))
        worst_theta = max(worst_theta,
                          max(abs(v - values[0]) for v in values[1:]))
    ok = (worst_amp <= 1e-10 and worst_col <= 1e-10
          and worst_collapse <= 1e-10 and worst_theta <= 1e-12)
    _verdict(f"criterion 5 hermitian collapse: amp {worst_amp:.3e}, "
             f"collinearity {worst_col:.3e}, collapse {worst_collapse:.3e}, "
             f"phase invariance {worst_theta:.3e}", ok)


def test_criterion_6_structural_invariants(nonnormal_instances,
                                           hermitian_instances,
                                           degenerate_instances):
    """Metric orthonormality of eigenvectors, metric normality of H, and
    the split-part spectra, on every generated instance."""
    worst_gram = 0.0
    worst_normality = 0.0
    worst_split = 0.0
    everything = list(nonnormal_instances) + list(degenerate_instances) + [
        dict(inst, decomp=eigendecompose(inst["h"])) for inst in hermitian_instances
    ]
    for inst in everything:
        h, decomp = inst["h"], inst["decomp"]
        metric = build_q(decomp)
        gram = decomp.p.conj().T @ metric.q @ decomp.p
        worst_gram = max(worst_gram,
                         float(np.abs(gram - np.eye(decomp.dim)).max()))
        h_norm = np.linalg.norm(h)
        worst_normality = max(
            worst_normality,
            np.linalg.norm(commutator(h, q_adjoint(h, metric))) / h_norm**2)
        split = split_h(h, metric)
        scale = max(1.0, float(np.abs(decomp.eigenvalues).max()))
        re = np.sort(np.linalg.eigvals(split.hqh).real)
        im = np.sort(np.linalg.eigvals(split.hqa / 1j).real)
        worst_split = max(
            worst_split,
            float(np.abs(re - np.sort(decomp.eigenvalues.real)).max()) / scale,
            float(np.abs(im - np.sort(decomp.eigenvalues.imag)).max()) / scale)
    ok = worst_gram <= 1e-9 and worst_normality <= 1e-8 and worst_split <= 1e-8
    _verdict(f"criterion 6 structural invariants on {len(everything)} instances: "
             f"gram {worst_gram:.3e}, normality {worst_normality:.3e}, "
             f"split spectra {worst_split:.3e}", ok)


def test_criterion_7_degenerate_band_family(degenerate_instances):
    """Every member of the analytic family over a degenerate maximal band
    attains the bound, for 50 random weight/phase draws per instance."""
    worst = 0.0
    for inst in degenerate_instances:
        subset = imag_max_subset(inst["decomp"])
        assert len(subset.indices) == inst["degeneracy"]
        predicted = np.exp(subset.imag_max * inst["span"].duration / HBAR)
        rng = np.random.default_rng(inst["seed"] + 4000)
        for _ in range(50):
            params = MaxFamilyParams.random(len(subset.indices), rng)
            res = analytic_max_pair(inst["decomp"], inst["metric"],
                                    inst["span"], params, hbar=HBAR)
            worst = max(worst, abs(res.achieved_amplitude - predicted) / predicted)
    ok = worst <= 1e-8
    _verdict(f"criterion 7 degenerate-band family: worst rel err {worst:.3e} "
             f"over {50 * len(degenerate_instances)} draws", ok)


def test_criterion_8_determinism():
    """Identical configs and seeds give byte-identical JSON reports."""
    ok = True
    for mode, ham in (("theorem1", {"kind": "nonnormal", "n": 4, "degeneracy": 2}),
                      ("theorem2", {"kind": "hermitian", "n": 3})):
        cfg = ScenarioConfig(mode=mode, hamiltonian=ham,
                             observables=({"kind": "q-hermitian"},),
                             t_end=2.0, seed=42)
        first = report_to_json(run_scenario(cfg))
        second = report_to_json(run_scenario(cfg))
        ok = ok and first.encode() == second.encode()
    _verdict("criterion 8 determinism: repeated runs byte-identical", ok)
