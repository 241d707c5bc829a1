"""Scenario ingestion, verification campaigns, and report emission.

A scenario names a Hamiltonian (explicit matrix or generator recipe), a
set of observables, a time span and a mode; ``run_scenario`` executes the
applicable maximizations and verification checks fail-soft (a failing
check is recorded, never aborts the run) and returns a ``RunReport``.
Reports serialize deterministically: identical configs and seeds give
byte-identical JSON.
"""

import csv
import dataclasses
import io
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import linalg, qmetric, dynamics, maximize, weakvalue, generators
from .exceptions import BadOptionsError, IoFailureError, QmaxampError

__all__ = [
    "Tolerances",
    "ScenarioConfig",
    "CheckResult",
    "RunReport",
    "run_scenario",
    "emit_report",
    "parse_report",
    "report_to_dict",
    "complex_to_pair",
    "matrix_to_pairs",
    "matrix_from_pairs",
]

MODES = ("theorem1", "theorem2", "maximize", "weakvalue", "scan")

TOLERANCE_PROFILE_ENV = "QMAXAMP_TOLERANCE_PROFILE"


@dataclass(frozen=True)
class Tolerances:
    """Named tolerance knobs; see the per-check docstrings for meaning."""

    eig_residual: float = 1e-9
    cond_threshold: float = 1e8
    tol_band: float = 1e-9
    q_orthonormality: float = 1e-9
    q_normality: float = 1e-8
    split_spectra: float = 1e-8
    amplitude_rel: float = 1e-8
    oracle_rel: float = 1e-8
    gradient_rel: float = 1e-6
    upper_bound_rel: float = 1e-8
    reality: float = 1e-8
    tilde_equiv: float = 1e-8
    rat_amplitude: float = 1e-10
    rat_collapse: float = 1e-10
    theta_c_invariance: float = 1e-12

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if getattr(self, f.name) <= 0:
                raise BadOptionsError(f"tolerance {f.name} must be positive")


PROFILES = {
    "default": Tolerances(),
    "strict": Tolerances(q_orthonormality=1e-10, q_normality=1e-9,
                         split_spectra=1e-9, amplitude_rel=1e-9,
                         oracle_rel=1e-9, reality=1e-9, tilde_equiv=1e-9),
}


def tolerances_from_env():
    """Tolerance profile selected by the environment, default otherwise."""
    name = os.environ.get(TOLERANCE_PROFILE_ENV, "default")
    if name not in PROFILES:
        raise BadOptionsError(
            f"{TOLERANCE_PROFILE_ENV}={name!r}; known profiles: {sorted(PROFILES)}"
        )
    return PROFILES[name]


def complex_to_pair(z):
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_pairs(m):
    return [[complex_to_pair(z) for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_pairs(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])


@dataclass(frozen=True)
class ScenarioConfig:
    """One verification scenario; everything needed to reproduce a run."""

    mode: str = "theorem1"
    hamiltonian: dict = field(default_factory=lambda: {"kind": "nonnormal", "n": 4})
    observables: tuple = (({"kind": "q-hermitian"}),)
    t_start: float = 0.0
    t_end: float = 1.0
    hbar: float = 1.0
    seed: int = 0
    times: int = 11
    gradient_restarts: int = 32
    bound_samples: int = 200
    tolerances: Tolerances = field(default_factory=tolerances_from_env)

    def __post_init__(self):
        if self.mode not in MODES:
            raise BadOptionsError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.t_end > self.t_start:
            raise BadOptionsError("need t_end > t_start")
        if self.hbar <= 0:
            raise BadOptionsError("hbar must be positive")
        if self.times < 2:
            raise BadOptionsError("times must be >= 2")

    @property
    def span(self):
        return dynamics.TimeSpan(self.t_start, self.t_end)

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["observables"] = list(self.observables)
        d["tolerances"] = dataclasses.asdict(self.tolerances)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "tolerances" in d and isinstance(d["tolerances"], dict):
            d["tolerances"] = Tolerances(**d["tolerances"])
        if "observables" in d:
            d["observables"] = tuple(d["observables"])
        return cls(**d)

    @classmethod
    def from_json_file(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float | None
    tolerance: float | None
    detail: str = ""


@dataclass
class RunReport:
    config: dict
    classification: str
    maximizations: list
    weak_values: list
    checks: list
    wall_time: float

    @property
    def failed_checks(self):
        return sum(1 for c in self.checks if not c.passed)


def _classify(h, tol=1e-10):
    h_norm = max(np.linalg.norm(h), 1e-300)
    if np.linalg.norm(h - h.conj().T) <= tol * h_norm:
        return "hermitian"
    if np.linalg.norm(linalg.commutator(h, h.conj().T)) <= 1e-8 * h_norm**2:
        return "normalNonHermitian"
    return "nonNormal"


def _resolve_hamiltonian(cfg):
    spec = dict(cfg.hamiltonian)
    if "matrix" in spec:
        return matrix_from_pairs(spec["matrix"])
    kind = spec.pop("kind")
    n = spec.pop("n")
    return generators.gen_hamiltonian(kind, n, cfg.seed, **{
        k: spec[k] for k in ("imag_max", "cond_p_max", "degeneracy") if k in spec
    })


def _resolve_observables(cfg, metric, n):
    obs = []
    for i, spec in enumerate(cfg.observables):
        spec = dict(spec)
        if "matrix" in spec:
            obs.append(matrix_from_pairs(spec["matrix"]))
        elif spec.get("kind") == "q-hermitian":
            obs.append(generators.gen_q_hermitian_observable(metric, n, cfg.seed + 1000 + i))
        else:
            raise BadOptionsError(f"unknown observable spec {spec!r}")
    return obs


class _Checker:
    """Collects check results; exceptions become failed entries."""

    def __init__(self):
        self.results = []

    def run(self, name, tolerance, fn):
        """fn returns a residual; passes iff residual <= tolerance."""
        try:
            residual = float(fn())
        except QmaxampError as exc:
            self.results.append(CheckResult(name, False, None, tolerance,
                                            f"{type(exc).__name__}: {exc}"))
            return None
        self.results.append(CheckResult(name, residual <= tolerance, residual, tolerance))
        return residual


def _structural_checks(checker, h, decomp, metric, tols):
    def orthonormality():
        gram = decomp.p.conj().T @ metric.q @ decomp.p
        return np.abs(gram - np.eye(decomp.dim)).max()

    checker.run("q-orthonormality", tols.q_orthonormality, orthonormality)

    def normality():
        resid = np.linalg.norm(linalg.commutator(h, qmetric.q_adjoint(h, metric)))
        return resid / max(np.linalg.norm(h), 1e-300) ** 2

    checker.run("q-normality", tols.q_normality, normality)

    def split_spectra():
        split = qmetric.split_h(h, metric)
        re = np.sort(np.linalg.eigvals(split.hqh).real)
        im = np.sort(np.linalg.eigvals(split.hqa / 1j).real)
        scale = max(np.abs(decomp.eigenvalues).max(), 1.0)
        return max(
            np.abs(re - np.sort(decomp.eigenvalues.real)).max(),
            np.abs(im - np.sort(decomp.eigenvalues.imag)).max(),
        ) / scale

    checker.run("split-spectra", tols.split_spectra, split_spectra)


def _maximization_checks(checker, h, decomp, metric, cfg, results_out):
    tols = cfg.tolerances
    span = cfg.span
    subset = maximize.imag_max_subset(decomp, tols.tol_band)
    predicted = np.exp(subset.imag_max * span.duration / cfg.hbar)

    analytic = None

    def analytic_amp():
        nonlocal analytic
        params = maximize.MaxFamilyParams.uniform(len(subset.indices))
        analytic = maximize.analytic_max_pair(decomp, metric, span, params,
                                              hbar=cfg.hbar, tol_band=tols.tol_band)
        results_out.append(analytic)
        return abs(analytic.achieved_amplitude - predicted) / predicted

    checker.run("analytic-amplitude", tols.amplitude_rel, analytic_amp)

    oracle = None

    def svd_amp():
        nonlocal oracle
        oracle = maximize.svd_oracle_max(h, metric, span, hbar=cfg.hbar)
        results_out.append(oracle)
        return abs(oracle.achieved_amplitude - predicted) / predicted

    checker.run("svd-oracle-amplitude", tols.oracle_rel, svd_amp)

    if decomp.dim <= 4 and oracle is not None:
        def gradient_amp():
            res = maximize.gradient_ascent_max(h, metric, span,
                                               restarts=cfg.gradient_restarts,
                                               seed=cfg.seed + 7, hbar=cfg.hbar)
            results_out.append(res)
            return abs(res.achieved_amplitude - oracle.achieved_amplitude) \
                / oracle.achieved_amplitude

        checker.run("gradient-ascent-amplitude", tols.gradient_rel, gradient_amp)

    def bound():
        rng = np.random.default_rng(cfg.seed + 13)
        m = linalg.mat_exp(-1j * h * span.duration / cfg.hbar)
        worst = 0.0
        for _ in range(cfg.bound_samples):
            a, b = maximize.random_q_normalized_pair(decomp.dim, metric, rng, span)
            amp = abs(qmetric.q_inner(b.ket, m @ a.ket, metric))
            worst = max(worst, (amp - predicted) / predicted)
        return worst

    checker.run("amplitude-upper-bound", tols.upper_bound_rel, bound)
    return analytic


def _weak_value_section(checker, h, metric, cfg, result, observables, weak_values_out):
    tols = cfg.tolerances
    times = cfg.span.sample(cfg.times)
    split = qmetric.split_h(h, metric)
    for i, o in enumerate(observables):
        def reality(o=o, i=i):
            reports = weakvalue.verify_reality(o, result, metric, h, times,
                                               hbar=cfg.hbar)
            for rep in reports:
                weak_values_out.append({
                    "observable": i,
                    "time": rep.time,
                    "value": complex_to_pair(rep.value),
                    "imag_residual": rep.imag_residual,
                    "tilde_delta": rep.tilde_delta,
                    "aa_delta": rep.aa_delta,
                })
            return max(r.imag_residual for r in reports)

        checker.run(f"reality[{i}]", tols.reality, reality)

        def tilde(o=o):
            return weakvalue.tilde_equivalence(o, result, split, metric, times,
                                               hbar=cfg.hbar)

        checker.run(f"tilde-equivalence[{i}]", tols.tilde_equiv, tilde)

    if observables:
        def ehrenfest_slope():
            o = observables[0]
            t_mid = 0.5 * (cfg.t_start + cfg.t_end)
            dts = np.array([1e-2, 5e-3, 2.5e-3, 1.25e-3]) * max(1.0, cfg.span.duration)
            errs = np.array([
                weakvalue.ehrenfest_check(o, result, split, metric, t_mid, dt,
                                          hbar=cfg.hbar)[2]
                for dt in dts
            ])
            if errs.max() < 1e-10:
                return 0.0  # derivative law exact to roundoff; no slope to measure
            slope = np.polyfit(np.log(dts), np.log(np.maximum(errs, 1e-300)), 1)[0]
            return abs(slope - 2.0)

        checker.run("ehrenfest-slope", 0.2, ehrenfest_slope)


def _theorem2_checks(checker, h, cfg, observables, results_out):
    tols = cfg.tolerances
    span = cfg.span
    n = h.shape[0]
    metric = qmetric.identity_metric(n)
    rng = np.random.default_rng(cfg.seed + 21)
    a_ket = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    a_state = dynamics.make_state(a_ket, span.t_start, dynamics.StateKind.A_TYPE, metric)

    res = {}

    def rat_amp():
        result = maximize.rat_maximize_b(a_state, h, span, theta_c=0.0, hbar=cfg.hbar)
        res["result"] = result
        results_out.append(result)
        worst = 0.0
        for t in span.sample(cfg.times):
            amp = abs(dynamics.transition_amplitude(result.b_state, a_state, metric,
                                                    h, t, hbar=cfg.hbar))
            worst = max(worst, abs(amp - 1.0))
        return worst

    checker.run("rat-amplitude", tols.rat_amplitude, rat_amp)

    if "result" in res:
        result = res["result"]

        def collinear():
            b_at_end = result.b_state.ket
            a_at_end = dynamics.evolve(a_state, h, metric, span.t_end, hbar=cfg.hbar).ket
            return 1.0 - abs(np.vdot(b_at_end, a_at_end))

        checker.run("rat-collinearity", tols.rat_amplitude, collinear)

        for i, o in enumerate(observables):
            def collapse(o=o):
                t_mid = 0.5 * (cfg.t_start + cfg.t_end)
                return weakvalue.rat_collapse_check(o, a_state, result, h, t_mid,
                                                    hbar=cfg.hbar)

            checker.run(f"rat-collapse[{i}]", tols.rat_collapse, collapse)

        def theta_invariance():
            o = observables[0] if observables else np.eye(n, dtype=complex)
            t_mid = 0.5 * (cfg.t_start + cfg.t_end)
            vals = []
            for theta_c in (0.0, 1.3, -2.1):
                r = maximize.rat_maximize_b(a_state, h, span, theta_c=theta_c,
                                            hbar=cfg.hbar)
                vals.append(weakvalue.normalized_matrix_element(
                    o, r.b_state, a_state, metric, h, t_mid, hbar=cfg.hbar))
            return max(abs(v - vals[0]) for v in vals[1:])

        checker.run("theta-c-invariance", tols.theta_c_invariance, theta_invariance)


def run_scenario(cfg: ScenarioConfig) -> RunReport:
    """Execute one scenario; never raises on a failing check."""
    start = time.perf_counter()
    checker = _Checker()
    maximizations = []
    weak_values = []
    classification = "unknown"

    try:
        h = _resolve_hamiltonian(cfg)
        classification = _classify(h)
        tols = cfg.tolerances

        if cfg.mode == "theorem2":
            metric = qmetric.identity_metric(h.shape[0])
            observables = _resolve_observables(cfg, metric, h.shape[0])
            _theorem2_checks(checker, h, cfg, observables, maximizations)
        else:
            decomp = linalg.eigendecompose(h, tol=tols.eig_residual,
                                           cond_threshold=tols.cond_threshold)
            metric = qmetric.build_q(decomp)
            observables = _resolve_observables(cfg, metric, h.shape[0])
            _structural_checks(checker, h, decomp, metric, tols)
            analytic = _maximization_checks(checker, h, decomp, metric, cfg,
                                            maximizations)
            if cfg.mode in ("theorem1", "weakvalue") and analytic is not None:
                _weak_value_section(checker, h, metric, cfg, analytic,
                                    observables, weak_values)
    except QmaxampError as exc:
        checker.results.append(CheckResult("scenario-setup", False, None, None,
                                           f"{type(exc).__name__}: {exc}"))

    return RunReport(
        config=cfg.to_dict(),
        classification=classification,
        maximizations=[{
            "method": r.method,
            "achieved_amplitude": r.achieved_amplitude,
            "predicted_amplitude": r.predicted_amplitude,
        } for r in maximizations],
        weak_values=weak_values,
        checks=checker.results,
        wall_time=time.perf_counter() - start,
    )


def report_to_dict(report: RunReport, include_timing=False):
    """Canonical dict form. Timing is excluded by default so that equal
    seeds give byte-identical serializations."""
    d = {
        "config": report.config,
        "classification": report.classification,
        "maximizations": report.maximizations,
        "weak_values": report.weak_values,
        "checks": [dataclasses.asdict(c) for c in report.checks],
    }
    if include_timing:
        d["wall_time"] = report.wall_time
    return d


def report_to_json(report, include_timing=False):
    return json.dumps(report_to_dict(report, include_timing), indent=2, sort_keys=True)


def parse_report(text):
    """Inverse of the JSON emission (modulo the RunReport wrapper)."""
    d = json.loads(text)
    checks = [CheckResult(**c) for c in d["checks"]]
    return RunReport(config=d["config"], classification=d["classification"],
                     maximizations=d["maximizations"], weak_values=d["weak_values"],
                     checks=checks, wall_time=d.get("wall_time", 0.0))


def _report_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time", "observable", "re_value", "im_value",
                     "imag_residual", "tilde_delta", "aa_delta"])
    for row in report.weak_values:
        writer.writerow([row["time"], row["observable"], row["value"][0],
                         row["value"][1], row["imag_residual"], row["tilde_delta"],
                         "" if row["aa_delta"] is None else row["aa_delta"]])
    return buf.getvalue()


def emit_report(report: RunReport, fmt, path):
    """Write a report as nested JSON or plot-ready flat CSV."""
    if fmt == "json":
        payload = report_to_json(report) + "\n"
    elif fmt == "csv":
        payload = _report_csv(report)
    else:
        raise BadOptionsError(f"format must be json or csv, got {fmt!r}")
    try:
        with open(path, "w") as fh:
            fh.write(payload)
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc
