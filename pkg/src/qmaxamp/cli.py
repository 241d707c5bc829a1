"""Command-line interface.

Exit code is 0 when every check passes, otherwise the number of failed
checks (capped at 125).
"""

import json
import sys

import click
import numpy as np

from . import generators, harness

EXIT_CAP = 125


def _load_config(config, mode, seed, times, **overrides):
    if config is not None:
        cfg = harness.ScenarioConfig.from_json_file(config)
        updates = {"mode": mode}
    else:
        cfg = harness.ScenarioConfig()
        updates = {"mode": mode}
    if seed is not None:
        updates["seed"] = seed
    if times is not None:
        updates["times"] = times
    updates.update({k: v for k, v in overrides.items() if v is not None})
    d = cfg.to_dict()
    d.update(updates)
    return harness.ScenarioConfig.from_dict(d)


def _finish(report, out, fmt):
    if out:
        harness.emit_report(report, fmt, out)
    else:
        click.echo(harness.report_to_json(report))
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        resid = "n/a" if check.residual is None else f"{check.residual:.3e}"
        click.echo(f"[{status}] {check.name}: residual={resid}"
                   + (f" detail={check.detail}" if check.detail else ""),
                   err=True)
    sys.exit(min(report.failed_checks, EXIT_CAP))


def _common_options(fn):
    fn = click.option("--config", type=click.Path(exists=True), default=None,
                      help="scenario config JSON")(fn)
    fn = click.option("--seed", type=int, default=None)(fn)
    fn = click.option("--out", type=click.Path(), default=None)(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                      default="json")(fn)
    fn = click.option("--times", type=int, default=None,
                      help="number of sampled times in the span")(fn)
    return fn


@click.group()
def main():
    """Metric inner products, amplitude maximization and weak values."""


@main.command("verify-theorem1")
@_common_options
def verify_theorem1(config, seed, out, fmt, times):
    """Full verification campaign for a (non-)normal Hamiltonian."""
    cfg = _load_config(config, "theorem1", seed, times)
    _finish(harness.run_scenario(cfg), out, fmt)


@main.command("verify-theorem2")
@_common_options
def verify_theorem2(config, seed, out, fmt, times):
    """Fixed-past maximization checks for a Hermitian Hamiltonian."""
    cfg = _load_config(config, "theorem2", seed, times)
    if config is None:
        d = cfg.to_dict()
        d["hamiltonian"] = {"kind": "hermitian", "n": 4}
        cfg = harness.ScenarioConfig.from_dict(d)
    _finish(harness.run_scenario(cfg), out, fmt)


@main.command("maximize")
@_common_options
def maximize_cmd(config, seed, out, fmt, times):
    """Amplitude maximization by all applicable methods."""
    cfg = _load_config(config, "maximize", seed, times)
    _finish(harness.run_scenario(cfg), out, fmt)


@main.command("weak-value")
@_common_options
def weak_value(config, seed, out, fmt, times):
    """Weak-value reports for the maximizing pair."""
    cfg = _load_config(config, "weakvalue", seed, times)
    _finish(harness.run_scenario(cfg), out, fmt)


@main.command("gen")
@click.option("--kind", type=click.Choice(generators.KINDS), default="nonnormal")
@click.option("--n", type=int, default=4)
@click.option("--seed", type=int, default=0)
@click.option("--imag-max", type=float, default=1.0)
@click.option("--cond-p-max", type=float, default=100.0)
@click.option("--degeneracy", type=int, default=1)
@click.option("--out", type=click.Path(), default=None)
def gen(kind, n, seed, imag_max, cond_p_max, degeneracy, out):
    """Generate a Hamiltonian and print it as a JSON matrix."""
    h = generators.gen_hamiltonian(kind, n, seed, imag_max=imag_max,
                                   cond_p_max=cond_p_max, degeneracy=degeneracy)
    payload = json.dumps({"matrix": harness.matrix_to_pairs(h)}, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(payload + "\n")
    else:
        click.echo(payload)


@main.command("scan")
@_common_options
@click.option("--param", type=click.Choice(["T", "n"]), required=True)
@click.option("--values", required=True, help="comma-separated sweep values")
def scan(config, seed, out, fmt, times, param, values):
    """Run the theorem-1 campaign over a sweep of T or n."""
    base = _load_config(config, "theorem1", seed, times)
    reports = []
    failed = 0
    for raw in values.split(","):
        d = base.to_dict()
        if param == "T":
            d["t_end"] = d["t_start"] + float(raw)
        else:
            ham = dict(d["hamiltonian"])
            if "matrix" in ham:
                raise click.UsageError("cannot sweep n over an explicit matrix")
            ham["n"] = int(raw)
            d["hamiltonian"] = ham
        report = harness.run_scenario(harness.ScenarioConfig.from_dict(d))
        failed += report.failed_checks
        reports.append(harness.report_to_dict(report))
        for check in report.checks:
            status = "PASS" if check.passed else "FAIL"
            click.echo(f"[{status}] {param}={raw} {check.name}", err=True)
    payload = json.dumps(reports, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(payload + "\n")
    else:
        click.echo(payload)
    sys.exit(min(failed, EXIT_CAP))


if __name__ == "__main__":
    main()
