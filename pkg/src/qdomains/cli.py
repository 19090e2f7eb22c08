"""Command-line front end.

Every subcommand can write a machine-readable JSON report (``--json PATH``)
with schema { command, params, results: [ {name, value, flags, assert} ] }.
Reports are deterministic: identical command plus seed produces
byte-identical JSON (floats serialized with full round-trip precision, no
timestamps).  The only caveat is ``verify --budget``, where the wall clock
decides how many checks fit.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click

from . import __version__
from .fock import FockTruncation, vaksman_norm
from .freeseries import (
    concat_multiply,
    estimated_radius,
    free_ball_norm,
    free_polydisk_norm,
    radius_partials,
    taylor_norm,
)
from .jsr import estimate_canonical_jsr
from .parsing import (
    ParseError,
    format_free_element,
    format_qelement,
    parse_free_element,
    parse_qelement,
)
from .qspace import QParameter, SeminormSpec, ball_norm, multiply, polydisk_norm
from .quotient import quotient_norm_l1, quotient_norm_l2
from .verify import SUITES, run_suites

_Q_FAMILIES = ("polydisk", "ball")
_FREE_FAMILIES = ("free-polydisk", "free-taylor", "free-ball")


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _result(name, value, flags=(), assert_=None, detail=None) -> dict:
    out = {
        "name": name,
        "value": _jsonable(value),
        "flags": list(flags),
        "assert": assert_,
    }
    if detail:
        out["detail"] = detail
    return out


def _report(command: str, params: dict, results: list[dict]) -> dict:
    return {
        "command": command,
        "params": {k: _jsonable(v) for k, v in params.items()},
        "results": results,
        "provenance": {"package": "qdomains", "version": __version__},
    }


def _emit(report: dict, json_path: str | None, human: list[str]) -> None:
    for line in human:
        click.echo(line)
    if json_path:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
        Path(json_path).write_text(text)


def _fail(exc: Exception) -> None:
    raise click.ClickException(str(exc))


def _element_flags(saturated: bool) -> tuple[str, ...]:
    return ("saturated", "lower-bound") if saturated else ()


def _vaksman_value(expression, n, q_mod, q_phase, rho, fock_cap):
    if q_phase != 0.0 or not 0.0 < q_mod < 1.0:
        raise click.ClickException(
            "the sup-style norm needs a real deformation parameter in (0, 1)"
        )
    fock = FockTruncation(n, q_mod, fock_cap)
    a = parse_qelement(expression, n, QParameter(q_mod, 0.0), fock_cap)
    return vaksman_norm(a, rho, fock), a


@click.group()
@click.version_option(__version__, prog_name="qdomains")
def main() -> None:
    """Computable norms on deformed polydisk and ball function algebras."""


# ---------------------------------------------------------------------------


@main.command()
@click.argument("expression")
@click.option("--family", type=click.Choice(_Q_FAMILIES + _FREE_FAMILIES + ("vaksman",)), default="polydisk")
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--q-mod", type=float, default=1.0, show_default=True)
@click.option("--q-phase", type=float, default=0.0, show_default=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--tau", type=float, default=1.0, show_default=True)
@click.option("--cap", type=int, default=16, show_default=True)
@click.option("--fock-cap", type=int, default=16, show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
def norm(expression, family, n, q_mod, q_phase, rho, tau, cap, fock_cap, json_path):
    """Seminorm of EXPRESSION in the selected family."""
    flags: tuple[str, ...] = ()
    try:
        if family in _Q_FAMILIES:
            a = parse_qelement(expression, n, QParameter(q_mod, q_phase), cap)
            spec = SeminormSpec(family, rho, tau)
            value = (polydisk_norm if family == "polydisk" else ball_norm)(a, spec)
            flags = _element_flags(a.saturated)
        elif family in _FREE_FAMILIES:
            a = parse_free_element(expression, n, cap)
            if family == "free-polydisk":
                value = free_polydisk_norm(a, rho, tau)
            elif family == "free-taylor":
                value = taylor_norm(a, rho)
            else:
                value = free_ball_norm(a, rho)
            flags = _element_flags(a.saturated)
        else:
            value, a = _vaksman_value(expression, n, q_mod, q_phase, rho, fock_cap)
            flags = ("lower-bound",) + _element_flags(a.saturated)
    except (ParseError, ValueError) as exc:
        _fail(exc)
    params = {
        "expression": expression,
        "family": family,
        "n": n,
        "q_mod": q_mod,
        "q_phase": q_phase,
        "rho": rho,
        "tau": tau,
        "cap": cap,
        "fock_cap": fock_cap,
    }
    report = _report("norm", params, [_result("norm", value, flags)])
    suffix = f"  [{', '.join(flags)}]" if flags else ""
    _emit(report, json_path, [f"norm[{family}] = {value!r}{suffix}"])


@main.command(name="multiply")
@click.argument("expr_a")
@click.argument("expr_b")
@click.option("--mode", type=click.Choice(("qspace", "free")), default="qspace", show_default=True)
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--q-mod", type=float, default=1.0, show_default=True)
@click.option("--q-phase", type=float, default=0.0, show_default=True)
@click.option("--cap", type=int, default=16, show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
def multiply_cmd(expr_a, expr_b, mode, n, q_mod, q_phase, cap, json_path):
    """Product of EXPR_A and EXPR_B (normal-ordered in qspace mode)."""
    try:
        if mode == "qspace":
            q = QParameter(q_mod, q_phase)
            prod = multiply(
                parse_qelement(expr_a, n, q, cap), parse_qelement(expr_b, n, q, cap)
            )
            text = format_qelement(prod)
        else:
            prod = concat_multiply(
                parse_free_element(expr_a, n, cap), parse_free_element(expr_b, n, cap)
            )
            text = format_free_element(prod)
    except (ParseError, ValueError) as exc:
        _fail(exc)
    flags = _element_flags(prod.saturated)
    params = {
        "expr_a": expr_a,
        "expr_b": expr_b,
        "mode": mode,
        "n": n,
        "q_mod": q_mod,
        "q_phase": q_phase,
        "cap": cap,
    }
    results = [
        _result("terms", float(len(prod.coefficients)), flags),
        _result("degree", float(prod.degree()), flags),
    ]
    report = _report("multiply", params, results)
    report["expression"] = text
    suffix = f"  [{', '.join(flags)}]" if flags else ""
    _emit(report, json_path, [text + suffix])


@main.command(name="quotient-norm")
@click.argument("expression")
@click.option("--family", type=click.Choice(_FREE_FAMILIES), default="free-taylor", show_default=True)
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--q-mod", type=float, default=1.0, show_default=True)
@click.option("--q-phase", type=float, default=0.0, show_default=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--tau", type=float, default=1.0, show_default=True)
@click.option("--cap", type=int, default=16, show_default=True)
@click.option("--method", type=click.Choice(("fiber", "joint")), default="fiber", show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
def quotient_norm(expression, family, n, q_mod, q_phase, rho, tau, cap, method, json_path):
    """Norm of the coset of EXPRESSION modulo the commutation ideal."""
    try:
        target = parse_free_element(expression, n, cap)
        q = QParameter(q_mod, q_phase)
        if family == "free-taylor":
            res = quotient_norm_l1(target, rho, q=q, method=method)
        elif family == "free-polydisk":
            res = quotient_norm_l1(target, rho, tau, q=q, method=method)
        else:
            res = quotient_norm_l2(target, rho, q=q, method=method)
    except (ParseError, ValueError) as exc:
        _fail(exc)
    flags = tuple(res.flags)
    results = [_result("quotient-norm", res.value, flags)]
    for d, v in sorted(res.per_degree.items()):
        results.append(_result(f"degree-{d}", v, flags))
    results.append(_result("iterations", float(res.iterations)))
    results.append(_result("splitting-gap", res.residual))
    params = {
        "expression": expression,
        "family": family,
        "n": n,
        "q_mod": q_mod,
        "q_phase": q_phase,
        "rho": rho,
        "tau": tau,
        "cap": cap,
        "method": method,
    }
    report = _report("quotient-norm", params, results)
    suffix = f"  [{', '.join(flags)}]" if flags else ""
    _emit(report, json_path, [f"quotient-norm[{family}] = {res.value!r}{suffix}"])


@main.command()
@click.option("--family", type=click.Choice(_Q_FAMILIES + _FREE_FAMILIES), default="polydisk", show_default=True)
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--q-mod", type=float, default=1.0, show_default=True)
@click.option("--q-phase", type=float, default=0.0, show_default=True)
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--r", type=float, default=1.0, show_default=True)
@click.option("--dmax", type=int, default=200, show_default=True)
@click.option("--tau", type=float, default=1.0, show_default=True)
@click.option("--grid", type=int, default=12, show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
@click.option("--csv", "csv_path", type=click.Path(), default=None)
def jsr(family, n, q_mod, q_phase, p, r, dmax, tau, grid, json_path, csv_path):
    """Joint l^p spectral radius estimate for the canonical generators."""
    internal = family.replace("-", "_")
    q = QParameter(q_mod, q_phase) if family in _Q_FAMILIES else None
    try:
        est = estimate_canonical_jsr(internal, n, q, p, r, d_max=dmax, tau=tau, grid_size=grid)
    except ValueError as exc:
        _fail(exc)
    results = [_result("jsr-extrapolated", est.extrapolated, tuple(est.flags))]
    for rho in est.rho_grid:
        results.append(
            _result(
                f"limit-rho={rho!r}",
                est.per_rho_limit[rho],
                detail=f"fit residual {est.residuals[rho]:.3e}",
            )
        )
    params = {
        "family": family,
        "n": n,
        "q_mod": q_mod,
        "q_phase": q_phase,
        "p": p,
        "r": r,
        "dmax": dmax,
        "tau": tau,
        "grid": grid,
    }
    report = _report("jsr", params, results)
    if csv_path:
        rows = ["rho,d,R_d"]
        for (rho, d), v in sorted(est.partials.items()):
            rows.append(f"{rho!r},{d},{v!r}")
        Path(csv_path).write_text("\n".join(rows) + "\n")
    suffix = f"  [{', '.join(est.flags)}]" if est.flags else ""
    _emit(report, json_path, [f"jsr[{family}] = {est.extrapolated!r}{suffix}"])


@main.command(name="fock-norm")
@click.argument("expression")
@click.option("--n", type=int, default=1, show_default=True)
@click.option("--q-mod", type=float, default=0.5, show_default=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--fock-cap", type=int, default=16, show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
def fock_norm(expression, n, q_mod, rho, fock_cap, json_path):
    """Sup-style norm of EXPRESSION via the truncated shift representation."""
    try:
        value, a = _vaksman_value(expression, n, q_mod, 0.0, rho, fock_cap)
    except (ParseError, ValueError) as exc:
        _fail(exc)
    flags = ("lower-bound",) + _element_flags(a.saturated)
    params = {
        "expression": expression,
        "n": n,
        "q_mod": q_mod,
        "rho": rho,
        "fock_cap": fock_cap,
    }
    report = _report("fock-norm", params, [_result("fock-norm", value, flags)])
    _emit(report, json_path, [f"fock-norm = {value!r}  [{', '.join(flags)}]"])


@main.command()
@click.argument("expression")
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--cap", type=int, default=16, show_default=True)
@click.option("--dmax", type=int, default=None)
@click.option("--json", "json_path", type=click.Path(), default=None)
@click.option("--csv", "csv_path", type=click.Path(), default=None)
def radius(expression, n, cap, dmax, json_path, csv_path):
    """Degree partials of the convergence-radius estimate for a free series."""
    try:
        a = parse_free_element(expression, n, cap)
        partials = radius_partials(a, dmax)
        est = estimated_radius(a)
    except (ParseError, ValueError) as exc:
        _fail(exc)
    flags = ("saturated",) if a.saturated else ()
    results = [_result(f"partial-d={d}", v, flags) for d, v in partials]
    results.append(_result("radius-estimate", est, flags))
    params = {"expression": expression, "n": n, "cap": cap, "dmax": dmax}
    report = _report("radius", params, results)
    if csv_path:
        rows = ["d,partial"] + [f"{d},{v!r}" for d, v in partials]
        Path(csv_path).write_text("\n".join(rows) + "\n")
    human = [f"partial[d={d}] = {v!r}" for d, v in partials]
    human.append(f"radius estimate = {est!r}")
    _emit(report, json_path, human)


@main.command()
@click.argument("suites", nargs=-1)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--budget", type=float, default=None, help="wall-clock seconds per suite")
@click.option("--list", "list_only", is_flag=True, default=False)
@click.option("--json", "json_path", type=click.Path(), default=None)
def verify(suites, seed, budget, list_only, json_path):
    """Run verification suites (all of them when none are named)."""
    if list_only:
        for name in SUITES:
            click.echo(name)
        return
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise click.ClickException(
            f"unknown suite(s) {unknown}; available: {', '.join(SUITES)}"
        )
    outcomes = run_suites(suites or None, seed=seed, budget=budget)
    human: list[str] = []
    results: list[dict] = []
    partial_suites: list[str] = []
    n_pass = n_total = 0
    for outcome in outcomes:
        if outcome.partial:
            partial_suites.append(outcome.suite)
        for check in outcome.checks:
            n_total += 1
            n_pass += check.passed
            status = "PASS" if check.passed else "FAIL"
            human.append(
                f"[{status}] {outcome.suite}:{check.name}  "
                f"value={check.value:.9g}  want {check.describe()}"
            )
            results.append(
                _result(
                    f"{outcome.suite}:{check.name}",
                    check.value,
                    check.flags,
                    check.assert_dict(),
                    check.detail,
                )
            )
    for name in partial_suites:
        human.append(f"[PARTIAL] {name}: budget exhausted, remaining checks skipped")
    human.append(f"{n_pass}/{n_total} checks passed")
    params = {
        "suites": list(suites) if suites else list(SUITES),
        "seed": seed,
        "budget": budget,
    }
    report = _report("verify", params, results)
    report["partial_suites"] = partial_suites
    _emit(report, json_path, human)
    if n_pass < n_total or partial_suites:
        sys.exit(1)


if __name__ == "__main__":
    main()
