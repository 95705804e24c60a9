"""Command-line front end: solve, field export, validation, table dumps.

Jobs are described by a flat key = value config file; complex numbers
are written as re,im pairs and lists are whitespace separated:

    # inclusion and loading
    map = 0,0 0.1,0.1          # a0 a1 ... aM
    alpha1 = 0.5               # or: lambda = ... / mu = ...
    kappa = 0.3
    A = 0,0 1,0                # A0 A1 ...
    B = 0,0 1,0
    truncation_N = 48
    quadrature_Q = 2048
    grid = -3 3 -3 3 201 201   # xmin xmax ymin ymax nx ny
    output_path = fig1

Exit codes: 0 success, 1 validation failure, 2 config error, 3 solver
degeneracy.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from .conformal import ExteriorMap
from .errors import (
    ConfigError,
    DegenerateRotationError,
    FaberElastError,
    SingularBlockError,
    TruncationError,
)
from .faber import build_faber
from .fields import (
    GridSpec,
    field_grid,
    single_layer_exterior,
    single_layer_interior,
    write_field_csv,
)
from .loading import FarFieldLoading, Material
from .oracle import (
    QuadratureRule,
    equilibrium_residual,
    kelvin_single_layer,
    transmission_residual,
)
from .solver import density_on_boundary, required_table_order, solve_full

TRANSMISSION_TOL = 1e-6
EQUILIBRIUM_TOL = 1e-8
CONTINUITY_TOL = 1e-6
ORACLE_TOL = 1e-6
GRUNSKY_SYMMETRY_TOL = 1e-10

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3

_FMT = "%.17g"


@dataclass(frozen=True)
class JobConfig:
    mapping: ExteriorMap
    material: Material
    loading: FarFieldLoading
    truncation_n: int
    quadrature_q: int
    grid: GridSpec | None
    output_path: str


def _parse_complex_list(text: str, key: str) -> list:
    out = []
    for token in text.split():
        parts = token.split(",")
        if len(parts) != 2:
            raise ConfigError(f"{key}: expected re,im pairs, got {token!r}")
        try:
            out.append(complex(float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ConfigError(f"{key}: bad number in {token!r}") from exc
    return out


def _parse_float(text: str, key: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from exc


def _parse_int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from exc


def parse_config(path: str) -> dict:
    """Read a flat key = value file with # comments."""
    entries: dict = {}
    try:
        with open(path, "r") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"{path}:{lineno}: empty key or value")
        if key in entries:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def load_job(path: str, order=None, quadrature=None, out=None) -> JobConfig:
    entries = parse_config(path)
    known = {
        "map",
        "lambda",
        "mu",
        "alpha1",
        "kappa",
        "A",
        "B",
        "truncation_N",
        "quadrature_Q",
        "grid",
        "output_path",
    }
    unknown = set(entries) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    if "map" not in entries:
        raise ConfigError("missing required key: map")
    coeffs = _parse_complex_list(entries["map"], "map")
    if not coeffs:
        raise ConfigError("map needs at least the a0 coefficient")
    mapping = ExteriorMap(tuple(coeffs))

    has_lame = "lambda" in entries or "mu" in entries
    has_fig = "alpha1" in entries or "kappa" in entries
    if has_lame == has_fig:
        raise ConfigError(
            "material must be given as exactly one of (lambda, mu) or (alpha1, kappa)"
        )
    if has_lame:
        if "lambda" not in entries or "mu" not in entries:
            raise ConfigError("lame material needs both lambda and mu")
        material = Material.from_lame(
            _parse_float(entries["lambda"], "lambda"),
            _parse_float(entries["mu"], "mu"),
        )
    else:
        if "alpha1" not in entries or "kappa" not in entries:
            raise ConfigError("synthetic material needs both alpha1 and kappa")
        material = Material.from_figure_params(
            _parse_float(entries["alpha1"], "alpha1"),
            _parse_float(entries["kappa"], "kappa"),
        )

    A = _parse_complex_list(entries.get("A", ""), "A") or [0.0 + 0.0j]
    B = _parse_complex_list(entries.get("B", ""), "B") or [0.0 + 0.0j]
    loading = FarFieldLoading(np.array(A), np.array(B))

    n = order if order is not None else _parse_int(
        entries.get("truncation_N", "48"), "truncation_N"
    )
    q = quadrature if quadrature is not None else _parse_int(
        entries.get("quadrature_Q", "2048"), "quadrature_Q"
    )
    if n < 1:
        raise ConfigError("truncation_N must be positive")
    degree_floor = max(len(A) - 1, len(B) - 1, mapping.order) + 2
    if n < degree_floor:
        raise ConfigError(
            f"truncation_N = {n} is below max(loading degree, map order) + 2 "
            f"= {degree_floor}"
        )
    try:
        QuadratureRule(q)
    except ValueError as exc:
        raise ConfigError(f"quadrature_Q: {exc}") from exc

    grid = None
    if "grid" in entries:
        parts = entries["grid"].split()
        if len(parts) != 6:
            raise ConfigError("grid needs: xmin xmax ymin ymax nx ny")
        try:
            grid = GridSpec(
                xmin=float(parts[0]),
                xmax=float(parts[1]),
                ymin=float(parts[2]),
                ymax=float(parts[3]),
                nx=int(parts[4]),
                ny=int(parts[5]),
            )
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from exc

    output_path = out if out is not None else entries.get("output_path", "job")
    return JobConfig(
        mapping=mapping,
        material=material,
        loading=loading,
        truncation_n=n,
        quadrature_q=q,
        grid=grid,
        output_path=output_path,
    )


def _solve_job(job: JobConfig):
    table = build_faber(
        job.mapping, required_table_order(job.mapping, job.truncation_n)
    )
    sol = solve_full(
        job.mapping, job.loading, job.material, job.truncation_n, table=table
    )
    return table, sol


def _residual_summary(job: JobConfig, table, sol) -> dict:
    trans = transmission_residual(
        sol, job.mapping, table, job.loading, job.material, 256
    )
    eq = equilibrium_residual(sol, job.mapping, job.quadrature_q)
    return {
        "transmission": trans,
        "equilibrium_1": float(eq[0]),
        "equilibrium_2": float(eq[1]),
        "equilibrium_3": float(eq[2]),
    }


def _residuals_pass(summary: dict) -> bool:
    return summary["transmission"] < TRANSMISSION_TOL and all(
        summary[k] < EQUILIBRIUM_TOL
        for k in ("equilibrium_1", "equilibrium_2", "equilibrium_3")
    )


def _write_solution(job: JobConfig, sol, summary: dict) -> None:
    path = job.output_path + "_solution.csv"
    with open(path, "w", newline="\n") as fh:
        fh.write("m,re_s,im_s,re_t,im_t\n")
        for m in range(1, sol.order + 1):
            fh.write(
                ",".join(
                    _FMT % v
                    for v in (
                        m,
                        sol.s[m - 1].real,
                        sol.s[m - 1].imag,
                        sol.t[m - 1].real,
                        sol.t[m - 1].imag,
                    )
                )
                + "\n"
            )
    with open(job.output_path + "_summary.txt", "w", newline="\n") as fh:
        fh.write(f"c1 = {_FMT % sol.c1}\n")
        fh.write(f"c2 = {_FMT % sol.c2}\n")
        fh.write(f"c3 = {_FMT % sol.c3}\n")
        for key, value in summary.items():
            fh.write(f"{key}_residual = {_FMT % value}\n")
        fh.write(f"status = {'pass' if _residuals_pass(summary) else 'fail'}\n")


def _check_univalence(job: JobConfig) -> int:
    report = job.mapping.validate_univalence()
    if not report.ok:
        print("map failed the univalence check:", file=sys.stderr)
        print(
            f"  min |Psi'| on the sample grid: {report.min_abs_derivative:.3e}",
            file=sys.stderr,
        )
        if report.derivative_winding:
            print(
                f"  Psi' has {report.derivative_winding} zero(s) outside the "
                "unit circle (boundary winding count)",
                file=sys.stderr,
            )
        if report.crossing_segments:
            print(
                f"  boundary self-intersections at segment pairs "
                f"{list(report.crossing_segments)[:4]}",
                file=sys.stderr,
            )
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_solve(job: JobConfig) -> int:
    status = _check_univalence(job)
    if status:
        return status
    table, sol = _solve_job(job)
    summary = _residual_summary(job, table, sol)
    _write_solution(job, sol, summary)
    print(f"c1 = {sol.c1:.12g}  c2 = {sol.c2:.12g}  c3 = {sol.c3:.12g}")
    for key, value in summary.items():
        print(f"{key}_residual = {value:.3e}")
    return EXIT_OK if _residuals_pass(summary) else EXIT_VALIDATION


def cmd_field(job: JobConfig) -> int:
    if job.grid is None:
        raise ConfigError("field command needs a grid in the config")
    status = _check_univalence(job)
    if status:
        return status
    table, sol = _solve_job(job)
    samples = field_grid(
        sol, table, job.mapping, job.material, job.loading, job.grid
    )
    write_field_csv(samples, job.output_path + "_field.csv")
    summary = _residual_summary(job, table, sol)
    print(f"wrote {len(samples)} samples to {job.output_path}_field.csv")
    return EXIT_OK if _residuals_pass(summary) else EXIT_VALIDATION


def _interior_targets(mapping: ExteriorMap, count: int) -> np.ndarray:
    theta = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
    boundary = mapping.boundary_point(theta)
    center = boundary.mean()
    r_in = np.abs(boundary - center).min()
    angles = 2.0 * np.pi * np.arange(count) / count
    return center + 0.45 * r_in * np.exp(1j * angles)


def cmd_validate(job: JobConfig) -> int:
    checks = []
    report = job.mapping.validate_univalence()
    checks.append(("univalence", float(not report.ok), 0.5, report.ok))

    table, sol = _solve_job(job)
    n = min(24, table.order)
    c = table.grunsky[:n, :n]
    idx = np.arange(1, n + 1)
    sym = float(np.abs(idx[None, :] * c - (idx[None, :] * c).T).max())
    checks.append(
        ("grunsky_symmetry", sym, GRUNSKY_SYMMETRY_TOL, sym < GRUNSKY_SYMMETRY_TOL)
    )
    bound = float((np.abs(c) - 2.0 * idx[:, None] * (1 + 1e-8)).max())
    checks.append(("grunsky_bound", bound, 0.0, bound <= 0.0))
    rng = np.random.default_rng(0)
    worst_slack = np.inf
    for _ in range(5):
        lam = rng.normal(size=5) + 1j * rng.normal(size=5)
        lhs = sum(
            k * abs(np.dot(c[:5, k - 1], lam)) ** 2 for k in range(1, n + 1)
        )
        rhs = float(np.sum(np.arange(1, 6) * np.abs(lam) ** 2))
        worst_slack = min(worst_slack, rhs - lhs)
    checks.append(
        ("grunsky_strong_inequality", -worst_slack, 1e-8, worst_slack >= -1e-8)
    )

    summary = _residual_summary(job, table, sol)
    checks.append(
        (
            "transmission",
            summary["transmission"],
            TRANSMISSION_TOL,
            summary["transmission"] < TRANSMISSION_TOL,
        )
    )
    eqmax = max(
        summary["equilibrium_1"], summary["equilibrium_2"], summary["equilibrium_3"]
    )
    checks.append(("equilibrium", eqmax, EQUILIBRIUM_TOL, eqmax < EQUILIBRIUM_TOL))

    theta = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
    zb = job.mapping.boundary_point(theta)
    si = single_layer_interior(sol, table, job.mapping, job.material, zb)
    se = single_layer_exterior(
        sol, table, job.mapping, job.material, (1.0 + 1e-8) * np.exp(1j * theta)
    )
    cont = float(np.abs(si - se).max())
    checks.append(("boundary_continuity", cont, CONTINUITY_TOL, cont < CONTINUITY_TOL))

    rule = QuadratureRule(job.quadrature_q)
    phi = density_on_boundary(sol, job.mapping, rule.theta)
    worst = 0.0
    for z in _interior_targets(job.mapping, 10):
        series = single_layer_interior(sol, table, job.mapping, job.material, z)
        quad = kelvin_single_layer(phi, job.mapping, job.material, z, rule)
        worst = max(worst, abs(series - quad))
    for w in 1.5 * np.exp(2j * np.pi * np.arange(10) / 10):
        series = single_layer_exterior(sol, table, job.mapping, job.material, w)
        quad = kelvin_single_layer(
            phi, job.mapping, job.material, complex(job.mapping.eval(w)), rule
        )
        worst = max(worst, abs(series - quad))
    checks.append(("oracle_quadrature", worst, ORACLE_TOL, worst < ORACLE_TOL))

    width = max(len(name) for name, *_ in checks)
    all_ok = True
    for name, value, tol, ok in checks:
        all_ok &= ok
        print(
            f"{name.ljust(width)}  {value:12.4e}  (tol {tol:8.1e})  "
            f"{'pass' if ok else 'FAIL'}"
        )
    return EXIT_OK if all_ok else EXIT_VALIDATION


def _format_complex(value: complex) -> str:
    return f"{_FMT % value.real}{'+' if value.imag >= 0 else '-'}{_FMT % abs(value.imag)}j"


def cmd_faber_table(job: JobConfig) -> int:
    table = build_faber(
        job.mapping, required_table_order(job.mapping, job.truncation_n)
    )
    prefix = job.output_path
    for name, matrix in (
        ("monomial", table.monomial),
        ("grunsky", table.grunsky),
        ("gamma", table.gamma),
    ):
        with open(f"{prefix}_{name}.csv", "w", newline="\n") as fh:
            for row in matrix:
                fh.write(",".join(_format_complex(v) for v in row) + "\n")
    with open(f"{prefix}_gamma0.csv", "w", newline="\n") as fh:
        for v in table.gamma0:
            fh.write(_format_complex(v) + "\n")
    print(f"wrote {prefix}_{{monomial,grunsky,gamma,gamma0}}.csv")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="faberelast",
        description="rigid-inclusion plane elastostatics by Faber series",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "field", "validate", "faber-table"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="job config file")
        p.add_argument("--order", type=int, default=None, help="override truncation_N")
        p.add_argument(
            "--quadrature", type=int, default=None, help="override quadrature_Q"
        )
        p.add_argument("--out", default=None, help="override output_path prefix")
    args = parser.parse_args(argv)

    try:
        job = load_job(
            args.config, order=args.order, quadrature=args.quadrature, out=args.out
        )
        handler = {
            "solve": cmd_solve,
            "field": cmd_field,
            "validate": cmd_validate,
            "faber-table": cmd_faber_table,
        }[args.command]
        return handler(job)
    except (ConfigError, TruncationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularBlockError, DegenerateRotationError) as exc:
        print(f"solver degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except FaberElastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
