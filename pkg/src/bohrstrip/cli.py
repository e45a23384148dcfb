"""Command-line interface.

Exit codes: 0 success, 1 numeric failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import construction as con
from . import perron
from .dirichlet import (
    DirichletCoefficients,
    eta_coefficients,
    mean_square_diagonal,
    sinc_tail_bound,
    time_average_square,
)
from .primes import DEFAULT_C1
from .randpoly import DEFAULT_SAMPLES, DEFAULT_SWEEPS, estimate_sup_polytorus, kahane_bound, make_polynomial
from .zeta_eta import eta, zeta_via_eta

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """17 significant digits for reals; complex values as ``re+imj``."""
    if x is None:
        return ""
    if isinstance(x, (complex, np.complexfloating)):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    if isinstance(x, (float, np.floating)):
        return f"{x:.17g}"
    return str(x)


def int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(path: Path, command: str, params: dict, outputs: dict[str, Path]) -> None:
    manifest = {
        "command": command,
        "params": params,
        "version": __version__,
        "outputs": {name: sha256_file(p) for name, p in sorted(outputs.items())},
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


# --- construct -------------------------------------------------------------

def cmd_construct(args) -> int:
    if not con.K_MIN <= args.kmax <= con.K_MAX:
        raise UsageError(f"--kmax must lie in [{con.K_MIN}, {con.K_MAX}]")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    series = con.build_series(args.kmax, args.seed)
    coeff_path = out / "coefficients.jsonl"
    blocks_path = out / "blocks.jsonl"
    with coeff_path.open("w") as fh:
        series.materialized().to_jsonl(fh)
    with blocks_path.open("w") as fh:
        for m in series.manifests():
            fh.write(json.dumps(m, sort_keys=True) + "\n")
    write_manifest(
        out / "manifest.json",
        "construct",
        {"kmax": args.kmax, "seed": args.seed},
        {"coefficients.jsonl": coeff_path, "blocks.jsonl": blocks_path},
    )
    return EXIT_OK


# --- supnorm ---------------------------------------------------------------

def cmd_supnorm(args) -> int:
    poly = make_polynomial(args.n_vars, args.degree, args.seed)
    est = estimate_sup_polytorus(
        poly,
        radii=[args.radius] * args.n_vars,
        n_samples=args.samples,
        sample_seed=args.sample_seed,
        sweeps=args.sweeps,
    )
    header = ["n_vars", "degree", "seed", "samples", "sup_estimate", "term_count", "kahane_bound_c2=1"]
    kb = kahane_bound(args.n_vars, args.degree) * args.radius**args.degree if args.degree >= 2 else math.nan
    row = [args.n_vars, args.degree, args.seed, est.samples_used, est.estimate,
           poly.n_terms * args.radius**args.degree, kb]
    return _emit(args, _rows_to_csv(header, [row]))


# --- report ----------------------------------------------------------------

def report_bounds(args) -> str:
    rows = []
    for k in args.k:
        bound = con.theoretical_block_sup_bound(k, args.sigma, args.c1, args.c2)
        rows.append([k, args.sigma, bound, bound ** (1.0 / k),
                     math.sqrt(4 * args.c1 / k) * math.log(k) ** (1 / (2 * k)) * args.c2 ** (1 / k)])
    return _rows_to_csv(
        ["k", "sigma", "c2*2^(k(k+1)/2)*sqrt(log k)/(k*2^k/(2c1))^(k*sigma)", "kth_root",
         "sqrt(4c1/k)*(log k)^(1/2k)*c2^(1/k)"],
        rows,
    )


def report_supscan(args) -> str:
    rows = []
    for k in range(args.kmin, args.kmax + 1):
        est = con.block_line_sup(k, args.seed, args.sigma, args.t_samples, args.sample_seed, args.t_max)
        rows.append([k, args.sigma, est.estimate, est.t, con.block_absolute_sum(k, args.sigma),
                     con.theoretical_block_sup_bound(k, args.sigma, args.c1, 1.0)])
    return _rows_to_csv(
        ["k", "sigma", "line_sup", "t_witness", "sum|a_n|n^-sigma", "block_bound_c2=1"], rows
    )


def report_divergence(args) -> str:
    rows = []
    for k in args.k:
        rows.append([k, args.sigma, con.divergence_log_term(k, args.sigma, args.c1),
                     con.divergence_lower_bound(k, args.sigma, args.c1)])
    return _rows_to_csv(["k", "sigma", "log_term", "2^(k^2(1-sigma))/(3c1k)^(k(1+sigma))"], rows)


def report_perron(args) -> str:
    if args.series != "eta":
        raise UsageError(f"unknown series {args.series!r}")
    s = args.s
    b = args.b if args.b is not None else s.real - args.delta
    a = args.a if args.a is not None else b + 1.0
    rows = perron.perron_error_scan(eta, eta_coefficients(max(args.M)), s, b, a, args.delta, args.M)
    buf = io.StringIO()
    perron.write_scan_csv(rows, buf)
    return buf.getvalue()


def report_zeta(args) -> str:
    z = zeta_via_eta(args.s, args.N)
    return _rows_to_csv(["s", "zeta(s)"], [[args.s, z]])


def report_average(args) -> str:
    if args.coeffs:
        with open(args.coeffs) as fh:
            coeffs = DirichletCoefficients.from_jsonl(fh)
    elif args.series == "eta":
        coeffs = eta_coefficients(args.N)
    else:
        raise UsageError("give --coeffs FILE or --series eta")
    closed = time_average_square(coeffs, args.b, args.T, args.N, "closed_form")
    quad = time_average_square(coeffs, args.b, args.T, args.N, "quadrature")
    return _rows_to_csv(
        ["N", "b", "T", "closed_form", "quadrature", "sum|a_n|^2n^-2b", "sinc_tail_bound"],
        [[args.N, args.b, args.T, closed, quad, mean_square_diagonal(coeffs, args.b, args.N),
          sinc_tail_bound(coeffs, args.b, args.T, args.N)]],
    )


REPORTS = {
    "bounds": report_bounds,
    "supscan": report_supscan,
    "divergence": report_divergence,
    "perron": report_perron,
    "zeta": report_zeta,
    "average": report_average,
}


def cmd_report(args) -> int:
    return _emit(args, REPORTS[args.report](args))


def _emit(args, text: str) -> int:
    if args.out:
        path = Path(args.out)
        path.write_text(text)
        if args.manifest:
            params = {k: _jsonable(v) for k, v in sorted(vars(args).items())
                      if k not in ("func", "out", "manifest")}
            write_manifest(Path(args.manifest), args.command, params, {path.name: path})
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _jsonable(v):
    if isinstance(v, complex):
        return fmt(v)
    return v


# --- replay ----------------------------------------------------------------

def cmd_replay(args) -> int:
    manifest = json.loads(Path(args.manifest_path).read_text())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params = manifest["params"]
    if manifest["command"] == "construct":
        argv = ["construct", "--kmax", str(params["kmax"]), "--seed", str(params["seed"]), "--out", str(out)]
    else:
        name = next(iter(manifest["outputs"]))
        argv = _argv_from_params(manifest["command"], params) + ["--out", str(out / name)]
    code = main(argv)
    if code != EXIT_OK:
        return code
    for name, digest in manifest["outputs"].items():
        if sha256_file(out / name) != digest:
            print(json.dumps({"mismatch": name}), file=sys.stderr)
            return EXIT_NUMERIC
    return EXIT_OK


def _argv_from_params(command: str, params: dict) -> list[str]:
    argv = [command]
    if command == "report":
        argv.append(params["report"])
    for key, val in params.items():
        if key in ("command", "report") or val is None:
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(val, list):
            argv += [flag, ",".join(str(v) for v in val)]
        else:
            argv += [flag, str(val)]
    return argv


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bohrstrip", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build the block series and write coefficients")
    c.add_argument("--kmax", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default="construct_out", help="output directory")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("supnorm", help="sampled sup norm of a random +-1 polynomial")
    s.add_argument("--n-vars", type=int, required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--seed", type=int, default=None, help="omit for the all-plus polynomial")
    s.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    s.add_argument("--sample-seed", type=int, default=0)
    s.add_argument("--sweeps", type=int, default=DEFAULT_SWEEPS)
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--out")
    s.add_argument("--manifest")
    s.set_defaults(func=cmd_supnorm)

    r = sub.add_parser("report", help="CSV reports")
    rsub = r.add_subparsers(dest="report", required=True)

    def common(q):
        q.add_argument("--out", help="CSV path (default: stdout)")
        q.add_argument("--manifest", help="write a run manifest here (needs --out)")
        q.set_defaults(func=cmd_report)

    q = rsub.add_parser("bounds")
    q.add_argument("--k", type=int_list, default=[2, 3, 4, 5, 6, 7, 8, 9])
    q.add_argument("--sigma", type=float, default=0.5)
    q.add_argument("--c1", type=float, default=DEFAULT_C1)
    q.add_argument("--c2", type=float, default=1.0)
    common(q)

    q = rsub.add_parser("supscan")
    q.add_argument("--kmin", type=int, default=2)
    q.add_argument("--kmax", type=int, default=5)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--sigma", type=float, default=0.5)
    q.add_argument("--t-samples", type=int, default=con.DEFAULT_T_SAMPLES)
    q.add_argument("--t-max", type=float, default=con.DEFAULT_T_MAX)
    q.add_argument("--sample-seed", type=int, default=0)
    q.add_argument("--c1", type=float, default=DEFAULT_C1)
    common(q)

    q = rsub.add_parser("divergence")
    q.add_argument("--k", type=int_list, default=[2, 3, 4, 5, 6, 7, 8, 9, 50, 100, 200])
    q.add_argument("--sigma", type=float, default=0.5)
    q.add_argument("--c1", type=float, default=DEFAULT_C1)
    common(q)

    q = rsub.add_parser("perron")
    q.add_argument("--series", default="eta")
    q.add_argument("--s", type=complex_arg, default=complex(0.8))
    q.add_argument("--delta", type=float, default=0.3)
    q.add_argument("--M", type=int_list, default=[8, 16, 32, 64])
    q.add_argument("--a", type=float, default=None)
    q.add_argument("--b", type=float, default=None)
    common(q)

    q = rsub.add_parser("zeta")
    q.add_argument("--s", type=complex_arg, required=True)
    q.add_argument("--N", type=int, default=None, help="direct terms before acceleration")
    common(q)

    q = rsub.add_parser("average")
    q.add_argument("--series", default="eta")
    q.add_argument("--coeffs", help="JSON-lines coefficient file")
    q.add_argument("--N", type=int, default=20)
    q.add_argument("--b", type=float, default=0.0)
    q.add_argument("--T", type=float, default=100.0)
    common(q)

    rp = sub.add_parser("replay", help="re-run a manifest and compare output digests")
    rp.add_argument("manifest_path")
    rp.add_argument("--out", required=True, help="directory for the replayed outputs")
    rp.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(json.dumps({"error": "io", "detail": str(exc)}), file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, MemoryError) as exc:
        diag = {"error": type(exc).__name__, "detail": str(exc)}
        diag.update({k: _jsonable(v) for k, v in getattr(exc, "diagnostics", {}).items()})
        print(json.dumps(diag), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
