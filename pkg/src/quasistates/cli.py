"""Command line front end.

    quasistates eval --space S.json --function F.json [--engine exact|quad|mc]
    quasistates mu-delta --n 1 --deltas 1,0.9 --function PROFILE.json
    quasistates independence --n 1 --deltas 1,0.9
    quasistates displace --space S.json --point 0.5,0.2
    quasistates median --tree T.json
    quasistates decompose --space S.json --function F.json --gamma 0.05 [--gamma-sweep]
    quasistates selftest

Machine output is CSV on stdout (or under --out) with 17 significant digits.
Exit status: 0 success, 1 invalid input, 2 failed internal check.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import sys
from pathlib import Path

from . import io
from .acceptance import run_all
from .basespace import MeasuredTree, Simplex
from .decompose import DEFAULT_SWEEP, gamma_sweep, partition_and_evaluate
from .errors import DecompositionError, DomainError, NotPolynomialError, StructureError
from .measure import integrate_monte_carlo
from .quasistate import (
    QuasiStateModel, ToricHamiltonian, calabi_value, default_model,
    independence_certificate, matched_bumps, mu_delta_closed_form,
    mu_delta_via_pullback, sigma_term, tree_median, zeta,
)
from .symmetry import displace_point, displace_region

TWO_PATH_TOL = 1e-9


class CheckFailure(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise DomainError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise DomainError(f"--{name.replace('_', '-')} is required for '{args.command}'")
    return value


def _space(args):
    return io.space_from_json(io.load_json(_need(args, "space")))


def _function(args):
    return io.function_from_json(io.load_json(_need(args, "function")))


def _engine_opts(args) -> dict:
    return {"order": args.order or 8, "samples": args.samples, "seed": args.seed}


class Output:
    """Collects CSV rows; writes them to --out or stdout, plus a rounded table for humans."""

    def __init__(self, args):
        self.path = args.out
        self.rows = []

    def row(self, *cells):
        self.rows.append([fmt(c) for c in cells])

    def text(self) -> str:
        buf = _io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(self.rows)
        return buf.getvalue()

    def flush(self):
        if self.path is None:
            sys.stdout.write(self.text())
            return
        Path(self.path).write_text(self.text(), encoding="utf-8")
        for r in self.rows:
            cells = [f"{float(c):.6g}" if _isnum(c) else c for c in r]
            print("  ".join(cells))


def _isnum(s) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


# -- commands ------------------------------------------------------------------

def cmd_eval(args, out: Output) -> int:
    space = _space(args)
    f = _function(args)
    model = default_model(space)
    if args.sigma:
        model = QuasiStateModel(space, model.dh, io.sigma_from_json(space, io.load_json(args.sigma)))
    h = ToricHamiltonian(f, args.power)
    opts = _engine_opts(args)
    if args.engine == "mc":
        est, se = integrate_monte_carlo(model.dh, f, args.samples, args.seed)
        cal = args.power * est
        sig = sigma_term(model, h)
        out.row("zeta", cal - sig)
        out.row("calabi", cal)
        out.row("sigma", sig)
        out.row("stderr", abs(args.power) * se)
        return 0
    out.row("zeta", zeta(model, h, args.engine, **opts))
    out.row("calabi", calabi_value(model, h, args.engine, **opts))
    out.row("sigma", sigma_term(model, h))
    return 0


def cmd_mu_delta(args, out: Output) -> int:
    n, deltas = _need(args, "n"), _floats(_need(args, "deltas"))
    profile = _function(args)
    out.row("delta", "closed_form", "pullback", "difference")
    worst = 0.0
    for d in deltas:
        closed = mu_delta_closed_form(n, d, profile, args.convention)
        pulled = mu_delta_via_pullback(n, d, profile)
        worst = max(worst, abs(closed - pulled))
        out.row(d, closed, pulled, closed - pulled)
    if worst > TWO_PATH_TOL:
        out.flush()
        raise CheckFailure(f"two-path disagreement {worst:.3g} exceeds {TWO_PATH_TOL:g} "
                           f"under convention '{args.convention}'")
    return 0


def cmd_independence(args, out: Output) -> int:
    n, deltas = _need(args, "n"), _floats(_need(args, "deltas"))
    if args.function:
        data = io.load_json(args.function)
        items = data if isinstance(data, list) else [data]
        profiles = [io.function_from_json(d, f"profiles[{k}]") for k, d in enumerate(items)]
    else:
        profiles = matched_bumps(n, deltas, args.radius)
    cert = independence_certificate(n, deltas, profiles, args.convention)
    for d, row in zip(deltas, cert.matrix):
        out.row("row", d, *[float(v) for v in row])
    out.row("rank", cert.rank)
    out.row("min_singular_value", cert.min_singular_value)
    out.row("max_singular_value", cert.max_singular_value)
    return 0


def cmd_displace(args, out: Output) -> int:
    space = _space(args)
    if not isinstance(space, Simplex):
        raise StructureError("displace works on simplex spaces")
    if args.point is not None:
        cert = displace_point(space, _floats(args.point))
    elif args.balls is not None:
        cert = displace_region(space, io.balls_from_json(io.load_json(args.balls)))
    else:
        raise DomainError("--point or --balls is required for 'displace'")
    if cert is None:
        out.row("certificate", "none")
    else:
        out.row("certificate", cert.symmetry.cycles())
        out.row("separation", cert.separation)
    return 0


def cmd_median(args, out: Output) -> int:
    tree = io.space_from_json(io.load_json(_need(args, "tree")))
    if not isinstance(tree, MeasuredTree):
        raise StructureError("--tree must describe a tree")
    m = tree_median(tree)
    where = f"vertex:{m.vertex}" if m.vertex is not None else f"edge:{m.point.edge}@{fmt(m.point.offset)}"
    out.row("median", where, f"unique:{fmt(m.unique)}")
    return 0


def _json_path(args):
    if args.json_out:
        return Path(args.json_out)
    return Path(args.out).with_suffix(".json") if args.out else None


def cmd_decompose(args, out: Output) -> int:
    space = _space(args)
    f = _function(args)
    model = default_model(space)
    engine = "quad" if args.engine in ("auto", "exact") else args.engine
    kw = dict(engine=engine, order=args.order or 12, samples=args.samples, seed=args.seed)
    if args.gamma_sweep:
        gammas = _floats(args.gammas) if args.gammas else list(DEFAULT_SWEEP)
        reports = gamma_sweep(model, f, gammas, **kw)
        out.row("gamma", "epsilon_achieved", "pipeline", "target", "error", "bound", "additivity_error")
        bad = []
        for r in reports:
            bound = model.lipschitz_constant * r.epsilon_achieved
            out.row(r.gamma, r.epsilon_achieved, r.sum_of_values, r.target_zeta, r.error_to_target, bound,
                    r.additivity_error)
            if r.error_to_target > bound:
                bad.append(r.gamma)
        if _json_path(args):
            _json_path(args).write_text(json.dumps([r.to_json() for r in reports], indent=1), encoding="utf-8")
        if bad:
            out.flush()
            raise CheckFailure(f"pipeline error exceeds the flattening bound at gamma = {bad}")
        return 0
    r = partition_and_evaluate(model, f, _need(args, "gamma"), **kw)
    out.row("index", "label", "certificate", "value")
    for p in r.pieces:
        out.row(p.index, p.label, p.certificate.symmetry.cycles() if p.certificate else "", p.value)
    out.row("sum", "", "", r.sum_of_values)
    out.row("direct_zeta", "", "", r.direct_zeta)
    out.row("reconstruction_error", "", "", r.reconstruction_error)
    if _json_path(args):
        _json_path(args).write_text(json.dumps(r.to_json(), indent=1), encoding="utf-8")
    if r.pointwise_error > 1e-10 or r.partition_error > 1e-12:
        out.flush()
        raise CheckFailure(f"partition check failed: pointwise {r.pointwise_error:.3g}, "
                           f"partition {r.partition_error:.3g}")
    return 0


def cmd_selftest(args, out: Output) -> int:
    failed = []
    for res in run_all(args.convention):
        print(res.line(), flush=True)
        if not res.passed:
            failed.append(res.name)
    if failed:
        raise CheckFailure(f"{len(failed)} criteria failed: {', '.join(failed)}")
    print("all criteria passed")
    return 0


COMMANDS = {
    "eval": cmd_eval,
    "mu-delta": cmd_mu_delta,
    "independence": cmd_independence,
    "displace": cmd_displace,
    "median": cmd_median,
    "decompose": cmd_decompose,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quasistates", description="Calabi quasimorphisms on toric Hamiltonians.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--space", help="space JSON file")
    p.add_argument("--function", help="function JSON file (a profile, or a list of profiles for independence)")
    p.add_argument("--tree", help="tree JSON file")
    p.add_argument("--sigma", help="optional sigma measure JSON file for eval")
    p.add_argument("--engine", default="auto", choices=["auto", "exact", "quad", "mc"])
    p.add_argument("--order", type=int, help="quadrature order (default 8, 12 for decompose)")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--n", type=int)
    p.add_argument("--deltas")
    p.add_argument("--radius", type=float, default=0.02, help="matched bump radius")
    p.add_argument("--convention", default="derived", choices=["derived", "paper"])
    p.add_argument("--point", help="comma-separated simplex point")
    p.add_argument("--balls", help="JSON file with a list of {center, r}")
    p.add_argument("--gamma", type=float)
    p.add_argument("--gamma-sweep", action="store_true")
    p.add_argument("--gammas", help="comma-separated sweep (default 0.2,0.1,0.05,0.025)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--json-out", help="decompose: JSON report path (default: --out with a .json suffix)")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    out = Output(args)
    try:
        code = COMMANDS[args.command](args, out)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
        return 1
    except (ValueError, NotPolynomialError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CheckFailure, DecompositionError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 2
    if args.command != "selftest":
        out.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
