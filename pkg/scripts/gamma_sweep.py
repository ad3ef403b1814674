"""Convergence of the decomposition pipeline as gamma shrinks.

Writes gamma, epsilon_achieved, pipeline value, direct value, target and errors
for p^2 on CP^1 and for p1*p2 plus a bump on CP^2.
"""
import argparse
import csv
import sys

from quasistates.decompose import gamma_sweep
from quasistates.funcspace import Bump, Monomial, Sum
from quasistates.quasistate import cpn_model

CASES = {
    "cp1_p2": (1, Monomial((2,)), (0.2, 0.1, 0.05, 0.025, 0.0125), {}),
    "cp2_p1p2_bump": (2, Sum((Monomial((1, 1)), Bump((0.6, 0.2), 0.1))), (0.4, 0.2, 0.1),
                      {"order": 8, "panels": 16, "verify_resolution": 129}),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    ap.add_argument("--case", choices=sorted(CASES), action="append")
    args = ap.parse_args(argv)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["case", "gamma", "pieces", "epsilon_achieved", "pipeline", "direct", "target",
                "error_to_target", "bound", "additivity_error", "reconstruction_error"])
    for name in args.case or sorted(CASES):
        n, f, gammas, opts = CASES[name]
        model = cpn_model(n)
        for r in gamma_sweep(model, f, gammas, **opts):
            w.writerow([name, r.gamma, len(r.pieces), r.epsilon_achieved, repr(r.sum_of_values),
                        repr(r.direct_zeta), repr(r.target_zeta), r.error_to_target,
                        model.lipschitz_constant * r.epsilon_achieved, r.additivity_error,
                        r.reconstruction_error])
            fh.flush()
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
