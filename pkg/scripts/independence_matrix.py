"""Independence matrices mu_delta_i(bump_j) over a grid of n, delta sets and radii.

Each row reports rank and the singular-value spread under both exponent conventions.
"""
import argparse
import csv
import logging
import sys

import numpy as np

from quasistates.quasistate import independence_certificate, matched_bumps

logging.getLogger("quasistates").setLevel(logging.ERROR)


def delta_sets(n, k, rng):
    lo = n / (n + 1)
    yield tuple(np.linspace(1.0, lo + 0.6 * (1 - lo), k))
    for _ in range(3):
        yield tuple(sorted(rng.uniform(lo + 0.05 * (1 - lo), 1.0, size=k), reverse=True))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="-")
    ap.add_argument("--max-n", type=int, default=3)
    ap.add_argument("--k", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--radii", type=float, nargs="+", default=[0.005, 0.02])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["n", "k", "radius", "deltas", "convention", "rank", "min_sv", "max_sv", "ratio"])
    for n in range(1, args.max_n + 1):
        for k in args.k:
            for deltas in delta_sets(n, k, rng):
                for radius in args.radii:
                    for conv in ("derived", "paper"):
                        try:
                            cert = independence_certificate(n, deltas, matched_bumps(n, deltas, radius), conv)
                        except ValueError as exc:
                            w.writerow([n, k, radius, " ".join(f"{d:.4f}" for d in deltas), conv,
                                        "", "", "", f"skipped: {exc}"])
                            continue
                        w.writerow([n, k, radius, " ".join(f"{d:.4f}" for d in deltas), conv, cert.rank,
                                    cert.min_singular_value, cert.max_singular_value,
                                    cert.min_singular_value / cert.max_singular_value])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
