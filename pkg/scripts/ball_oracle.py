"""Monte Carlo check of the ball-to-projective-space rescaling.

For each (n, delta) compares int_CP^n H against int_B F, where H is the pushed
forward profile. Projective points come from normalized Gaussian vectors, ball
points from uniform draws; neither uses the library's samplers. The ratio is
reported next to delta^n and delta^(n+1).
"""
import argparse
import csv
import sys

import numpy as np

from quasistates.funcspace import Bump
from quasistates.quasistate import pushed_forward_profile


def moment_points(n, size, rng):
    z = rng.normal(size=(size, 2 * (n + 1)))
    mod = z[:, 0::2] ** 2 + z[:, 1::2] ** 2
    return mod[:, 1:] / mod.sum(axis=1, keepdims=True)


def ball_moment_sums(n, size, rng):
    v = rng.normal(size=(size, 2 * n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    rad = rng.random(size) ** (1 / (2 * n)) / np.sqrt(np.pi)
    return np.pi * ((v * rad[:, None]) ** 2).sum(axis=1)


def mean_se(v):
    return v.mean(), v.std(ddof=1) / np.sqrt(len(v))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="-")
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args(argv)
    seeds = np.random.SeedSequence(args.seed).spawn(9)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["n", "delta", "ratio", "ratio_se", "delta^n", "delta^(n+1)", "z_vs_n", "z_vs_n+1"])
    k = 0
    profile = Bump((0.45,), 0.3)
    for n in (1, 2, 3):
        for delta in (1.0, 0.95, 0.9):
            rng = np.random.default_rng(seeds[k])
            k += 1
            H = pushed_forward_profile(delta, profile)
            cp, cp_se = mean_se(H.evaluate(moment_points(n, args.samples, rng)))
            ball, ball_se = mean_se(profile.evaluate(ball_moment_sums(n, args.samples, rng)[:, None]))
            ratio = cp / ball
            se = abs(ratio) * np.hypot(cp_se / cp, ball_se / ball)
            w.writerow([n, delta, ratio, se, delta ** n, delta ** (n + 1),
                        (ratio - delta ** n) / se, (ratio - delta ** (n + 1)) / se])
            fh.flush()
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
