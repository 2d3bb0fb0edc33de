"""Crooks and Jarzynski residuals for seeded random finite-dimensional processes."""

from __future__ import annotations

import argparse

import numpy as np

from fieldwork import qsys, workdist


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--dim", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--beta", type=float, action="append")
    args = ap.parse_args()
    betas = args.beta or [0.2, 1.0, 5.0]
    rng = np.random.default_rng(args.seed)
    mu = np.linspace(-5, 5, 41)
    print("index,beta,crooks_residual,jarzynski_gap")
    for i in range(args.count):
        h0 = qsys.random_hermitian(args.dim, rng)
        h1 = qsys.random_hermitian(args.dim, rng)
        u = qsys.random_unitary(args.dim, rng)
        for beta in betas:
            res = workdist.crooks_check(h0, h1, u, beta, mu)
            p = qsys.ProcessSpec(qsys.gibbs(h0, beta), h0, h1, u)
            gap = abs(workdist.jarzynski_value(p, beta) - qsys.partition_ratio(h1, h0, beta))
            print(f"{i},{beta!r},{res:.3e},{gap:.3e}")


if __name__ == "__main__":
    main()
