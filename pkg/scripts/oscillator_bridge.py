"""Compare a truncated displaced oscillator against the single-mode closed form."""

from __future__ import annotations

import argparse

import numpy as np

from fieldwork import qsys, workdist
from fieldwork.field import single_mode_char


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=40)
    ap.add_argument("--omega", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--alpha", type=float, default=0.5)
    args = ap.parse_args()
    h = qsys.oscillator(args.omega, args.dim)
    p = qsys.ProcessSpec(qsys.gibbs(h, args.beta), h, h, qsys.displacement(args.alpha, args.dim))
    mu = np.linspace(-3, 3, 13)
    fin = workdist.char_rs(p, mu)
    ref = single_mode_char(args.alpha**2, args.omega, args.beta, mu)
    print("mu,truncated_re,truncated_im,closed_re,closed_im,abs_gap")
    for m, a, b in zip(mu, fin, ref):
        print(f"{m:.3f},{a.real:.12f},{a.imag:.12f},{b.real:.12f},{b.imag:.12f},{abs(a - b):.2e}")


if __name__ == "__main__":
    main()
