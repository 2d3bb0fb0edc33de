"""First-law gaps (mean and variance) for each quasi-distribution on random states."""

from __future__ import annotations

import argparse

import numpy as np

from fieldwork import qsys, workdist
from fieldwork.workdist import Kind


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print("index,kind,mean_gap,var_gap_re,var_gap_im,commutator_im")
    for i in range(args.count):
        d = args.dim
        p = qsys.ProcessSpec(
            qsys.random_density(d, rng), qsys.random_hermitian(d, rng), qsys.random_hermitian(d, rng), qsys.random_unitary(d, rng)
        )
        for kind in (Kind.RS, Kind.ATMH, Kind.FCS, Kind.TPM):
            r = workdist.first_law_report(p, kind)
            v = complex(r.var_gap)
            print(
                f"{i},{kind.value},{abs(r.mean_gap):.2e},{v.real:.3e},{v.imag:.3e},"
                f"{complex(r.commutator_expectation).imag:.3e}"
            )


if __name__ == "__main__":
    main()
