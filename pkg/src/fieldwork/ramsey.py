"""Interferometric (Ramsey) measurement of the work characteristic function.

The probe qubit is the second tensor factor throughout. The protocol is

    rho (x) |0><0|  -> Hadamard on probe -> M_mu -> Hadamard on probe -> trace out system

and the characteristic function is read off the probe as ``<sz> + i <sy>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .qsys import (
    HADAMARD,
    SIGMA_Y,
    SIGMA_Z,
    DensityMatrix,
    ProcessSpec,
    UnitaryOperator,
    controlled,
    expm_i,
    ptrace,
    tensor,
)
from .workdist import CharScan


@dataclass(frozen=True)
class ProtocolResult:
    mu: float
    probe_state: DensityMatrix
    reconstructed_char: complex


def _real_mu(mu) -> float:
    if np.iscomplexobj(mu) and np.imag(mu) != 0:
        raise ValidationError("the interferometric protocol only runs at real mu")
    mu = float(np.real(mu))
    if not np.isfinite(mu):
        raise ValidationError("mu must be finite")
    return mu


def build_m(p: ProcessSpec, mu: float) -> UnitaryOperator:
    """Controlled evolution ``U e^{-i mu H0} (x) |0><0| + e^{-i mu Htau} U (x) |1><1|``."""
    mu = _real_mu(mu)
    u = p.u.matrix
    branch0 = u @ expm_i(p.h0, -mu)
    branch1 = expm_i(p.htau, -mu) @ u
    return controlled(branch0, branch1)


def _readout(probe: np.ndarray, shots: int | None, rng) -> complex:
    z = float(np.real(np.trace(probe @ SIGMA_Z)))
    y = float(np.real(np.trace(probe @ SIGMA_Y)))
    if shots is None:
        return complex(z, y)
    # Each Pauli is measured on its own batch of `shots` fresh runs.
    up_z = rng.binomial(shots, min(max(0.5 * (1 + z), 0.0), 1.0))
    up_y = rng.binomial(shots, min(max(0.5 * (1 + y), 0.0), 1.0))
    return complex(2 * up_z / shots - 1, 2 * up_y / shots - 1)


def run_protocol(p: ProcessSpec, mu: float, shots: int | None = None, rng=None) -> ProtocolResult:
    """Simulate the protocol at one ``mu``.

    With ``shots=None`` the probe is read out exactly (expectation values);
    otherwise each Pauli expectation is estimated from ``shots`` binomial
    samples drawn from ``rng``.
    """
    mu = _real_mu(mu)
    d = p.dim
    if shots is not None:
        if int(shots) != shots or shots < 1:
            raise ValidationError(f"shots must be a positive integer, got {shots}")
        rng = np.random.default_rng(rng)
    had = tensor(np.eye(d), HADAMARD)
    state = tensor(p.rho, np.diag([1.0, 0.0]))
    m = build_m(p, mu).matrix
    step = had @ m @ had
    state = step @ state @ step.conj().T
    probe = ptrace(state, (d, 2), keep=1)
    return ProtocolResult(mu=mu, probe_state=probe, reconstructed_char=_readout(probe.matrix, shots, rng))


def scan(p: ProcessSpec, mu_grid, shots: int | None = None, seed=None) -> CharScan:
    """Run the protocol at every grid point; shot noise (if any) is seeded once for the scan."""
    mu = np.atleast_1d(np.asarray(mu_grid, dtype=float))
    rng = np.random.default_rng(seed) if shots is not None else None
    values = np.array([run_protocol(p, m, shots=shots, rng=rng).reconstructed_char for m in mu])
    return CharScan(mu_values=mu, values=values)
