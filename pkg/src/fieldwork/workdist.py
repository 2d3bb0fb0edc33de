"""Work and internal-energy-difference quasi-distributions on finite systems.

All quantities are evaluated in the eigenbases of the two Hamiltonians. With
``V0``, ``Vt`` the eigenvector matrices of ``H0`` and ``Htau`` we use

* ``R = V0^+ rho V0`` -- the state in the initial energy basis, and
* ``M = Vt^+ U V0`` -- the process as a map between the two energy bases,

so that, e.g., the Kirkwood-Dirac weight of the transition ``i -> j`` is
``(R M^+)[i, j] * M[j, i]``. Characteristic functions are evaluated from the
trace formulas (products of spectral exponentials) rather than from the
support, so that the two routes can be checked against each other.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import (
    DegenerateBasisWarning,
    NumericalUnderflowError,
    UnsupportedMomentError,
    ValidationError,
)
from .qsys import (
    HermitianOperator,
    ProcessSpec,
    UnitaryOperator,
    gibbs,
    partition_ratio,
)
from .tolerances import DEFAULT

MAX_MOMENT = 4


class Kind(str, enum.Enum):
    RS = "rs"
    ATMH = "atmh"
    FCS = "fcs"
    TPM = "tpm"
    DU_CONV = "du_conv"
    DU_OP = "du_op"


@dataclass(frozen=True)
class QuasiDistribution:
    """Finitely supported (quasi-)distribution ``sum_k w_k delta(W - W_k)``."""

    values: np.ndarray
    weights: np.ndarray
    kind: Kind

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(zip(self.values.tolist(), self.weights.tolist()))

    def total(self) -> complex:
        return complex(self.weights.sum())

    def char(self, mu):
        """``sum_k w_k exp(i mu W_k)``; ``mu`` may be complex and/or an array."""
        mu = np.asarray(mu, dtype=complex)
        out = np.exp(1j * np.multiply.outer(mu, self.values)) @ self.weights
        return complex(out) if out.ndim == 0 else out

    def moment(self, j: int) -> complex:
        return complex(np.sum(self.weights * self.values**j))

    def expectation(self, f) -> complex:
        return complex(np.sum(self.weights * f(self.values)))

    def weight_at(self, w: float, atol: float = 1e-9) -> complex:
        """Total weight on support points within ``atol`` of ``w`` (0 if none)."""
        mask = np.abs(self.values - w) <= atol
        return complex(self.weights[mask].sum())

    def pruned(self, atol: float = 1e-15) -> QuasiDistribution:
        """Copy without the support points whose weight is within ``atol`` of zero."""
        keep = np.abs(self.weights) > atol
        return QuasiDistribution(values=self.values[keep], weights=self.weights[keep], kind=self.kind)

    def is_real(self, atol: float = 1e-10) -> bool:
        return bool(np.all(np.abs(self.weights.imag) <= atol))


@dataclass(frozen=True)
class JointDistribution:
    """Kirkwood-Dirac joint quasi-distribution over (initial level, final level)."""

    initial_energies: np.ndarray
    final_energies: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class CharScan:
    mu_values: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class FirstLawReport:
    mean_gap: complex
    var_gap: complex
    commutator_expectation: complex


# -- spectral frame ------------------------------------------------------------


@dataclass(frozen=True)
class _Frame:
    r: np.ndarray  # rho in the H0 eigenbasis
    m: np.ndarray  # Vt^+ U V0
    e0: np.ndarray
    et: np.ndarray
    tol: float


def merge_tolerance(h0: HermitianOperator, htau: HermitianOperator) -> float:
    """Width within which energies and gaps are identified: 1e-9 of the joint spectral span."""
    both = np.concatenate([h0.eigenvalues, htau.eigenvalues])
    scale = max(float(both.max() - both.min()), float(np.max(np.abs(both))))
    return DEFAULT.merge * scale


def _degenerate(e: np.ndarray, tol: float) -> bool:
    return bool(np.any(np.diff(e) <= tol)) if len(e) > 1 else False


def _frame(p: ProcessSpec, warn: bool = True) -> _Frame:
    v0 = p.h0.eigenvectors
    vt = p.htau.eigenvectors
    tol = merge_tolerance(p.h0, p.htau)
    if warn and (_degenerate(p.h0.eigenvalues, tol) or _degenerate(p.htau.eigenvalues, tol)):
        warnings.warn(
            "degenerate Hamiltonian spectrum: weights of equal energies are merged",
            DegenerateBasisWarning,
            stacklevel=3,
        )
    return _Frame(
        r=p.rho.in_basis(v0),
        m=vt.conj().T @ p.u.matrix @ v0,
        e0=p.h0.eigenvalues,
        et=p.htau.eigenvalues,
        tol=tol,
    )


def _level_labels(e: np.ndarray, tol: float) -> np.ndarray:
    """Integer label per (sorted) eigenvalue; a new level starts when the gap exceeds ``tol``."""
    labels = np.zeros(len(e), dtype=int)
    if len(e) > 1:
        labels[1:] = np.cumsum(np.diff(e) > tol)
    return labels


def _collect(values, weights, tol: float, kind: Kind) -> QuasiDistribution:
    values = np.ravel(values).astype(float)
    weights = np.ravel(weights).astype(complex)
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order]
    labels = _level_labels(values, tol)
    n = labels[-1] + 1 if len(labels) else 0
    w = np.zeros(n, dtype=complex)
    np.add.at(w, labels, weights)
    v = np.zeros(n)
    counts = np.bincount(labels, minlength=n)
    np.add.at(v, labels, values)
    v /= counts
    return QuasiDistribution(values=v, weights=w, kind=kind)


def _mu_map(scalar_char):
    """Build a public characteristic function from ``scalar_char(frame, mu)``.

    The spectral frame is computed once per call, and ``mu`` may be a scalar or
    an array (real or complex).
    """

    def wrapper(p: ProcessSpec, mu):
        f = _frame(p, warn=False)
        if np.ndim(mu) == 0:
            return scalar_char(f, complex(mu))
        mu = np.asarray(mu, dtype=complex)
        return np.array([scalar_char(f, m) for m in mu.ravel()]).reshape(mu.shape)

    wrapper.__name__ = scalar_char.__name__
    wrapper.__qualname__ = scalar_char.__qualname__
    wrapper.__doc__ = scalar_char.__doc__
    return wrapper


# -- joint and marginal distributions ------------------------------------------


def _kd_raw(f: _Frame) -> np.ndarray:
    """Eigen-index KD weights ``K[i, j] = <U^+ |j'><j'| U |i><i|>_rho``."""
    return (f.r @ f.m.conj().T) * f.m.T


def _gaps(f: _Frame) -> np.ndarray:
    return f.et[None, :] - f.e0[:, None]


def kd_joint(p: ProcessSpec) -> JointDistribution:
    """Kirkwood-Dirac joint distribution of initial and final energy.

    Degenerate eigenvalues are merged into single levels, which makes the
    result independent of the choice of eigenbasis inside each eigenspace.
    """
    f = _frame(p)
    k = _kd_raw(f)
    l0 = _level_labels(f.e0, f.tol)
    lt = _level_labels(f.et, f.tol)
    w = np.zeros((l0[-1] + 1, lt[-1] + 1), dtype=complex)
    np.add.at(w, (l0[:, None], lt[None, :]), k)
    e0 = np.bincount(l0, weights=f.e0) / np.bincount(l0)
    et = np.bincount(lt, weights=f.et) / np.bincount(lt)
    return JointDistribution(initial_energies=e0, final_energies=et, weights=w)


def dist_rs(p: ProcessSpec) -> QuasiDistribution:
    """Ramsey-scheme (Kirkwood-Dirac) work quasi-distribution; complex in general."""
    f = _frame(p)
    return _collect(_gaps(f), _kd_raw(f), f.tol, Kind.RS)


def dist_atmh(p: ProcessSpec) -> QuasiDistribution:
    """Margenau-Hill work quasi-distribution: the real part of the KD weights."""
    f = _frame(p)
    return _collect(_gaps(f), _kd_raw(f).real, f.tol, Kind.ATMH)


def _fcs_terms(f: _Frame):
    # T[i, i', j] = R[i, i'] conj(M[j, i']) M[j, i], sitting at  et_j - (e0_i + e0_i') / 2.
    t = f.r[:, :, None] * f.m.conj().T[None, :, :] * f.m.T[:, None, :]
    w = f.et[None, None, :] - 0.5 * (f.e0[:, None, None] + f.e0[None, :, None])
    return t, w


def dist_fcs(p: ProcessSpec) -> QuasiDistribution:
    """Full-counting-statistics work quasi-distribution.

    The half-phase coupling to ``H0`` puts coherences of the initial state
    between levels ``i`` and ``i'`` at ``et_j - (e0_i + e0_i')/2``; for states
    diagonal in the ``H0`` basis only ``i = i'`` survives and the support is
    the usual gap set. Weights come in complex-conjugate pairs, so they are
    real.
    """
    f = _frame(p)
    t, w = _fcs_terms(f)
    return _collect(w, t, f.tol, Kind.FCS)


def dist_tpm(p: ProcessSpec) -> QuasiDistribution:
    """Two-point-measurement work distribution (projective energy measurements before and after)."""
    f = _frame(p)
    t, w = _fcs_terms(f)
    labels = _level_labels(f.e0, f.tol)
    same = labels[:, None] == labels[None, :]
    return _collect(w[same], t[same], f.tol, Kind.TPM)


def _marginals(f: _Frame):
    p0 = np.real(np.diag(f.r))
    pt = np.real(np.diag(f.m @ f.r @ f.m.conj().T))
    return p0, pt


def dist_du_conv(p: ProcessSpec) -> QuasiDistribution:
    """Internal-energy difference from two independent measurements on fresh copies of rho."""
    f = _frame(p)
    p0, pt = _marginals(f)
    return _collect(_gaps(f), np.outer(p0, pt), f.tol, Kind.DU_CONV)


def du_operator(p: ProcessSpec) -> HermitianOperator:
    """``U^+ Htau U - H0``."""
    u = p.u.matrix
    return HermitianOperator(u.conj().T @ p.htau.matrix @ u - p.h0.matrix)


def dist_du_op(p: ProcessSpec) -> QuasiDistribution:
    """Spectral distribution of the internal-energy-difference operator in the state rho."""
    du = du_operator(p)
    r = p.rho.in_basis(du.eigenvectors)
    tol = merge_tolerance(p.h0, p.htau)
    return _collect(du.eigenvalues, np.real(np.diag(r)), tol, Kind.DU_OP)


def distribution(p: ProcessSpec, kind) -> QuasiDistribution:
    return _DISTS[Kind(kind)](p)


_DISTS = {
    Kind.RS: dist_rs,
    Kind.ATMH: dist_atmh,
    Kind.FCS: dist_fcs,
    Kind.TPM: dist_tpm,
    Kind.DU_CONV: dist_du_conv,
    Kind.DU_OP: dist_du_op,
}


# -- characteristic functions (trace formulas) ---------------------------------


def _exp_pieces(f: _Frame, mu: complex):
    d0 = np.exp(-1j * mu * f.e0)
    x = (f.m.conj().T * np.exp(1j * mu * f.et)) @ f.m  # U^+ e^{i mu Htau} U in the H0 basis
    return d0, x


@_mu_map
def char_rs(f: _Frame, mu: complex) -> complex:
    """``<U^+ e^{i mu Htau} U e^{-i mu H0}>_rho``; complex ``mu`` allowed."""
    d0, x = _exp_pieces(f, mu)
    return complex(np.trace(f.r @ (x * d0[None, :])))


@_mu_map
def char_atmh(f: _Frame, mu: complex) -> complex:
    """Symmetrised Ramsey characteristic function (Margenau-Hill ordering)."""
    d0, x = _exp_pieces(f, mu)
    a = np.trace(f.r @ (x * d0[None, :]))
    b = np.trace(f.r @ (d0[:, None] * x))
    return complex(0.5 * (a + b))


@_mu_map
def char_fcs(f: _Frame, mu: complex) -> complex:
    """``<e^{-i mu H0/2} U^+ e^{i mu Htau} U e^{-i mu H0/2}>_rho``."""
    half = np.exp(-0.5j * mu * f.e0)
    x = (f.m.conj().T * np.exp(1j * mu * f.et)) @ f.m
    return complex(np.trace(f.r @ (half[:, None] * x * half[None, :])))


_CHARS = {Kind.RS: char_rs, Kind.ATMH: char_atmh, Kind.FCS: char_fcs}


def char(p: ProcessSpec, kind, mu):
    kind = Kind(kind)
    if kind in _CHARS:
        return _CHARS[kind](p, mu)
    return distribution(p, kind).char(mu)


def scan(p: ProcessSpec, mu_grid, kind=Kind.RS) -> CharScan:
    mu = np.asarray(mu_grid, dtype=float)
    return CharScan(mu_values=mu, values=np.asarray(char(p, kind, mu), dtype=complex))


# -- moments -------------------------------------------------------------------


def moments(p: ProcessSpec, kind, j: int) -> complex:
    """j-th raw moment (1 <= j <= 4) from trace formulas in the energy bases."""
    kind = Kind(kind)
    if not 1 <= int(j) <= MAX_MOMENT or int(j) != j:
        raise UnsupportedMomentError(f"moment order must be an integer in 1..{MAX_MOMENT}, got {j}")
    j = int(j)
    f = _frame(p, warn=False)
    ht = (f.m.conj().T * f.et) @ f.m  # U^+ Htau U
    l0 = np.diag(f.e0).astype(complex)
    mp = np.linalg.matrix_power
    r = f.r

    def a(k):
        return mp(ht, k)

    def b(k):
        return mp(l0, k)

    def rs_like(state, swap=False):
        # i^{-j} d^j/dmu^j of <A(mu) B(mu)> with A = U^+ e^{i mu Htau} U, B = e^{-i mu H0}
        total = 0.0
        for k in range(j + 1):
            pair = (b(j - k), a(k)) if swap else (a(k), b(j - k))
            total += math.comb(j, k) * (-1) ** (j - k) * np.trace(state @ pair[0] @ pair[1])
        return total

    if kind is Kind.RS:
        val = rs_like(r)
    elif kind is Kind.ATMH:
        val = 0.5 * (rs_like(r) + rs_like(r, swap=True))
    elif kind is Kind.FCS:
        val = 0.0
        for i, k, m in product(range(j + 1), repeat=3):
            if i + k + m != j:
                continue
            coef = math.factorial(j) / (math.factorial(i) * math.factorial(k) * math.factorial(m))
            val += coef * (-0.5) ** (i + m) * np.trace(r @ b(i) @ a(k) @ b(m))
    elif kind is Kind.TPM:
        labels = _level_labels(f.e0, f.tol)
        dephased = np.where(labels[:, None] == labels[None, :], r, 0.0)
        val = rs_like(dephased)
    elif kind is Kind.DU_OP:
        val = np.trace(r @ mp(ht - l0, j))
    else:  # DU_CONV: product of independent marginals
        val = sum(
            math.comb(j, k) * (-1) ** (j - k) * np.trace(r @ a(k)) * np.trace(r @ b(j - k))
            for k in range(j + 1)
        )
    return complex(val)


def commutator_expectation(p: ProcessSpec) -> complex:
    """``<[U^+ Htau U, H0]>_rho`` (anti-Hermitian operator, so purely imaginary)."""
    f = _frame(p, warn=False)
    ht = (f.m.conj().T * f.et) @ f.m
    l0 = np.diag(f.e0)
    return complex(np.trace(f.r @ (ht @ l0 - l0 @ ht)))


def first_law_report(p: ProcessSpec, kind=Kind.RS) -> FirstLawReport:
    """Gaps between the first two raw moments of the internal-energy operator and of work.

    For the Ramsey scheme the second-moment gap equals the commutator
    expectation; for the Margenau-Hill and full-counting distributions both
    gaps vanish for every state.
    """
    gap1 = moments(p, Kind.DU_OP, 1) - moments(p, kind, 1)
    gap2 = moments(p, Kind.DU_OP, 2) - moments(p, kind, 2)
    return FirstLawReport(mean_gap=gap1, var_gap=gap2, commutator_expectation=commutator_expectation(p))


# -- fluctuation theorems ------------------------------------------------------


def crooks_residuals(
    h0: HermitianOperator, htau: HermitianOperator, u: UnitaryOperator, beta: float, mu_grid
) -> np.ndarray:
    """Pointwise ``|P_W(mu + i beta) / P_rev(-mu) - Z_tau/Z_0|`` on a real grid."""
    beta = float(beta)
    if not beta > 0:
        raise ValidationError(f"beta must be positive, got {beta}")
    fwd = ProcessSpec(gibbs(h0, beta), h0, htau, u)
    rev = fwd.reverse(beta)
    mu = np.atleast_1d(np.asarray(mu_grid, dtype=float))
    num = char_rs(fwd, mu + 1j * beta)
    den = char_rs(rev, -mu)
    if np.any(np.abs(den) < 1e-300):
        raise NumericalUnderflowError("reverse characteristic function underflows on the grid")
    return np.abs(num / den - partition_ratio(htau, h0, beta))


def crooks_check(h0, htau, u, beta, mu_grid) -> float:
    """Largest Crooks-relation residual over the grid (zero in exact arithmetic)."""
    return float(np.max(crooks_residuals(h0, htau, u, beta, mu_grid)))


def jarzynski_value(p: ProcessSpec, beta: float, kind=Kind.RS) -> complex:
    """``<exp(-beta X)>`` for the chosen distribution, on the Gibbs state of ``H0``.

    For the work distributions this is the characteristic function at
    ``i beta`` and equals ``Z_tau/Z_0``; internal-energy distributions are
    evaluated from their support and do not, in general, satisfy that.
    """
    ref = gibbs(p.h0, beta)
    if np.max(np.abs(ref.matrix - p.rho.matrix)) > DEFAULT.reconstruction:
        raise ValidationError("initial state is not the Gibbs state of h0 at this beta")
    kind = Kind(kind)
    if kind in _CHARS:
        return _CHARS[kind](p, 1j * beta)
    return distribution(p, kind).expectation(lambda w: np.exp(-beta * w))


def du_variance_relation_check(p: ProcessSpec) -> float:
    """Residual of the identity linking the two internal-energy variances.

    The measurement-based variance is taken from the support of
    :func:`dist_du_conv`, the operator variance from the spectrum of
    :func:`du_operator`, and the correction from trace formulas.
    """
    conv = dist_du_conv(p)
    var_conv = (conv.moment(2) - conv.moment(1) ** 2).real
    op = dist_du_op(p)
    var_op = (op.moment(2) - op.moment(1) ** 2).real
    rho = p.rho.matrix
    du = du_operator(p).matrix
    h0 = p.h0.matrix

    def ev(x):
        return np.trace(rho @ x)

    corr = ev(du @ h0) + ev(h0 @ du) - 2 * ev(du) * ev(h0) + 2 * ev(h0 @ h0) - 2 * ev(h0) ** 2
    return float(abs(var_conv - var_op - corr))
