"""Dense linear algebra and quantum-state primitives for small Hilbert spaces.

Every object is validated on construction and treated as immutable afterwards.
:class:`HermitianOperator` caches its spectral decomposition so that
``expm_i(h, s)`` costs O(d^2) per call, which is what characteristic-function
scans need.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, NonHermitianError, ValidationError
from .tolerances import DEFAULT, Tolerances

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = (SIGMA_Z + SIGMA_X) / np.sqrt(2.0)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KETPLUS = np.array([1, 1], dtype=complex) / np.sqrt(2.0)


def _as_square(a, name="matrix") -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatchError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries")
    return m


def hermiticity_residual(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T)))


def eigh(a, tol: Tolerances = DEFAULT):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
    eigenvectors as orthonormal columns. Raises :class:`NonHermitianError` if
    ``max|A - A^+| > tol.construction * max|A|``.
    """
    m = _as_square(a)
    scale = float(np.max(np.abs(m)))
    if hermiticity_residual(m) > tol.construction * scale:
        raise NonHermitianError(
            f"matrix is not Hermitian (residual {hermiticity_residual(m):.3e}, scale {scale:.3e})"
        )
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    resid = np.max(np.abs((v * w) @ v.conj().T - m)) if m.size else 0.0
    if resid > tol.reconstruction * max(scale, 1.0):
        raise NonHermitianError(f"eigen-decomposition reconstruction residual {resid:.3e}")
    return w, v


class HermitianOperator:
    """A Hermitian matrix together with its cached spectral decomposition."""

    __slots__ = ("matrix", "eigenvalues", "eigenvectors")

    def __init__(self, matrix, tol: Tolerances = DEFAULT):
        m = _as_square(matrix, "Hermitian operator")
        w, v = eigh(m, tol)
        m = 0.5 * (m + m.conj().T)
        for name, value in (("matrix", m), ("eigenvalues", w), ("eigenvectors", v)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __setattr__(self, name, value):
        raise AttributeError("HermitianOperator is immutable")

    @classmethod
    def diagonal(cls, values) -> HermitianOperator:
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def span(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def apply(self, func) -> np.ndarray:
        """Return ``V diag(func(eigenvalues)) V^+``."""
        return (self.eigenvectors * func(self.eigenvalues)) @ self.eigenvectors.conj().T

    def expectation(self, rho: DensityMatrix) -> float:
        return float(np.real(np.trace(rho.matrix @ self.matrix)))

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim}, spectrum=[{self.eigenvalues[0]:.4g}, {self.eigenvalues[-1]:.4g}])"


class DensityMatrix:
    """A positive semidefinite, unit-trace matrix.

    ``spectral`` optionally records an exact eigen-decomposition ``(p, V)``.
    :func:`gibbs` fills it with the Hamiltonian's own eigenvector array so that
    downstream code can recognise the state as diagonal in that basis without
    round-off leaking in from an explicit change of basis.
    """

    __slots__ = ("matrix", "spectral")

    def __init__(self, matrix, tol: Tolerances = DEFAULT, spectral=None):
        m = _as_square(matrix, "density matrix")
        if hermiticity_residual(m) > tol.construction * max(1.0, float(np.max(np.abs(m)))):
            raise NonHermitianError("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m)
        if abs(tr - 1.0) > tol.construction:
            raise ValidationError(f"density matrix trace is {tr.real:.15g}, expected 1")
        if spectral is None:
            lo = np.linalg.eigvalsh(m)[0]
        else:
            lo = float(np.min(spectral[0]))
        if lo < -tol.psd:
            raise ValidationError(f"density matrix has negative eigenvalue {lo:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "spectral", spectral)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @classmethod
    def pure(cls, ket) -> DensityMatrix:
        psi = np.asarray(ket, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, d: int) -> DensityMatrix:
        return cls(np.eye(d) / d)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def in_basis(self, basis: np.ndarray) -> np.ndarray:
        """Matrix elements ``V^+ rho V`` in the orthonormal columns of ``basis``.

        Exact (diagonal) when the state was built in that very basis.
        """
        if self.spectral is not None and self.spectral[1] is basis:
            return np.diag(self.spectral[0]).astype(complex)
        return basis.conj().T @ self.matrix @ basis

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


class UnitaryOperator:
    __slots__ = ("matrix",)

    def __init__(self, matrix, tol: Tolerances = DEFAULT):
        m = _as_square(matrix, "unitary")
        resid = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if resid > tol.construction:
            raise ValidationError(f"operator is not unitary (residual {resid:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("UnitaryOperator is immutable")

    @classmethod
    def identity(cls, d: int) -> UnitaryOperator:
        return cls(np.eye(d))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> UnitaryOperator:
        return UnitaryOperator(self.matrix.conj().T)

    def __repr__(self):
        return f"UnitaryOperator(dim={self.dim})"


@dataclass(frozen=True)
class ProcessSpec:
    """Initial state, initial and final Hamiltonians, and the unitary process."""

    rho: DensityMatrix
    h0: HermitianOperator
    htau: HermitianOperator
    u: UnitaryOperator

    def __post_init__(self):
        dims = {self.rho.dim, self.h0.dim, self.htau.dim, self.u.dim}
        if len(dims) != 1:
            raise DimensionMismatchError(
                f"process components disagree on dimension: rho {self.rho.dim}, h0 {self.h0.dim}, "
                f"htau {self.htau.dim}, u {self.u.dim}"
            )

    @property
    def dim(self) -> int:
        return self.rho.dim

    def reverse(self, beta: float) -> ProcessSpec:
        """Time-reversed process: Gibbs state of ``htau``, ``htau -> h0`` under ``U^+``."""
        return ProcessSpec(gibbs(self.htau, beta), self.htau, self.h0, self.u.dagger())


def expm_i(h: HermitianOperator, s) -> np.ndarray:
    """``exp(i s H)`` for real or complex ``s`` via the cached eigenbasis."""
    s = complex(s)
    if not np.isfinite(s):
        raise ValidationError("exponent scale must be finite")
    return h.apply(lambda w: np.exp(1j * s * w))


def gibbs(h: HermitianOperator, beta: float) -> DensityMatrix:
    """Thermal state ``exp(-beta H) / Tr exp(-beta H)``.

    The Boltzmann exponents are shifted by the ground energy so the largest one
    is zero, which keeps ``beta * span`` of several hundred finite.
    """
    beta = float(beta)
    if not np.isfinite(beta) or beta < 0:
        raise ValidationError(f"beta must be finite and >= 0, got {beta}")
    boltz = np.exp(-beta * (h.eigenvalues - h.eigenvalues[0]))
    p = boltz / boltz.sum()
    v = h.eigenvectors
    return DensityMatrix((v * p) @ v.conj().T, spectral=(p, v))


def partition_ratio(h_final: HermitianOperator, h_initial: HermitianOperator, beta: float) -> float:
    """``Tr exp(-beta H_final) / Tr exp(-beta H_initial)``, computed with a common shift."""
    shift = min(h_final.eigenvalues[0], h_initial.eigenvalues[0])
    zf = np.exp(-beta * (h_final.eigenvalues - shift)).sum()
    zi = np.exp(-beta * (h_initial.eigenvalues - shift)).sum()
    return float(zf / zi)


def tensor(*ops) -> np.ndarray:
    return reduce(np.kron, [np.asarray(getattr(o, "matrix", o), dtype=complex) for o in ops])


def ptrace(state, dims, keep) -> DensityMatrix:
    """Partial trace of a bipartite state, keeping subsystem ``keep`` (0 or 1)."""
    m = np.asarray(getattr(state, "matrix", state), dtype=complex)
    da, db = dims
    if m.shape != (da * db, da * db):
        raise DimensionMismatchError(f"state of shape {m.shape} does not factor as {da}x{db}")
    t = m.reshape(da, db, da, db)
    if keep == 0:
        r = np.einsum("ijkj->ik", t)
    elif keep == 1:
        r = np.einsum("ijil->jl", t)
    else:
        raise ValidationError(f"keep must be 0 or 1, got {keep!r}")
    return DensityMatrix(r)


def controlled(u0, u1) -> UnitaryOperator:
    """``u0 (x) |0><0| + u1 (x) |1><1|`` with the control qubit as the second factor."""
    a = np.asarray(getattr(u0, "matrix", u0), dtype=complex)
    b = np.asarray(getattr(u1, "matrix", u1), dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"controlled blocks differ in shape: {a.shape} vs {b.shape}")
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return UnitaryOperator(np.kron(a, p0) + np.kron(b, p1))


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


# -- constructors used by tests, scripts and scenario files -------------------


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> HermitianOperator:
    """GUE sample normalised so the spectrum is roughly within ``[-2, 2] * scale``."""
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return HermitianOperator(scale * (x + x.conj().T) / (2.0 * np.sqrt(2.0 * d)))


def random_unitary(d: int, rng: np.random.Generator) -> UnitaryOperator:
    """Haar-random unitary (QR of a Ginibre matrix with phase fix)."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return UnitaryOperator(q * ph)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    rank = d if rank is None else rank
    x = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = x @ x.conj().T
    return DensityMatrix(m / np.trace(m).real)


def annihilation(d: int) -> np.ndarray:
    """Truncated bosonic lowering operator on Fock states ``|0>..|d-1>``."""
    return np.diag(np.sqrt(np.arange(1, d)), k=1).astype(complex)


def displacement(alpha: complex, d: int) -> UnitaryOperator:
    """``exp(alpha a^+ - alpha* a)`` on the truncated Fock space (exactly unitary)."""
    a = annihilation(d)
    return UnitaryOperator(scipy.linalg.expm(alpha * a.conj().T - np.conj(alpha) * a))


def oscillator(omega: float, d: int) -> HermitianOperator:
    return HermitianOperator.diagonal(omega * np.arange(d))
