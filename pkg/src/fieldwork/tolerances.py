from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared across the finite-dimensional engine.

    ``construction`` bounds Hermiticity/unitarity/trace residuals when an
    object is built, ``reconstruction`` bounds ``V diag(l) V^+ - A``, ``psd``
    is how negative a density-matrix eigenvalue may be, and ``merge`` is the
    relative (to the spectral span) width within which energies or gaps are
    identified.
    """

    construction: float = 1e-12
    reconstruction: float = 1e-10
    psd: float = 1e-10
    merge: float = 1e-9


DEFAULT = Tolerances()
