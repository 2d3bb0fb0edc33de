"""Work and internal-energy statistics of a displaced thermal free field.

All quantities are radial integrals of the mode weight ``g(k)``. The log of
the work characteristic function is

    lambda^2 int w(k) [ i mu sinc(omega mu) - mu^2/2 * omega coth(beta omega / 2) * sinc(omega mu / 2)^2 ] dk

(unnormalised sinc), which is the usual
``g/omega [i sin(omega mu) + coth(beta omega/2)(cos(omega mu) - 1)]`` written so
that ``omega -> 0`` and complex ``mu`` need no special casing. The coupling
is factored out of every integral, so results scale exactly as ``lambda^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import comb

from ..errors import StripViolationError, ValidationError
from .model import (
    DEFAULT_QUAD,
    FieldConfig,
    QuadOptions,
    k_cutoff,
    omega_coth,
    profile_weight,
    radial_integral,
    sphere_area,
)

MAX_ORDER = 8
STRIP_SLACK = 1e-9


@dataclass(frozen=True)
class CumulantVector:
    kappa: tuple[float, ...]

    def __post_init__(self):
        if not 1 <= len(self.kappa) <= MAX_ORDER:
            raise ValidationError(f"between 1 and {MAX_ORDER} cumulants supported, got {len(self.kappa)}")

    def __len__(self):
        return len(self.kappa)

    def __getitem__(self, j: int) -> float:
        """One-based access: ``cv[1]`` is the mean."""
        if not 1 <= j <= len(self.kappa):
            raise IndexError(j)
        return self.kappa[j - 1]

    def raw_moments(self) -> np.ndarray:
        return raw_moments(self.kappa)


def _check_order(j: int) -> int:
    if int(j) != j or not 1 <= j <= MAX_ORDER:
        raise ValidationError(f"cumulant order must be an integer in 1..{MAX_ORDER}, got {j}")
    return int(j)


def cumulant_work(cfg: FieldConfig, j: int, opts: QuadOptions = DEFAULT_QUAD) -> float:
    """``kappa_j``: odd orders weigh ``omega^(j-1)``, even orders add the thermal ``coth`` factor."""
    j = _check_order(j)
    if cfg.lam == 0:
        return 0.0
    beta = cfg.beta

    if j % 2:
        def integrand(k):
            return profile_weight(cfg, k) * cfg.omega(k) ** (j - 1)
    else:
        def integrand(k):
            w = cfg.omega(k)
            return profile_weight(cfg, k) * w ** (j - 2) * omega_coth(w, beta)

    return cfg.lam**2 * float(radial_integral(cfg, integrand, opts))


def cumulants(cfg: FieldConfig, j_max: int = 4, opts: QuadOptions = DEFAULT_QUAD) -> CumulantVector:
    j_max = _check_order(j_max)
    return CumulantVector(tuple(cumulant_work(cfg, j, opts) for j in range(1, j_max + 1)))


def mean_variance(cfg: FieldConfig, opts: QuadOptions = DEFAULT_QUAD) -> tuple[float, float]:
    """Mean and variance; shared by work and internal-energy change."""
    return cumulant_work(cfg, 1, opts), cumulant_work(cfg, 2, opts)


def du_shift_term(cfg: FieldConfig, opts: QuadOptions = DEFAULT_QUAD) -> float:
    """C-number shift carried by the internal-energy-change operator; the same integral as ``kappa_1``."""
    return cumulant_work(cfg, 1, opts)


def third_moment_gap(cfg: FieldConfig, opts: QuadOptions = DEFAULT_QUAD) -> float:
    """``<W^3> - <dU^3>``. The internal-energy change is gaussian, so the gap is ``kappa_3``."""
    return cumulant_work(cfg, 3, opts)


def _check_strip(cfg: FieldConfig, mu: np.ndarray) -> None:
    bad = np.abs(mu.imag) > cfg.beta + STRIP_SLACK
    if np.any(bad):
        worst = mu[bad][np.argmax(np.abs(mu[bad].imag))]
        raise StripViolationError(f"|Im mu| must not exceed beta = {cfg.beta}; got mu = {worst}")
    if not np.all(np.isfinite(mu)):
        raise ValidationError("mu must be finite")


def _sinc(y):
    # Unnormalised sin(y)/y; the series branch avoids 0/0 for subnormal arguments.
    small = np.abs(y) < 1e-4
    safe = np.where(small, 1.0, y)
    return np.where(small, 1 - y * y / 6, np.sin(safe) / safe)


def log_char_work(cfg: FieldConfig, mu, opts: QuadOptions = DEFAULT_QUAD):
    """Log of the work characteristic function (scalar or array ``mu``)."""
    mu_arr = np.asarray(mu, dtype=complex)
    scalar = mu_arr.ndim == 0
    flat = mu_arr.reshape(-1)
    _check_strip(cfg, flat)
    if cfg.lam == 0 or not np.any(flat):
        out = np.zeros_like(flat)
    else:
        half_sq = 0.5 * flat * flat
        beta = cfg.beta

        def integrand(k):
            w = float(cfg.omega(k))
            term = 1j * flat * _sinc(w * flat)
            term -= half_sq * float(omega_coth(w, beta)) * _sinc(0.5 * w * flat) ** 2
            return float(profile_weight(cfg, k)) * term

        out = cfg.lam**2 * radial_integral(cfg, integrand, opts)
    out = out.reshape(mu_arr.shape)
    return complex(out) if scalar else out


def char_work(cfg: FieldConfig, mu, opts: QuadOptions = DEFAULT_QUAD):
    """Work characteristic function, valid in the strip ``|Im mu| <= beta``."""
    out = np.exp(log_char_work(cfg, mu, opts))
    return complex(out) if np.ndim(out) == 0 else out


def char_du(cfg: FieldConfig, mu, opts: QuadOptions = DEFAULT_QUAD, kappa: tuple[float, float] | None = None):
    """Characteristic function of the (gaussian) internal-energy change."""
    k1, k2 = kappa if kappa is not None else mean_variance(cfg, opts)
    mu = np.asarray(mu, dtype=complex)
    if not np.all(np.isfinite(mu)):
        raise ValidationError("mu must be finite")
    out = np.exp(1j * mu * k1 - 0.5 * mu * mu * k2)
    return complex(out) if out.ndim == 0 else out


def crooks_identity_check(cfg: FieldConfig, mu_grid, opts: QuadOptions = DEFAULT_QUAD) -> float:
    """``max |char(mu + i beta) - char(-mu)|`` over a real grid; zero up to quadrature error."""
    mu = np.atleast_1d(np.asarray(mu_grid))
    if np.iscomplexobj(mu) and np.any(mu.imag != 0):
        raise ValidationError("Crooks check grid must be real")
    mu = mu.real.astype(float)
    lhs = char_work(cfg, mu + 1j * cfg.beta, opts)
    rhs = char_work(cfg, -mu, opts)
    return float(np.max(np.abs(lhs - rhs)))


def zero_work_atom(cfg: FieldConfig, opts: QuadOptions = DEFAULT_QUAD) -> float:
    """Probability mass sitting exactly at ``W = 0``.

    It is the large-``mu`` limit of ``|char_work|``, ``exp(-lam^2 int g coth / omega dk)``.
    The integral diverges for a massless field in one dimension with ``g(0) > 0``,
    where the distribution has no atom.
    """
    if cfg.lam == 0:
        return 1.0
    if cfg.n == 1 and cfg.m == 0:
        if float(profile_weight(cfg, 0.0)) > 0:
            return 0.0

    def integrand(k):
        w = float(cfg.omega(k))
        return float(profile_weight(cfg, k)) * float(omega_coth(w, cfg.beta)) / (w * w) if w > 0 else 0.0

    return math.exp(-(cfg.lam**2) * float(radial_integral(cfg, integrand, opts)))


def raw_moments(kappa) -> np.ndarray:
    """Raw moments ``m_0..m_J`` from cumulants: ``m_j = sum_k C(j-1, k-1) kappa_k m_(j-k)``."""
    kappa = [float(x) for x in kappa]
    m = [1.0]
    for j in range(1, len(kappa) + 1):
        m.append(sum(comb(j - 1, k - 1, exact=True) * kappa[k - 1] * m[j - k] for k in range(1, j + 1)))
    return np.array(m)


class MomentComparison(NamedTuple):
    j: int
    work: float
    du: float
    gap: float
    ok: bool


def moment_inequality_check(
    cfg: FieldConfig, j_max: int = MAX_ORDER, opts: QuadOptions = DEFAULT_QUAD, rtol: float = 1e-9
) -> list[MomentComparison]:
    """Compare raw moments of work and of the internal-energy change for ``j = 1..j_max``."""
    cv = cumulants(cfg, j_max, opts)
    mw = raw_moments(cv.kappa)
    mu_ = raw_moments(cv.kappa[:2] + (0.0,) * (j_max - 2)) if j_max >= 2 else raw_moments(cv.kappa)
    rows = []
    for j in range(1, j_max + 1):
        gap = mw[j] - mu_[j]
        scale = max(abs(mw[j]), abs(mu_[j]))
        rows.append(MomentComparison(j, float(mw[j]), float(mu_[j]), float(gap), bool(gap >= -rtol * scale)))
    return rows


def naive_variance_divergence_coefficient(cfg: FieldConfig, opts: QuadOptions = DEFAULT_QUAD) -> float:
    """Finite coefficient ``2 int d^n k omega^2 e^(beta omega) / (e^(beta omega) - 1)^2``.

    It multiplies the coincident-point divergence that separates the variance
    of two independent energy measurements from that of the energy-change
    operator. Only the field mass, dimension and temperature enter.
    """
    beta, n = cfg.beta, cfg.n
    area = sphere_area(n)

    def integrand(k):
        x = 0.5 * beta * float(cfg.omega(k))
        # omega^2 / (4 sinh^2 x) = (x / sinh x)^2 / beta^2, finite at omega = 0.
        ratio = 1.0 if x == 0 else (x / math.sinh(x) if x < 350 else 0.0)
        return area * k ** (n - 1) * ratio**2 / beta**2

    k_max = 120.0 / beta
    opts_div = QuadOptions(epsabs=0.0, epsrel=opts.epsrel, limit=opts.limit)
    return 2.0 * float(radial_integral(cfg, integrand, opts_div, k_max=k_max))


def single_mode_char(alpha_mod2: float, omega: float, beta: float, mu):
    """Work characteristic function of one thermal mode displaced by ``|alpha|^2``."""
    if alpha_mod2 < 0 or omega <= 0 or beta <= 0:
        raise ValidationError("need alpha_mod2 >= 0, omega > 0, beta > 0")
    mu = np.asarray(mu, dtype=complex)
    coth = 1.0 / math.tanh(0.5 * beta * omega)
    out = np.exp(alpha_mod2 * (1j * np.sin(omega * mu) + coth * (np.cos(omega * mu) - 1)))
    return complex(out) if out.ndim == 0 else out


__all__ = [
    "CumulantVector",
    "MomentComparison",
    "char_du",
    "char_work",
    "crooks_identity_check",
    "cumulant_work",
    "cumulants",
    "du_shift_term",
    "k_cutoff",
    "log_char_work",
    "mean_variance",
    "moment_inequality_check",
    "naive_variance_divergence_coefficient",
    "raw_moments",
    "single_mode_char",
    "third_moment_gap",
    "zero_work_atom",
]
