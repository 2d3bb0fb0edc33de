"""Field configuration, mode weight and the shared radial quadrature."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad_vec
from scipy.special import gamma

from ..errors import QuadratureNonConvergenceError, ValidationError
from .profiles import SpectralProfile

SUPPORTED_DIMS = (1, 2, 3)


@dataclass(frozen=True)
class QuadOptions:
    """Adaptive Gauss-Kronrod settings shared by every radial integral."""

    epsabs: float = 1e-10
    epsrel: float = 1e-8
    limit: int = 2000
    # k_max is pushed out until the tail envelope is below this fraction of its peak.
    tail: float = 1e-16


DEFAULT_QUAD = QuadOptions()


@dataclass(frozen=True)
class FieldConfig:
    n: int
    m: float
    beta: float
    lam: float
    chi: SpectralProfile
    f: SpectralProfile

    def __post_init__(self):
        if self.n not in SUPPORTED_DIMS:
            raise ValidationError(f"spatial dimension must be one of {SUPPORTED_DIMS}, got {self.n}", path="n")
        if not math.isfinite(self.m) or self.m < 0:
            raise ValidationError(f"mass must be finite and >= 0, got {self.m}", path="m")
        if not math.isfinite(self.beta) or self.beta <= 0:
            raise ValidationError(f"beta must be finite and > 0, got {self.beta}", path="beta")
        if not math.isfinite(self.lam):
            raise ValidationError(f"coupling must be finite, got {self.lam}", path="lambda")

    @classmethod
    def standard(cls, **overrides) -> FieldConfig:
        """n=1 massless field at beta=1, unit coupling and unit gaussian profiles."""
        base = dict(n=1, m=0.0, beta=1.0, lam=1.0, chi=SpectralProfile.gaussian(), f=SpectralProfile.gaussian())
        base.update(overrides)
        return cls(**base)

    def replace(self, **changes) -> FieldConfig:
        d = dict(n=self.n, m=self.m, beta=self.beta, lam=self.lam, chi=self.chi, f=self.f)
        d.update(changes)
        return FieldConfig(**d)

    def omega(self, k):
        k = np.asarray(k, dtype=float)
        return np.sqrt(self.m * self.m + k * k)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "beta": self.beta,
            "lambda": self.lam,
            "chi": self.chi.to_dict(),
            "f": self.f.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> FieldConfig:
        try:
            return cls(
                n=int(d["n"]),
                m=float(d.get("m", 0.0)),
                beta=float(d["beta"]),
                lam=float(d.get("lambda", 1.0)),
                chi=SpectralProfile.from_dict(d.get("chi", {"form": "gaussian"})),
                f=SpectralProfile.from_dict(d.get("f", {"form": "gaussian"})),
            )
        except KeyError as exc:
            raise ValidationError("missing required key", path=str(exc.args[0])) from exc


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere in ``n`` dimensions (2, 2 pi, 4 pi for n = 1, 2, 3)."""
    return 2 * math.pi ** (n / 2) / gamma(n / 2)


def profile_weight(cfg: FieldConfig, k):
    """Mode weight per unit radial wavenumber with the coupling stripped out."""
    k = np.asarray(k, dtype=float)
    n = cfg.n
    jac = sphere_area(n) * k ** (n - 1)
    return jac * cfg.chi.mag2(cfg.omega(k), 1) * cfg.f.mag2(k, n) / (2 * (2 * math.pi) ** n)


def radial_weight(cfg: FieldConfig, k):
    """``g(k)``: coupling-weighted density of excited modes at radial wavenumber ``k >= 0``."""
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise ValidationError("radial wavenumber must be non-negative")
    g = cfg.lam**2 * profile_weight(cfg, k)
    return float(g) if g.ndim == 0 else g


def omega_coth(omega, beta: float):
    """``omega * coth(beta omega / 2)``, continuous at ``omega = 0`` where it equals ``2 / beta``."""
    omega = np.asarray(omega, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = omega / np.tanh(0.5 * beta * omega)
    return np.where(omega > 0, val, 2.0 / beta)


def _breakpoints(cfg: FieldConfig) -> np.ndarray:
    pts = list(cfg.f.breakpoints)
    for w in cfg.chi.breakpoints:
        if w >= cfg.m:
            pts.append(math.sqrt(w * w - cfg.m * cfg.m))
    return np.unique(np.asarray(pts, dtype=float))


def k_cutoff(cfg: FieldConfig, opts: QuadOptions = DEFAULT_QUAD) -> float:
    """Radial cutoff beyond which every integrand used here is negligible.

    Compactly supported tabulated profiles give the cutoff directly. Otherwise
    the envelope ``g(k) (1 + omega)^9 (1 + 2 / (beta (1 + omega)))`` (covering the
    eighth cumulant) is scanned outward until it drops below ``opts.tail``
    of its running maximum.
    """
    bound = cfg.f.support
    if math.isfinite(cfg.chi.support):
        bound = min(bound, math.sqrt(max(cfg.chi.support**2 - cfg.m**2, 0.0)))
    if math.isfinite(bound):
        return bound

    def envelope(k):
        w = cfg.omega(k)
        return profile_weight(cfg, k) * (1 + w) ** 9 * (1 + 2 / (cfg.beta * (1 + w)))

    k_max = 1.0
    for _ in range(200):
        grid = np.linspace(0.0, k_max, 2049)
        env = envelope(grid)
        peak = env.max()
        if peak == 0.0:
            return k_max
        if env[-1] <= opts.tail * peak:
            return k_max
        k_max *= 1.5
    raise QuadratureNonConvergenceError("could not find a radial cutoff; profile decays too slowly")


def radial_integral(cfg: FieldConfig, integrand, opts: QuadOptions = DEFAULT_QUAD, k_max: float | None = None):
    """Adaptively integrate ``integrand(k)`` (scalar or array valued) over ``[0, k_max]``."""
    if k_max is None:
        k_max = k_cutoff(cfg, opts)
    if k_max <= 0:
        return 0.0 * integrand(np.float64(0.0))
    pts = [p for p in _breakpoints(cfg) if 0 < p < k_max]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        res, err, info = quad_vec(
            integrand,
            0.0,
            k_max,
            epsabs=opts.epsabs,
            epsrel=opts.epsrel,
            norm="max",
            limit=opts.limit,
            points=pts or None,
            full_output=True,
        )
    scale = float(np.max(np.abs(res))) if np.size(res) else 0.0
    if info.status != 0 and err > 10 * max(opts.epsabs, opts.epsrel * scale):
        raise QuadratureNonConvergenceError(
            f"radial quadrature stopped with status {info.status} and error estimate {err:.3g}"
        )
    return res
