"""Independent reference computations used only by the tests."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import dawsn

from fieldwork import qsys
from fieldwork.field import FieldConfig, sphere_area

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(20)


def gauss_legendre(func, a: float = 0.0, b: float = 40.0, panels: int = 400):
    """Fixed-order composite 20-point Gauss-Legendre rule (vectorised ``func``)."""
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    x = (0.5 * (hi - lo) * _NODES + 0.5 * (hi + lo)).ravel()
    w = (0.5 * (hi - lo) * _WEIGHTS).ravel()
    vals = func(x)
    return np.tensordot(w, vals, axes=(0, 0))


def mode_weight(cfg: FieldConfig, k):
    """``g(k)`` written out directly from the gaussian closed forms."""
    k = np.asarray(k, float)
    n = cfg.n
    omega = np.sqrt(cfg.m**2 + k**2)
    a_c, w_c = cfg.chi.amplitude, cfg.chi.width
    a_f, w_f = cfg.f.amplitude, cfg.f.width
    chi2 = (a_c * w_c * math.sqrt(math.pi)) ** 2 * np.exp(-(w_c * omega) ** 2 / 2)
    f2 = (a_f * (w_f * math.sqrt(math.pi)) ** n) ** 2 * np.exp(-(w_f * k) ** 2 / 2)
    return cfg.lam**2 * sphere_area(n) * k ** (n - 1) * chi2 * f2 / (2 * (2 * math.pi) ** n)


def coth(x):
    return 1.0 / np.tanh(x)


def cumulant(cfg: FieldConfig, j: int) -> float:
    def f(k):
        om = np.sqrt(cfg.m**2 + k**2)
        base = mode_weight(cfg, k) * om ** (j - 1)
        return base * coth(cfg.beta * om / 2) if j % 2 == 0 else base

    return float(gauss_legendre(f))


def log_char(cfg: FieldConfig, mu) -> np.ndarray:
    """Exponent in its textbook ``sin`` / ``cos`` form (complex ``mu`` allowed)."""
    mu = np.atleast_1d(np.asarray(mu, complex))

    def f(k):
        om = np.sqrt(cfg.m**2 + k**2)[:, None]
        g = mode_weight(cfg, k)[:, None]
        return g / om * (1j * np.sin(om * mu) + coth(cfg.beta * om / 2) * (np.cos(om * mu) - 1))

    return gauss_legendre(f)


def du_log_char(cfg: FieldConfig, mu) -> np.ndarray:
    """Direct quadrature of ``int g [i mu - mu^2/2 omega coth]``."""
    mu = np.atleast_1d(np.asarray(mu, complex))

    def f(k):
        om = np.sqrt(cfg.m**2 + k**2)[:, None]
        g = mode_weight(cfg, k)[:, None]
        return g * (1j * mu - 0.5 * mu**2 * om * coth(cfg.beta * om / 2))

    return gauss_legendre(f, a=1e-12)


def theta_dawson(cfg: FieldConfig) -> float:
    """Phase for gaussian switching from the closed-form ordered sine integral."""
    a, w = cfg.chi.amplitude, cfg.chi.width
    n = cfg.n

    def f(k):
        om = np.sqrt(cfg.m**2 + k**2)
        f2 = cfg.f.mag2(k, n)
        inner = a * a * w * w * math.sqrt(math.pi) * dawsn(om * w / math.sqrt(2))
        return sphere_area(n) * k ** (n - 1) * f2 * inner / om / (2 * math.pi) ** n

    return cfg.lam**2 * float(gauss_legendre(f, 1e-12, 40.0))


def theta_riemann(cfg: FieldConfig, t, chi, k_max: float = 12.0, nk: int = 1200) -> float:
    """Brute-force Riemann sum over (k, t, t') for a sampled switching function.

    Uses ``sin(o (t - t')) = sin(o t) cos(o t') - cos(o t) sin(o t')`` so each
    wavenumber costs two matrix-vector products with the ordering mask.
    """
    t = np.asarray(t, float)
    chi = np.asarray(chi, float)
    dt = t[1] - t[0]
    dk = k_max / nk
    k = (np.arange(nk) + 0.5) * dk
    om = np.sqrt(cfg.m**2 + k**2)
    lower = np.tril(np.ones((len(t), len(t))), -1) + 0.5 * np.eye(len(t))
    s = chi * np.sin(np.outer(om, t))
    c = chi * np.cos(np.outer(om, t))
    inner = (np.sum((s @ lower) * c, axis=1) - np.sum((c @ lower) * s, axis=1)) * dt * dt
    radial = sphere_area(cfg.n) * k ** (cfg.n - 1) * cfg.f.mag2(k, cfg.n) / ((2 * math.pi) ** cfg.n * om)
    return cfg.lam**2 * float(np.sum(radial * inner)) * dk


def fd_derivatives(f, h: float, points: int = 7):
    """First four derivatives at 0 from central stencils on ``f(mu)`` samples.

    ``points=5`` gives the standard five-point formulas (d3, d4 second order);
    ``points=7`` raises d3, d4 to fourth order.
    """
    if points == 5:
        m2, m1, c, p1, p2 = f(np.arange(-2, 3) * h)
        d1 = (m2 - 8 * m1 + 8 * p1 - p2) / (12 * h)
        d2 = (-m2 + 16 * m1 - 30 * c + 16 * p1 - p2) / (12 * h * h)
        d3 = (-m2 + 2 * m1 - 2 * p1 + p2) / (2 * h**3)
        d4 = (m2 - 4 * m1 + 6 * c - 4 * p1 + p2) / h**4
        return d1, d2, d3, d4
    if points != 7:
        raise ValueError("points must be 5 or 7")
    m3, m2, m1, c, p1, p2, p3 = f(np.arange(-3, 4) * h)
    d1 = (-m3 + 9 * m2 - 45 * m1 + 45 * p1 - 9 * p2 + p3) / (60 * h)
    d2 = (2 * m3 - 27 * m2 + 270 * m1 - 490 * c + 270 * p1 - 27 * p2 + 2 * p3) / (180 * h**2)
    d3 = (m3 - 8 * m2 + 13 * m1 - 13 * p1 + 8 * p2 - p3) / (8 * h**3)
    d4 = (-m3 + 12 * m2 - 39 * m1 + 56 * c - 39 * p1 + 12 * p2 - p3) / (6 * h**4)
    return d1, d2, d3, d4


def _i_scaled(d):
    return [((-1j) ** (j + 1) * d[j]).real for j in range(4)]


def cumulants_from_log_char(f, h: float = 2.5e-3, points: int = 7):
    """``kappa_j = (-i)^j d^j/dmu^j log char`` at zero."""
    return _i_scaled(fd_derivatives(f, h, points))


def raw_moments_from_char(f, h: float = 2.5e-3, points: int = 7):
    """``<X^j> = (-i)^j d^j/dmu^j char`` at zero."""
    return _i_scaled(fd_derivatives(f, h, points))


def oscillator_displacement_process(omega: float, beta: float, alpha: complex, dim: int = 40):
    h = qsys.oscillator(omega, dim)
    return qsys.ProcessSpec(qsys.gibbs(h, beta), h, h, qsys.displacement(alpha, dim))
