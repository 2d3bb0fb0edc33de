"""Work density on a uniform grid by discrete inversion of the characteristic function."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import NumericalError, ValidationError, WindowTooNarrowError
from .model import DEFAULT_QUAD, FieldConfig, QuadOptions
from .statistics import char_work, mean_variance, zero_work_atom

MIN_POINTS = 256
BOUNDARY_TOL = 1e-8
IMAG_TOL = 1e-6
COVERAGE_SIGMAS = 8.0


@dataclass(frozen=True)
class GridDistribution:
    w_values: np.ndarray
    density: np.ndarray

    @property
    def spacing(self) -> float:
        return float(self.w_values[1] - self.w_values[0])

    @property
    def max_imag(self) -> float:
        return float(np.max(np.abs(self.density.imag)))

    def total(self) -> float:
        return float(np.trapezoid(self.density.real, self.w_values))

    def moment(self, j: int) -> float:
        return float(np.trapezoid(self.w_values**j * self.density.real, self.w_values))

    def mean(self) -> float:
        return self.moment(1) / self.total()

    def central_moment(self, j: int) -> float:
        c = self.w_values - self.mean()
        return float(np.trapezoid(c**j * self.density.real, self.w_values)) / self.total()

    def variance(self) -> float:
        return self.central_moment(2)

    def skewness(self) -> float:
        return self.central_moment(3) / self.variance() ** 1.5

    def bin_masses(self) -> np.ndarray:
        return self.density.real * self.spacing


def _check_points(n_points: int) -> int:
    if int(n_points) != n_points or n_points < MIN_POINTS or n_points & (n_points - 1):
        raise ValidationError(f"grid size must be a power of two >= {MIN_POINTS}, got {n_points}")
    return int(n_points)


def conjugate_mu_grid(w_min: float, w_max: float, n_points: int) -> np.ndarray:
    """``mu_k = (k - N/2) * 2 pi / (w_max - w_min)`` for ``k = 0..N-1``."""
    dmu = 2 * math.pi / (w_max - w_min)
    return (np.arange(n_points) - n_points // 2) * dmu


def invert_samples(char_values: np.ndarray, w_min: float, w_max: float) -> GridDistribution:
    """Density on ``w_min + j (w_max - w_min)/N`` from samples on :func:`conjugate_mu_grid`.

    ``p(w_j) = (dmu / 2 pi) sum_k c_k exp(-i w_j mu_k)``, evaluated with one FFT.
    """
    c = np.asarray(char_values, dtype=complex)
    n = len(c)
    mu = conjugate_mu_grid(w_min, w_max, n)
    dmu = mu[1] - mu[0]
    sign = np.where(np.arange(n) % 2, -1.0, 1.0)
    density = (dmu / (2 * math.pi)) * sign * np.fft.fft(c * np.exp(-1j * w_min * mu))
    w = w_min + np.arange(n) * (w_max - w_min) / n
    return GridDistribution(w_values=w, density=density)


def auto_window(cfg: FieldConfig, sigmas: float = 12.0, opts: QuadOptions = DEFAULT_QUAD) -> tuple[float, float]:
    """Window ``kappa_1 +- sigmas sqrt(kappa_2)``; falls back to ``[-1, 1]`` for a trivial process."""
    k1, k2 = mean_variance(cfg, opts)
    half = sigmas * math.sqrt(k2)
    if half == 0:
        return -1.0, 1.0
    return k1 - half, k1 + half


def dist_work_grid(
    cfg: FieldConfig,
    w_min: float,
    w_max: float,
    n_points: int,
    opts: QuadOptions = DEFAULT_QUAD,
) -> GridDistribution:
    """Invert the work characteristic function onto ``n_points`` cells of ``[w_min, w_max)``.

    Raises :class:`WindowTooNarrowError` when the characteristic function has
    not decayed below ``1e-8`` at the edge of the conjugate grid, which is
    also the case whenever the distribution has an atom (gapped or
    higher-dimensional fields keep a finite weight at ``W = 0``). The decoupled
    process is the exception: its point mass is returned as a one-bin spike.
    """
    n_points = _check_points(n_points)
    if not (math.isfinite(w_min) and math.isfinite(w_max)) or w_max <= w_min:
        raise ValidationError(f"need finite w_min < w_max, got [{w_min}, {w_max}]")
    k1, k2 = mean_variance(cfg, opts)
    spread = COVERAGE_SIGMAS * math.sqrt(k2)
    if k1 - spread < w_min or k1 + spread > w_max:
        raise ValidationError(
            f"window [{w_min}, {w_max}] does not cover mean +- {COVERAGE_SIGMAS:g} sd = "
            f"[{k1 - spread:.6g}, {k1 + spread:.6g}]"
        )
    mu = conjugate_mu_grid(w_min, w_max, n_points)
    c = char_work(cfg, mu, opts)
    edge = max(abs(c[0]), abs(c[-1]))
    # With zero coupling the distribution is an exact point mass at W = 0; the
    # inversion then returns a single-bin spike when 0 falls on the grid.
    if edge > BOUNDARY_TOL and cfg.lam != 0:
        raise WindowTooNarrowError(
            f"|char| = {edge:.3g} at |mu| = {abs(mu[0]):.4g}; increase the grid size "
            "(or the distribution has a point mass)"
        )
    dist = invert_samples(c, w_min, w_max)
    if dist.max_imag > IMAG_TOL:
        raise NumericalError(f"density has an imaginary part of {dist.max_imag:.3g} for a thermal input")
    return dist


def dist_work_auto(
    cfg: FieldConfig, max_points: int = 1 << 16, opts: QuadOptions = DEFAULT_QUAD
) -> GridDistribution:
    """Pick the window from the cumulants and the smallest grid whose edge condition holds.

    The grid size is doubled while probing only the outermost ``mu``; the full
    grid is computed once at the end.
    """
    w_min, w_max = auto_window(cfg, opts=opts)
    if cfg.lam != 0:
        atom = zero_work_atom(cfg, opts)
        if atom > BOUNDARY_TOL:
            raise WindowTooNarrowError(f"the distribution has a point mass {atom:.6g} at W = 0")
    n = MIN_POINTS
    while cfg.lam != 0 and abs(char_work(cfg, conjugate_mu_grid(w_min, w_max, n)[0], opts)) > BOUNDARY_TOL:
        if 2 * n > max_points:
            raise WindowTooNarrowError(f"|char| has not decayed below {BOUNDARY_TOL:g} with {n} points")
        n *= 2
    return dist_work_grid(cfg, w_min, w_max, n, opts)
