"""Mode amplitudes of the displacement and its global phase."""

from __future__ import annotations

import math

import numpy as np

from ..errors import QuadratureNonConvergenceError, TimeProfileUnavailableError, ValidationError
from .model import FieldConfig, sphere_area
from .profiles import GAUSSIAN

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def coherent_amplitude(cfg: FieldConfig, k_vector):
    """Displacement amplitude ``alpha(k) = -i lam chi~(omega) conj(F~(k)) / sqrt(2 (2 pi)^n omega)``.

    ``k_vector`` has trailing dimension ``n``; only ``|k|`` matters for an
    isotropic smearing. Needs gaussian profiles (tabulated ones carry no phase).
    """
    k = np.asarray(k_vector, dtype=float)
    if k.shape[-1:] != (cfg.n,):
        raise ValidationError(f"k_vector must have trailing dimension {cfg.n}, got shape {k.shape}")
    kr = np.linalg.norm(k, axis=-1)
    omega = cfg.omega(kr)
    if np.any(omega == 0):
        raise ValidationError("the massless zero mode has no finite amplitude")
    chi = cfg.chi.transform(omega, 1)
    f = cfg.f.transform(kr, cfg.n)
    alpha = -1j * cfg.lam * chi * np.conj(f) / np.sqrt(2 * (2 * math.pi) ** cfg.n * omega)
    return complex(alpha) if alpha.ndim == 0 else alpha


class TimeProfile:
    """Real switching function on ``[knots[0], knots[-1]]``, zero outside.

    ``func`` must be vectorised and smooth between consecutive ``knots``.
    """

    def __init__(self, func, knots):
        knots = np.asarray(knots, dtype=float)
        if knots.ndim != 1 or len(knots) < 2 or np.any(np.diff(knots) <= 0):
            raise ValidationError("time profile needs at least two strictly increasing knots")
        self.func = func
        self.knots = knots

    @property
    def t_start(self) -> float:
        return float(self.knots[0])

    @property
    def t_end(self) -> float:
        return float(self.knots[-1])

    @classmethod
    def from_samples(cls, t, values) -> TimeProfile:
        """Linear interpolation through samples; the samples themselves are the knots."""
        t = np.asarray(t, dtype=float)
        v = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
            raise ValidationError("time samples need two equal-length 1-d arrays of length >= 2")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))) or np.any(np.diff(t) <= 0):
            raise ValidationError("time samples must be finite with strictly increasing times")
        return cls(lambda s: np.interp(s, t, v, left=0.0, right=0.0), t)

    @classmethod
    def gaussian(cls, amplitude: float, width: float, reach: float = 7.0) -> TimeProfile:
        knots = np.linspace(-reach * width, reach * width, int(8 * reach) + 1)
        return cls(lambda s: amplitude * np.exp(-((s / width) ** 2)), knots)


def _resolve_time_profile(cfg: FieldConfig, chi_time) -> TimeProfile:
    if isinstance(chi_time, TimeProfile):
        return chi_time
    if chi_time is not None:
        t, v = chi_time
        return TimeProfile.from_samples(t, v)
    if cfg.chi.form == GAUSSIAN:
        return TimeProfile.gaussian(cfg.chi.amplitude, cfg.chi.width)
    raise TimeProfileUnavailableError("the phase needs the switching function in time; pass samples")


def _ordered_rule(profile: TimeProfile, omega: np.ndarray, knots: np.ndarray, q: int) -> np.ndarray:
    x, wq = np.polynomial.legendre.leggauss(q)
    a, b = knots[:-1, None], knots[1:, None]
    t = 0.5 * (b - a) * (x + 1) + a  # (S, q)
    w = 0.5 * (b - a) * wq
    c = profile.func(t)
    # Later-segment t against every earlier segment: running cosine/sine transforms.
    ph = np.multiply.outer(t, omega)  # (S, q, K)
    wc = (w * c)[..., None]
    cos_part = np.sum(wc * np.cos(ph), axis=1)  # (S, K)
    sin_part = np.sum(wc * np.sin(ph), axis=1)
    run_cos = np.cumsum(cos_part, axis=0) - cos_part
    run_sin = np.cumsum(sin_part, axis=0) - sin_part
    total = np.sum(sin_part * run_cos - cos_part * run_sin, axis=0)
    # Both times inside one segment: map t' onto [a, t] with its own rule.
    tp = a[..., None] + (t - a)[..., None] * 0.5 * (x + 1)  # (S, q, q)
    wp = (t - a)[..., None] * 0.5 * wq
    pair = (w * c)[..., None] * wp * profile.func(tp)
    lag = (t[..., None] - tp).ravel()
    pair = pair.ravel()
    for lo in range(0, len(omega), 64):
        chunk = omega[lo : lo + 64]
        total[lo : lo + 64] += pair @ np.sin(np.multiply.outer(lag, chunk))
    return total


def ordered_sine_integral(profile: TimeProfile, omega, rtol: float = 1e-9) -> np.ndarray:
    """``I(omega) = int dt chi(t) int_{-inf}^t dt' chi(t') sin(omega (t - t'))`` for each omega.

    Composite Gauss-Legendre over the profile's knots, subdivided so that no
    segment spans more than a radian of the fastest oscillation. Segments are
    refined until an 8-point and a 12-point rule agree within ``rtol``.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    knots = profile.knots
    w_max = float(np.max(np.abs(omega))) if omega.size else 0.0
    split = max(1, int(math.ceil(w_max * float(np.max(np.diff(knots))))))
    for _ in range(8):
        if split > 1:
            fine = np.linspace(0.0, 1.0, split + 1)[:-1]
            base = knots[:-1, None] + np.diff(knots)[:, None] * fine
            grid = np.append(base.ravel(), knots[-1])
        else:
            grid = knots
        lo = _ordered_rule(profile, omega, grid, 8)
        hi = _ordered_rule(profile, omega, grid, 12)
        scale = max(float(np.max(np.abs(hi))), 1e-300)
        if float(np.max(np.abs(hi - lo))) <= rtol * scale:
            return hi
        split *= 2
    raise QuadratureNonConvergenceError("ordered time integral did not converge")


def _smearing_cutoff(cfg: FieldConfig, tail: float = 1e-16) -> float:
    if math.isfinite(cfg.f.support):
        return cfg.f.support
    k_max = 1.0
    for _ in range(200):
        grid = np.linspace(0.0, k_max, 2049)
        env = cfg.f.mag2(grid, cfg.n) * (1 + grid) ** (cfg.n + 1)
        if env[-1] <= tail * env.max():
            return k_max
        k_max *= 1.5
    raise QuadratureNonConvergenceError("smearing profile decays too slowly for a radial cutoff")


def phase_theta(cfg: FieldConfig, chi_time=None, tol: float = 1e-6, max_panels: int = 512) -> float:
    """Global phase of the displacement unitary.

    ``theta = lam^2 int d^n k |F~(k)|^2 / ((2 pi)^n omega) I(omega)``. The time
    integral ``I`` is refined adaptively; the radial integral uses composite
    16-point Gauss-Legendre panels, doubled until successive estimates agree
    within ``tol`` (relative, absolute below unit scale).

    ``chi_time`` may be ``None`` (gaussian switching closed form), a
    ``(times, values)`` pair of samples, or a :class:`TimeProfile`.
    """
    profile = _resolve_time_profile(cfg, chi_time)
    if cfg.lam == 0:
        return 0.0
    n = cfg.n
    k_max = _smearing_cutoff(cfg)
    pref = cfg.lam**2 * sphere_area(n) / (2 * math.pi) ** n
    breaks = [b for b in cfg.f.breakpoints if 0 < b < k_max]

    def estimate(panels: int) -> float:
        edges = np.unique(np.concatenate([np.linspace(0.0, k_max, panels + 1), breaks]))
        a, b = edges[:-1, None], edges[1:, None]
        k = (0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)).ravel()
        wts = (0.5 * (b - a) * _GL_WEIGHTS).ravel()
        omega = cfg.omega(k)
        vals = cfg.f.mag2(k, n) * k ** (n - 1) * ordered_sine_integral(profile, omega) / omega
        return pref * float(np.dot(wts, vals))

    panels = 4
    prev = estimate(panels)
    while panels < max_panels:
        panels *= 2
        cur = estimate(panels)
        if abs(cur - prev) <= tol * max(abs(cur), 1.0):
            return cur
        prev = cur
    raise QuadratureNonConvergenceError(f"phase integral not converged with {max_panels} panels")
