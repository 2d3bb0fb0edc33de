"""Switching and smearing profiles, described by their Fourier transforms.

Transforms follow ``F~(k) = int F(x) exp(i k.x) d^n x``. A gaussian
``A exp(-|x|^2 / w^2)`` in ``n`` dimensions has the real, positive transform
``A (w sqrt(pi))^n exp(-w^2 |k|^2 / 4)``.

Tabulated profiles carry only ``|transform|^2`` sampled against the
(non-negative) argument, linearly interpolated and zero past the last row.
They are read from / written to a two-column CSV whose first line is a
``# profile: chi|f, units: natural`` header.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import PhaseUnavailableError, TimeProfileUnavailableError, ValidationError

GAUSSIAN = "gaussian"
TABULATED = "tabulated"

_HEADER = re.compile(r"^#\s*profile:\s*(chi|f)\s*,\s*units:\s*natural\s*$")


@dataclass(frozen=True)
class SpectralProfile:
    form: str
    amplitude: float = 1.0
    width: float = 1.0
    arguments: np.ndarray | None = field(default=None, repr=False, compare=False)
    mag2_samples: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.form == GAUSSIAN:
            if not (math.isfinite(self.amplitude) and math.isfinite(self.width)) or self.width <= 0:
                raise ValidationError(
                    f"gaussian profile needs finite amplitude and width > 0 (got {self.amplitude}, {self.width})"
                )
        elif self.form == TABULATED:
            x = np.asarray(self.arguments, dtype=float)
            y = np.asarray(self.mag2_samples, dtype=float)
            if x.ndim != 1 or x.shape != y.shape or len(x) < 2:
                raise ValidationError("tabulated profile needs two equal-length columns with at least 2 rows")
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
                raise ValidationError("tabulated profile has non-finite entries")
            if x[0] < 0 or np.any(np.diff(x) <= 0):
                raise ValidationError("tabulated arguments must be non-negative and strictly increasing")
            if np.any(y < 0):
                raise ValidationError("squared magnitudes must be non-negative")
            object.__setattr__(self, "arguments", x)
            object.__setattr__(self, "mag2_samples", y)
        else:
            raise ValidationError(f"unknown profile form {self.form!r}")

    @classmethod
    def gaussian(cls, amplitude: float = 1.0, width: float = 1.0) -> SpectralProfile:
        return cls(GAUSSIAN, float(amplitude), float(width))

    @classmethod
    def tabulated(cls, arguments, mag2) -> SpectralProfile:
        return cls(TABULATED, arguments=np.asarray(arguments, float), mag2_samples=np.asarray(mag2, float))

    @property
    def support(self) -> float:
        """Largest argument with non-zero weight (``inf`` for gaussians)."""
        return math.inf if self.form == GAUSSIAN else float(self.arguments[-1])

    @property
    def breakpoints(self) -> np.ndarray:
        return np.empty(0) if self.form == GAUSSIAN else self.arguments

    def transform(self, x, dim: int = 1):
        """Complex transform at radial argument ``x`` (gaussian profiles only)."""
        if self.form != GAUSSIAN:
            raise PhaseUnavailableError("tabulated profiles store |transform|^2 only")
        x = np.asarray(x, dtype=float)
        w = self.width
        return self.amplitude * (w * math.sqrt(math.pi)) ** dim * np.exp(-(w * x) ** 2 / 4) + 0j

    def mag2(self, x, dim: int = 1):
        """``|transform(x)|^2`` in ``dim`` dimensions."""
        x = np.asarray(x, dtype=float)
        if self.form == GAUSSIAN:
            w = self.width
            return (self.amplitude * (w * math.sqrt(math.pi)) ** dim) ** 2 * np.exp(-((w * x) ** 2) / 2)
        return np.interp(x, self.arguments, self.mag2_samples, right=0.0)

    def time_domain(self, t):
        """Position/time-space profile ``A exp(-t^2 / w^2)`` (gaussian profiles only)."""
        if self.form != GAUSSIAN:
            raise TimeProfileUnavailableError("no time-domain form for a tabulated |transform|^2")
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.exp(-((t / self.width) ** 2))

    def to_dict(self) -> dict:
        if self.form == GAUSSIAN:
            return {"form": GAUSSIAN, "amplitude": self.amplitude, "width": self.width}
        return {
            "form": TABULATED,
            "arguments": self.arguments.tolist(),
            "mag2": self.mag2_samples.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> SpectralProfile:
        if d.get("form") == GAUSSIAN:
            return cls.gaussian(d.get("amplitude", 1.0), d.get("width", 1.0))
        if d.get("form") == TABULATED:
            if "path" in d:
                return read_profile_csv(d["path"])[1]
            return cls.tabulated(d["arguments"], d["mag2"])
        raise ValidationError(f"unknown profile form {d.get('form')!r}")


def parse_profile_spec(text: str) -> SpectralProfile:
    """Parse a CLI profile spec: ``gaussian:A:w`` or ``tabulated:PATH``."""
    kind, _, rest = text.partition(":")
    if kind == GAUSSIAN:
        parts = rest.split(":")
        if len(parts) != 2:
            raise ValidationError(f"expected gaussian:AMPLITUDE:WIDTH, got {text!r}")
        try:
            a, w = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise ValidationError(f"bad number in profile spec {text!r}") from exc
        return SpectralProfile.gaussian(a, w)
    if kind == TABULATED and rest:
        return read_profile_csv(rest)[1]
    raise ValidationError(f"unrecognised profile spec {text!r}")


def read_profile_csv(path) -> tuple[str, SpectralProfile]:
    """Read a tabulated profile; returns ``(role, profile)`` with role ``"chi"`` or ``"f"``."""
    text = Path(path).read_text(encoding="utf-8")
    return loads_profile_csv(text, source=str(path))


def loads_profile_csv(text: str, source: str = "<string>") -> tuple[str, SpectralProfile]:
    lines = text.splitlines()
    if not lines or not _HEADER.match(lines[0].strip()):
        raise ValidationError("missing '# profile: chi|f, units: natural' header", path=f"{source}:1")
    role = _HEADER.match(lines[0].strip()).group(1)
    xs, ys = [], []
    for lineno, row in enumerate(csv.reader(io.StringIO("\n".join(lines[1:]))), start=2):
        if not row or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 2:
            raise ValidationError(f"expected 2 columns, got {len(row)}", path=f"{source}:{lineno}")
        try:
            x, y = float(row[0]), float(row[1])
        except ValueError as exc:
            raise ValidationError("non-numeric entry", path=f"{source}:{lineno}") from exc
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValidationError("non-finite entry", path=f"{source}:{lineno}")
        xs.append(x)
        ys.append(y)
    try:
        return role, SpectralProfile.tabulated(xs, ys)
    except ValidationError as exc:
        raise ValidationError(str(exc), path=source) from exc


def dumps_profile_csv(role: str, profile: SpectralProfile) -> str:
    if role not in ("chi", "f"):
        raise ValidationError(f"role must be 'chi' or 'f', got {role!r}")
    if profile.form != TABULATED:
        raise ValidationError("only tabulated profiles have a CSV form")
    rows = [f"# profile: {role}, units: natural"]
    rows += [f"{x!r},{y!r}" for x, y in zip(profile.arguments.tolist(), profile.mag2_samples.tolist())]
    return "\n".join(rows) + "\n"


def write_profile_csv(path, role: str, profile: SpectralProfile) -> None:
    Path(path).write_text(dumps_profile_csv(role, profile), encoding="utf-8")
