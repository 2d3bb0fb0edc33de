"""Declarative scenario documents.

A scenario is a UTF-8 JSON object::

    {"version": 1, "kind": "check", "task": "crooks", "parameters": {...}}

``kind`` is one of ``finite``, ``check``, ``ramsey`` or ``field``; ``task``
picks the computation within the kind. Serialization is canonical (sorted
keys, two-space indent, shortest round-trip floats), so
``dumps(loads(text)) == text`` for any canonical document and
``loads(dumps(s)) == s`` for any scenario.

Matrices are given as nested lists (real), ``{"re": ..., "im": ...}``,
``{"diag": [...]}``, a named constant (``sigma_x``, ``sigma_y``, ``sigma_z``,
``hadamard``, ``identity``), ``{"expm": H, "t": t}`` for ``exp(-i H t)``, or a
seeded random draw such as ``{"random_hermitian": {"dim": 4, "seed": 1}}``.
"""

from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import qsys
from .errors import ValidationError
from .field import FieldConfig, SpectralProfile, parse_profile_spec

FORMAT_VERSION = 1

TASKS = {
    "finite": ("dist", "moments", "first-law"),
    "check": ("crooks", "jarzynski", "variance-relation"),
    "ramsey": ("scan",),
    "field": ("cumulants", "char", "dist", "crooks", "inequality", "theta", "divcoeff"),
}

_NONFINITE = re.compile(r"-?\b(NaN|Infinity)\b")


@dataclass(frozen=True)
class Scenario:
    kind: str
    task: str
    parameters: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION
    name: str | None = None

    def __post_init__(self):
        if self.version != FORMAT_VERSION:
            raise ValidationError(f"unsupported version {self.version!r}", path="version")
        if self.kind not in TASKS:
            raise ValidationError(f"kind must be one of {sorted(TASKS)}, got {self.kind!r}", path="kind")
        if self.task not in TASKS[self.kind]:
            raise ValidationError(f"task for kind {self.kind!r} must be one of {TASKS[self.kind]}", path="task")
        if not isinstance(self.parameters, dict):
            raise ValidationError("must be an object", path="parameters")
        check_finite(self.parameters, "parameters")

    def to_dict(self) -> dict:
        d = {"version": self.version, "kind": self.kind, "task": self.task, "parameters": self.parameters}
        if self.name is not None:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: Any) -> Scenario:
        if not isinstance(d, dict):
            raise ValidationError("scenario must be a JSON object")
        unknown = set(d) - {"version", "kind", "task", "parameters", "name"}
        if unknown:
            raise ValidationError(f"unknown key(s) {sorted(unknown)}")
        for key in ("version", "kind", "task"):
            if key not in d:
                raise ValidationError("required key missing", path=key)
        if not isinstance(d["version"], int) or isinstance(d["version"], bool):
            raise ValidationError("must be an integer", path="version")
        return cls(
            kind=d["kind"],
            task=d["task"],
            parameters=d.get("parameters", {}),
            version=d["version"],
            name=d.get("name"),
        )

    def with_task(self, kind: str, task: str) -> Scenario:
        return Scenario(kind=kind, task=task, parameters=self.parameters, version=self.version, name=self.name)


def check_finite(node, path: str) -> None:
    if isinstance(node, bool) or node is None or isinstance(node, str):
        return
    if isinstance(node, float) and not math.isfinite(node):
        raise ValidationError("numbers must be finite", path=path)
    if isinstance(node, dict):
        for k, v in node.items():
            check_finite(v, f"{path}.{k}")
    elif isinstance(node, list):
        for i, v in enumerate(node):
            check_finite(v, f"{path}[{i}]")


def _reject_constant(name):
    raise ValueError(f"non-finite literal {name}")


def parse_json(text: str, source: str = "<string>") -> Any:
    """Strict JSON: non-finite literals and overflowing numbers are rejected."""
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except ValueError as exc:
        m = _NONFINITE.search(text)
        if "non-finite" in str(exc) and m:
            line = text.count("\n", 0, m.start()) + 1
            col = m.start() - text.rfind("\n", 0, m.start())
            raise ValidationError(f"non-finite literal {m.group(0)} not allowed", path=f"{source}:{line}:{col}") from exc
        raise ValidationError(f"invalid JSON ({exc})", path=source) from exc
    check_finite(data, "$")
    return data


def loads(text: str, source: str = "<string>") -> Scenario:
    return Scenario.from_dict(parse_json(text, source))


def dumps(s: Scenario) -> str:
    return json.dumps(s.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"


def load(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read scenario ({exc.strerror})", path=str(path)) from exc
    try:
        return loads(text, source=str(path))
    except ValidationError as exc:
        if exc.path and str(exc.path).startswith(str(path)):
            raise
        raise ValidationError(str(exc), path=str(path)) from exc


def get_path(tree: dict, dotted: str):
    node = tree
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ValidationError("no such key", path=dotted)
        node = node[part]
    return node


def set_path(tree: dict, dotted: str, value) -> dict:
    """Copy of ``tree`` with the dotted key replaced (intermediate objects created as needed)."""
    out = copy.deepcopy(tree)
    node = out
    parts = dotted.split(".")
    for part in parts[:-1]:
        nxt = node.setdefault(part, {})
        if not isinstance(nxt, dict):
            raise ValidationError("cannot descend into a non-object", path=dotted)
        node = nxt
    node[parts[-1]] = value
    return out


# -- parameter readers ----------------------------------------------------------


def _number(node, path: str, *, integer: bool = False, positive: bool = False, nonneg: bool = False):
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ValidationError("expected a number", path=path)
    if integer and not isinstance(node, int):
        raise ValidationError("expected an integer", path=path)
    if positive and not node > 0:
        raise ValidationError("must be > 0", path=path)
    if nonneg and node < 0:
        raise ValidationError("must be >= 0", path=path)
    return node


def _real_array(node, path: str) -> np.ndarray:
    try:
        arr = np.array(node, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError("expected a rectangular array of numbers", path=path) from exc
    if arr.dtype == object:
        raise ValidationError("expected a rectangular array of numbers", path=path)
    return arr


_NAMED = {
    "sigma_x": qsys.SIGMA_X,
    "sigma_y": qsys.SIGMA_Y,
    "sigma_z": qsys.SIGMA_Z,
    "hadamard": qsys.HADAMARD,
}

_KETS = {"0": qsys.KET0, "1": qsys.KET1, "+": qsys.KETPLUS}


def _random(node, path, kind):
    if not isinstance(node, dict):
        raise ValidationError("expected an object with 'dim' and 'seed'", path=path)
    d = _number(node.get("dim"), f"{path}.dim", integer=True, positive=True)
    seed = _number(node.get("seed", 0), f"{path}.seed", integer=True, nonneg=True)
    rng = np.random.default_rng(seed)
    if kind == "random_hermitian":
        return qsys.random_hermitian(d, rng, scale=float(node.get("scale", 1.0))).matrix
    if kind == "random_unitary":
        return qsys.random_unitary(d, rng).matrix
    return qsys.random_density(d, rng, rank=node.get("rank")).matrix


def matrix(node, path: str, dim: int | None = None) -> np.ndarray:
    """Read a complex square matrix from any of the supported encodings."""
    if isinstance(node, str):
        if node == "identity":
            if dim is None:
                raise ValidationError("'identity' needs a known dimension", path=path)
            return np.eye(dim, dtype=complex)
        if node not in _NAMED:
            raise ValidationError(f"unknown named matrix {node!r}", path=path)
        return _NAMED[node].copy()
    if isinstance(node, list):
        arr = _real_array(node, path)
    elif isinstance(node, dict):
        if set(node) == {"re", "im"}:
            arr = _real_array(node["re"], f"{path}.re") + 1j * _real_array(node["im"], f"{path}.im")
        elif set(node) == {"diag"}:
            arr = np.diag(_real_array(node["diag"], f"{path}.diag"))
        elif set(node) == {"expm", "t"}:
            h = qsys.HermitianOperator(matrix(node["expm"], f"{path}.expm", dim))
            return qsys.expm_i(h, -float(_number(node["t"], f"{path}.t")))
        elif len(node) == 1 and next(iter(node)) in ("random_hermitian", "random_unitary", "random_density"):
            kind = next(iter(node))
            return _random(node[kind], f"{path}.{kind}", kind)
        else:
            raise ValidationError(f"unrecognised matrix encoding with keys {sorted(node)}", path=path)
    else:
        raise ValidationError("expected a matrix", path=path)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {arr.shape}", path=path)
    return arr.astype(complex)


def ket(node, path: str) -> np.ndarray:
    if isinstance(node, str):
        if node not in _KETS:
            raise ValidationError(f"unknown named ket {node!r}", path=path)
        return _KETS[node]
    if isinstance(node, dict) and set(node) == {"re", "im"}:
        return _real_array(node["re"], f"{path}.re") + 1j * _real_array(node["im"], f"{path}.im")
    v = _real_array(node, path)
    if v.ndim != 1:
        raise ValidationError("expected a vector", path=path)
    return v.astype(complex)


def _wrap(factory, value, path):
    try:
        return factory(value)
    except ValidationError as exc:
        raise ValidationError(str(exc), path=path) from exc


def process(node, path: str = "process") -> qsys.ProcessSpec:
    if not isinstance(node, dict):
        raise ValidationError("expected an object", path=path)
    for key in ("h0", "htau"):
        if key not in node:
            raise ValidationError("required key missing", path=f"{path}.{key}")
    h0 = _wrap(qsys.HermitianOperator, matrix(node["h0"], f"{path}.h0"), f"{path}.h0")
    d = h0.dim
    htau = _wrap(qsys.HermitianOperator, matrix(node["htau"], f"{path}.htau", d), f"{path}.htau")
    u = _wrap(qsys.UnitaryOperator, matrix(node.get("u", "identity"), f"{path}.u", d), f"{path}.u")
    rho_node = node.get("rho", "maximally_mixed")
    rpath = f"{path}.rho"
    if rho_node == "maximally_mixed":
        rho = qsys.DensityMatrix.maximally_mixed(d)
    elif isinstance(rho_node, dict) and set(rho_node) == {"gibbs"}:
        beta = _number(rho_node["gibbs"], f"{rpath}.gibbs", positive=True)
        rho = qsys.gibbs(h0, float(beta))
    elif isinstance(rho_node, dict) and set(rho_node) == {"pure"}:
        rho = _wrap(qsys.DensityMatrix.pure, ket(rho_node["pure"], f"{rpath}.pure"), rpath)
    else:
        rho = _wrap(qsys.DensityMatrix, matrix(rho_node, rpath, d), rpath)
    try:
        return qsys.ProcessSpec(rho, h0, htau, u)
    except ValidationError as exc:
        raise ValidationError(str(exc), path=path) from exc


def processes(params: dict) -> list[tuple[str, qsys.ProcessSpec]]:
    """Named processes: either ``process`` or a list under ``processes``."""
    if "processes" in params:
        items = params["processes"]
        if not isinstance(items, list) or not items:
            raise ValidationError("expected a non-empty list", path="parameters.processes")
        out = []
        for i, item in enumerate(items):
            path = f"parameters.processes[{i}]"
            name = item.get("name", str(i)) if isinstance(item, dict) else str(i)
            out.append((str(name), process(item, path)))
        return out
    if "process" in params:
        return [(params["process"].get("name", "process"), process(params["process"], "parameters.process"))]
    raise ValidationError("needs 'process' or 'processes'", path="parameters")


def mu_grid(node, path: str = "parameters.mu_grid", default=(-5.0, 5.0, 41)) -> np.ndarray:
    if node is None:
        return np.linspace(*default)
    if isinstance(node, list):
        arr = _real_array(node, path)
        if arr.ndim != 1 or len(arr) == 0:
            raise ValidationError("expected a non-empty list of numbers", path=path)
        return arr
    if isinstance(node, dict) and set(node) == {"start", "stop", "num"}:
        start = _number(node["start"], f"{path}.start")
        stop = _number(node["stop"], f"{path}.stop")
        num = _number(node["num"], f"{path}.num", integer=True, positive=True)
        return np.linspace(start, stop, num)
    raise ValidationError("expected a list or {start, stop, num}", path=path)


def profile(node, path: str) -> SpectralProfile:
    if isinstance(node, str):
        return _wrap(parse_profile_spec, node, path)
    if not isinstance(node, dict):
        raise ValidationError("expected a profile object or spec string", path=path)
    return _wrap(SpectralProfile.from_dict, node, path)


def field_config(node, path: str = "parameters.field") -> FieldConfig:
    if not isinstance(node, dict):
        raise ValidationError("expected an object", path=path)
    unknown = set(node) - {"n", "m", "beta", "lambda", "chi", "f"}
    if unknown:
        raise ValidationError(f"unknown key(s) {sorted(unknown)}", path=path)
    n = _number(node.get("n", 1), f"{path}.n", integer=True)
    m = _number(node.get("m", 0.0), f"{path}.m", nonneg=True)
    if "beta" not in node:
        raise ValidationError("required key missing", path=f"{path}.beta")
    beta = _number(node["beta"], f"{path}.beta", positive=True)
    lam = _number(node.get("lambda", 1.0), f"{path}.lambda")
    chi = profile(node.get("chi", "gaussian:1:1"), f"{path}.chi")
    f = profile(node.get("f", "gaussian:1:1"), f"{path}.f")
    try:
        return FieldConfig(n=n, m=float(m), beta=float(beta), lam=float(lam), chi=chi, f=f)
    except ValidationError as exc:
        raise ValidationError(str(exc).split(": ", 1)[-1], path=f"{path}.{exc.path}" if exc.path else path) from exc
