"""Command-line scenario runner.

Grids and scans are written as CSV with ``#`` header comments describing the
columns; scalar reports are JSON. Exit codes: 0 success, 2 invalid input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures as cf
import itertools
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import ramsey, scenario, workdist
from . import field as fld
from .errors import FieldworkError, NumericalError, ValidationError
from .qsys import ProcessSpec, gibbs, partition_ratio
from .scenario import FORMAT_VERSION, Scenario

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


@dataclass(frozen=True)
class Report:
    ext: str
    text: str


def _f(x) -> str:
    return repr(float(x))


def _csv(title: str, columns: list[str], rows, notes=()) -> Report:
    lines = [f"# fieldwork {title}, format v{FORMAT_VERSION}"]
    lines += [f"# {n}" for n in notes]
    lines.append("# columns: " + ",".join(columns))
    lines.append(",".join(columns))
    lines += [",".join(r) for r in rows]
    return Report("csv", "\n".join(lines) + "\n")


def _cplx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _json(title: str, payload) -> Report:
    doc = {"format_version": FORMAT_VERSION, "report": title, "results": payload}
    return Report("json", json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _kind(params) -> workdist.Kind:
    try:
        return workdist.Kind(params.get("kind", "rs"))
    except ValueError as exc:
        names = [k.value for k in workdist.Kind]
        raise ValidationError(f"kind must be one of {names}", path="parameters.kind") from exc


def _int(params, key, default):
    v = params.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError("expected an integer", path=f"parameters.{key}")
    return v


def _betas(params, default=(1.0,)) -> list[float]:
    v = params.get("beta", list(default))
    vals = v if isinstance(v, list) else [v]
    for i, b in enumerate(vals):
        if isinstance(b, bool) or not isinstance(b, (int, float)) or not b > 0:
            raise ValidationError("beta must be a positive number", path=f"parameters.beta[{i}]")
    return [float(b) for b in vals]


def _thermal(p: ProcessSpec, beta: float) -> ProcessSpec:
    return ProcessSpec(gibbs(p.h0, beta), p.h0, p.htau, p.u)


# -- finite-dimensional tasks ---------------------------------------------------


def _finite_dist(params) -> Report:
    kind = _kind(params)
    atol = params.get("prune", 1e-15)
    rows = []
    for name, p in scenario.processes(params):
        for w, wt in workdist.distribution(p, kind).pruned(atol):
            rows.append([name, _f(w), _f(complex(wt).real), _f(complex(wt).imag)])
    notes = [f"support points with |weight| <= {atol!r} omitted"]
    return _csv(f"finite dist ({kind.value})", ["process", "value", "weight_re", "weight_im"], rows, notes)


def _finite_moments(params) -> Report:
    kind = _kind(params)
    jmax = _int(params, "jmax", workdist.MAX_MOMENT)
    rows = []
    for name, p in scenario.processes(params):
        for j in range(1, jmax + 1):
            m = workdist.moments(p, kind, j)
            rows.append([name, str(j), _f(m.real), _f(m.imag)])
    return _csv(f"finite moments ({kind.value})", ["process", "j", "moment_re", "moment_im"], rows)


def _finite_first_law(params) -> Report:
    kind = _kind(params)
    out = []
    for name, p in scenario.processes(params):
        r = workdist.first_law_report(p, kind)
        out.append(
            {
                "process": name,
                "kind": kind.value,
                "mean_gap": _cplx(r.mean_gap),
                "second_moment_gap": _cplx(r.var_gap),
                "commutator_expectation": _cplx(r.commutator_expectation),
            }
        )
    return _json("finite first-law", out)


def _check_crooks(params) -> Report:
    betas = _betas(params, (0.2, 1.0, 5.0))
    mu = scenario.mu_grid(params.get("mu_grid"))
    rows, worst = [], 0.0
    for name, p in scenario.processes(params):
        for beta in betas:
            res = workdist.crooks_residuals(p.h0, p.htau, p.u, beta, mu)
            worst = max(worst, float(res.max()))
            rows += [[name, _f(beta), _f(m), _f(r)] for m, r in zip(mu, res)]
    return _csv("check crooks", ["process", "beta", "mu", "residual"], rows, notes=[f"max_residual={worst!r}"])


def _check_jarzynski(params) -> Report:
    kind = _kind(params)
    out = []
    for name, p in scenario.processes(params):
        for beta in _betas(params):
            val = workdist.jarzynski_value(_thermal(p, beta), beta, kind)
            target = partition_ratio(p.htau, p.h0, beta)
            out.append(
                {
                    "process": name,
                    "kind": kind.value,
                    "beta": beta,
                    "value": _cplx(val),
                    "partition_ratio": target,
                    "abs_gap": abs(val - target),
                }
            )
    return _json("check jarzynski", out)


def _check_variance_relation(params) -> Report:
    out = [
        {"process": name, "residual": workdist.du_variance_relation_check(p)}
        for name, p in scenario.processes(params)
    ]
    return _json("check variance-relation", out)


def _ramsey_scan(params) -> Report:
    mu = scenario.mu_grid(params.get("mu_grid"))
    shots = params.get("shots")
    if shots is not None and (isinstance(shots, bool) or not isinstance(shots, int) or shots < 1):
        raise ValidationError("must be a positive integer", path="parameters.shots")
    seed = _int(params, "seed", 0)
    rows = []
    for name, p in scenario.processes(params):
        sc = ramsey.scan(p, mu, shots=shots, seed=seed)
        exact = workdist.char_rs(p, mu)
        rows += [[name, _f(m), _f(v.real), _f(v.imag), _f(e.real), _f(e.imag)] for m, v, e in zip(mu, sc.values, exact)]
    notes = [f"shots={shots}", f"seed={seed}"]
    return _csv("ramsey scan", ["process", "mu", "char_re", "char_im", "exact_re", "exact_im"], rows, notes)


# -- field tasks ----------------------------------------------------------------


def _cfg(params) -> fld.FieldConfig:
    return scenario.field_config(params.get("field", {}), "parameters.field")


def _field_cumulants(params) -> Report:
    cfg = _cfg(params)
    cv = fld.cumulants(cfg, _int(params, "jmax", 4))
    return _csv("field cumulants", ["j", "kappa"], [[str(j), _f(cv[j])] for j in range(1, len(cv) + 1)])


def _field_char(params) -> Report:
    cfg = _cfg(params)
    mu = scenario.mu_grid(params.get("mu_grid"))
    shift = params.get("imag_shift", 0.0)
    z = mu + 1j * float(shift)
    cw = fld.char_work(cfg, z)
    cd = fld.char_du(cfg, z)
    rows = [[_f(m.real), _f(m.imag), _f(a.real), _f(a.imag), _f(b.real), _f(b.imag)] for m, a, b in zip(z, cw, cd)]
    return _csv("field char", ["mu_re", "mu_im", "work_re", "work_im", "du_re", "du_im"], rows)


def _field_dist(params) -> Report:
    cfg = _cfg(params)
    if "w_min" in params or "w_max" in params:
        lo, hi = float(params["w_min"]), float(params["w_max"])
        dist = fld.dist_work_grid(cfg, lo, hi, _int(params, "points", 1024))
    else:
        dist = fld.dist_work_auto(cfg)
    rows = [[_f(w), _f(d.real), _f(d.imag)] for w, d in zip(dist.w_values, dist.density)]
    notes = [f"total={dist.total()!r}", f"max_imag={dist.max_imag!r}"]
    return _csv("field dist", ["w", "density_re", "density_im"], rows, notes)


def _field_crooks(params) -> Report:
    cfg = _cfg(params)
    mu = scenario.mu_grid(params.get("mu_grid"), default=(-5.0, 5.0, 21))
    lhs = fld.char_work(cfg, mu + 1j * cfg.beta)
    rhs = fld.char_work(cfg, -mu)
    res = np.abs(lhs - rhs)
    rows = [[_f(m), _f(a.real), _f(a.imag), _f(b.real), _f(b.imag), _f(r)] for m, a, b, r in zip(mu, lhs, rhs, res)]
    cols = ["mu", "shifted_re", "shifted_im", "reflected_re", "reflected_im", "residual"]
    return _csv("field crooks", cols, rows, notes=[f"max_residual={float(res.max())!r}"])


def _field_inequality(params) -> Report:
    cfg = _cfg(params)
    rows = [
        [str(r.j), _f(r.work), _f(r.du), _f(r.gap), str(r.ok).lower()]
        for r in fld.moment_inequality_check(cfg, _int(params, "jmax", 8))
    ]
    return _csv("field inequality", ["j", "work_moment", "du_moment", "gap", "ok"], rows)


def _field_theta(params) -> Report:
    cfg = _cfg(params)
    samples = params.get("chi_time")
    if samples is not None:
        if not isinstance(samples, dict) or set(samples) != {"t", "values"}:
            raise ValidationError("expected {t: [...], values: [...]}", path="parameters.chi_time")
        samples = (samples["t"], samples["values"])
    return _json("field theta", {"theta": fld.phase_theta(cfg, samples)})


def _field_divcoeff(params) -> Report:
    cfg = _cfg(params)
    return _json("field divcoeff", {"coefficient": fld.naive_variance_divergence_coefficient(cfg)})


EXECUTORS = {
    ("finite", "dist"): _finite_dist,
    ("finite", "moments"): _finite_moments,
    ("finite", "first-law"): _finite_first_law,
    ("check", "crooks"): _check_crooks,
    ("check", "jarzynski"): _check_jarzynski,
    ("check", "variance-relation"): _check_variance_relation,
    ("ramsey", "scan"): _ramsey_scan,
    ("field", "cumulants"): _field_cumulants,
    ("field", "char"): _field_char,
    ("field", "dist"): _field_dist,
    ("field", "crooks"): _field_crooks,
    ("field", "inequality"): _field_inequality,
    ("field", "theta"): _field_theta,
    ("field", "divcoeff"): _field_divcoeff,
}


def execute(s: Scenario) -> Report:
    """Run one scenario; pure given the scenario (seeds live in its parameters)."""
    return EXECUTORS[(s.kind, s.task)](s.parameters)


# -- sweeps -----------------------------------------------------------------------


def expand_sweep(doc: dict, source: str = "<sweep>") -> list[tuple[dict, Scenario]]:
    """Cartesian product over ``sweep.axes`` applied to ``sweep.base``, in axis order."""
    if not isinstance(doc, dict) or doc.get("version") != FORMAT_VERSION or "sweep" not in doc:
        raise ValidationError("expected {version: 1, sweep: {base, axes}}", path=source)
    sw = doc["sweep"]
    if not isinstance(sw, dict) or "base" not in sw or "axes" not in sw:
        raise ValidationError("needs 'base' and 'axes'", path=f"{source}:sweep")
    axes = sw["axes"]
    if not isinstance(axes, dict) or not axes or not all(isinstance(v, list) and v for v in axes.values()):
        raise ValidationError("axes must map dotted keys to non-empty lists", path=f"{source}:sweep.axes")
    base = sw["base"]
    out = []
    for combo in itertools.product(*axes.values()):
        point = dict(zip(axes, combo))
        d = base
        for key, val in point.items():
            d = scenario.set_path(d, key, val)
        try:
            out.append((point, Scenario.from_dict(d)))
        except ValidationError as exc:
            raise ValidationError(f"{exc} (at {point})", path=f"{source}:sweep") from exc
    return out


def _execute_from(s: Scenario, source: str | None) -> Report:
    try:
        return execute(s)
    except ValidationError as exc:
        if source is None:
            raise
        raise ValidationError(str(exc), path=source) from exc


def _worker(text: str):
    try:
        r = execute(scenario.loads(text))
        return ("ok", r.ext, r.text)
    except ValidationError as exc:
        return ("invalid", "", str(exc))
    except NumericalError as exc:
        return ("numerical", "", str(exc))


def worker_count() -> int:
    raw = os.environ.get("FIELDWORK_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ValidationError(f"must be a positive integer, got {raw!r}", path="FIELDWORK_THREADS")
    return n


def run_sweep(doc: dict, source: str = "<sweep>", workers: int | None = None):
    jobs = expand_sweep(doc, source)
    texts = [scenario.dumps(s) for _, s in jobs]
    workers = worker_count() if workers is None else workers
    if workers == 1 or len(texts) == 1:
        results = [_worker(t) for t in texts]
    else:
        with cf.ProcessPoolExecutor(max_workers=min(workers, len(texts))) as pool:
            results = list(pool.map(_worker, texts))
    for i, (status, _, msg) in enumerate(results):
        if status == "invalid":
            raise ValidationError(msg, path=f"{source}:scenario[{i}]")
        if status == "numerical":
            raise NumericalError(f"scenario[{i}]: {msg}")
    return [(point, Report(ext, text)) for (point, _), (_, ext, text) in zip(jobs, results)]


# -- argument parsing ---------------------------------------------------------------


def _add_grid_flags(p):
    p.add_argument("--mu-start", type=float)
    p.add_argument("--mu-stop", type=float)
    p.add_argument("--mu-num", type=int)


def _add_finite_flags(p, kind=True):
    p.add_argument("--config", "--process", dest="config", required=True, help="scenario JSON file")
    if kind:
        p.add_argument("--kind", choices=[k.value for k in workdist.Kind])
    p.add_argument("--out", help="write the report here instead of stdout")


def _add_field_flags(p):
    p.add_argument("--config", help="scenario JSON file (flags override its field block)")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--chi", help="gaussian:A:w or tabulated:PATH")
    p.add_argument("--f", help="gaussian:A:w or tabulated:PATH")
    p.add_argument("--jmax", type=int)
    p.add_argument("--w-min", type=float)
    p.add_argument("--w-max", type=float)
    p.add_argument("--points", type=int)
    _add_grid_flags(p)
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fieldwork", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    fin = sub.add_parser("finite", help="finite-dimensional work distributions").add_subparsers(dest="task", required=True)
    for task in ("dist", "moments", "first-law"):
        p = fin.add_parser(task)
        _add_finite_flags(p)
        if task == "moments":
            p.add_argument("--jmax", type=int)

    chk = sub.add_parser("check", help="fluctuation-theorem checks").add_subparsers(dest="task", required=True)
    for task in ("crooks", "jarzynski", "variance-relation"):
        p = chk.add_parser(task)
        _add_finite_flags(p, kind=task == "jarzynski")
        if task != "variance-relation":
            p.add_argument("--beta", type=float, action="append", help="repeatable")
        if task == "crooks":
            _add_grid_flags(p)

    ram = sub.add_parser("ramsey", help="interferometric protocol").add_subparsers(dest="task", required=True)
    p = ram.add_parser("scan")
    _add_finite_flags(p, kind=False)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    _add_grid_flags(p)

    fl = sub.add_parser("field", help="free-field work statistics").add_subparsers(dest="task", required=True)
    for task in scenario.TASKS["field"]:
        _add_field_flags(fl.add_parser(task))

    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("config")
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="run a Cartesian parameter sweep in parallel")
    p.add_argument("config")
    p.add_argument("--out", help="directory for per-scenario reports and index.csv")
    return ap


def _apply_overrides(kind: str, params: dict, args) -> dict:
    params = dict(params)
    get = lambda name: getattr(args, name, None)  # noqa: E731
    if get("kind") is not None:
        params["kind"] = args.kind
    if get("jmax") is not None:
        params["jmax"] = args.jmax
    if get("shots") is not None:
        params["shots"] = args.shots
    if get("seed") is not None:
        params["seed"] = args.seed
    grid = [get("mu_start"), get("mu_stop"), get("mu_num")]
    if any(v is not None for v in grid):
        if any(v is None for v in grid):
            raise ValidationError("--mu-start, --mu-stop and --mu-num go together", path="mu_grid")
        params["mu_grid"] = {"start": grid[0], "stop": grid[1], "num": grid[2]}
    if kind == "field":
        fcfg = dict(params.get("field", {}))
        for flag, key in (("n", "n"), ("m", "m"), ("beta", "beta"), ("lam", "lambda"), ("chi", "chi"), ("f", "f")):
            if get(flag) is not None:
                fcfg[key] = get(flag)
        params["field"] = fcfg
        for flag in ("w_min", "w_max", "points"):
            if get(flag) is not None:
                params[flag] = get(flag)
    elif get("beta") is not None:
        params["beta"] = args.beta if len(args.beta) > 1 else args.beta[0]
    return params


def _scenario_from_args(args) -> Scenario:
    if getattr(args, "config", None):
        s = scenario.load(args.config)
        params = s.parameters
        name = s.name
    else:
        params, name = {}, None
    params = _apply_overrides(args.command, params, args)
    return Scenario(kind=args.command, task=args.task, parameters=params, name=name)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _main(argv) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        s = scenario.load(args.config)
        _emit(_execute_from(s, args.config).text, args.out)
        return EXIT_OK
    if args.command == "sweep":
        try:
            doc = scenario.parse_json(Path(args.config).read_text(encoding="utf-8"), args.config)
        except OSError as exc:
            raise ValidationError(f"cannot read sweep ({exc.strerror})", path=args.config) from exc
        results = run_sweep(doc, args.config)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            index = ["index,file," + ",".join(results[0][0])]
            for i, (point, rep) in enumerate(results):
                fname = f"scenario_{i:04d}.{rep.ext}"
                (out / fname).write_text(rep.text, encoding="utf-8")
                index.append(f"{i},{fname}," + ",".join(json.dumps(v) for v in point.values()))
            (out / "index.csv").write_text("\n".join(index) + "\n", encoding="utf-8")
        else:
            for i, (point, rep) in enumerate(results):
                sys.stdout.write(f"# scenario {i}: {json.dumps(point, sort_keys=True)}\n{rep.text}")
        return EXIT_OK
    _emit(_execute_from(_scenario_from_args(args), getattr(args, "config", None)).text, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        return _main(argv)
    except ValidationError as exc:
        print(f"fieldwork: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"fieldwork: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FieldworkError as exc:
        print(f"fieldwork: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
