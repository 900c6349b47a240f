"""Batch experiment runner.

Reads a JSON config naming a pipeline and its inputs, runs it, and writes a
report (JSON or flattened CSV) atomically. Exit codes: 0 success, 2 config
or validation problem, 3 numeric failure inside a pipeline.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io as _stringio
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import costmodel
from .algorithms import (
    ODESystemSpec,
    PowerMethodConfig,
    data_fit,
    fit_problem,
    ground_excited_energies,
    ground_state_ite,
    linear_solve,
    pca_gradient_descent,
    pca_power_top_r,
    predict,
    simulate_direct,
    simulate_via_linear_solve,
)
from .core import ComplexMatrix, apply_to_state, exact_encoding, extract_block
from .errors import ConfigError, NumericError
from .io import load_dataset, load_matrix, load_vector
from .oracles import LoggedOracles
from .polytransform import hermitian_part
from .stateprep import build_covariance

PIPELINES = (
    "pca-power",
    "pca-gd",
    "solve",
    "simulate-direct",
    "simulate-ode",
    "ground-state",
    "energies",
    "fit",
    "costs",
)

_INT_PARAMS = {"r", "T", "K", "N", "seed", "k"}


def _jsonify(obj):
    """Recursively convert a report payload to JSON-serializable values."""
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, ComplexMatrix):
        return _jsonify(obj.entries)
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return {"re": z.real, "im": z.imag}
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _flatten_scalars(obj, prefix="") -> dict:
    """Dotted-path map of the plain numeric leaves of a payload."""
    out = {}
    if isinstance(obj, dict):
        for k in sorted(obj):
            out.update(_flatten_scalars(obj[k], f"{prefix}{k}."))
    elif isinstance(obj, bool):
        pass
    elif isinstance(obj, (int, float)) and math.isfinite(obj):
        out[prefix[:-1]] = obj
    return out


def _atomic_write(path: str, text: str) -> None:
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".blockenc-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _required_path(cfg: dict, key: str) -> str:
    value = cfg.get(key)
    if not value:
        raise ConfigError(f"pipeline {cfg.get('pipeline')!r} needs {key!r} in the config")
    if not os.path.exists(value):
        raise ConfigError(f"{key} file not found: {value}")
    return value


def _params(cfg: dict) -> dict:
    params = cfg.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be a JSON object")
    return params


def _covariance_encoding(cfg: dict, orc: LoggedOracles):
    """Encoding of C/2 from either a dataset or an explicit matrix.

    Reported eigenvalues get doubled back into matrix units by the caller.
    """
    if cfg.get("dataset"):
        ds, _scale = load_dataset(_required_path(cfg, "dataset"), normalize=True)
        return build_covariance(ds)
    c = hermitian_part(load_matrix(_required_path(cfg, "matrix")))
    return exact_encoding(0.5 * c, 1.0)


def _block_gap(enc, r: int, orc: LoggedOracles, override) -> float:
    if override is not None:
        return float(override)
    dec = orc.eig(extract_block(enc), "spectral gap for iteration count")
    lam = dec.eigenvalues[::-1]
    gaps = [lam[i] - lam[i + 1] for i in range(min(r, lam.shape[0] - 1))]
    return max(float(min(gaps)) if gaps else 1.0, 1e-6)


def _run_pca_power(cfg: dict, orc: LoggedOracles) -> dict:
    params = _params(cfg)
    eps = float(params.get("eps", 1e-3))
    r = int(params.get("r", 1))
    enc = _covariance_encoding(cfg, orc)
    pm = PowerMethodConfig(
        gap_Delta=_block_gap(enc, r, orc, params.get("Delta")),
        eps=eps,
        r=r,
        seed=int(params.get("seed", 42)),
        k_override=params.get("k"),
    )
    pairs, rep = pca_power_top_r(enc, pm, oracles=orc)
    return {
        "eigenvalues": [2.0 * v for v, _ in pairs],
        "components": [vec for _, vec in pairs],
        "report": rep,
    }


def _run_pca_gd(cfg: dict, orc: LoggedOracles) -> dict:
    params = _params(cfg)
    enc = _covariance_encoding(cfg, orc)
    t_steps = params.get("T")
    x, residuals, rep = pca_gradient_descent(
        enc,
        eta=float(params.get("eta", 0.4)),
        T=None if t_steps is None else int(t_steps),
        seed=int(params.get("seed", 42)),
        eps=float(params.get("eps", 1e-3)),
        oracles=orc,
    )
    return {"top_component": x, "residuals": residuals, "report": rep}


def _run_solve(cfg: dict, orc: LoggedOracles) -> dict:
    params = _params(cfg)
    a = load_matrix(_required_path(cfg, "matrix"))
    b = load_vector(_required_path(cfg, "vector"))
    x_state, rep = linear_solve(a, b, eps=float(params.get("eps", 1e-3)), oracles=orc)
    return {"solution_state": x_state, "report": rep}


def _run_simulate_direct(cfg: dict, orc: LoggedOracles) -> dict:
    params = _params(cfg)
    h = load_matrix(_required_path(cfg, "matrix"))
    t = float(params.get("t", 1.0))
    eps = float(params.get("eps", 1e-3))
    enc, rep = simulate_direct(h, t, eps=eps, oracles=orc)
    payload = {"operator": extract_block(enc), "report": rep}
    if cfg.get("vector"):
        psi0 = load_vector(_required_path(cfg, "vector"))
        state, p = apply_to_state(enc, psi0)
        u_ref = np.asarray(orc.expm(hermitian_part(h), t, "evolved state check"))
        ref = u_ref @ (psi0 / np.linalg.norm(psi0))
        fid = min(1.0, abs(complex(np.vdot(ref, state))) ** 2)
        payload.update({"state": state, "success": float(p), "state_fidelity": fid})
    return payload


def _run_simulate_ode(cfg: dict, orc: LoggedOracles) -> dict:
    params = _params(cfg)
    h = load_matrix(_required_path(cfg, "matrix"))
    psi0 = load_vector(_required_path(cfg, "vector"))
    n_steps = params.get("N")
    spec = ODESystemSpec(
        H=h,
        t=float(params.get("t", 1.0)),
        K=int(params.get("K", 1)),
        N=None if n_steps is None else int(n_steps),
        psi0=psi0,
    )
    history, rep = simulate_via_linear_solve(
        spec, eps=float(params.get("eps", 1e-3)), oracles=orc
    )
    return {"history": history, "final_state": history[-1], "report": rep}


def _run_ground_state(cfg: dict, orc: LoggedOracles) -> dict:
    params = _params(cfg)
    h = load_matrix(_required_path(cfg, "matrix"))
    state, rep = ground_state_ite(
        h,
        eps=float(params.get("eps", 1e-3)),
        seed=int(params.get("seed", 42)),
        oracles=orc,
    )
    return {"state": state, "report": rep}


def _run_energies(cfg: dict, orc: LoggedOracles) -> dict:
    params = _params(cfg)
    h = load_matrix(_required_path(cfg, "matrix"))
    e0, e1, rep = ground_excited_energies(
        h,
        eps=float(params.get("eps", 1e-3)),
        seed=int(params.get("seed", 42)),
        oracles=orc,
    )
    return {"E0": e0, "E1": e1, "report": rep}


def _run_fit(cfg: dict, orc: LoggedOracles) -> dict:
    params = _params(cfg)
    f = load_matrix(_required_path(cfg, "matrix"))
    y = load_vector(_required_path(cfg, "vector"))
    prob = fit_problem(f, y, basis=cfg.get("basis", ()))
    lam_state, rep = data_fit(prob, eps=float(params.get("eps", 1e-3)), oracles=orc)
    payload = {"coefficient_state": lam_state, "report": rep}
    if cfg.get("predict_vector"):
        x_tilde = load_vector(_required_path(cfg, "predict_vector"))
        _overlap, pred_rep = predict(rep, x_tilde)
        payload["prediction"] = pred_rep
    return payload


def _run_costs(cfg: dict, orc: LoggedOracles) -> dict:
    names = cfg.get("rows")
    if not names:
        raise ConfigError("costs pipeline needs a nonempty 'rows' list of formula names")
    rows = [costmodel.get_formula(str(name)) for name in names]
    return {"table": costmodel.render_table(rows, _params(cfg))}


_DISPATCH = {
    "pca-power": _run_pca_power,
    "pca-gd": _run_pca_gd,
    "solve": _run_solve,
    "simulate-direct": _run_simulate_direct,
    "simulate-ode": _run_simulate_ode,
    "ground-state": _run_ground_state,
    "energies": _run_energies,
    "fit": _run_fit,
    "costs": _run_costs,
}


def run(cfg: dict) -> dict:
    pipeline = cfg.get("pipeline")
    if pipeline not in _DISPATCH:
        raise ConfigError(f"pipeline must be one of {', '.join(PIPELINES)}; got {pipeline!r}")
    orc = LoggedOracles()
    start = time.perf_counter()
    payload = _jsonify(_DISPATCH[pipeline](cfg, orc))
    return {
        "config": _jsonify(cfg),
        "payload": payload,
        "wall_time_s": time.perf_counter() - start,
    }


def _render_report(cfg: dict, report: dict) -> str:
    fmt = cfg.get("format", "json")
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ConfigError(f"format must be json or csv, got {fmt!r}")
    if cfg.get("pipeline") == "costs":
        return costmodel.table_to_csv(report["payload"]["table"])
    buf = _stringio.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["name", "value"])
    for name, value in _flatten_scalars(report["payload"]).items():
        writer.writerow([name, repr(value)])
    return buf.getvalue()


def run_and_write(cfg: dict) -> dict:
    report = run(cfg)
    text = _render_report(cfg, report)
    out = cfg.get("out")
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)
    return report


def sweep(cfg: dict, axis: str, values: list) -> tuple:
    """One run per value of a numeric parameter; aggregate CSV rows."""
    reports = []
    for value in values:
        entry = dict(cfg)
        entry["params"] = dict(_params(cfg))
        entry["params"][axis] = value
        reports.append((value, run(entry)))
    columns = sorted(
        {key for _, rep in reports for key in _flatten_scalars(rep["payload"])}
    )
    buf = _stringio.StringIO()
    writer = csv.writer(buf)
    writer.writerow([axis] + columns)
    for value, rep in reports:
        flat = _flatten_scalars(rep["payload"])
        writer.writerow([value] + [repr(flat[c]) if c in flat else "" for c in columns])
    return [rep for _, rep in reports], buf.getvalue()


def _parse_sweep(text: str, cfg: dict):
    if "=" not in text:
        raise ConfigError("--sweep expects param=v1,v2,...")
    axis, _, tail = text.partition("=")
    axis = axis.strip()
    if not tail.strip():
        raise ConfigError("--sweep expects at least one value")
    values = []
    for tok in tail.split(","):
        v = float(tok)
        values.append(int(v) if axis in _INT_PARAMS else v)
    return axis, values


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="blockenc",
        description="Run block-encoding pipelines from a JSON config and write a report.",
    )
    parser.add_argument("pipeline", nargs="?", choices=PIPELINES,
                        help="pipeline name; overrides the config entry")
    parser.add_argument("--config", help="path to a JSON experiment config")
    parser.add_argument("--out", help="report destination (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv"), dest="fmt")
    parser.add_argument("--seed", type=int, help="override params.seed")
    parser.add_argument("--sweep", help="param=v1,v2,... one run per value")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config) if args.config else {}
        if args.pipeline:
            cfg["pipeline"] = args.pipeline
        if args.out:
            cfg["out"] = args.out
        if args.fmt:
            cfg["format"] = args.fmt
        params = dict(_params(cfg))
        params.setdefault("seed", 42)
        if args.seed is not None:
            params["seed"] = args.seed
        cfg["params"] = params

        if args.sweep:
            axis, values = _parse_sweep(args.sweep, cfg)
            reports, aggregate = sweep(cfg, axis, values)
            out = cfg.get("out")
            if out:
                for idx, rep in enumerate(reports):
                    _atomic_write(
                        f"{out}.{idx:02d}.json",
                        json.dumps(rep, indent=2, sort_keys=True) + "\n",
                    )
                _atomic_write(out, aggregate)
            else:
                sys.stdout.write(aggregate)
        else:
            run_and_write(cfg)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, IsADirectoryError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
