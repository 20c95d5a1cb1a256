"""Command-line entry point: ``firstquant evaluate|vqe|sweep --config C --out R``.

Exit codes: 0 success, 2 invalid config, 3 computation error, 4 I/O error.
Failures print one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, oracle
from .circuits import Variant
from .coefficients import VALIDITY_THRESHOLD, CoefficientSet, alpha
from .config import RunConfig, load_config, parse_config
from .errors import ConfigInvalid, FirstQuantError, TooLargeError
from .estimators import total_energy
from .grid import WaveFunction
from .operators import BoundaryCondition
from .vqe import Objective, minimize

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTE = 3
EXIT_IO = 4

CSV_COLUMNS = ("axis_value", "kinetic", "potential", "total", "std_error", "oracle_gap")


def _objective(cfg: RunConfig) -> Objective:
    physics = cfg.physics.resolve()
    return Objective(
        config=physics,
        bc=BoundaryCondition(cfg.boundary),
        order=cfg.order,
        pot=cfg.potential.resolve(physics.qubits),
        plan=cfg.shot_plan(),
        variant=Variant(cfg.dbc_variant),
    )


def _warnings(validity: float, cfg: RunConfig) -> list[str]:
    out = []
    if validity > VALIDITY_THRESHOLD:
        out.append(
            f"validity_ratio {validity:.4g} exceeds {VALIDITY_THRESHOLD}: <p^2> is not small against (mc)^2"
        )
    if cfg.allow_complex and cfg.boundary == "dbc":
        out.append("complex-amplitude override active on the hard-wall estimator")
    return out


def _evaluate_state(cfg: RunConfig) -> WaveFunction:
    return cfg.state.resolve(cfg.physics.resolve(), cfg.ansatz)


def compare_with_oracle(cfg: RunConfig, estimate: dict | None = None) -> dict:
    """Run estimator and dense oracle side by side for one configuration."""
    obj = _objective(cfg)
    physics = obj.config
    if physics.qubits > oracle.MAX_DENSE_QUBITS:
        raise TooLargeError(f"oracle comparison limited to L <= {oracle.MAX_DENSE_QUBITS}")
    tol = cfg.oracle.tolerance
    h = oracle.hamiltonian_matrix(physics, obj.bc, obj.order, obj.pot)
    ground = oracle.exact_ground(physics, obj.bc, obj.order, obj.pot)
    sqrt_ground = oracle.exact_sqrt_kinetic_ground(physics, obj.bc, obj.pot)
    report: dict = {
        "exact_ground": ground.ground_energy,
        "sqrt_kinetic_ground": sqrt_ground.ground_energy,
        "truncation_gap": ground.ground_energy - sqrt_ground.ground_energy,
        "truncation_bound": oracle.truncation_bound(physics, obj.bc),
    }
    if cfg.task == "vqe" or (cfg.task == "sweep" and cfg.sweep.task == "vqe"):
        value = estimate["best_energy"] if estimate else minimize_from_config(cfg).best_energy
        reference = ground.ground_energy
        report["target"] = "exact_ground"
    else:
        state = _evaluate_state(cfg)
        if estimate is None:
            estimate = total_energy(
                state, physics, obj.bc, obj.order, obj.pot, obj.plan, obj.variant, cfg.allow_complex
            ).as_dict()
        value = estimate["total"]
        c = state.amplitudes
        reference = float(np.vdot(c, h @ c).real)
        report["target"] = "dense_expectation"
        if obj.bc is BoundaryCondition.DBC and obj.variant is Variant.PAPER_LITERAL and obj.order == 2:
            p_edges = state.probabilities[0] + state.probabilities[-1]
            r2 = physics.compton_ratio**2
            report["paper_literal_predicted_residual"] = (
                -2.0 * physics.rest_energy * float(alpha(2)) * r2 * r2 * p_edges
            )
    gap = value - reference
    report["estimate"] = value
    report["reference"] = reference
    report["abs_gap"] = abs(gap)
    report["signed_gap"] = gap
    report["rel_gap"] = abs(gap) / abs(reference) if reference != 0 else (0.0 if gap == 0 else math.inf)
    if cfg.mode == "shots" and estimate is not None and "std_error" in estimate:
        allowed = cfg.oracle.shot_sigmas * estimate["std_error"]
    else:
        allowed = tol * physics.rest_energy
    if "paper_literal_predicted_residual" in report:
        gap -= report["paper_literal_predicted_residual"]
        report["gap_after_residual"] = gap
    report["tolerance"] = allowed
    report["passed"] = bool(abs(gap) <= allowed)
    return report


def minimize_from_config(cfg: RunConfig, workers: int = 1):
    opt = cfg.optimizer
    return minimize(
        cfg.ansatz.resolve(),
        _objective(cfg),
        optimizer=opt.name,
        max_evals=opt.max_evals,
        tol=opt.tol,
        restarts=opt.restarts,
        seed=cfg.seed,
        workers=workers,
    )


def _coefficients(cfg: RunConfig) -> dict:
    return CoefficientSet.compute(cfg.physics.resolve(), cfg.order).as_dict()


def run_evaluate(cfg: RunConfig, oracle_check: bool = False) -> dict:
    obj = _objective(cfg)
    state = _evaluate_state(cfg)
    breakdown = total_energy(
        state, obj.config, obj.bc, obj.order, obj.pot, obj.plan, obj.variant, cfg.allow_complex
    )
    energy = breakdown.as_dict()
    doc = {"energy": energy, "warnings": _warnings(breakdown.validity_ratio, cfg)}
    if oracle_check:
        doc["oracle"] = compare_with_oracle(cfg, energy)
    return doc


def run_vqe(cfg: RunConfig, oracle_check: bool = False, workers: int = 1) -> dict:
    result = minimize_from_config(cfg, workers)
    vqe = result.as_dict()
    energy = dict(vqe.pop("breakdown"))
    energy["vqe"] = vqe
    energy["best_energy"] = result.best_energy
    doc = {"energy": energy, "warnings": _warnings(result.breakdown.validity_ratio, cfg)}
    if not result.converged:
        doc["warnings"].append("optimizer budget exhausted before convergence")
    if oracle_check:
        doc["oracle"] = compare_with_oracle(cfg, energy)
    return doc


def _point_config(cfg: RunConfig, value: float) -> RunConfig:
    data = cfg.model_dump(mode="json")
    axis = cfg.sweep.axis
    data["task"] = cfg.sweep.task
    data["sweep"] = None
    if axis == "qubits":
        data["physics"]["qubits"] = int(value)
    elif axis == "order":
        data["order"] = int(value)
    elif axis == "shots":
        data["mode"] = "shots"
        data["shots"] = int(value)
    else:
        data["physics"]["compton_ratio"] = float(value)
        data["physics"]["hbar"] = None
    return parse_config(data)


def _sweep_point(args) -> dict:
    cfg, value = args
    point = _point_config(cfg, value)
    doc = run_vqe(point) if point.task == "vqe" else run_evaluate(point)
    energy = doc["energy"]
    gap = None
    if point.physics.qubits <= oracle.MAX_DENSE_QUBITS:
        gap = compare_with_oracle(point, energy)["signed_gap"]
    return {
        "axis_value": value,
        "kinetic": energy["kinetic"],
        "potential": energy["potential"],
        "total": energy["total"],
        "std_error": energy["std_error"],
        "oracle_gap": gap,
        "validity_ratio": energy["validity_ratio"],
        "warnings": doc["warnings"],
    }


def run_sweep(cfg: RunConfig, workers: int = 1) -> dict:
    jobs = [(cfg, v) for v in cfg.sweep.values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_sweep_point, jobs))
    else:
        points = [_sweep_point(job) for job in jobs]
    warnings = [f"{cfg.sweep.axis}={p['axis_value']}: {w}" for p in points for w in p["warnings"]]
    return {"energy": {"axis": cfg.sweep.axis, "points": points}, "warnings": warnings}


def sweep_csv(points: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for p in points:
        writer.writerow(["" if p[c] is None else repr(float(p[c])) for c in CSV_COLUMNS])
    return buf.getvalue()


def build_document(cfg: RunConfig, oracle_check: bool = False, workers: int = 1) -> dict:
    """Compute the result document; everything outside ``meta`` is deterministic."""
    started = time.perf_counter()
    if cfg.task == "evaluate":
        body = run_evaluate(cfg, oracle_check)
    elif cfg.task == "vqe":
        body = run_vqe(cfg, oracle_check, workers)
    else:
        body = run_sweep(cfg, workers)
    doc = {
        "config": cfg.resolved(),
        "coefficients": _coefficients(cfg),
        "energy": body["energy"],
        "warnings": body["warnings"],
        "software": {"name": "firstquant", "version": __version__},
    }
    if "oracle" in body:
        doc["oracle"] = body["oracle"]
    doc["meta"] = {
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "wall_seconds": time.perf_counter() - started,
    }
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"


def payload_bytes(doc: dict) -> bytes:
    """Serialised document without the ``meta`` block, for reproducibility checks."""
    return dumps({k: v for k, v in doc.items() if k != "meta"}).encode()


def _summary(doc: dict) -> str:
    cfg = doc["config"]
    energy = doc["energy"]
    if cfg["task"] == "sweep":
        line = f"sweep {energy['axis']}: {len(energy['points'])} points"
    else:
        line = (
            f"{cfg['task']} {cfg['boundary']} order={cfg['order']} mode={cfg['mode']} "
            f"total={energy['total']:.10g} kinetic={energy['kinetic']:.10g} "
            f"potential={energy['potential']:.10g} validity_ratio={energy['validity_ratio']:.4g}"
        )
        if "oracle" in doc:
            line += f" oracle_gap={doc['oracle']['abs_gap']:.3g} {'PASS' if doc['oracle']['passed'] else 'FAIL'}"
    if doc["warnings"]:
        line += f" WARNINGS={len(doc['warnings'])}: " + "; ".join(doc["warnings"])
    return line


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message, "exit_code": code}), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="firstquant", description=__doc__.splitlines()[0])
    parser.add_argument("task", choices=["evaluate", "vqe", "sweep"])
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", help="result JSON path (defaults to the config's output field)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--oracle-check", action="store_true", help="compare against the dense oracle")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if cfg.task != args.task:
            raise ConfigInvalid(f"config task {cfg.task!r} does not match command {args.task!r}")
        if args.seed is not None:
            data = cfg.model_dump(mode="json")
            data["seed"] = args.seed
            cfg = parse_config(data)
        out = args.out or cfg.output
        if not out:
            raise ConfigInvalid("no output path: pass --out or set 'output' in the config")
    except ConfigInvalid as exc:
        return _fail("ConfigInvalid", str(exc), EXIT_CONFIG)
    except OSError as exc:
        return _fail("IoError", str(exc), EXIT_IO)

    try:
        doc = build_document(cfg, args.oracle_check, max(1, args.workers))
    except ConfigInvalid as exc:
        return _fail("ConfigInvalid", str(exc), EXIT_CONFIG)
    except (FirstQuantError, ArithmeticError, ValueError) as exc:
        return _fail("ComputeError", f"{type(exc).__name__}: {exc}", EXIT_COMPUTE)

    try:
        out_path = Path(out)
        out_path.write_text(dumps(doc))
        if cfg.task == "sweep":
            out_path.with_suffix(".csv").write_text(sweep_csv(doc["energy"]["points"]))
    except OSError as exc:
        return _fail("IoError", str(exc), EXIT_IO)

    print(_summary(doc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
