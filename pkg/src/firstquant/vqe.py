"""Variational minimisation of the total energy over parameterised states.

Three ansatz families are available:

``grid_direct``
    Real amplitudes in hyperspherical coordinates (``2**L - 1`` angles).
    Universal over real states and normalised by construction.
``layered_rotation``
    Layers of single-qubit Y rotations followed by a CNOT chain, applied to
    ``|0...0>``. Qubit 0 is the most significant bit of the grid index.
``gaussian``
    Sampled Gaussian ``exp(-(x - center)^2 / (4 width^2))``.

Exact-mode runs use Nelder-Mead (scipy); shots-mode runs use SPSA.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize as scipy_minimize

from .circuits import ShotPlan, Variant
from .errors import ComplexAmplitudesRejected, NonpositiveWidthError, ParamLengthMismatch
from .estimators import EnergyBreakdown, PotentialSpec, total_energy
from .grid import PhysicsConfig, WaveFunction, make_state
from .operators import BoundaryCondition

DEFAULT_RESTARTS = 8

# Nelder-Mead coefficients (reflection, expansion, contraction, shrink) are the
# scipy defaults 1, 2, 0.5, 0.5.
SPSA_A = 10.0
SPSA_a = 0.1
SPSA_c = 0.1
SPSA_ALPHA = 0.602
SPSA_GAMMA = 0.101


class AnsatzKind(str, enum.Enum):
    GRID_DIRECT = "grid_direct"
    LAYERED_ROTATION = "layered_rotation"
    GAUSSIAN = "gaussian"


REAL_KINDS = frozenset(AnsatzKind)


class InitStrategy(str, enum.Enum):
    RANDOM_UNIFORM = "random_uniform"
    ZERO = "zero"
    PROVIDED = "provided"


@dataclass(frozen=True)
class AnsatzSpec:
    kind: AnsatzKind = AnsatzKind.GRID_DIRECT
    layers: int = 1
    init_strategy: InitStrategy = InitStrategy.RANDOM_UNIFORM
    initial_params: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", AnsatzKind(self.kind))
        object.__setattr__(self, "init_strategy", InitStrategy(self.init_strategy))
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if self.init_strategy is InitStrategy.PROVIDED and self.initial_params is None:
            raise ValueError("init_strategy 'provided' needs initial_params")

    def parameter_count(self, qubits: int) -> int:
        if self.kind is AnsatzKind.GRID_DIRECT:
            return 2**qubits - 1
        if self.kind is AnsatzKind.LAYERED_ROTATION:
            return qubits * self.layers
        return 2

    def initial(self, qubits: int, rng: np.random.Generator) -> np.ndarray:
        n = self.parameter_count(qubits)
        if self.init_strategy is InitStrategy.PROVIDED:
            params = np.asarray(self.initial_params, dtype=float)
            if params.size != n:
                raise ParamLengthMismatch(f"expected {n} initial params, got {params.size}")
            return params.copy()
        if self.init_strategy is InitStrategy.ZERO:
            if self.kind is AnsatzKind.GAUSSIAN:
                return np.array([0.5, 0.25])
            return np.zeros(n)
        if self.kind is AnsatzKind.GAUSSIAN:
            return np.array([rng.uniform(0.2, 0.8), rng.uniform(0.05, 0.5)])
        if self.kind is AnsatzKind.GRID_DIRECT:
            return rng.uniform(0.0, np.pi, n)
        return rng.uniform(-np.pi, np.pi, n)


# ---------------------------------------------------------------------------
# ansatz construction
# ---------------------------------------------------------------------------

def hyperspherical_amplitudes(angles: np.ndarray) -> np.ndarray:
    """Unit vector with ``c_0 = cos t1``, ``c_k = sin t1 ... sin tk cos t(k+1)``, last = prod sin."""
    angles = np.asarray(angles, dtype=float)
    sines = np.concatenate(([1.0], np.cumprod(np.sin(angles))))
    cosines = np.concatenate((np.cos(angles), [1.0]))
    return sines * cosines


def hyperspherical_angles(amplitudes) -> np.ndarray:
    """Inverse of :func:`hyperspherical_amplitudes` for a real unit vector."""
    c = np.asarray(amplitudes, dtype=float)
    c = c / np.linalg.norm(c)
    n = c.size
    # tail norms ||c[k:]|| computed from the back to keep precision
    tail = np.sqrt(np.cumsum((c**2)[::-1])[::-1])
    angles = np.empty(n - 1)
    for k in range(n - 2):
        angles[k] = math.atan2(tail[k + 1], c[k])
    angles[n - 2] = math.atan2(c[n - 1], c[n - 2])
    return angles


def _ry(theta: float) -> np.ndarray:
    ct, st = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[ct, -st], [st, ct]])


def layered_amplitudes(params: np.ndarray, qubits: int, layers: int) -> np.ndarray:
    psi = np.zeros((2,) * qubits)
    psi[(0,) * qubits] = 1.0
    params = np.asarray(params, dtype=float).reshape(layers, qubits)
    for layer in params:
        for q, theta in enumerate(layer):
            psi = np.moveaxis(np.tensordot(_ry(theta), psi, axes=([1], [q])), 0, q)
        for q in range(qubits - 1):
            # CNOT control q, target q+1: flip target where control is 1
            idx = [slice(None)] * qubits
            idx[q] = 1
            sub = psi[tuple(idx)]
            psi[tuple(idx)] = np.flip(sub, axis=q).copy()
    return psi.reshape(-1)


def gaussian_amplitudes(center: float, width: float, config: PhysicsConfig) -> np.ndarray:
    if width <= 0:
        raise NonpositiveWidthError(f"gaussian width must be positive, got {width}")
    x = config.positions()
    return np.exp(-((x - center) ** 2) / (4.0 * width**2))


def build_ansatz(spec: AnsatzSpec, params, config: PhysicsConfig) -> WaveFunction:
    params = np.asarray(params, dtype=float).ravel()
    expected = spec.parameter_count(config.qubits)
    if params.size != expected:
        raise ParamLengthMismatch(f"{spec.kind.value} ansatz takes {expected} params, got {params.size}")
    if spec.kind is AnsatzKind.GRID_DIRECT:
        amps = hyperspherical_amplitudes(params)
    elif spec.kind is AnsatzKind.LAYERED_ROTATION:
        amps = layered_amplitudes(params, config.qubits, spec.layers)
    else:
        amps = gaussian_amplitudes(params[0], params[1], config)
    return make_state(amps)


# ---------------------------------------------------------------------------
# objective and optimisers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Objective:
    config: PhysicsConfig
    bc: BoundaryCondition = BoundaryCondition.PBC
    order: int = 1
    pot: PotentialSpec | None = None
    plan: ShotPlan = field(default_factory=ShotPlan.exact)
    variant: Variant = Variant.FULL

    def breakdown(self, spec: AnsatzSpec, params, plan: ShotPlan | None = None) -> EnergyBreakdown:
        state = build_ansatz(spec, params, self.config)
        return total_energy(
            state, self.config, self.bc, self.order, self.pot, plan or self.plan, self.variant
        )


@dataclass
class RestartResult:
    index: int
    best_energy: float
    best_params: np.ndarray
    best_plan_seed: int
    evaluations: int
    iterations: int
    converged: bool
    history: list[float]


@dataclass
class VqeResult:
    best_energy: float
    best_params: np.ndarray
    breakdown: EnergyBreakdown
    iterations: int
    evaluations: int
    converged: bool
    history: list[float]
    seed: int
    best_restart: int
    restarts: list[RestartResult]

    def as_dict(self) -> dict:
        return {
            "best_energy": self.best_energy,
            "best_params": [float(p) for p in self.best_params],
            "breakdown": self.breakdown.as_dict(),
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "history": list(self.history),
            "seed": self.seed,
            "best_restart": self.best_restart,
            "restarts": [
                {
                    "index": r.index,
                    "best_energy": r.best_energy,
                    "evaluations": r.evaluations,
                    "iterations": r.iterations,
                    "converged": r.converged,
                }
                for r in self.restarts
            ],
        }


class _Counter:
    """Wraps the objective; gives each call its own shot stream and tracks the best."""

    def __init__(self, objective: Objective, spec: AnsatzSpec, restart: int):
        self.objective = objective
        self.spec = spec
        self.restart = restart
        self.calls = 0
        self.best = math.inf
        self.best_params: np.ndarray | None = None
        self.best_seed = objective.plan.rng_seed

    def __call__(self, params: np.ndarray) -> float:
        plan = self.objective.plan.derive(self.restart, self.calls)
        self.calls += 1
        if self.spec.kind is AnsatzKind.GAUSSIAN:
            # the state depends on width**2 only; fold the optimiser back to width > 0
            params = np.array([params[0], abs(params[1])])
        energy = self.objective.breakdown(self.spec, params, plan).total
        if energy < self.best:
            self.best = energy
            self.best_params = np.array(params, dtype=float)
            self.best_seed = plan.rng_seed
        return energy


def _nelder_mead(f: _Counter, x0: np.ndarray, max_evals: int, tol: float):
    history: list[float] = []
    iterations = 0
    converged = False
    x = x0
    # restart from the previous optimum until a run ends without improvement;
    # collapsed simplices are common in high-dimensional angle spaces
    while f.calls < max_evals:
        before = f.best
        res = scipy_minimize(
            f,
            x,
            method="Nelder-Mead",
            callback=lambda xk: history.append(f.best),
            options={"maxfev": max_evals - f.calls, "xatol": tol, "fatol": np.inf},
        )
        iterations += int(res.nit)
        x = f.best_params
        converged = bool(res.success)
        if not converged or before - f.best <= tol * max(1.0, abs(f.best)):
            break
    return iterations, converged, history


def _spsa(f: _Counter, x0: np.ndarray, max_evals: int, tol: float, rng: np.random.Generator):
    history: list[float] = []
    x = np.array(x0, dtype=float)
    k = 0
    converged = False
    f(x)
    while f.calls + 3 <= max_evals:
        k += 1
        ak = SPSA_a / (k + SPSA_A) ** SPSA_ALPHA
        ck = SPSA_c / k**SPSA_GAMMA
        delta = rng.choice([-1.0, 1.0], size=x.size)
        grad = (f(x + ck * delta) - f(x - ck * delta)) / (2 * ck) * delta
        step = ak * grad
        x = x - step
        f(x)
        history.append(f.best)
        if np.linalg.norm(step) < tol:
            converged = True
            break
    return k, converged, history


def _run_restart(args) -> RestartResult:
    spec, objective, optimizer, max_evals, tol, seed, index = args
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    x0 = spec.initial(objective.config.qubits, rng)
    f = _Counter(objective, spec, index)
    if optimizer == "nelder_mead":
        iterations, converged, history = _nelder_mead(f, x0, max_evals, tol)
    elif optimizer == "spsa":
        iterations, converged, history = _spsa(f, x0, max_evals, tol, rng)
    else:
        raise ValueError(f"unknown optimizer {optimizer!r}")
    return RestartResult(
        index, f.best, f.best_params, f.best_seed, f.calls, iterations, converged, history
    )


def minimize(
    spec: AnsatzSpec,
    objective: Objective,
    optimizer: str = "nelder_mead",
    max_evals: int = 20000,
    tol: float = 1e-9,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    workers: int = 1,
) -> VqeResult:
    """Multi-start minimisation of the total energy over ansatz parameters.

    Running out of ``max_evals`` is reported as ``converged=False`` rather than
    raised. The returned breakdown is recomputed at the best parameters with
    the shot stream that produced the best value, so it reproduces exactly.
    """
    if max_evals < 1 or tol <= 0:
        raise ValueError("budget must be positive")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if objective.bc is BoundaryCondition.DBC and spec.kind not in REAL_KINDS:
        raise ComplexAmplitudesRejected(f"ansatz {spec.kind.value} is not real-valued")
    if optimizer == "nelder_mead" and not objective.plan.is_exact and objective.plan.shot_count < 10_000:
        raise ValueError("Nelder-Mead is not noise robust; use spsa for low-shot plans")
    jobs = [(spec, objective, optimizer, max_evals, tol, seed, i) for i in range(restarts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_restart, jobs))
    else:
        runs = [_run_restart(job) for job in jobs]
    best = min(runs, key=lambda r: (r.best_energy, r.index))
    plan = objective.plan if objective.plan.is_exact else ShotPlan(
        objective.plan.mode, objective.plan.shot_count, best.best_plan_seed
    )
    breakdown = objective.breakdown(spec, best.best_params, plan)
    return VqeResult(
        best_energy=breakdown.total,
        best_params=best.best_params,
        breakdown=breakdown,
        iterations=sum(r.iterations for r in runs),
        evaluations=sum(r.evaluations for r in runs),
        converged=best.converged,
        history=best.history,
        seed=seed,
        best_restart=best.index,
        restarts=runs,
    )
