"""Run configuration schema and its translation into library objects."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import grid
from .circuits import ShotPlan
from .errors import ConfigInvalid
from .estimators import PotentialSpec
from .grid import PhysicsConfig, WaveFunction
from .vqe import AnsatzSpec, build_ansatz

SCHEMA_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PhysicsBlock(_Strict):
    mass: float = Field(1.0, gt=0)
    c: float = Field(1.0, gt=0)
    hbar: Optional[float] = Field(None, gt=0)
    compton_ratio: Optional[float] = Field(None, gt=0)
    qubits: int = Field(..., ge=2, le=20)

    @model_validator(mode="after")
    def _one_length_scale(self):
        if (self.hbar is None) == (self.compton_ratio is None):
            raise ValueError("give exactly one of hbar or compton_ratio")
        return self

    def resolve(self) -> PhysicsConfig:
        if self.hbar is not None:
            return PhysicsConfig(self.mass, self.c, self.hbar, self.qubits)
        return PhysicsConfig.from_compton_ratio(self.compton_ratio, self.qubits, self.mass, self.c)


class PotentialBlock(_Strict):
    kind: Literal["none", "uniform", "well", "harmonic", "custom_weights"] = "none"
    scale: float = 0.0
    offset: float = 0.0
    interval: tuple[float, float] = (0.25, 0.75)
    center: float = 0.5
    weights: Optional[list[float]] = None

    @model_validator(mode="after")
    def _weights_present(self):
        if self.kind == "custom_weights" and not self.weights:
            raise ValueError("custom_weights potential needs a weights list")
        lo, hi = self.interval
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError("well interval must satisfy 0 <= lo < hi <= 1")
        return self

    def resolve(self, qubits: int) -> PotentialSpec:
        n = 2**qubits
        if self.kind == "none":
            return PotentialSpec(np.full(n, 1.0 / n), 0.0, self.offset)
        if self.kind == "uniform":
            return PotentialSpec.uniform(qubits, self.scale, self.offset)
        if self.kind == "harmonic":
            return PotentialSpec.harmonic(qubits, self.scale, self.center, self.offset)
        if self.kind == "well":
            x = np.arange(n) / n
            inside = np.flatnonzero((x >= self.interval[0]) & (x < self.interval[1]))
            if inside.size == 0:
                raise ConfigInvalid(f"well interval {self.interval} holds no grid point at L={qubits}")
            return PotentialSpec.well(qubits, int(inside[0]), int(inside[-1]), self.scale, self.offset)
        if len(self.weights) != n:
            raise ConfigInvalid(f"custom_weights has {len(self.weights)} entries, grid has {n}")
        return PotentialSpec.from_shape(self.weights, self.scale, self.offset)


class AnsatzBlock(_Strict):
    kind: Literal["grid_direct", "layered_rotation", "gaussian"] = "grid_direct"
    layers: int = Field(1, ge=1)
    init_strategy: Literal["random_uniform", "zero", "provided"] = "random_uniform"
    initial_params: Optional[list[float]] = None

    def resolve(self) -> AnsatzSpec:
        params = None if self.initial_params is None else tuple(self.initial_params)
        return AnsatzSpec(self.kind, self.layers, self.init_strategy, params)


class StateBlock(_Strict):
    """Trial state for the ``evaluate`` task."""

    kind: Literal["uniform", "basis", "plane_wave", "dirichlet_sine", "amplitudes", "ansatz"] = "uniform"
    index: int = 0
    k: int = 1
    mode: int = 1
    real: Optional[list[float]] = None
    imag: Optional[list[float]] = None
    params: Optional[list[float]] = None

    def resolve(self, config: PhysicsConfig, ansatz: AnsatzBlock) -> WaveFunction:
        L = config.qubits
        if self.kind == "uniform":
            return grid.uniform_state(L)
        if self.kind == "basis":
            if not 0 <= self.index < config.grid_points:
                raise ConfigInvalid(f"basis index {self.index} outside grid")
            return grid.basis_state(L, self.index)
        if self.kind == "plane_wave":
            return grid.plane_wave(L, self.k)
        if self.kind == "dirichlet_sine":
            return grid.dirichlet_sine(L, self.mode)
        if self.kind == "amplitudes":
            if self.real is None:
                raise ConfigInvalid("amplitudes state needs a 'real' list")
            amps = np.asarray(self.real, dtype=complex)
            if self.imag is not None:
                if len(self.imag) != len(self.real):
                    raise ConfigInvalid("'real' and 'imag' lengths differ")
                amps = amps + 1j * np.asarray(self.imag)
            if amps.size != config.grid_points:
                raise ConfigInvalid(f"amplitudes length {amps.size} != {config.grid_points}")
            return grid.make_state(amps)
        if self.params is None:
            raise ConfigInvalid("ansatz state needs 'params'")
        return build_ansatz(ansatz.resolve(), self.params, config)


class OptimizerBlock(_Strict):
    name: Literal["nelder_mead", "spsa"] = "nelder_mead"
    max_evals: int = Field(20000, ge=1)
    tol: float = Field(1e-9, gt=0)
    restarts: int = Field(8, ge=1)


class SweepBlock(_Strict):
    axis: Literal["qubits", "order", "shots", "compton_ratio"]
    values: list[float] = Field(..., min_length=1)
    task: Literal["evaluate", "vqe"] = "evaluate"


class OracleBlock(_Strict):
    tolerance: float = Field(1e-10, gt=0)
    shot_sigmas: float = Field(5.0, gt=0)


class RunConfig(_Strict):
    schema_version: Literal[1]
    task: Literal["evaluate", "vqe", "sweep"]
    physics: PhysicsBlock
    boundary: Literal["pbc", "dbc"] = "pbc"
    order: Literal[1, 2] = 1
    dbc_variant: Literal["full", "paper_literal"] = "full"
    mode: Literal["exact", "shots"] = "exact"
    shots: int = Field(0, ge=0)
    seed: int = Field(0, ge=0, lt=2**64)
    allow_complex: bool = False
    potential: PotentialBlock = PotentialBlock()
    state: StateBlock = StateBlock()
    ansatz: AnsatzBlock = AnsatzBlock()
    optimizer: OptimizerBlock = OptimizerBlock()
    sweep: Optional[SweepBlock] = None
    oracle: OracleBlock = OracleBlock()
    output: Optional[str] = None

    @model_validator(mode="after")
    def _consistency(self):
        if self.mode == "shots" and self.shots < 1:
            raise ValueError("shots mode needs shots >= 1")
        if self.task == "sweep" and self.sweep is None:
            raise ValueError("sweep task needs a sweep block")
        if self.potential.kind == "custom_weights":
            n = 2**self.physics.qubits
            if len(self.potential.weights) != n and not (self.sweep and self.sweep.axis == "qubits"):
                raise ValueError(f"custom_weights length must be 2**qubits = {n}")
        return self

    def shot_plan(self) -> ShotPlan:
        if self.mode == "exact":
            return ShotPlan.exact()
        return ShotPlan.shots(self.shots, self.seed)

    def resolved(self) -> dict:
        return self.model_dump(mode="json")


def parse_config(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigInvalid(str(exc)) from exc


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON run configuration."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigInvalid("config root must be a JSON object")
    return parse_config(data)
