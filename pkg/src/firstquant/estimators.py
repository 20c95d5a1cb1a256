"""Kinetic, potential and total energy for periodic and hard-wall grids.

Exact-mode plans read expectations straight off the statevector; shots-mode
plans route every observable through the simulated measurement circuits.
Both paths share the same coefficient bookkeeping, so they agree to
round-off in exact mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import circuits
from .circuits import Estimate, ShotPlan, Variant, combine
from .coefficients import CoefficientSet, alpha, is_valid_regime, validity_ratio
from .errors import ComplexAmplitudesRejected, LengthMismatchError, UnsupportedOrderError
from .grid import PhysicsConfig, WaveFunction
from .operators import BoundaryCondition, expectation_A, expectation_E

WEIGHT_SUM_TOL = 1e-12
ESTIMATOR_ORDERS = (1, 2)
BOUNDARY_LABELS = ("E0", "E1", "E2", "E0sq")


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """Diagonal potential ``scale * rho_V + offset`` with ``rho_V`` a probability vector."""

    weights: np.ndarray
    scale: float = 0.0
    offset: float = 0.0

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float).ravel()
        if np.any(w < 0):
            raise ValueError("potential weights must be non-negative")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"potential weights must sum to 1, got {w.sum()!r}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_shape(cls, values, scale: float, offset: float = 0.0) -> "PotentialSpec":
        v = np.asarray(values, dtype=float)
        total = v.sum()
        if total <= 0:
            raise ValueError("potential shape must have positive total weight")
        return cls(v / total, scale, offset)

    @classmethod
    def free(cls, qubits: int) -> "PotentialSpec":
        n = 2**qubits
        return cls(np.full(n, 1.0 / n), 0.0)

    @classmethod
    def uniform(cls, qubits: int, scale: float, offset: float = 0.0) -> "PotentialSpec":
        n = 2**qubits
        return cls(np.full(n, 1.0 / n), scale, offset)

    @classmethod
    def well(cls, qubits: int, lo: int, hi: int, scale: float, offset: float = 0.0) -> "PotentialSpec":
        """Weight spread evenly over grid indices ``lo..hi`` (inclusive), zero elsewhere."""
        n = 2**qubits
        if not 0 <= lo <= hi < n:
            raise ValueError(f"well interval [{lo}, {hi}] outside grid of {n} points")
        v = np.zeros(n)
        v[lo : hi + 1] = 1.0
        return cls.from_shape(v, scale, offset)

    @classmethod
    def harmonic(cls, qubits: int, scale: float, center: float = 0.5, offset: float = 0.0) -> "PotentialSpec":
        x = np.arange(2**qubits) / 2**qubits
        return cls.from_shape((x - center) ** 2, scale, offset)

    @property
    def diagonal(self) -> np.ndarray:
        return self.scale * self.weights + self.offset


@dataclass
class EnergyBreakdown:
    kinetic: float
    potential: float
    total: float
    per_order_terms: dict[int, float]
    boundary_terms: dict[str, float]
    std_error: float
    kinetic_std_error: float
    potential_std_error: float
    validity_ratio: float
    metadata: dict = field(default_factory=dict)

    @property
    def valid_regime(self) -> bool:
        return is_valid_regime(self.validity_ratio)

    def as_dict(self) -> dict:
        return {
            "kinetic": self.kinetic,
            "potential": self.potential,
            "total": self.total,
            "per_order_terms": {str(k): v for k, v in self.per_order_terms.items()},
            "boundary_terms": dict(self.boundary_terms),
            "std_error": self.std_error,
            "kinetic_std_error": self.kinetic_std_error,
            "potential_std_error": self.potential_std_error,
            "validity_ratio": self.validity_ratio,
            "metadata": dict(self.metadata),
        }


def _check_order(order: int) -> None:
    if order not in ESTIMATOR_ORDERS:
        raise UnsupportedOrderError(f"estimators support order 1 or 2, got {order}")


def _re_shift(state: WaveFunction, l: int, plan: ShotPlan) -> Estimate:
    """``Re <(A^dag)^l>``, directly or from the Hadamard test."""
    if plan.is_exact:
        return Estimate(expectation_A(state, l).real)
    return circuits.hadamard_test(state, l, plan)


def _boundary(state: WaveFunction, which: str, plan: ShotPlan, variant: Variant) -> Estimate:
    if plan.is_exact:
        if which in ("E1", "E2"):
            which = which + ("full" if variant is Variant.FULL else "paper")
        return Estimate(expectation_E(state, which))
    return circuits.estimate_E(state, which, plan, variant, allow_complex=True)


def _pbc_parts(state, config, order, plan):
    """Return (kinetic estimate, per-order contributions, Re<A^dag>, Re<A^dag 2>)."""
    _check_order(order)
    mc2 = config.rest_energy
    r2 = config.compton_ratio**2
    a1, a2 = float(alpha(1)), float(alpha(2))
    re1 = _re_shift(state, 1, plan)
    if order == 1:
        est = combine([(-mc2 * r2, re1)], offset=mc2 * r2)
        return est, {1: est.value}, re1, None
    b = CoefficientSet.compute(config, 2).beta
    re2 = _re_shift(state, 2, plan)
    est = combine([(2 * b[1], re1), (2 * b[2], re2)], offset=b[0])
    per_order = {
        1: mc2 * a1 * r2 * (2 - 2 * re1.value),
        2: -mc2 * a2 * r2 * r2 * (2 * re2.value - 8 * re1.value + 6),
    }
    return est, per_order, re1, re2


def kinetic_pbc(state: WaveFunction, config: PhysicsConfig, order: int, plan: ShotPlan | None = None) -> Estimate:
    """Periodic-grid kinetic energy through order ``p^(2*order)``."""
    plan = plan or ShotPlan.exact()
    return _pbc_parts(state, config, order, plan)[0]


def _dbc_parts(state, config, order, plan, variant, allow_complex):
    variant = Variant(variant)
    if not allow_complex and not state.is_real():
        raise ComplexAmplitudesRejected(
            "hard-wall estimator assumes real amplitudes; pass allow_complex=True to override"
        )
    pbc, per_order, _, _ = _pbc_parts(state, config, order, plan)
    mc2 = config.rest_energy
    r2 = config.compton_ratio**2
    e0 = _boundary(state, "E0", plan, variant)
    if order == 1:
        w = 0.5 * mc2 * r2
        per_order = {1: per_order[1] + w * e0.value}
        return combine([(1.0, pbc), (w, e0)]), per_order, {"E0": w * e0.value}
    g = CoefficientSet.compute(config, 2).gamma
    f = [e0] + [_boundary(state, name, plan, variant) for name in BOUNDARY_LABELS[1:]]
    est = combine([(1.0, pbc)] + list(zip(g, f)))
    boundary = {name: gd * fd.value for name, gd, fd in zip(BOUNDARY_LABELS, g, f)}
    a1, a2 = float(alpha(1)), float(alpha(2))
    e0v, e1v, e2v, e0sq = (x.value for x in f)
    per_order = {
        1: per_order[1] + mc2 * a1 * r2 * e0v,
        2: per_order[2] - mc2 * a2 * r2 * r2 * (4 * e0v - e1v - e2v + e0sq),
    }
    return est, per_order, boundary


def kinetic_dbc(
    state: WaveFunction,
    config: PhysicsConfig,
    order: int,
    plan: ShotPlan | None = None,
    variant: Variant | str = Variant.FULL,
    allow_complex: bool = False,
) -> Estimate:
    """Hard-wall kinetic energy: the periodic value plus boundary corrections."""
    plan = plan or ShotPlan.exact()
    return _dbc_parts(state, config, order, plan, variant, allow_complex)[0]


def potential_energy(state: WaveFunction, pot: PotentialSpec, plan: ShotPlan | None = None) -> Estimate:
    plan = plan or ShotPlan.exact()
    if pot.weights.size != state.grid_points:
        raise LengthMismatchError(
            f"potential has {pot.weights.size} weights, state has {state.grid_points} points"
        )
    probs = state.probabilities
    if plan.is_exact:
        return Estimate(float(pot.scale * np.dot(pot.weights, probs) + pot.offset))
    n = plan.shot_count
    counts = plan.rng(circuits.HISTOGRAM_STREAM).multinomial(n, probs / probs.sum())
    freq = counts / n
    mean = float(np.dot(pot.weights, freq))
    var = max(float(np.dot(pot.weights**2, freq)) - mean * mean, 0.0)
    return Estimate(
        pot.scale * mean + pot.offset, abs(pot.scale) * math.sqrt(var / n), n, plan.rng_seed
    )


def total_energy(
    state: WaveFunction,
    config: PhysicsConfig,
    bc: BoundaryCondition | str,
    order: int,
    pot: PotentialSpec | None = None,
    plan: ShotPlan | None = None,
    variant: Variant | str = Variant.FULL,
    allow_complex: bool = False,
) -> EnergyBreakdown:
    bc = BoundaryCondition(bc)
    plan = plan or ShotPlan.exact()
    pot = pot if pot is not None else PotentialSpec.free(config.qubits)
    if state.grid_points != config.grid_points:
        raise LengthMismatchError("state and config disagree on the number of grid points")
    if bc is BoundaryCondition.PBC:
        kin, per_order, *_ = _pbc_parts(state, config, order, plan)
        boundary: dict[str, float] = {}
    else:
        kin, per_order, boundary = _dbc_parts(state, config, order, plan, variant, allow_complex)
    v = potential_energy(state, pot, plan)
    tot = combine([(1.0, kin), (1.0, v)])
    return EnergyBreakdown(
        kinetic=kin.value,
        potential=v.value,
        total=kin.value + v.value,
        per_order_terms=per_order,
        boundary_terms=boundary,
        std_error=tot.std_error,
        kinetic_std_error=kin.std_error,
        potential_std_error=v.std_error,
        validity_ratio=validity_ratio(state, config, bc),
        metadata={
            "mode": plan.mode.value,
            "bc": bc.value,
            "order": order,
            "variant": Variant(variant).value,
            "shots": plan.shot_count,
            "seed": plan.rng_seed,
        },
    )
