"""Dense-matrix ground truth for the lattice Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooLargeError
from .estimators import PotentialSpec
from .grid import PhysicsConfig, WaveFunction, make_state
from .operators import BoundaryCondition, build_kinetic_matrix, build_p2_matrix

MAX_DENSE_QUBITS = 10
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectralResult:
    eigenvalues: np.ndarray
    ground_energy: float
    ground_vector: WaveFunction
    method: str
    residual: float = 0.0


def _check_size(config: PhysicsConfig) -> None:
    if config.qubits > MAX_DENSE_QUBITS:
        raise TooLargeError(f"dense oracle limited to L <= {MAX_DENSE_QUBITS}, got {config.qubits}")


def _pot(config: PhysicsConfig, pot: PotentialSpec | None) -> PotentialSpec:
    return pot if pot is not None else PotentialSpec.free(config.qubits)


def diagonalise(h: np.ndarray, method: str = "dense") -> SpectralResult:
    """Full symmetric eigendecomposition with a residual check on the ground pair."""
    h = 0.5 * (h + h.conj().T)
    vals, vecs = np.linalg.eigh(h)
    v0 = vecs[:, 0]
    # fix the sign convention so the largest component is positive
    k = int(np.argmax(np.abs(v0)))
    v0 = v0 * (abs(v0[k]) / v0[k])
    residual = float(np.linalg.norm(h @ v0 - vals[0] * v0))
    scale = max(float(np.linalg.norm(h, 2)), 1e-300)
    if residual > RESIDUAL_TOL * scale:
        raise ArithmeticError(f"eigensolver residual {residual:.3e} too large")
    return SpectralResult(vals, float(vals[0]), make_state(v0), method, residual)


def hamiltonian_matrix(
    config: PhysicsConfig, bc: BoundaryCondition | str, order: int, pot: PotentialSpec | None = None
) -> np.ndarray:
    _check_size(config)
    return build_kinetic_matrix(config, bc, order).matrix + np.diag(_pot(config, pot).diagonal)


def exact_ground(
    config: PhysicsConfig, bc: BoundaryCondition | str, order: int, pot: PotentialSpec | None = None
) -> SpectralResult:
    return diagonalise(hamiltonian_matrix(config, bc, order, pot))


def analytic_p2_spectrum(config: PhysicsConfig, bc: BoundaryCondition | str) -> np.ndarray:
    """Closed-form eigenvalues of the lattice ``p^2``, sorted ascending."""
    bc = BoundaryCondition(bc)
    n = config.grid_points
    scale = config.momentum_scale**2
    if bc is BoundaryCondition.PBC:
        k = np.arange(n)
        vals = scale * (2 - 2 * np.cos(2 * np.pi * k / n))
    else:
        k = np.arange(1, n + 1)
        vals = scale * (2 - 2 * np.cos(k * np.pi / (n + 1)))
    return np.sort(vals)


def sqrt_kinetic_matrix(config: PhysicsConfig, bc: BoundaryCondition | str) -> np.ndarray:
    """``m c^2 (sqrt(1 + p^2/(m c)^2) - 1)`` as a matrix function of the lattice ``p^2``."""
    _check_size(config)
    p2 = build_p2_matrix(config, bc).matrix
    mc = config.mass * config.light_speed
    vals, vecs = np.linalg.eigh(p2)
    x = np.clip(vals, 0.0, None) / mc**2
    # sqrt(1+x) - 1 written to avoid cancellation at small x
    f = config.rest_energy * x / (np.sqrt(1.0 + x) + 1.0)
    k = (vecs * f) @ vecs.conj().T
    return 0.5 * (k + k.conj().T)


def exact_sqrt_kinetic_ground(
    config: PhysicsConfig, bc: BoundaryCondition | str, pot: PotentialSpec | None = None
) -> SpectralResult:
    h = sqrt_kinetic_matrix(config, bc) + np.diag(_pot(config, pot).diagonal)
    return diagonalise(h)


def truncation_bound(config: PhysicsConfig, bc: BoundaryCondition | str) -> float:
    """First omitted series term ``alpha_3 x^3 m c^2`` at the largest ``x = p^2/(m c)^2``.

    For ``0 <= x <= 1`` the alternating series for ``sqrt(1+x) - 1`` is bounded
    by its first dropped term, so this caps the order-2 truncation gap.
    """
    from .coefficients import alpha

    mc = config.mass * config.light_speed
    x_max = float(analytic_p2_spectrum(config, bc)[-1]) / mc**2
    return float(alpha(3)) * x_max**3 * config.rest_energy
