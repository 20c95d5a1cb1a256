"""Cyclic translation operator, boundary couplings and lattice momentum matrices.

The translation ``A`` (the quantum adder) sends grid point ``|j>`` to
``|j+1 mod N>``. On a statevector it is a cyclic roll, so the expectation
paths below never build matrices. Dense matrices are provided separately
for oracle work and stay within ``L <= 10``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .coefficients import alpha
from .errors import UnsupportedOrderError
from .grid import PhysicsConfig, WaveFunction

HERMITIAN_TOL = 1e-14
MAX_KINETIC_ORDER = 3


class BoundaryCondition(str, enum.Enum):
    PBC = "pbc"
    DBC = "dbc"


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


# Boundary-operator labels. The "full" variants are what the product
# definitions E1 = A E0 + E0 A^dag and E2 = E0 A + A^dag E0 evaluate to under
# the cyclic adder; the "paper" variants drop their diagonal pieces.
E_OPERATORS = ("E0", "E1full", "E2full", "E0sq", "E1paper", "E2paper")


@dataclass(frozen=True, eq=False)
class LatticeOperator:
    matrix: np.ndarray
    label: str
    boundary: BoundaryCondition | None = None

    def __post_init__(self) -> None:
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("lattice operator must be square")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL * max(1.0, np.max(np.abs(m))):
            raise ValueError(f"operator {self.label!r} is not Hermitian")

    def expectation(self, state: WaveFunction) -> float:
        c = state.amplitudes
        return float(np.vdot(c, self.matrix @ c).real)

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


# ---------------------------------------------------------------------------
# statevector paths
# ---------------------------------------------------------------------------

def apply_shift(state: WaveFunction, power: int, direction: Direction | str = Direction.FORWARD) -> WaveFunction:
    """Apply ``A**power`` (forward) or ``(A^dag)**power`` (backward)."""
    if power < 0:
        raise ValueError("power must be non-negative")
    direction = Direction(direction)
    step = power if direction is Direction.FORWARD else -power
    amps = np.roll(state.amplitudes, step)
    amps.setflags(write=False)
    return WaveFunction(amps)


def expectation_A(state: WaveFunction, l: int) -> complex:
    """Return ``<psi| (A^dag)**l |psi>``.

    The Hermitian combination ``A**l + (A^dag)**l`` has expectation
    ``2 * Re`` of this value.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    c = state.amplitudes
    n = c.size
    l %= n
    # (A^dag c)_j = c_{j+l mod n}
    return complex(np.vdot(c[: n - l], c[l:]) + np.vdot(c[n - l :], c[:l]))


def expectation_A_sym(state: WaveFunction, l: int) -> float:
    return 2.0 * expectation_A(state, l).real


def expectation_E(state: WaveFunction, which: str) -> float:
    c = state.amplitudes
    n = c.size
    p0 = abs(c[0]) ** 2
    plast = abs(c[n - 1]) ** 2

    def cross(i: int, j: int) -> float:
        return 2.0 * (np.conj(c[i]) * c[j]).real

    if which == "E0":
        return float(cross(n - 1, 0))
    if which == "E0sq":
        return float(p0 + plast)
    if which == "E1paper":
        return float(cross(1, n - 1))
    if which == "E2paper":
        return float(cross(0, n - 2))
    if which == "E1full":
        return float(cross(1, n - 1) + 2.0 * p0)
    if which == "E2full":
        return float(cross(0, n - 2) + 2.0 * plast)
    raise ValueError(f"unknown boundary operator {which!r}; expected one of {E_OPERATORS}")


# ---------------------------------------------------------------------------
# dense matrices
# ---------------------------------------------------------------------------

def shift_matrix(n: int, power: int = 1) -> np.ndarray:
    """Dense matrix of ``A**power`` on ``n`` grid points."""
    return np.roll(np.eye(n), power, axis=0)


def boundary_matrix(n: int, which: str) -> np.ndarray:
    """Dense matrix of a boundary operator, built from its definition."""
    e0 = np.zeros((n, n))
    e0[n - 1, 0] = e0[0, n - 1] = 1.0
    a = shift_matrix(n)
    if which == "E0":
        return e0
    if which == "E0sq":
        return e0 @ e0
    if which == "E1full":
        return a @ e0 + e0 @ a.T
    if which == "E2full":
        return e0 @ a + a.T @ e0
    m = np.zeros((n, n))
    if which == "E1paper":
        m[1, n - 1] = m[n - 1, 1] = 1.0
        return m
    if which == "E2paper":
        m[0, n - 2] = m[n - 2, 0] = 1.0
        return m
    raise ValueError(f"unknown boundary operator {which!r}")


def second_difference(n: int, bc: BoundaryCondition | str) -> np.ndarray:
    """``2*1 - A1`` (PBC) or ``2*1 - A1 + E0`` (DBC), without physical prefactor."""
    bc = BoundaryCondition(bc)
    a = shift_matrix(n)
    d = 2.0 * np.eye(n) - a - a.T
    if bc is BoundaryCondition.DBC:
        d = d + boundary_matrix(n, "E0")
    return d


def build_p2_matrix(config: PhysicsConfig, bc: BoundaryCondition | str) -> LatticeOperator:
    bc = BoundaryCondition(bc)
    p2 = config.momentum_scale**2 * second_difference(config.grid_points, bc)
    return LatticeOperator(p2, "p2", bc)


def build_kinetic_matrix(config: PhysicsConfig, bc: BoundaryCondition | str, order: int) -> LatticeOperator:
    """Truncated series ``m c^2 sum_l (-1)^(l+1) alpha_l (p^2/m^2c^2)^l`` on the lattice."""
    if order not in range(1, MAX_KINETIC_ORDER + 1):
        raise UnsupportedOrderError(f"kinetic order must be 1..{MAX_KINETIC_ORDER}, got {order}")
    bc = BoundaryCondition(bc)
    mc = config.mass * config.light_speed
    x = build_p2_matrix(config, bc).matrix / mc**2
    n = config.grid_points
    total = np.zeros((n, n))
    power = np.eye(n)
    for l in range(1, order + 1):
        power = power @ x
        total += (-1) ** (l + 1) * float(alpha(l)) * power
    total = config.rest_energy * 0.5 * (total + total.T)
    return LatticeOperator(total, f"K{order}", bc)
