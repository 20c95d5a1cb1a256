"""Position-grid state and physical parameters.

Everything lives on the scaled coordinate ``x in [0, 1)`` sampled at
``x_j = j / 2**L``. The mass, light speed and Planck constant are free
positive numbers of that scaled problem, so the reduced Compton wavelength
``hbar / (m c)`` is also expressed in units of the scaled box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BadLengthError, IndexOutOfRangeError, ZeroNormError

NORM_TOL = 1e-12


@dataclass(frozen=True)
class PhysicsConfig:
    """Mass, light speed, Planck constant and qubit count of a 1D grid problem."""

    mass: float
    light_speed: float
    hbar: float
    qubits: int

    def __post_init__(self) -> None:
        if int(self.qubits) != self.qubits or self.qubits < 2:
            raise ValueError(f"qubits must be an integer >= 2, got {self.qubits}")
        for name in ("mass", "light_speed", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value}")

    @classmethod
    def from_compton_ratio(
        cls, ratio: float, qubits: int, mass: float = 1.0, light_speed: float = 1.0
    ) -> "PhysicsConfig":
        """Pick hbar so that the Compton-to-grid ratio equals ``ratio``."""
        hbar = ratio * mass * light_speed / 2**qubits
        return cls(mass=mass, light_speed=light_speed, hbar=hbar, qubits=qubits)

    @property
    def grid_points(self) -> int:
        return 2**self.qubits

    @property
    def delta_x(self) -> float:
        return math.ldexp(1.0, -self.qubits)

    @property
    def compton(self) -> float:
        """Reduced Compton wavelength hbar / (m c), in scaled length units."""
        return self.hbar / (self.mass * self.light_speed)

    @property
    def compton_ratio(self) -> float:
        """Reduced Compton wavelength measured in grid spacings."""
        return math.ldexp(self.compton, self.qubits)

    @property
    def rest_energy(self) -> float:
        return self.mass * self.light_speed**2

    @property
    def momentum_scale(self) -> float:
        """``m c * compton_ratio``, i.e. hbar / delta_x."""
        return self.mass * self.light_speed * self.compton_ratio

    def positions(self) -> np.ndarray:
        return np.arange(self.grid_points) / self.grid_points


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Normalised complex amplitudes over the ``2**L`` grid points.

    Build instances through :func:`make_state` or :func:`sample_function`;
    the amplitude array is made read-only so the value can be shared.
    """

    amplitudes: np.ndarray
    renorm_factor: float = field(default=1.0)

    @property
    def qubits(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1

    @property
    def grid_points(self) -> int:
        return int(self.amplitudes.size)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def is_real(self, tol: float = 1e-12) -> bool:
        """True when all amplitudes are real up to one global phase."""
        amps = self.amplitudes
        k = int(np.argmax(np.abs(amps)))
        phase = amps[k] / abs(amps[k])
        return bool(np.max(np.abs((amps / phase).imag)) <= tol)

    def __len__(self) -> int:
        return self.grid_points


def _check_length(n: int) -> int:
    if n < 4 or n & (n - 1):
        raise BadLengthError(f"state length must be a power of two >= 4, got {n}")
    return n.bit_length() - 1


def make_state(amplitudes) -> WaveFunction:
    """Return a normalised copy of ``amplitudes`` as a :class:`WaveFunction`.

    >>> make_state([1, 1, 1, 1]).amplitudes.real
    array([0.5, 0.5, 0.5, 0.5])
    """
    amps = np.array(amplitudes, dtype=np.complex128).ravel()
    _check_length(amps.size)
    if not np.all(np.isfinite(amps)):
        raise ValueError("amplitudes must be finite")
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise ZeroNormError("cannot normalise an all-zero amplitude vector")
    amps = amps / norm
    amps.setflags(write=False)
    return WaveFunction(amps, renorm_factor=1.0 / norm)


def sample_function(f: Callable[[float], complex], config: PhysicsConfig) -> WaveFunction:
    """Sample ``f`` at the grid positions ``j / 2**L`` and normalise."""
    values = [complex(f(x)) for x in config.positions()]
    return make_state(values)


def probability(state: WaveFunction, j: int) -> float:
    if not 0 <= j < state.grid_points:
        raise IndexOutOfRangeError(f"index {j} outside [0, {state.grid_points})")
    return float(abs(state.amplitudes[j]) ** 2)


# Frequently used fixtures.

def uniform_state(qubits: int) -> WaveFunction:
    return make_state(np.ones(2**qubits))


def basis_state(qubits: int, j: int) -> WaveFunction:
    amps = np.zeros(2**qubits)
    amps[j] = 1.0
    return make_state(amps)


def plane_wave(qubits: int, k: int) -> WaveFunction:
    n = 2**qubits
    return make_state(np.exp(2j * np.pi * k * np.arange(n) / n))


def dirichlet_sine(qubits: int, mode: int = 1) -> WaveFunction:
    """Eigenvector ``sin(pi k (j+1)/(N+1))`` of the hard-wall lattice Laplacian."""
    n = 2**qubits
    return make_state(np.sin(np.pi * mode * (np.arange(n) + 1) / (n + 1)))
