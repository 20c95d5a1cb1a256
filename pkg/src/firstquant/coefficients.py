"""Series coefficients for the relativistic kinetic energy.

``alpha_l`` are the Taylor coefficients of ``sqrt(1 + x) - 1`` (up to the
alternating sign); ``beta`` regroups the periodic-lattice series in terms of
``<A^(l)>`` and ``gamma`` weights the boundary corrections needed for hard
walls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import UnsupportedOrderError
from .grid import PhysicsConfig, WaveFunction

VALIDITY_THRESHOLD = 0.1


@lru_cache(maxsize=None)
def alpha(l: int) -> Fraction:
    """Exact ``(2l)! / ((l!)^2 (2l-1) 4^l)``.

    >>> [str(alpha(l)) for l in (1, 2, 3, 4)]
    ['1/2', '1/8', '1/16', '5/128']
    """
    if l < 1:
        raise ValueError("alpha is defined for l >= 1")
    return Fraction(math.comb(2 * l, l), (2 * l - 1) * 4**l)


def beta(config: PhysicsConfig, order: int) -> list[float]:
    """Coefficients ``beta_0..beta_order`` of the periodic kinetic energy."""
    mc2 = config.rest_energy
    r2 = config.compton_ratio**2
    a1, a2 = float(alpha(1)), float(alpha(2))
    if order == 1:
        return [2 * mc2 * a1 * r2, -mc2 * a1 * r2]
    if order == 2:
        r4 = r2 * r2
        return [
            2 * mc2 * (a1 * r2 - 3 * a2 * r4),
            mc2 * (-a1 * r2 + 4 * a2 * r4),
            -mc2 * a2 * r4,
        ]
    raise UnsupportedOrderError(f"beta closed forms exist for order 1 or 2, got {order}")


def gamma(config: PhysicsConfig) -> list[float]:
    """Weights of ``<E0>, <E1>, <E2>, <E0^2>`` in the hard-wall correction at order 2."""
    mc2 = config.rest_energy
    r2 = config.compton_ratio**2
    a1, a2 = float(alpha(1)), float(alpha(2))
    g = mc2 * a2 * r2 * r2
    return [mc2 * a1 * r2 * (1 - r2), g, g, -g]


@dataclass(frozen=True)
class CoefficientSet:
    order: int
    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    gamma: tuple[float, ...] | None
    config: PhysicsConfig

    @classmethod
    @lru_cache(maxsize=256)
    def compute(cls, config: PhysicsConfig, order: int) -> "CoefficientSet":
        return cls(
            order=order,
            alpha=tuple(float(alpha(l)) for l in range(1, order + 1)),
            beta=tuple(beta(config, order)),
            gamma=tuple(gamma(config)) if order >= 2 else None,
            config=config,
        )

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "alpha": list(self.alpha),
            "beta": list(self.beta),
            "gamma": None if self.gamma is None else list(self.gamma),
        }


def validity_ratio(state: WaveFunction, config: PhysicsConfig, bc) -> float:
    """``<p^2> / (m c)^2`` for the given boundary condition; keep it small."""
    from .operators import BoundaryCondition, expectation_A_sym, expectation_E

    bc = BoundaryCondition(bc)
    diff = 2.0 - expectation_A_sym(state, 1)
    if bc is BoundaryCondition.DBC:
        diff += expectation_E(state, "E0")
    return config.compton_ratio**2 * diff


def is_valid_regime(ratio: float) -> bool:
    return ratio <= VALIDITY_THRESHOLD
