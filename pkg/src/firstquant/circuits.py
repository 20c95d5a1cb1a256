"""Measurement circuits: the Hadamard test and the reference-state overlap test.

Both circuits are simulated at the level of their outcome distributions.
In exact mode the returned value is the expectation itself; in shots mode a
seeded generator draws the control-qubit (or overlap) outcomes and the
binomial standard error is reported alongside the sample mean.

Random streams are keyed by the observable, so the same reference state
measured twice inside one estimate reuses the same draws.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ComplexAmplitudesRejected
from .grid import WaveFunction, basis_state, make_state
from .operators import expectation_A

# stream tags for ShotPlan.rng
HADAMARD_STREAM = 1
OVERLAP_STREAM = 2
HISTOGRAM_STREAM = 3


class Mode(str, enum.Enum):
    EXACT = "exact"
    SHOTS = "shots"


class Variant(str, enum.Enum):
    FULL = "full"
    PAPER_LITERAL = "paper_literal"


@dataclass(frozen=True)
class ShotPlan:
    mode: Mode = Mode.EXACT
    shot_count: int = 0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.SHOTS and self.shot_count < 1:
            raise ValueError("shots mode needs shot_count >= 1")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must fit in 64 bits")

    @classmethod
    def exact(cls) -> "ShotPlan":
        return cls(Mode.EXACT)

    @classmethod
    def shots(cls, shot_count: int, seed: int = 0) -> "ShotPlan":
        return cls(Mode.SHOTS, int(shot_count), int(seed))

    @property
    def is_exact(self) -> bool:
        return self.mode is Mode.EXACT

    def rng(self, *key: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.rng_seed, spawn_key=tuple(key)))

    def derive(self, *index: int) -> "ShotPlan":
        """Plan with an independent seed, deterministic in (seed, index)."""
        if self.is_exact:
            return self
        seq = np.random.SeedSequence(self.rng_seed, spawn_key=(0, *index))
        return replace(self, rng_seed=int(seq.generate_state(1, np.uint64)[0]))


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float = 0.0
    shots: int = 0
    seed: int | None = None

    def __add__(self, other: "Estimate") -> "Estimate":
        return combine([(1.0, self), (1.0, other)])


def combine(terms, offset: float = 0.0) -> Estimate:
    """Linear combination of estimates; errors add in quadrature."""
    value = offset
    var = 0.0
    shots = 0
    seed = None
    for weight, est in terms:
        value += weight * est.value
        var += (weight * est.std_error) ** 2
        shots = max(shots, est.shots)
        seed = est.seed if est.seed is not None else seed
    return Estimate(value, math.sqrt(var), shots, seed)


def _sample_pm1(p_plus: float, plan: ShotPlan, *key: int) -> Estimate:
    n = plan.shot_count
    p_plus = min(max(p_plus, 0.0), 1.0)
    k = int(plan.rng(*key).binomial(n, p_plus))
    mean = 2.0 * k / n - 1.0
    return Estimate(mean, math.sqrt(max(1.0 - mean * mean, 0.0) / n), n, plan.rng_seed)


def _sample_bernoulli(p: float, plan: ShotPlan, *key: int) -> Estimate:
    n = plan.shot_count
    p = min(max(p, 0.0), 1.0)
    k = int(plan.rng(*key).binomial(n, p))
    phat = k / n
    return Estimate(phat, math.sqrt(phat * (1.0 - phat) / n), n, plan.rng_seed)


def hadamard_test(state: WaveFunction, l: int, plan: ShotPlan, part: str = "real") -> Estimate:
    """Control-qubit ``<Z>`` of the Hadamard test on controlled ``(A^dag)**l``.

    ``part="imag"`` inserts the extra phase gate on the control and returns
    the imaginary part instead; the energy estimators only use the real part.
    """
    z = expectation_A(state, l)
    if part == "real":
        target = z.real
    elif part == "imag":
        target = z.imag
    else:
        raise ValueError("part must be 'real' or 'imag'")
    if plan.is_exact:
        return Estimate(float(target))
    return _sample_pm1((1.0 + target) / 2.0, plan, HADAMARD_STREAM, l, int(part == "imag"))


@dataclass(frozen=True)
class ReferenceState:
    label: str
    target: str
    indices: tuple[int, ...]
    state: WaveFunction


# Table of (f, g) index pairs per boundary observable, as functions of N.
_REFERENCE_ROWS = {
    "E0": lambda n: (0, n - 1),
    "E0sq": lambda n: (0, n - 1),
    "E1": lambda n: (1, n - 1),
    "E2": lambda n: (0, n - 2),
}


def reference_states_for(target: str, qubits: int) -> list[ReferenceState]:
    """Reference inputs ``|f>, |g>, (|f>+|g>)/sqrt(2)`` for one boundary observable.

    ``E0sq`` only needs the two basis states.
    """
    if target not in _REFERENCE_ROWS:
        raise ValueError(f"no reference row for {target!r}")
    if qubits < 2:
        raise ValueError("need at least 4 grid points")
    n = 2**qubits
    f, g = _REFERENCE_ROWS[target](n)
    refs = [
        ReferenceState("f", target, (f,), basis_state(qubits, f)),
        ReferenceState("g", target, (g,), basis_state(qubits, g)),
    ]
    if target != "E0sq":
        amps = np.zeros(n)
        amps[[f, g]] = 1.0
        refs.append(ReferenceState("s", target, (f, g), make_state(amps)))
    return refs


def overlap_probability(state: WaveFunction, ref: ReferenceState, plan: ShotPlan) -> Estimate:
    """``|<ref|psi>|^2``; shots mode draws Bernoulli outcomes at that rate."""
    p = float(abs(np.vdot(ref.state.amplitudes, state.amplitudes)) ** 2)
    if plan.is_exact:
        return Estimate(p)
    key = ref.indices if len(ref.indices) == 2 else ref.indices * 2
    return _sample_bernoulli(p, plan, OVERLAP_STREAM, *key)


def estimate_E(
    state: WaveFunction,
    which: str,
    plan: ShotPlan,
    variant: Variant | str = Variant.FULL,
    allow_complex: bool = False,
) -> Estimate:
    """Boundary-operator expectation assembled from overlap probabilities.

    The superposition reference is normalised, so its overlap probability
    is half of ``|c_f + c_g|^2``; it enters the combination with weight 2.
    Variant ``full`` adds ``2 P_0`` (E1) or ``2 P_{N-1}`` (E2) taken from the
    E0-row basis measurements.
    """
    variant = Variant(variant)
    if not allow_complex and not state.is_real():
        raise ComplexAmplitudesRejected(
            "boundary-term circuit path assumes real amplitudes; pass allow_complex=True to override"
        )
    refs = {r.label: r for r in reference_states_for(which, state.qubits)}
    pf = overlap_probability(state, refs["f"], plan)
    pg = overlap_probability(state, refs["g"], plan)
    if which == "E0sq":
        return combine([(1.0, pf), (1.0, pg)])
    ps = overlap_probability(state, refs["s"], plan)
    terms = [(2.0, ps), (-1.0, pf), (-1.0, pg)]
    if variant is Variant.FULL and which in ("E1", "E2"):
        row0 = {r.label: r for r in reference_states_for("E0sq", state.qubits)}
        edge = row0["f"] if which == "E1" else row0["g"]
        terms.append((2.0, overlap_probability(state, edge, plan)))
    return combine(terms)
