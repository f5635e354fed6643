"""Sequential two-pair singlet/triplet readout with shot sampling.

The two parallel pairs are read one after the other (the idle pair is
assumed perfectly isolated); because the pair projectors act on disjoint
dots they commute, so the sequential readout equals the joint projective
measurement.  Charge physics is abstracted into per-pair assignment
fidelities ``f_s``/``f_t`` (probability that a true singlet/triplet is
recorded as such), defaulting to ideal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import Basis, DIM_FULL, Pair, SpinState, pair_singlet_projector

#: Joint-outcome order used everywhere: (first pair, second pair).
OUTCOMES = ("SS", "ST", "TS", "TT")


class ReadoutDirection(enum.Enum):
    """Which pairs are isolated and read, and in what order."""

    HORIZONTAL = (Pair.Q34, Pair.Q12)
    VERTICAL = (Pair.Q23, Pair.Q14)

    @property
    def pairs(self) -> tuple[Pair, Pair]:
        return self.value


@dataclass(frozen=True)
class ReadoutConfig:
    direction: ReadoutDirection
    f_s: float = 1.0
    f_t: float = 1.0
    n_shots: int = 500
    seed: int = 0

    def __post_init__(self):
        if not (0.5 < self.f_s <= 1.0 and 0.5 < self.f_t <= 1.0):
            raise ValueError("readout fidelities must be in (0.5, 1]")
        if self.n_shots < 1:
            raise ValueError("n_shots must be at least 1")


@lru_cache(maxsize=None)
def _sector_isometries(direction: ReadoutDirection) -> tuple[np.ndarray, ...]:
    """Orthonormal column bases of the four joint (o1, o2) outcome sectors."""
    first, second = direction.pairs
    p1s = pair_singlet_projector(first)
    p2s = pair_singlet_projector(second)
    eye = np.eye(DIM_FULL)
    sectors = []
    for o1 in (p1s, eye - p1s):
        for o2 in (p2s, eye - p2s):
            joint = o1 @ o2
            w, v = np.linalg.eigh(joint)
            cols = v[:, w > 0.5]
            cols.setflags(write=False)
            sectors.append(cols)
    return tuple(sectors)


def pair_probabilities_batch(states: np.ndarray, direction: ReadoutDirection) -> np.ndarray:
    """Joint outcome probabilities for a stack of full-space states.

    ``states`` has shape (..., 16); returns (..., 4) in :data:`OUTCOMES` order.
    """
    states = np.asarray(states)
    if states.shape[-1] != DIM_FULL:
        raise ValueError("batch readout expects full-space states")
    out = np.empty(states.shape[:-1] + (4,))
    for k, cols in enumerate(_sector_isometries(direction)):
        amps = states @ cols.conj()
        out[..., k] = np.sum(np.abs(amps) ** 2, axis=-1)
    return out


def measure_pair_probabilities(state: SpinState, direction: ReadoutDirection) -> np.ndarray:
    """(P_SS, P_ST, P_TS, P_TT) for sequential readout of the two pairs.

    The first letter is the outcome of the first pair read (Q34 for
    horizontal, Q23 for vertical).  Probabilities sum to 1.
    """
    if state.basis is not Basis.FULL16:
        raise ValueError("pair readout is defined on full-space states")
    return pair_probabilities_batch(state.amplitudes, direction)


@dataclass(frozen=True)
class ShotRecord:
    """Outcome booleans (singlet = True) per shot for (first pair, second pair)."""

    outcomes: np.ndarray  # (n_shots, 2) bool
    direction: ReadoutDirection

    def __post_init__(self):
        arr = np.asarray(self.outcomes, dtype=bool)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("outcomes must have shape (n_shots, 2)")
        arr.setflags(write=False)
        object.__setattr__(self, "outcomes", arr)

    @property
    def n_shots(self) -> int:
        return self.outcomes.shape[0]

    def counts(self) -> np.ndarray:
        s1, s2 = self.outcomes[:, 0], self.outcomes[:, 1]
        return np.array(
            [
                np.sum(s1 & s2),
                np.sum(s1 & ~s2),
                np.sum(~s1 & s2),
                np.sum(~s1 & ~s2),
            ]
        )

    def probabilities(self) -> np.ndarray:
        """Empirical (P_SS, P_ST, P_TS, P_TT); sums to 1."""
        return self.counts() / self.n_shots

    def standard_errors(self) -> np.ndarray:
        """Binomial standard error per outcome probability."""
        p = self.probabilities()
        return np.sqrt(p * (1 - p) / self.n_shots)

    def to_csv(self, path) -> None:
        from .io import write_csv

        write_csv(
            path,
            {
                "shot_index": np.arange(self.n_shots),
                "pair1_outcome": self.outcomes[:, 0].astype(int),
                "pair2_outcome": self.outcomes[:, 1].astype(int),
            },
        )


def _rng(seed: int, tag: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, tag], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_shots(probs, cfg: ReadoutConfig) -> ShotRecord:
    """Draw categorical shots from joint probabilities and apply readout errors.

    A true singlet is recorded as singlet with probability ``f_s``, a true
    triplet as triplet with probability ``f_t``, independently per pair.
    Deterministic given ``cfg.seed``.
    """
    p = np.asarray(probs, dtype=float)
    if p.shape != (4,):
        raise ValueError("expected 4 joint outcome probabilities")
    if abs(p.sum() - 1.0) > 1e-9 or np.any(p < -1e-12):
        raise ValueError("outcome probabilities must be non-negative and sum to 1")
    p = np.clip(p, 0, None)
    p = p / p.sum()

    rng = _rng(cfg.seed, 0x5407)
    draws = rng.choice(4, size=cfg.n_shots, p=p)
    true_s = np.stack([draws <= 1, (draws == 0) | (draws == 2)], axis=1)
    keep = rng.random(size=true_s.shape)
    recorded = np.where(true_s, keep < cfg.f_s, ~(keep < cfg.f_t))
    return ShotRecord(outcomes=recorded, direction=cfg.direction)


def expected_recorded_probabilities(probs, f_s: float, f_t: float) -> np.ndarray:
    """Joint probabilities after the independent per-pair error channel."""
    p = np.asarray(probs, dtype=float)
    m1 = np.array([[f_s, 1 - f_t], [1 - f_s, f_t]])  # recorded x true, one pair
    joint = p.reshape(2, 2)
    return (m1 @ joint @ m1.T).reshape(4)
