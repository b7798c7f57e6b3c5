"""Balanced-coloring statistic for random colorings of U'.

For a joint pmf of (U', V), a coarsening h: U' -> {0..r'-1} and a coloring
phi: U' -> {0..r-1}, the statistic is

    sum_{j,v} P(h=j, V=v) * sum_i | P(phi(U')=i | h=j, V=v) - 1/r |,

the P(h, V)-average L1 distance of the conditional color distribution from
uniform.  Here U' plays the role of U as well (U = U'), so the good set is
the whole space and its condition holds trivially.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import InvalidArgumentError, ResourceLimitError
from .sampling import trial_rngs

MAX_CELLS = 10**6
LAMBDA_MAX = 2 / 45


@dataclass
class BalanceCheck:
    r: int
    r_prime: int
    d: float
    lam: float
    threshold: float
    colorings: int
    statistic_mean: float
    statistic_max: float
    failure_frequency: float
    hypothesis_mass: float
    hypothesis_holds: bool
    seed: object

    def to_dict(self) -> dict:
        return asdict(self)


def balance_statistic(joint: np.ndarray, h: np.ndarray, phi: np.ndarray, r: int) -> float:
    """Exact statistic for one coloring.  ``joint`` has shape (|U'|, |V|)."""
    joint = np.asarray(joint, dtype=float)
    h = np.asarray(h, dtype=np.int64)
    phi = np.asarray(phi, dtype=np.int64)
    nu, nv = joint.shape
    rp = int(h.max()) + 1
    mass = np.zeros((rp, nv, r))
    for v in range(nv):
        np.add.at(mass[:, v, :], (h, phi), joint[:, v])
    p_jv = mass.sum(axis=2, keepdims=True)
    return float(np.abs(mass - p_jv / r).sum())


def hypothesis_mass(joint: np.ndarray, d: float) -> float:
    """P{(u, v): P(U=u | V=v) > 1/d}; the balance bound needs it to be at most lambda^2."""
    joint = np.asarray(joint, dtype=float)
    pv = joint.sum(axis=0)
    cond = np.divide(joint, pv, out=np.zeros_like(joint), where=pv > 0)
    return float(joint[cond > 1.0 / d].sum())


def run_balance_check(joint, h, r: int, d: float, lam: float, coloring_samples: int, seed=0) -> BalanceCheck:
    """Sample uniformly random colorings and count threshold violations (>= 14 lambda)."""
    joint = np.asarray(joint, dtype=float)
    if joint.ndim != 2:
        raise InvalidArgumentError("joint pmf must have shape (|U'|, |V|)")
    if joint.size > MAX_CELLS:
        raise ResourceLimitError(f"{joint.size} cells exceeds {MAX_CELLS}")
    if abs(joint.sum() - 1) > 1e-9 or np.any(joint < 0):
        raise InvalidArgumentError("joint pmf must be nonnegative and sum to 1")
    h = np.asarray(h, dtype=np.int64)
    if h.shape != (joint.shape[0],) or h.min() < 0:
        raise InvalidArgumentError("coarsening must map every u' to a nonnegative label")
    if not 0 < lam < LAMBDA_MAX:
        raise InvalidArgumentError(f"lambda must lie in (0, 2/45), got {lam}")
    if r < 1 or coloring_samples < 1:
        raise InvalidArgumentError("r and coloring_samples must be >= 1")
    threshold = 14 * lam
    stats = np.empty(coloring_samples)
    for t, rng in enumerate(trial_rngs(seed, coloring_samples)):
        phi = rng.integers(0, r, size=joint.shape[0])
        stats[t] = balance_statistic(joint, h, phi, r)
    mass = hypothesis_mass(joint, d)
    return BalanceCheck(
        r=r, r_prime=int(h.max()) + 1, d=float(d), lam=lam, threshold=threshold,
        colorings=coloring_samples,
        statistic_mean=float(stats.mean()), statistic_max=float(stats.max()),
        failure_frequency=float(np.mean(stats >= threshold)),
        hypothesis_mass=mass, hypothesis_holds=mass <= lam**2, seed=seed,
    )
