"""i.i.d. source blocks and the seeding convention shared by the simulators."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..dist import FunctionSpec, JointDistribution
from ..errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class SourceBlock:
    """n i.i.d. draws of X_M (symbol indices, shape (m, n)) and G^n."""

    n: int
    sequences: np.ndarray
    g_sequence: Optional[np.ndarray]
    seed: object

    def symbols(self, dist: JointDistribution, terminal: int) -> list[str]:
        return [dist.alphabets[terminal - 1][k] for k in self.sequences[terminal - 1]]


def trial_rngs(seed, trials: int) -> list[np.random.Generator]:
    """Independent per-trial generators derived from one master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def sample_cells(dist: JointDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """Flat cell indices of n i.i.d. draws."""
    return rng.choice(dist.pmf.size, size=n, p=dist.pmf.ravel())


def sample_block(dist: JointDistribution, g: Optional[FunctionSpec], n: int, seed=0) -> SourceBlock:
    if n < 1:
        raise InvalidArgumentError("block length must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    cells = sample_cells(dist, n, rng)
    seqs = np.array(np.unravel_index(cells, dist.shape))
    gseq = None
    if g is not None:
        g.check_domain(dist)
        gseq = g.table.ravel()[cells]
    return SourceBlock(n, seqs, gseq, None if isinstance(seed, np.random.Generator) else seed)
