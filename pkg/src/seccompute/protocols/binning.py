"""Random-binning omniscience with secrecy, simulated with an exact decoder.

Each terminal i publishes the bin j_i(X_i^n) of its block under a uniformly
random map into ceil(2^{n R_i}) bins.  A terminal decodes X_M^n as the most
probable block consistent with its own observation, every published bin and,
outside the computing set A, the side information G^n.  Ties go to the
lexicographically first block.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..dist import FunctionSpec, JointDistribution, as_subset
from ..errors import DecoderSpaceTooLargeError, InvalidArgumentError
from .estimators import exact_mi, plug_in_bias, plug_in_mi
from .sampling import sample_cells, trial_rngs

MAX_BIN_BITS = 24
MAX_SEQUENCE_SPACE = 10**7


@dataclass(frozen=True, eq=False)
class BinningScheme:
    """One realization of the bin maps; ``maps[i]`` is indexed by the
    base-|X_i| code of terminal i's block."""

    n: int
    rates: tuple[float, ...]
    bin_counts: tuple[int, ...]
    maps: tuple[np.ndarray, ...]

    @classmethod
    def random(cls, alphabet_sizes: Sequence[int], rates: Sequence[float], n: int,
               rng: np.random.Generator) -> "BinningScheme":
        counts = tuple(bin_count(r, n) for r in rates)
        maps = []
        for size, r in zip(alphabet_sizes, counts):
            space = size**n
            if r >= space:
                # enough bins to reveal the block: draw a random injection
                maps.append(rng.permutation(r)[:space])
            else:
                maps.append(rng.integers(0, r, size=space))
        return cls(n, tuple(float(r) for r in rates), counts, tuple(maps))


@dataclass
class SimulationReport:
    protocol: str
    trials: int
    n: int
    seed: object
    rates: list
    communication_rate: float
    omniscience_error: float
    terminal_errors: dict
    computation_errors: dict
    leakage_plugin: float
    leakage_plugin_bias: float
    leakage_exact: Optional[float] = None
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def bin_count(rate: float, n: int) -> int:
    if rate < 0 or not math.isfinite(rate):
        raise InvalidArgumentError(f"rate {rate} must be finite and >= 0")
    return int(math.ceil(2.0 ** (n * rate) - 1e-9))


def _cartesian(options: Sequence[np.ndarray]) -> np.ndarray:
    """Rows of the product of the option arrays, in lexicographic order."""
    out = options[0][:, None]
    for opt in options[1:]:
        out = np.concatenate([np.repeat(out, len(opt), axis=0),
                              np.tile(opt, len(out))[:, None]], axis=1)
    return out


class _Decoder:
    """Exact maximum-probability decoder over the support of the source."""

    def __init__(self, dist: JointDistribution, g: FunctionSpec, n: int):
        self.dist = dist
        self.n = n
        self.cells = dist.support()                       # (S, m) symbol indices
        flat = np.ravel_multi_index(self.cells.T, dist.shape)
        self.cell_of_flat = {int(f): k for k, f in enumerate(flat)}
        self.logp = np.log2(dist.pmf[tuple(self.cells.T)])
        self.gvals = g.table.ravel()[flat]
        m = dist.m
        self.options = {}
        for i in range(m):
            for a in range(dist.shape[i]):
                self.options[(i, a, None)] = np.nonzero(self.cells[:, i] == a)[0]
                for y in np.unique(self.gvals):
                    self.options[(i, a, int(y))] = np.nonzero((self.cells[:, i] == a) & (self.gvals == y))[0]
        self.weights = [dist.shape[i] ** np.arange(n - 1, -1, -1) for i in range(m)]

    def codes(self, cand: np.ndarray, i: int) -> np.ndarray:
        """Base-|X_i| code of terminal i's block for each candidate row."""
        return self.cells[cand, i] @ self.weights[i]

    def decode(self, i: int, own: np.ndarray, bins: Sequence[int], scheme: BinningScheme,
               side: Optional[np.ndarray]) -> np.ndarray:
        opts = [self.options[(i, int(own[t]), None if side is None else int(side[t]))]
                for t in range(self.n)]
        if any(len(o) == 0 for o in opts):
            return None
        cand = _cartesian(opts)
        keep = np.ones(len(cand), dtype=bool)
        for l in range(self.dist.m):
            if l != i:
                keep &= scheme.maps[l][self.codes(cand, l)] == bins[l]
        cand = cand[keep]
        if len(cand) == 0:
            return None
        counts = np.zeros((len(cand), len(self.cells)), dtype=np.int64)
        rows = np.repeat(np.arange(len(cand)), self.n)
        np.add.at(counts, (rows, cand.ravel()), 1)
        best = int(np.argmax(counts @ self.logp))
        return cand[best]


def _check_caps(dist: JointDistribution, rates, n: int) -> None:
    if max(rates) * n > MAX_BIN_BITS:
        raise DecoderSpaceTooLargeError(f"n * max rate = {max(rates) * n:.2f} bits exceeds {MAX_BIN_BITS}")
    support = int(np.count_nonzero(dist.pmf))
    if support**n > MAX_SEQUENCE_SPACE:
        raise DecoderSpaceTooLargeError(f"{support}^{n} support blocks exceeds {MAX_SEQUENCE_SPACE}")
    for size in dist.shape:
        if size**n > 2**MAX_BIN_BITS:
            raise DecoderSpaceTooLargeError(f"per-terminal block space {size}^{n} too large")


def exact_binning_leakage(dist: JointDistribution, g: FunctionSpec, scheme: BinningScheme,
                          decoder: Optional[_Decoder] = None) -> float:
    """I(j_M(X_M^n) ^ G^n) for one bin-map realization, by full enumeration."""
    n = scheme.n
    dec = decoder or _Decoder(dist, g, n)
    S = len(dec.cells)
    blocks = _cartesian([np.arange(S)] * n)
    weights = np.exp2(dec.logp[blocks].sum(axis=1))
    f = np.stack([scheme.maps[l][dec.codes(blocks, l)] for l in range(dist.m)], axis=1)
    gcode = dec.gvals[blocks] @ (len(g.outputs) ** np.arange(n - 1, -1, -1))
    return exact_mi(f, gcode, weights)


def run_binning(
    dist: JointDistribution,
    g: FunctionSpec,
    computing_set,
    rates: Sequence[float],
    n: int,
    trials: int,
    seed=0,
    freeze_bins: bool = False,
    exact_realizations: int = 0,
) -> SimulationReport:
    """Monte Carlo run of noninteractive random binning.

    ``freeze_bins`` draws a single realization of the maps for all trials;
    otherwise a fresh realization is drawn per trial.  When
    ``exact_realizations > 0`` the exact leakage is averaged over that many
    of the realizations used.
    """
    g.check_domain(dist)
    m = dist.m
    A = as_subset(computing_set, m)
    rates = [float(r) for r in rates]
    if len(rates) != m:
        raise InvalidArgumentError(f"need {m} rates, got {len(rates)}")
    if n < 1 or trials < 1:
        raise InvalidArgumentError("n and trials must be >= 1")
    _check_caps(dist, rates, n)

    dec = _Decoder(dist, g, n)
    cell_index = np.vectorize(dec.cell_of_flat.get, otypes=[np.int64])
    rngs = trial_rngs(seed, trials + 1)
    frozen = BinningScheme.random(dist.shape, rates, n, rngs[-1]) if freeze_bins else None

    wrong = np.zeros(m, dtype=np.int64)
    comp_wrong = np.zeros(m, dtype=np.int64)
    any_wrong = 0
    published, gblocks, exact = [], [], []
    for t in range(trials):
        rng = rngs[t]
        scheme = frozen or BinningScheme.random(dist.shape, rates, n, rng)
        cells = cell_index(sample_cells(dist, n, rng))
        seqs = dec.cells[cells].T                          # (m, n)
        gn = dec.gvals[cells]
        bins = [int(scheme.maps[l][seqs[l] @ dec.weights[l]]) for l in range(m)]
        failed = False
        for i in range(m):
            side = gn if (i + 1) not in A else None
            est = dec.decode(i, seqs[i], bins, scheme, side)
            ok = est is not None and np.array_equal(est, cells)
            if not ok:
                wrong[i] += 1
                if (i + 1) in A:
                    failed = True
                    if est is None or not np.array_equal(dec.gvals[est], gn):
                        comp_wrong[i] += 1
        any_wrong += failed
        published.append(bins)
        gblocks.append(gn)
        if len(exact) < exact_realizations and (frozen is None or not exact):
            exact.append(exact_binning_leakage(dist, g, scheme, dec))

    pub = np.array(published)
    gb = np.array(gblocks)
    counts = [bin_count(r, n) for r in rates]
    return SimulationReport(
        protocol="random-binning",
        trials=trials,
        n=n,
        seed=seed,
        rates=rates,
        communication_rate=sum(math.log2(c) for c in counts) / n,
        omniscience_error=any_wrong / trials,
        terminal_errors={i + 1: float(wrong[i] / trials) for i in range(m)},
        computation_errors={i: float(comp_wrong[i - 1] / trials) for i in A},
        leakage_plugin=plug_in_mi(pub, gb),
        leakage_plugin_bias=plug_in_bias(pub, gb),
        leakage_exact=float(np.mean(exact)) if exact else None,
        notes={"bin_counts": counts, "computing_set": list(A), "fresh_bins": not freeze_bins,
               "exact_realizations": len(exact)},
    )
