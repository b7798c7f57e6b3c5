"""Syndrome (coset) scheme for securely computing X_1 xor X_2 on a DSBS.

Terminal 1 publishes the syndrome F_1 = P x_1.  Terminal 2 adds its own
syndrome, takes the minimum-weight coset leader of P(x_1 + x_2) as its
estimate of G^n, and forms x_1's estimate.  The key K is the position of
x_1 inside its coset of the standard array, i.e. the information bits of
x_1 + leader(P x_1).  Terminal 2 then sends the index of its G^n estimate
among the coset leaders, one-time padded with the leading key bits.

Framing: the leader index has n - k bits and the key k bits; when
n - k > k the surplus index bits go in the clear and the report says so.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DecoderSpaceTooLargeError, InvalidArgumentError
from .binning import SimulationReport
from .estimators import exact_mi, plug_in_bias, plug_in_mi
from .sampling import trial_rngs

MAX_EXACT_BLOCK = 12


def gf2_rref(M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and its pivot columns."""
    A = (np.asarray(M) & 1).astype(np.uint8).copy()
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        hit = np.nonzero(A[r:, c])[0]
        if len(hit) == 0:
            continue
        p = r + int(hit[0])
        A[[r, p]] = A[[p, r]]
        ones = np.nonzero(A[:, c])[0]
        ones = ones[ones != r]
        A[ones] ^= A[r]
        pivots.append(c)
        r += 1
    return A, pivots


def _to_int(bits: np.ndarray) -> np.ndarray:
    """Big-endian integer value of each row of a 0/1 array."""
    bits = np.atleast_2d(bits)
    return bits.astype(np.int64) @ (1 << np.arange(bits.shape[1] - 1, -1, -1, dtype=np.int64))


def _bits(values, width: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    return ((values[..., None] >> np.arange(width - 1, -1, -1)) & 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class LinearCodeScheme:
    """Binary linear code given by a full-rank parity-check matrix.

    ``leaders[s]`` is the minimum-weight coset leader with syndrome value
    ``s`` (among equal weights, the one whose support positions come first); ``info_positions``
    are k coordinates that determine a codeword.
    """

    parity_check: np.ndarray
    leaders: np.ndarray
    leader_order: np.ndarray
    info_positions: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.parity_check.shape[1]

    @property
    def k(self) -> int:
        return self.n - self.parity_check.shape[0]

    @classmethod
    def from_parity_check(cls, P) -> "LinearCodeScheme":
        P = (np.asarray(P) & 1).astype(np.uint8)
        r, n = P.shape
        _, pivots = gf2_rref(P)
        if len(pivots) != r:
            raise InvalidArgumentError("parity-check rows are linearly dependent")
        if n > 20:
            raise DecoderSpaceTooLargeError(f"block length {n} too large for leader tables")
        leaders = np.full((1 << r, n), 0, dtype=np.uint8)
        found = np.zeros(1 << r, dtype=bool)
        for w in range(n + 1):
            for support in itertools.combinations(range(n), w):
                e = np.zeros(n, dtype=np.uint8)
                e[list(support)] = 1
                s = int(_to_int((P @ e) % 2)[0])
                if not found[s]:
                    found[s] = True
                    leaders[s] = e
            if found.all():
                break
        # leader index: rank by (weight, lexicographic pattern)
        keys = [(int(leaders[s].sum()), tuple(-leaders[s])) for s in range(1 << r)]
        order = np.empty(1 << r, dtype=np.int64)
        order[sorted(range(1 << r), key=lambda s: keys[s])] = np.arange(1 << r)
        # codewords are determined by the free (non-pivot) coordinates of rref(P)
        info = tuple(c for c in range(n) if c not in set(pivots))
        return cls(P, leaders, order, info)

    def syndrome(self, x: np.ndarray) -> np.ndarray:
        """Syndrome value(s) of length-n bit vectors (rows)."""
        return _to_int((np.atleast_2d(x) @ self.parity_check.T) % 2)

    def leader(self, s) -> np.ndarray:
        return self.leaders[s]

    def coset_index(self, x: np.ndarray) -> np.ndarray:
        """Location of x within its coset: info bits of x + leader(Px)."""
        x = np.atleast_2d(x)
        c = x ^ self.leaders[self.syndrome(x)]
        return _to_int(c[:, list(self.info_positions)])

    def leader_index(self, e: np.ndarray) -> np.ndarray:
        return self.leader_order[self.syndrome(e)]


def hamming_code(r: int = 3) -> LinearCodeScheme:
    """Hamming code of length 2^r - 1; column j of P is the binary form of j."""
    n = (1 << r) - 1
    P = _bits(np.arange(1, n + 1), r).T
    return LinearCodeScheme.from_parity_check(P)


def _protocol(code: LinearCodeScheme, x1: np.ndarray, x2: np.ndarray):
    """Vectorized run on rows of x1, x2.  Returns everything the reports need."""
    n, k = code.n, code.k
    idx_bits = n - k
    enc = min(idx_bits, k)
    s1 = code.syndrome(x1)
    s2 = code.syndrome(x2)
    g_hat = code.leaders[s1 ^ s2]                         # terminal 2's estimate of G^n
    x1_hat = x2 ^ g_hat
    key1 = code.coset_index(x1)
    key2 = code.coset_index(x1_hat)
    index = code.leader_order[s1 ^ s2]
    pad2 = key2 >> (k - enc)
    f2 = index ^ (pad2 << (idx_bits - enc))               # leading `enc` bits encrypted
    # terminal 1 strips the pad with its own key and maps the index back to a leader
    index1 = f2 ^ ((key1 >> (k - enc)) << (idx_bits - enc))
    inv = np.argsort(code.leader_order)
    g_hat1 = code.leaders[inv[index1]]
    return dict(s1=s1, f2=f2, key=key1, g_hat2=g_hat, g_hat1=g_hat1, enc_bits=enc, idx_bits=idx_bits)


def run_example1(delta: float, code: LinearCodeScheme, trials: int, seed=0,
                 n: Optional[int] = None, exact: Optional[bool] = None) -> SimulationReport:
    """Monte Carlo run on a DSBS with uniform X_1 and crossover ``delta``."""
    if not 0 <= delta < 0.5:
        raise InvalidArgumentError("crossover must lie in [0, 0.5)")
    if n is not None and n != code.n:
        raise InvalidArgumentError(f"code length {code.n} does not match block length {n}")
    n = code.n
    rng = trial_rngs(seed, 1)[0]
    x1 = rng.integers(0, 2, size=(trials, n), dtype=np.uint8)
    g = (rng.random((trials, n)) < delta).astype(np.uint8)
    x2 = x1 ^ g
    out = _protocol(code, x1, x2)
    err2 = np.any(out["g_hat2"] != g, axis=1)
    err1 = np.any(out["g_hat1"] != g, axis=1)
    gcode = _to_int(g)
    public = np.stack([out["s1"], out["f2"]], axis=1)
    leak_exact = None
    if exact or (exact is None and n <= 8):
        leak_exact = exact_secrecy(code, delta)["I_G_F1F2"]
    return SimulationReport(
        protocol="example1-coset",
        trials=trials,
        n=n,
        seed=seed,
        rates=[(n - code.k) / n, out["idx_bits"] / n],
        communication_rate=(2 * n - 2 * code.k) / n,
        omniscience_error=float(np.mean(err1 | err2)),
        terminal_errors={1: float(np.mean(err1)), 2: float(np.mean(err2))},
        computation_errors={1: float(np.mean(err1)), 2: float(np.mean(err2))},
        leakage_plugin=plug_in_mi(public, gcode),
        leakage_plugin_bias=plug_in_bias(public, gcode),
        leakage_exact=leak_exact,
        notes={"delta": delta, "k": code.k, "key_bits": code.k, "index_bits": out["idx_bits"],
               "encrypted_bits": out["enc_bits"],
               "encrypted_fraction": out["enc_bits"] / out["idx_bits"] if out["idx_bits"] else 1.0,
               "framing": "F2 = coset-leader index of G^n estimate XOR leading key bits"},
    )


def enumerate_pairs(code: LinearCodeScheme, delta: float):
    """All (x_1, x_2) block pairs with their DSBS probabilities (p = 1/2)."""
    n = code.n
    if 2 * n > 2 * MAX_EXACT_BLOCK:
        raise DecoderSpaceTooLargeError(f"2^{2 * n} source pairs too many to enumerate")
    words = _bits(np.arange(1 << n), n)
    i1, i2 = np.meshgrid(np.arange(1 << n), np.arange(1 << n), indexing="ij")
    x1 = words[i1.ravel()]
    x2 = words[i2.ravel()]
    flips = (x1 ^ x2).sum(axis=1)
    prob = 0.5**n * (delta**flips) * ((1 - delta) ** (n - flips))
    return x1, x2, prob


def exact_secrecy(code: LinearCodeScheme, delta: float) -> dict:
    """Exact information quantities of the scheme by full enumeration."""
    x1, x2, prob = enumerate_pairs(code, delta)
    out = _protocol(code, x1, x2)
    g = _to_int(x1 ^ x2)
    s1, key, f2 = out["s1"], out["key"], out["f2"]
    pub = s1 * (1 << out["idx_bits"]) + f2
    # (F_1, K) -> x_1 must be one-to-one
    rebuilt = code.leaders[s1] ^ _codeword_from_info(code, key)
    return {
        "I_K_F1": exact_mi(key, s1, prob),
        "I_G_F1": exact_mi(g, s1, prob),
        "I_K_F1G": exact_mi(key, s1 * (1 << code.n) + g, prob),
        "I_G_F1F2": exact_mi(g, pub, prob),
        "bijective": bool(np.array_equal(rebuilt, x1)),
        "error_probability": float(prob[np.any(out["g_hat2"] != (x1 ^ x2), axis=1)].sum()),
    }


def _codeword_from_info(code: LinearCodeScheme, info_values: np.ndarray) -> np.ndarray:
    """Codeword whose information coordinates carry ``info_values``."""
    n, k = code.n, code.k
    table = np.zeros((1 << k, n), dtype=np.uint8)
    basis = _null_space_basis(code)
    for v in range(1 << k):
        bits = _bits(v, k)
        table[v] = (bits @ basis) % 2
    return table[np.asarray(info_values)]


def _null_space_basis(code: LinearCodeScheme) -> np.ndarray:
    """Generator rows g_t with g_t[info_positions] = e_t."""
    R, pivots = gf2_rref(code.parity_check)
    n = code.n
    info = list(code.info_positions)
    G = np.zeros((len(info), n), dtype=np.uint8)
    for t, c in enumerate(info):
        G[t, c] = 1
        for row, p in enumerate(pivots):
            G[t, p] = R[row, c]
    return G


def two_or_more_errors(delta: float, n: int) -> float:
    """Probability of at least two flips in n positions."""
    return 1 - (1 - delta) ** n - n * delta * (1 - delta) ** (n - 1)


def example1_rate_condition(delta: float) -> bool:
    """Whether 2 h(delta) < 1, the secure-computability condition at p = 1/2."""
    h = -delta * math.log2(delta) - (1 - delta) * math.log2(1 - delta) if 0 < delta < 1 else 0.0
    return 2 * h < 1
