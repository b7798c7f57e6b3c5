"""Finite joint distributions and the entropy calculus built on them.

All quantities are in bits.  Terminals are addressed by 1-based indices,
so ``entropy(dist, {1, 3})`` is H(X_1, X_3).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError

MAX_CELLS = 10**7
SUM_TOL = 1e-9
NORMALIZE_TOL = 1e-6


def shannon(p) -> float:
    """Entropy in bits of a probability vector; zero entries contribute 0."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def binary_entropy(x: float) -> float:
    return shannon([x, 1.0 - x])


def as_subset(B: Iterable[int], m: int, allow_empty: bool = False) -> tuple[int, ...]:
    """Validate a set of 1-based terminal indices and return it sorted."""
    try:
        items = sorted({int(i) for i in B})
    except TypeError as exc:
        raise InvalidArgumentError(f"terminal subset must be an iterable of ints, got {B!r}") from exc
    if not items and not allow_empty:
        raise InvalidArgumentError("terminal subset must be nonempty")
    for i in items:
        if not 1 <= i <= m:
            raise InvalidArgumentError(f"terminal index {i} out of range 1..{m}")
    return tuple(items)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Dense pmf over the product of ``m`` finite alphabets.

    ``pmf`` has one axis per variable, ``pmf.shape[i] == len(alphabets[i])``.
    Sums within 1e-6 of one are renormalized; anything further off is rejected.
    """

    alphabets: tuple[tuple[str, ...], ...]
    pmf: np.ndarray

    def __post_init__(self):
        alphabets = tuple(tuple(str(s) for s in a) for a in self.alphabets)
        if len(alphabets) < 2:
            raise InvalidArgumentError("a joint distribution needs at least 2 variables")
        for i, a in enumerate(alphabets, start=1):
            if not a:
                raise InvalidArgumentError(f"alphabet of variable {i} is empty")
            if len(set(a)) != len(a):
                raise InvalidArgumentError(f"alphabet of variable {i} has repeated symbols")
        shape = tuple(len(a) for a in alphabets)
        if int(np.prod(shape, dtype=object)) > MAX_CELLS:
            raise ResourceLimitError(f"pmf has {np.prod(shape, dtype=object)} cells, cap is {MAX_CELLS}")
        pmf = np.array(self.pmf, dtype=float)
        if pmf.shape != shape:
            raise InvalidArgumentError(f"pmf shape {pmf.shape} does not match alphabets {shape}")
        if not np.all(np.isfinite(pmf)) or np.any(pmf < 0):
            raise InvalidArgumentError("probabilities must be finite and nonnegative")
        total = float(pmf.sum())
        if abs(total - 1.0) > NORMALIZE_TOL:
            raise InvalidArgumentError(f"probabilities sum to {total!r}, not 1")
        if abs(total - 1.0) > SUM_TOL:
            pmf = pmf / total
        pmf.setflags(write=False)
        object.__setattr__(self, "alphabets", alphabets)
        object.__setattr__(self, "pmf", pmf)

    @property
    def m(self) -> int:
        return len(self.alphabets)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.pmf.shape

    @classmethod
    def from_entries(cls, alphabets: Sequence[Sequence[str]], entries) -> "JointDistribution":
        """Build from ``(symbol_tuple, probability)`` pairs; missing cells are 0."""
        alphabets = tuple(tuple(str(s) for s in a) for a in alphabets)
        index = [{s: k for k, s in enumerate(a)} for a in alphabets]
        pmf = np.zeros(tuple(len(a) for a in alphabets))
        for x, p in entries:
            if len(x) != len(alphabets):
                raise InvalidArgumentError(f"pmf entry {list(x)} has wrong arity")
            try:
                cell = tuple(index[i][str(s)] for i, s in enumerate(x))
            except KeyError as exc:
                raise InvalidArgumentError(f"pmf entry {list(x)} uses unknown symbol {exc}") from None
            pmf[cell] += float(p)
        return cls(alphabets, pmf)

    def entries(self):
        """Yield ``(symbol_tuple, p)`` for every cell with p > 0."""
        for cell in zip(*np.nonzero(self.pmf)):
            yield tuple(self.alphabets[i][k] for i, k in enumerate(cell)), float(self.pmf[cell])

    def marginal(self, B: Iterable[int]) -> np.ndarray:
        """Marginal pmf over the variables in ``B`` (axes in increasing index order)."""
        B = as_subset(B, self.m)
        drop = tuple(i for i in range(self.m) if i + 1 not in B)
        return self.pmf.sum(axis=drop) if drop else self.pmf

    def support(self) -> np.ndarray:
        """Array of shape (s, m) with the index tuples of all positive cells."""
        return np.argwhere(self.pmf > 0)


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """Total lookup table realizing g: X_1 x ... x X_m -> Y.

    ``table`` holds output indices into ``outputs`` and has the pmf's shape.
    """

    outputs: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        outputs = tuple(str(y) for y in self.outputs)
        if not outputs:
            raise InvalidArgumentError("function output alphabet is empty")
        if len(set(outputs)) != len(outputs):
            raise InvalidArgumentError("function output alphabet has repeated symbols")
        table = np.array(self.table)
        if table.dtype.kind not in "iu":
            raise InvalidArgumentError("function table must hold integer output indices")
        if table.size and (table.min() < 0 or table.max() >= len(outputs)):
            raise InvalidArgumentError("function table refers to an output outside the alphabet")
        table = table.astype(np.int64)
        table.setflags(write=False)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_callable(cls, alphabets, fn: Callable[..., object], outputs=None) -> "FunctionSpec":
        """Tabulate ``fn(x_1, ..., x_m)`` over every cell of the alphabet product."""
        alphabets = tuple(tuple(str(s) for s in a) for a in alphabets)
        values = {}
        shape = tuple(len(a) for a in alphabets)
        for cell in itertools.product(*(range(n) for n in shape)):
            values[cell] = str(fn(*(alphabets[i][k] for i, k in enumerate(cell))))
        if outputs is None:
            outputs = sorted(set(values.values()))
        outputs = tuple(str(y) for y in outputs)
        pos = {y: k for k, y in enumerate(outputs)}
        table = np.zeros(shape, dtype=np.int64)
        for cell, y in values.items():
            if y not in pos:
                raise InvalidArgumentError(f"function value {y!r} is not in the output alphabet")
            table[cell] = pos[y]
        return cls(outputs, table)

    @classmethod
    def from_entries(cls, alphabets, outputs, entries) -> "FunctionSpec":
        """Build from ``(symbol_tuple, output_symbol)`` pairs covering every cell."""
        alphabets = tuple(tuple(str(s) for s in a) for a in alphabets)
        outputs = tuple(str(y) for y in outputs)
        index = [{s: k for k, s in enumerate(a)} for a in alphabets]
        pos = {y: k for k, y in enumerate(outputs)}
        shape = tuple(len(a) for a in alphabets)
        table = np.full(shape, -1, dtype=np.int64)
        for x, y in entries:
            if len(x) != len(alphabets):
                raise InvalidArgumentError(f"function entry {list(x)} has wrong arity")
            try:
                cell = tuple(index[i][str(s)] for i, s in enumerate(x))
            except KeyError as exc:
                raise InvalidArgumentError(f"function entry {list(x)} uses unknown symbol {exc}") from None
            if str(y) not in pos:
                raise InvalidArgumentError(f"function value {y!r} is not in the output alphabet")
            table[cell] = pos[str(y)]
        missing = int(np.sum(table < 0))
        if missing:
            raise InvalidArgumentError(f"function table is not total: {missing} cells undefined")
        return cls(outputs, table)

    def check_domain(self, dist: JointDistribution) -> None:
        if self.table.shape != dist.shape:
            raise InvalidArgumentError(
                f"function table shape {self.table.shape} does not match distribution {dist.shape}")


def entropy(dist: JointDistribution, B: Iterable[int]) -> float:
    """H(X_B) in bits."""
    return shannon(dist.marginal(B))


def conditional_entropy(dist: JointDistribution, B: Iterable[int], C: Iterable[int] = ()) -> float:
    """H(X_B | X_C) = H(X_{B u C}) - H(X_C)."""
    B = as_subset(B, dist.m)
    C = as_subset(C, dist.m, allow_empty=True)
    if set(B) & set(C):
        raise InvalidArgumentError(f"subsets {B} and {C} overlap")
    if not C:
        return entropy(dist, B)
    return entropy(dist, set(B) | set(C)) - entropy(dist, C)


def mutual_information(dist: JointDistribution, B: Iterable[int], C: Iterable[int]) -> float:
    """I(X_B ^ X_C) = H(X_B) + H(X_C) - H(X_{B u C})."""
    B = as_subset(B, dist.m)
    C = as_subset(C, dist.m)
    if set(B) & set(C):
        raise InvalidArgumentError(f"subsets {B} and {C} overlap")
    return entropy(dist, B) + entropy(dist, C) - entropy(dist, set(B) | set(C))


def adjoin_function(dist: JointDistribution, g: FunctionSpec, name_prefix: str = "") -> JointDistribution:
    """Joint distribution of (X_1, ..., X_m, G) with G = g(X_M).

    The new variable is number ``m + 1``; its alphabet is ``g.outputs``.
    Summing out G reproduces ``dist.pmf`` exactly, since each cell
    contributes to exactly one output.
    """
    g.check_domain(dist)
    k = len(g.outputs)
    pmf = np.zeros(dist.shape + (k,))
    onehot = g.table[..., None] == np.arange(k)
    pmf[onehot] = np.broadcast_to(dist.pmf[..., None], pmf.shape)[onehot]
    return JointDistribution(dist.alphabets + (tuple(name_prefix + y for y in g.outputs),), pmf)


def function_entropy(dist: JointDistribution, g: FunctionSpec) -> float:
    """H(G) for G = g(X_M)."""
    g.check_domain(dist)
    return shannon(np.bincount(g.table.ravel(), weights=dist.pmf.ravel(), minlength=len(g.outputs)))


def permute_terminals(dist: JointDistribution, order: Sequence[int]) -> JointDistribution:
    """Reorder variables: new variable ``k`` is old variable ``order[k-1]`` (1-based)."""
    axes = [i - 1 for i in order]
    if sorted(axes) != list(range(dist.m)):
        raise InvalidArgumentError(f"{list(order)} is not a permutation of 1..{dist.m}")
    return JointDistribution(tuple(dist.alphabets[a] for a in axes), np.transpose(dist.pmf, axes))


def permute_function(g: FunctionSpec, order: Sequence[int]) -> FunctionSpec:
    return FunctionSpec(g.outputs, np.transpose(g.table, [i - 1 for i in order]))
