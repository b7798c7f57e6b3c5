"""Maximum common function of several (possibly tuple-valued) variables.

For a pair (Q, R) the classes are the connected components of the
bipartite support graph with an edge q--r whenever Pr{Q=q, R=r} > 0.
More than two arguments are folded left to right:
mcf(Q_1, ..., Q_k) = mcf(mcf(Q_1, ..., Q_{k-1}), Q_k).

Each argument is a *group* of variable indices of a JointDistribution, so
tuples such as (X_M, Z_i) are handled directly.  Groups may overlap.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dist import JointDistribution, as_subset, shannon
from .errors import InvalidArgumentError, ResourceLimitError

MAX_GROUP_SYMBOLS = 10**7


class UnionFind:
    """Disjoint sets over 0..size-1 with path halving and union by size."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [1] * size

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.rank[ra] += self.rank[rb]


@dataclass(frozen=True, eq=False)
class McfLabeling:
    """Class labels realizing the mcf as a function of each argument.

    ``labels[g]`` is indexed by the flattened joint symbol of group ``g``
    (C order over the group's variables) and holds a class in 1..k, or 0 for
    symbols of probability zero.  ``cell_class`` gives the class of each row
    of ``support``.
    """

    groups: tuple[tuple[int, ...], ...]
    group_shapes: tuple[tuple[int, ...], ...]
    labels: tuple[np.ndarray, ...]
    class_count: int
    class_pmf: np.ndarray
    support: np.ndarray
    cell_class: np.ndarray

    def label_of(self, group: int, symbol_indices: Sequence[int]) -> int:
        """Class of a joint symbol of argument ``group`` (0-based position)."""
        code = np.ravel_multi_index(tuple(symbol_indices), self.group_shapes[group])
        return int(self.labels[group][code])


def _group_codes(support: np.ndarray, shape: tuple[int, ...], group: tuple[int, ...]):
    gshape = tuple(shape[i - 1] for i in group)
    size = int(np.prod(gshape, dtype=object))
    if size > MAX_GROUP_SYMBOLS:
        raise ResourceLimitError(f"group {group} has {size} joint symbols, cap is {MAX_GROUP_SYMBOLS}")
    cols = support[:, [i - 1 for i in group]]
    return np.ravel_multi_index(cols.T, gshape) if len(support) else np.zeros(0, dtype=np.int64), gshape, size


def _components(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Component id for each edge (left[e], right[e]); ids ordered by first edge."""
    lu, linv = np.unique(left, return_inverse=True)
    ru, rinv = np.unique(right, return_inverse=True)
    uf = UnionFind(len(lu) + len(ru))
    offset = len(lu)
    for a, b in zip(linv.tolist(), rinv.tolist()):
        uf.union(a, offset + b)
    roots = np.array([uf.find(a) for a in linv.tolist()], dtype=np.int64)
    _, first, comp = np.unique(roots, return_index=True, return_inverse=True)
    # renumber so that class order follows the first support cell of each class
    order = np.argsort(np.argsort(first))
    return order[comp]


def mcf_all(dist: JointDistribution, groups: Sequence[Sequence[int]]) -> McfLabeling:
    """mcf of the group variables, folding pairwise from the left."""
    if len(groups) < 2:
        raise InvalidArgumentError("mcf needs at least two argument groups")
    groups = tuple(as_subset(g, dist.m) for g in groups)
    support = dist.support()
    weights = dist.pmf[tuple(support.T)]
    coded = [_group_codes(support, dist.shape, g) for g in groups]

    cls = _components(coded[0][0], coded[1][0])
    for codes, _, _ in coded[2:]:
        cls = _components(cls, codes)

    k = int(cls.max()) + 1 if len(cls) else 0
    class_pmf = np.bincount(cls, weights=weights, minlength=k)
    labels = []
    for codes, _, size in coded:
        lab = np.zeros(size, dtype=np.int64)
        lab[codes] = cls + 1
        lab.setflags(write=False)
        labels.append(lab)
    return McfLabeling(
        groups=groups,
        group_shapes=tuple(c[1] for c in coded),
        labels=tuple(labels),
        class_count=k,
        class_pmf=class_pmf,
        support=support,
        cell_class=cls + 1,
    )


def pairwise_mcf(dist: JointDistribution) -> McfLabeling:
    """Gacs-Korner common part of a two-variable distribution."""
    if dist.m != 2:
        raise InvalidArgumentError(f"pairwise_mcf expects 2 variables, got {dist.m}")
    return mcf_all(dist, [(1,), (2,)])


def mcf_entropy(labeling: McfLabeling) -> float:
    if labeling.class_count <= 1:
        return 0.0
    return shannon(labeling.class_pmf)
