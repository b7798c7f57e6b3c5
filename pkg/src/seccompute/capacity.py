"""Communication-for-omniscience LPs, SK / aided-SK capacities and the
secure-computability verdict.

The omniscience region for a secrecy-seeking set A' consists of rate
vectors with R_B >= H(X_B | X_{B^c}) for every nonempty B that is a proper
subset of M and does not contain A'.  With side information Z_j available
for key recovery at j in A', each bound becomes the largest
H(X_B | X_{B^c}, Z_j) over j in B^c intersected with A'.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .dist import (
    JointDistribution,
    FunctionSpec,
    adjoin_function,
    as_subset,
    conditional_entropy,
    entropy,
    function_entropy,
)
from .errors import CapacityTooLargeError, InvalidArgumentError
from .mcf import mcf_all, mcf_entropy
from .simplex import solve_covering_lp

log = logging.getLogger(__name__)

MAX_TERMINALS = 16
WARN_TERMINALS = 12
ACTIVE_TOL = 1e-7
DECISION_TOL = 1e-7

PLAIN = "plain"
GIVEN_G = "conditioned-on-G"

SECURELY_COMPUTABLE = "SecurelyComputable"
NOT_SECURELY_COMPUTABLE = "NotSecurelyComputable"
BOUNDARY = "Boundary"


@dataclass(frozen=True)
class Constraint:
    subset: tuple[int, ...]
    bound: float
    provenance: str = PLAIN


@dataclass(frozen=True)
class ConstraintSet:
    m: int
    secrecy_set: tuple[int, ...]
    constraints: tuple[Constraint, ...]

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def matrix(self) -> tuple[np.ndarray, np.ndarray]:
        A = np.zeros((len(self.constraints), self.m))
        for r, con in enumerate(self.constraints):
            A[r, [i - 1 for i in con.subset]] = 1.0
        return A, np.array([con.bound for con in self.constraints])

    def by_subset(self) -> dict[tuple[int, ...], Constraint]:
        return {con.subset: con for con in self.constraints}


@dataclass(frozen=True)
class RCOSolution:
    value: float
    rates: np.ndarray
    active: tuple[Constraint, ...]


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    r_co: float
    rates: np.ndarray
    active: tuple[Constraint, ...]
    omniscience_entropy: float
    constraints: Optional[ConstraintSet] = field(default=None, repr=False)


@dataclass(frozen=True)
class Verdict:
    status: str
    H_G: float
    C: float
    margin: float
    tolerance: float
    capacity: CapacityResult = field(repr=False)


@dataclass(frozen=True)
class Decomposition:
    C_g_M_Z: float
    C_g_A: float
    C_M_Z: float
    C_A: float
    H_G: float
    H_XM: float
    R_CO_A: float
    identity_residual: float
    identity_holds: bool
    meaningful: bool
    verdict: str


def _check_terminals(m: int) -> None:
    if m > MAX_TERMINALS:
        raise CapacityTooLargeError(f"{m} terminals exceeds the cap of {MAX_TERMINALS}")
    if m >= WARN_TERMINALS:
        log.warning("%d terminals: the LP has %d subset constraints", m, 2**m)


def qualifying_subsets(m: int, secrecy_set: Sequence[int]):
    """Nonempty proper subsets B of {1..m} with A' not contained in B."""
    aset = set(secrecy_set)
    for size in range(1, m):
        for B in itertools.combinations(range(1, m + 1), size):
            if not aset <= set(B):
                yield B


def build_constraints(
    dist: JointDistribution,
    secrecy_set,
    side_info: Optional[Mapping[int, Optional[int]]] = None,
    terminals: Optional[int] = None,
    g_variable: Optional[int] = None,
) -> ConstraintSet:
    """Subset lower bounds of the omniscience rate region.

    ``terminals`` is the number of leading variables of ``dist`` that are
    terminal observations (default: all of them).  ``side_info`` maps a
    terminal in A' to the index of its side-information variable in
    ``dist`` or to ``None`` (constant).  Bounds won by ``g_variable`` are
    tagged ``conditioned-on-G``.
    """
    m = dist.m if terminals is None else int(terminals)
    if not 2 <= m <= dist.m:
        raise InvalidArgumentError(f"terminal count {m} incompatible with {dist.m} variables")
    _check_terminals(m)
    aprime = as_subset(secrecy_set, m)
    side_info = dict(side_info or {})
    for i, z in side_info.items():
        if i not in aprime:
            raise InvalidArgumentError(f"side information given for terminal {i} outside A'")
        if z is not None and not m < z <= dist.m:
            raise InvalidArgumentError(f"side-information variable {z} is not an adjoined variable")

    out = []
    for B in qualifying_subsets(m, aprime):
        Bc = tuple(i for i in range(1, m + 1) if i not in B)
        plain = conditional_entropy(dist, B, Bc)
        best, tag = None, PLAIN
        if any(side_info.get(j) is None for j in Bc if j in aprime):
            best = plain
        for j in Bc:
            z = side_info.get(j)
            if j not in aprime or z is None:
                continue
            val = conditional_entropy(dist, B, Bc + (z,))
            if best is None or val > best + 1e-12:
                best = val
                tag = GIVEN_G if z == g_variable else f"side-information({j})"
        out.append(Constraint(B, max(best, 0.0), tag))
    return ConstraintSet(m, aprime, tuple(out))


def solve_rco(constraints: ConstraintSet) -> RCOSolution:
    """min sum R_i over the region, with R_i >= 0."""
    if not len(constraints):
        raise InvalidArgumentError("empty constraint set")
    A, b = constraints.matrix()
    sol = solve_covering_lp(A, b)
    rates = np.maximum(sol.x, 0.0)
    slack = A @ rates - b
    active = tuple(con for con, s in zip(constraints, slack) if s < ACTIVE_TOL)
    return RCOSolution(value=float(rates.sum()), rates=rates, active=active)


def sk_capacity(dist: JointDistribution, secrecy_set) -> CapacityResult:
    """SK capacity C(A') = H(X_M) - R_CO(A'); H(X_{A'}) when |A'| = 1."""
    aprime = as_subset(secrecy_set, dist.m)
    cons = build_constraints(dist, aprime)
    rco = solve_rco(cons)
    h_all = entropy(dist, range(1, dist.m + 1))
    cap = entropy(dist, aprime) if len(aprime) == 1 else h_all - rco.value
    return CapacityResult(cap, rco.value, rco.rates, rco.active, h_all, cons)


def ask_capacity(
    dist: JointDistribution,
    secrecy_set,
    side_info: Mapping[int, Optional[int]],
    terminals: Optional[int] = None,
    g_variable: Optional[int] = None,
) -> CapacityResult:
    """Aided SK capacity H(mcf((X_M, Z_i), i in A')) - R_CO(A'; Z_{A'})."""
    m = dist.m if terminals is None else int(terminals)
    aprime = as_subset(secrecy_set, m)
    if len(aprime) < 2:
        raise InvalidArgumentError("aided SK capacity needs |A'| >= 2")
    missing = [i for i in aprime if i not in side_info]
    if missing:
        raise InvalidArgumentError(f"no side-information assignment for terminals {missing}")
    cons = build_constraints(dist, aprime, side_info, terminals=m, g_variable=g_variable)
    rco = solve_rco(cons)
    xm = tuple(range(1, m + 1))
    groups = [xm if side_info[i] is None else xm + (side_info[i],) for i in aprime]
    h_common = mcf_entropy(mcf_all(dist, groups))
    return CapacityResult(h_common - rco.value, rco.value, rco.rates, rco.active, h_common, cons)


def side_information_for(m: int, computing_set) -> dict[int, Optional[int]]:
    """Z_i constant on the computing set, Z_i = G (variable m+1) elsewhere."""
    A = set(as_subset(computing_set, m))
    return {i: None if i in A else m + 1 for i in range(1, m + 1)}


def secure_computability_capacity(dist: JointDistribution, g: FunctionSpec, computing_set) -> CapacityResult:
    """C(M; Z_M) for Z_i = 0 on A and Z_i = G on A^c."""
    m = dist.m
    as_subset(computing_set, m)
    ext = adjoin_function(dist, g)
    res = ask_capacity(ext, range(1, m + 1), side_information_for(m, computing_set),
                       terminals=m, g_variable=m + 1)
    h_all = entropy(dist, range(1, m + 1))
    if abs(res.omniscience_entropy - h_all) > 1e-9:
        raise RuntimeError(f"mcf entropy {res.omniscience_entropy} differs from H(X_M) {h_all}")
    return res


def decide(dist: JointDistribution, g: FunctionSpec, computing_set, tolerance: float = DECISION_TOL) -> Verdict:
    """Compare H(G) with C(M; Z_M(A)); within ``tolerance`` the verdict is Boundary."""
    h_g = function_entropy(dist, g)
    res = secure_computability_capacity(dist, g, computing_set)
    margin = res.capacity - h_g
    if margin > tolerance:
        status = SECURELY_COMPUTABLE
    elif margin < -tolerance:
        status = NOT_SECURELY_COMPUTABLE
    else:
        status = BOUNDARY
    return Verdict(status, h_g, res.capacity, margin, tolerance, res)


def decompose(dist: JointDistribution, g: FunctionSpec, computing_set, tolerance: float = DECISION_TOL) -> Decomposition:
    """Split C(M; Z_M) and C(A) into H(G) plus the residual key rates.

    The residual rates only carry meaning when g is securely computable; they
    are still reported otherwise, with ``meaningful`` set to False.
    """
    verdict = decide(dist, g, computing_set, tolerance)
    ca = sk_capacity(dist, computing_set)
    h_xm = entropy(dist, range(1, dist.m + 1))
    cg_a = ca.capacity - verdict.H_G
    residual = h_xm - (ca.r_co + verdict.H_G + cg_a)
    return Decomposition(
        C_g_M_Z=verdict.C - verdict.H_G,
        C_g_A=cg_a,
        C_M_Z=verdict.C,
        C_A=ca.capacity,
        H_G=verdict.H_G,
        H_XM=h_xm,
        R_CO_A=ca.r_co,
        identity_residual=residual,
        identity_holds=abs(residual) <= 1e-9,
        meaningful=verdict.status == SECURELY_COMPUTABLE,
        verdict=verdict.status,
    )
