"""Problem files: JSON (de)serialization and the bundled instance generators.

Format::

    {"alphabets": [["0", "1"], ["0", "1"]],
     "pmf": [{"x": ["0", "0"], "p": 0.45}, ...],          # omitted cells are 0
     "function": {"outputs": [...], "table": [{"x": [...], "y": "0"}, ...]},
     "functions": {"max": {...}, "argmax": {...}},       # named alternatives
     "A": [1, 2], "A_prime": [1, 2], "side_info": {"3": "G"}}

Everything but ``alphabets`` and ``pmf`` is optional.  Terminal indices are
1-based.  ``side_info`` values are ``"G"`` (the function value) or ``"none"``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .dist import FunctionSpec, JointDistribution, as_subset
from .errors import InvalidArgumentError, ResourceLimitError

DEFAULT_FUNCTION = "g"
MAX_AUCTION_PROFILES = 10**6


@dataclass(eq=False)
class ProblemFile:
    dist: JointDistribution
    functions: dict[str, FunctionSpec] = field(default_factory=dict)
    computing_set: Optional[tuple[int, ...]] = None
    secrecy_set: Optional[tuple[int, ...]] = None
    side_info: dict[int, str] = field(default_factory=dict)

    def function(self, name: Optional[str] = None) -> FunctionSpec:
        if name is None:
            if len(self.functions) != 1:
                raise InvalidArgumentError(
                    f"problem defines functions {sorted(self.functions)}; choose one with --function")
            return next(iter(self.functions.values()))
        try:
            return self.functions[name]
        except KeyError:
            raise InvalidArgumentError(f"no function named {name!r}; have {sorted(self.functions)}") from None

    def to_dict(self) -> dict:
        d = self.dist
        doc = {
            "alphabets": [list(a) for a in d.alphabets],
            "pmf": [{"x": list(x), "p": p} for x, p in d.entries()],
        }
        if len(self.functions) == 1 and DEFAULT_FUNCTION in self.functions:
            doc["function"] = _function_to_dict(d, self.functions[DEFAULT_FUNCTION])
        elif self.functions:
            doc["functions"] = {k: _function_to_dict(d, g) for k, g in self.functions.items()}
        if self.computing_set is not None:
            doc["A"] = list(self.computing_set)
        if self.secrecy_set is not None:
            doc["A_prime"] = list(self.secrecy_set)
        if self.side_info:
            doc["side_info"] = {str(i): v for i, v in sorted(self.side_info.items())}
        return doc

    def dumps(self) -> str:
        return _dumps_compact(self.to_dict())


def _dumps_compact(obj, depth: int = 0, expand: int = 3) -> str:
    """JSON with one list entry per line down to ``expand`` levels."""
    pad = " " * depth
    if depth < expand and isinstance(obj, dict) and obj:
        body = ",\n".join(f"{pad} {json.dumps(k)}: {_dumps_compact(v, depth + 1, expand).lstrip()}"
                          for k, v in obj.items())
        return f"{pad}{{\n{body}\n{pad}}}"
    if depth < expand and isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        body = ",\n".join(f"{pad} {json.dumps(v)}" for v in obj)
        return f"{pad}[\n{body}\n{pad}]"
    return pad + json.dumps(obj)


def _function_to_dict(dist: JointDistribution, g: FunctionSpec) -> dict:
    table = []
    for cell in itertools.product(*(range(n) for n in dist.shape)):
        x = [dist.alphabets[i][k] for i, k in enumerate(cell)]
        table.append({"x": x, "y": g.outputs[g.table[cell]]})
    return {"outputs": list(g.outputs), "table": table}


def _function_from_dict(alphabets, doc, where: str) -> FunctionSpec:
    if not isinstance(doc, dict) or "outputs" not in doc or "table" not in doc:
        raise InvalidArgumentError(f"{where}: needs 'outputs' and 'table'")
    try:
        entries = [(e["x"], e["y"]) for e in doc["table"]]
    except (KeyError, TypeError):
        raise InvalidArgumentError(f"{where}.table: entries need 'x' and 'y'") from None
    try:
        return FunctionSpec.from_entries(alphabets, doc["outputs"], entries)
    except InvalidArgumentError as exc:
        raise InvalidArgumentError(f"{where}: {exc}") from None


def problem_from_dict(doc) -> ProblemFile:
    if not isinstance(doc, dict):
        raise InvalidArgumentError("problem file must be a JSON object")
    for key in ("alphabets", "pmf"):
        if key not in doc:
            raise InvalidArgumentError(f"missing field '{key}'")
    alphabets = doc["alphabets"]
    if not isinstance(alphabets, list) or not all(isinstance(a, list) for a in alphabets):
        raise InvalidArgumentError("alphabets: must be a list of symbol lists")
    try:
        entries = [(e["x"], float(e["p"])) for e in doc["pmf"]]
    except (KeyError, TypeError, ValueError):
        raise InvalidArgumentError("pmf: entries need 'x' and numeric 'p'") from None
    try:
        dist = JointDistribution.from_entries(alphabets, entries)
    except InvalidArgumentError as exc:
        raise InvalidArgumentError(f"pmf: {exc}") from None

    functions = {}
    if "function" in doc:
        functions[DEFAULT_FUNCTION] = _function_from_dict(dist.alphabets, doc["function"], "function")
    for name, fdoc in (doc.get("functions") or {}).items():
        functions[name] = _function_from_dict(dist.alphabets, fdoc, f"functions.{name}")

    def subset(key):
        if key not in doc or doc[key] is None:
            return None
        try:
            return as_subset(doc[key], dist.m)
        except InvalidArgumentError as exc:
            raise InvalidArgumentError(f"{key}: {exc}") from None

    side_info = {}
    for i, v in (doc.get("side_info") or {}).items():
        try:
            idx = int(i)
        except ValueError:
            raise InvalidArgumentError(f"side_info: bad terminal {i!r}") from None
        if not 1 <= idx <= dist.m or v not in ("G", "none"):
            raise InvalidArgumentError(f"side_info: entry {i!r}: {v!r} must map a terminal to 'G' or 'none'")
        side_info[idx] = v
    return ProblemFile(dist, functions, subset("A"), subset("A_prime"), side_info)


def parse_problem(path) -> ProblemFile:
    """Load and validate a problem file (``json.JSONDecodeError`` on bad JSON)."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return problem_from_dict(doc)


def bundled_fixture(name: str) -> Optional[Path]:
    """Path of a fixture shipped with the package, looked up by file name."""
    ref = resources.files("seccompute").joinpath("fixtures").joinpath(Path(name).name)
    return Path(str(ref)) if ref.is_file() else None


def generate_auction(m: int, k: int, tie_break: str = "lowest") -> ProblemFile:
    """Auction instance: m-1 i.i.d. uniform bids on {1..k}; X_m is the bid profile.

    Functions ``max`` (highest bid) and ``argmax`` (winning bidder, ties
    resolved towards the lowest or highest index).  ``A`` is the bidders.
    """
    if m < 3 or k < 2:
        raise InvalidArgumentError("auction needs m >= 3 and k >= 2")
    if tie_break not in ("lowest", "highest"):
        raise InvalidArgumentError(f"tie_break must be 'lowest' or 'highest', got {tie_break!r}")
    bidders = m - 1
    profiles = k**bidders
    if profiles > MAX_AUCTION_PROFILES:
        raise ResourceLimitError(f"{profiles} bid profiles exceeds the cap of {MAX_AUCTION_PROFILES}")
    bids = tuple(str(b) for b in range(1, k + 1))
    prof = list(itertools.product(range(k), repeat=bidders))
    alphabets = [bids] * bidders + [tuple(",".join(bids[b] for b in p) for p in prof)]
    shape = (k,) * bidders + (profiles,)
    if int(np.prod(shape, dtype=object)) > 10**7:
        raise ResourceLimitError(f"auction pmf would have {np.prod(shape, dtype=object)} cells")
    pmf = np.zeros(shape)
    for code, p in enumerate(prof):
        pmf[p + (code,)] = 1.0 / profiles
    dist = JointDistribution(tuple(alphabets), pmf)

    grids = np.indices((k,) * bidders)
    highest = grids.max(axis=0)
    if tie_break == "lowest":
        winner = np.argmax(grids == highest, axis=0)
    else:
        winner = bidders - 1 - np.argmax(grids[::-1] == highest, axis=0)
    expand = (Ellipsis, None)
    g_max = FunctionSpec(bids, np.broadcast_to(highest[expand], shape).copy())
    g_arg = FunctionSpec(tuple(str(i) for i in range(1, bidders + 1)),
                         np.broadcast_to(winner[expand], shape).copy())
    return ProblemFile(dist, {"max": g_max, "argmax": g_arg}, computing_set=tuple(range(1, m)),
                       secrecy_set=tuple(range(1, m + 1)))
