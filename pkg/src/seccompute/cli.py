"""Command-line front end.

Every subcommand prints one JSON document on stdout.  Exit status is 0 on
success (a NotSecurelyComputable verdict is a result, not an error), 2 for
bad input and 3 when an instance exceeds a resource cap.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import capacity as cap
from .dist import (
    as_subset,
    conditional_entropy,
    entropy,
    function_entropy,
    mutual_information,
    adjoin_function,
)
from .errors import InvalidArgumentError, ResourceLimitError
from .mcf import mcf_all, mcf_entropy
from .problem import bundled_fixture, generate_auction, parse_problem
from .protocols import hamming_code, run_balance_check, run_binning, run_example1

log = logging.getLogger("seccompute")

EXIT_INPUT = 2
EXIT_RESOURCE = 3


def _num(x):
    """Round to 12 significant digits; numpy scalars become plain Python."""
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.12g}") + 0.0
    if isinstance(x, np.ndarray):
        return [_num(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _subset_arg(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated terminal indices, got {text!r}") from None


def _floats_arg(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _load(path: str):
    p = Path(path)
    if not p.exists():
        fallback = bundled_fixture(p.name)
        if fallback is None:
            raise FileNotFoundError(f"no such problem file: {path}")
        print(f"note: {path} not found; using bundled fixture {fallback}", file=sys.stderr)
        p = fallback
    return parse_problem(p)


def _pick_set(args, default, m, what="--set"):
    chosen = args.set if args.set is not None else default
    if chosen is None:
        raise InvalidArgumentError(f"no terminal set given ({what} or the problem file)")
    return list(as_subset(chosen, m))


def _constraint(c: cap.Constraint) -> dict:
    return {"subset": list(c.subset), "bound": c.bound, "provenance": c.provenance}


def _capacity_doc(kind, res: cap.CapacityResult, terminals) -> dict:
    return {
        "subcommand": "capacity",
        "kind": kind,
        "set": terminals,
        "C": res.capacity,
        "R_CO": res.r_co,
        "rates": res.rates,
        "omniscience_entropy": res.omniscience_entropy,
        "active": [_constraint(c) for c in res.active],
        "constraints": [_constraint(c) for c in res.constraints] if res.constraints else [],
    }


def cmd_entropy(args):
    pf = _load(args.problem)
    d = pf.dist
    B = list(as_subset(args.set, d.m))
    doc = {"subcommand": "entropy", "set": B, "H": entropy(d, B)}
    if args.given:
        doc["given"] = list(as_subset(args.given, d.m))
        doc["H_conditional"] = conditional_entropy(d, B, args.given)
    if args.with_:
        doc["with"] = list(as_subset(args.with_, d.m))
        doc["I"] = mutual_information(d, B, args.with_)
    if args.function is not None or (pf.functions and len(pf.functions) == 1):
        doc["H_G"] = function_entropy(d, pf.function(args.function))
    return doc


def _parse_groups(text: str, m: int) -> list[list[int]]:
    groups = [g for g in text.replace("|", ";").split(";") if g.strip()]
    try:
        return [[int(t) for t in g.split(",")] for g in groups]
    except ValueError:
        raise InvalidArgumentError(f"bad --groups {text!r}; use e.g. '1;2' or '1,2;3'") from None


def cmd_mcf(args):
    pf = _load(args.problem)
    d = pf.dist
    groups = _parse_groups(args.groups, d.m) if args.groups else [[i] for i in range(1, d.m + 1)]
    lab = mcf_all(d, groups)
    labels = []
    for gi, group in enumerate(lab.groups):
        entries = {}
        for code, cls in enumerate(lab.labels[gi].tolist()):
            idx = np.unravel_index(code, lab.group_shapes[gi])
            key = "|".join(d.alphabets[v - 1][k] for v, k in zip(group, idx))
            entries[key] = cls
        labels.append({"group": list(group), "classes": entries})
    return {"subcommand": "mcf", "groups": [list(g) for g in lab.groups], "class_count": lab.class_count,
            "class_pmf": lab.class_pmf, "H_mcf": mcf_entropy(lab), "labels": labels}


def cmd_capacity(args):
    pf = _load(args.problem)
    d = pf.dist
    if args.kind == "sk":
        S = _pick_set(args, pf.secrecy_set, d.m)
        return _capacity_doc("sk", cap.sk_capacity(d, S), S)
    if args.kind == "secure":
        S = _pick_set(args, pf.computing_set, d.m)
        return _capacity_doc("secure", cap.secure_computability_capacity(d, pf.function(args.function), S), S)
    S = _pick_set(args, pf.secrecy_set or pf.computing_set, d.m)
    side = dict(pf.side_info)
    for item in args.side_info or []:
        i, _, v = item.partition(":")
        try:
            side[int(i)] = v
        except ValueError:
            raise InvalidArgumentError(f"bad --side-info {item!r}; use TERMINAL:G or TERMINAL:none") from None
    if any(v not in ("G", "none") for v in side.values()):
        raise InvalidArgumentError("side information must be 'G' or 'none'")
    if any(v == "G" for v in side.values()):
        ext = adjoin_function(d, pf.function(args.function))
        zmap = {i: (d.m + 1 if side.get(i) == "G" else None) for i in S}
        res = cap.ask_capacity(ext, S, zmap, terminals=d.m, g_variable=d.m + 1)
    else:
        res = cap.ask_capacity(d, S, {i: None for i in S})
    doc = _capacity_doc("ask", res, S)
    doc["side_info"] = {str(i): side.get(i, "none") for i in S}
    return doc


def cmd_decide(args):
    pf = _load(args.problem)
    S = _pick_set(args, pf.computing_set, pf.dist.m)
    v = cap.decide(pf.dist, pf.function(args.function), S, tolerance=args.tolerance)
    return {"subcommand": "decide", "set": S, "verdict": v.status, "H_G": v.H_G, "C": v.C,
            "margin": v.margin, "tolerance": v.tolerance, "R_CO": v.capacity.r_co,
            "rates": v.capacity.rates, "active": [_constraint(c) for c in v.capacity.active]}


def cmd_decompose(args):
    pf = _load(args.problem)
    S = _pick_set(args, pf.computing_set, pf.dist.m)
    r = cap.decompose(pf.dist, pf.function(args.function), S, tolerance=args.tolerance)
    return {"subcommand": "decompose", "set": S, "verdict": r.verdict, "meaningful": r.meaningful,
            "C_g_M_Z": r.C_g_M_Z, "C_g_A": r.C_g_A, "C_M_Z": r.C_M_Z, "C_A": r.C_A, "H_G": r.H_G,
            "H_XM": r.H_XM, "R_CO_A": r.R_CO_A, "identity_residual": r.identity_residual,
            "identity_holds": r.identity_holds}


def cmd_simulate_binning(args):
    pf = _load(args.problem)
    d = pf.dist
    g = pf.function(args.function)
    S = _pick_set(args, pf.computing_set, d.m)
    if args.rates is not None:
        rates = args.rates
    else:
        base = cap.secure_computability_capacity(d, g, S).rates
        rates = [float(r) + args.margin for r in base]
    rep = run_binning(d, g, S, rates, args.n, args.trials, seed=args.seed,
                      freeze_bins=args.freeze_bins, exact_realizations=args.exact_realizations)
    return {"subcommand": "simulate-binning", **rep.to_dict()}


def cmd_simulate_example1(args):
    code = hamming_code(args.hamming_r)
    rep = run_example1(args.delta, code, args.trials, seed=args.seed, n=args.n)
    return {"subcommand": "simulate-example1", **rep.to_dict()}


def cmd_balance_check(args):
    if args.problem:
        pf = _load(args.problem)
        if pf.dist.m != 2:
            raise InvalidArgumentError("balance-check expects a 2-variable (U', V) distribution")
        joint = pf.dist.pmf
        g = pf.function(args.function)
        h = g.table[:, 0]
        if np.any(g.table != h[:, None]):
            raise InvalidArgumentError("the coarsening function must depend on U' only")
    else:
        rng = np.random.default_rng(args.seed)
        U, V = args.u_size, args.v_size
        if U * V > 10**6:
            raise ResourceLimitError(f"{U * V} cells exceeds 10^6")
        v = rng.integers(0, V, size=U)
        joint = np.zeros((U, V))
        joint[np.arange(U), v] = 1.0 / U
        h = rng.integers(0, args.r_prime, size=U)
    if args.d is not None:
        d = args.d
    else:
        pv = joint.sum(axis=0)
        d = 1.0 / float(np.max(joint[:, pv > 0] / pv[pv > 0]))
    rep = run_balance_check(joint, h, args.r, d, args.lam, args.samples, seed=args.seed)
    return {"subcommand": "balance-check", **rep.to_dict()}


def cmd_gen_auction(args):
    pf = generate_auction(args.m, args.k, tie_break=args.tie_break)
    text = pf.dumps()
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
        return {"subcommand": "gen-auction", "m": args.m, "k": args.k, "tie_break": args.tie_break,
                "output": args.output}
    return json.loads(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="seccompute", description="Secure computability of functions of correlated sources.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def problem_cmd(name, fn, help, needs_set=False):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("problem")
        sp.add_argument("--set", type=_subset_arg, required=needs_set, help="terminal set, e.g. 1,2")
        sp.add_argument("--function", help="function name when the file defines several")
        sp.add_argument("--tolerance", type=float, default=cap.DECISION_TOL)
        sp.add_argument("--seed", type=int, default=0)
        sp.set_defaults(func=fn)
        return sp

    sp = problem_cmd("entropy", cmd_entropy, "entropies of the distribution", needs_set=True)
    sp.add_argument("--given", type=_subset_arg)
    sp.add_argument("--with", dest="with_", type=_subset_arg)

    sp = problem_cmd("mcf", cmd_mcf, "maximum common function")
    sp.add_argument("--groups", help="argument groups, e.g. '1;2' or '1,2;3' (default: each terminal)")

    sp = sub.add_parser("capacity", help="SK, aided SK or secure-computability capacity")
    sp.add_argument("kind", choices=["sk", "ask", "secure"])
    sp.add_argument("problem")
    sp.add_argument("--set", type=_subset_arg)
    sp.add_argument("--function")
    sp.add_argument("--side-info", action="append", help="TERMINAL:G or TERMINAL:none (repeatable)")
    sp.add_argument("--tolerance", type=float, default=cap.DECISION_TOL)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_capacity)

    problem_cmd("decide", cmd_decide, "secure-computability verdict")
    problem_cmd("decompose", cmd_decompose, "residual key-rate decomposition")

    sp = problem_cmd("simulate-binning", cmd_simulate_binning, "random-binning Monte Carlo")
    sp.add_argument("--rates", type=_floats_arg, help="per-terminal rates in bits/symbol")
    sp.add_argument("--margin", type=float, default=0.0, help="added to each LP-optimal rate when --rates is absent")
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--freeze-bins", action="store_true")
    sp.add_argument("--exact-realizations", type=int, default=0)

    sp = sub.add_parser("simulate-example1", help="syndrome coset scheme on a DSBS")
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--hamming-r", type=int, default=3)
    sp.add_argument("--n", type=int)
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_simulate_example1)

    sp = sub.add_parser("balance-check", help="balanced-coloring statistic over random colorings")
    sp.add_argument("problem", nargs="?")
    sp.add_argument("--function")
    sp.add_argument("--u-size", type=int, default=4096)
    sp.add_argument("--v-size", type=int, default=1)
    sp.add_argument("--r-prime", type=int, default=1)
    sp.add_argument("--r", type=int, default=4)
    sp.add_argument("--d", type=float)
    sp.add_argument("--lambda", dest="lam", type=float, default=0.04)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_balance_check)

    sp = sub.add_parser("gen-auction", help="write the auction instance")
    sp.add_argument("--m", type=int, default=4)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--tie-break", choices=["lowest", "highest"], default="lowest")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_gen_auction)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        doc = args.func(args)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvalidArgumentError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    json.dump(_num(doc), sys.stdout)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
