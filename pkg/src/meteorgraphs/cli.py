"""Command-line front end.

Exit codes: 0 when a question was decided (either way), 2 when a bounded
search ran out without an answer, 1 on bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from pathlib import Path
from typing import Any

from .graph import (
    Graph,
    is_essential,
    scc_decomposition,
    simple_cycles,
)
from .io import ParseError, graph_to_text, load_graph, load_matrix
from .matrix_dynamics import (
    SearchBudgetExceeded,
    chain_to_se,
    elementary_sse,
    shift_equivalent,
    sse_chain,
    verify_chain,
)
from .meteor import classify, closure_check, profile, residue_counts
from .monoid import Equality, monoid_equal, parse_monoid_element, parse_terms
from .moves import MoveError, MoveRecord, replay_trace
from .normal_form import Witness, canonicalize, normalize, verify_witness, witness
from .talented import all_leaf_sets, leaf_set, parse_talented_element, talented_equal, vw_form

EXIT_DECIDED, EXIT_INPUT, EXIT_UNDECIDED = 0, 1, 2
MAX_LEAF_ENUMERATION = 12

REPORT_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "inputs", "status", "result", "bounds", "timing"],
    "properties": {
        "command": {"type": "string"},
        "inputs": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["path", "sha256"],
                "properties": {"path": {"type": "string"}, "sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"}},
            },
        },
        "status": {"enum": ["decided", "undecided", "error"]},
        "result": {"type": "object"},
        "bounds": {"type": "object"},
        "seed": {"type": ["integer", "null"]},
        "timing": {
            "type": "object",
            "required": ["seconds"],
            "properties": {"seconds": {"type": "number", "minimum": 0}},
        },
        "error": {"type": "string"},
    },
    "additionalProperties": False,
}


class InputError(Exception):
    def __init__(self, message: str, result: dict | None = None):
        super().__init__(message)
        self.result = result or {}


def _digest(path: str) -> dict:
    data = Path(path).read_bytes()
    return {"path": path, "sha256": hashlib.sha256(data).hexdigest()}


def _graph(path: str) -> Graph:
    try:
        return load_graph(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _names(g: Graph, vs) -> list[str]:
    return [g.label(v) for v in sorted(vs)]


# -- commands -------------------------------------------------------------
def cmd_analyze(args) -> tuple[str, dict, dict]:
    g = _graph(args.graph)
    ms, reason = classify(g)
    scc = scc_decomposition(g)
    res: dict[str, Any] = {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "essential": is_essential(g),
        "sccs": [_names(g, c) for c in scc.components],
        "cycles": [[g.label(v) for v in c.vertex_order] for c in simple_cycles(g)],
        "meteor": ms is not None,
        "reason": reason,
        "leaf_sets": {g.label(v): _names(g, leaf_set(g, [v])) for v in g.vertices},
    }
    if len(g.vertices) <= MAX_LEAF_ENUMERATION:
        res["archimedean_classes"] = len(all_leaf_sets(g))
    else:
        res["archimedean_classes"] = None
    if ms is not None:
        res["profile"] = profile(ms).to_json()
        res["basepoints"] = {"v": g.label(ms.basepoint_v), "w": g.label(ms.basepoint_w)}
        res["raw_counts"] = list(residue_counts(ms))
        res["trails"] = len(ms.trails)
    return "decided", res, {"leaf_enumeration_max_vertices": MAX_LEAF_ENUMERATION}


def cmd_equiv(args) -> tuple[str, dict, dict]:
    g1, g2 = _graph(args.graph1), _graph(args.graph2)
    r1, r2 = classify(g1)[1], classify(g2)[1]
    if r1 or r2:
        result = {"reasons": {"graph1": r1, "graph2": r2}}
        if not r1:
            result["closure"] = closure_check(g1, g2).to_json()
        raise InputError("both inputs must be meteor graphs", result)
    p1, p2 = profile(classify(g1)[0]), profile(classify(g2)[0])
    res: dict[str, Any] = {"equivalent": p1 == p2, "profiles": [p1.to_json(), p2.to_json()]}
    if args.witness and p1 == p2:
        w = witness(g1, g2)
        if w is None or not verify_witness(g1, g2, w):
            raise RuntimeError("witness failed replay verification")
        Path(args.witness).write_text(json.dumps(w.to_json(), indent=1) + "\n", encoding="utf-8")
        res["witness"] = {"path": args.witness, "moves": len(w.moves), "verified": True}
    return "decided", res, {}


def _load_moves(path: str) -> list[MoveRecord]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("moves", [])
    out = []
    for i, rec in enumerate(data):
        try:
            out.append(MoveRecord.from_json(rec))
        except MoveError as exc:
            raise InputError(f"move {i}: {exc}") from exc
    return out


def cmd_moves(args) -> tuple[str, dict, dict]:
    g = _graph(args.graph)
    seq = _load_moves(args.movefile)
    try:
        trace = replay_trace(g, seq)
    except MoveError as exc:
        raise InputError(str(exc)) from exc
    res: dict[str, Any] = {"moves": len(seq), "vertices": len(trace[-1].vertices), "edges": len(trace[-1].edges)}
    if args.check_profile:
        ms0 = classify(g)[0]
        if ms0 is None:
            raise InputError("--check-profile needs a meteor graph")
        base = profile(ms0)
        for i, h in enumerate(trace[1:]):
            ms = classify(h)[0]
            if ms is None or profile(ms) != base:
                raise InputError(f"move {i}: profile changed")
        res["profile_preserved"] = True
    if args.out:
        Path(args.out).write_text(graph_to_text(trace[-1]), encoding="utf-8")
        res["out"] = args.out
    return "decided", res, {}


def _write_moves(path: str, moves) -> None:
    Path(path).write_text(json.dumps([m.to_json() for m in moves], indent=1) + "\n", encoding="utf-8")


def _form_command(args, fn) -> tuple[str, dict, dict]:
    g = _graph(args.graph)
    _, reason = classify(g)
    if reason:
        raise InputError(f"not a meteor graph ({reason})")
    out = fn(g)
    h, moves = out[0], out[1]
    res: dict[str, Any] = {"moves": len(moves), "vertices": len(h.vertices), "edges": len(h.edges)}
    res["profile"] = profile(classify(h)[0]).to_json()
    if args.out:
        Path(args.out).write_text(graph_to_text(h), encoding="utf-8")
        res["out"] = args.out
    if args.moves_out:
        _write_moves(args.moves_out, moves)
        res["moves_out"] = args.moves_out
    return "decided", res, {}


def cmd_normalize(args):
    return _form_command(args, normalize)


def cmd_canonicalize(args):
    return _form_command(args, canonicalize)


def cmd_witness_verify(args) -> tuple[str, dict, dict]:
    g1, g2 = _graph(args.graph1), _graph(args.graph2)
    try:
        w = Witness.from_json(json.loads(Path(args.witness).read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.witness}: {exc}") from exc
    ok = verify_witness(g1, g2, w)
    if not ok:
        raise InputError("witness does not replay onto the target graph")
    return "decided", {"valid": True, "moves": len(w.moves)}, {}


def _matrices(args):
    try:
        return load_matrix(args.matrix1), load_matrix(args.matrix2)
    except OSError as exc:
        raise InputError(str(exc)) from exc
    except ParseError as exc:
        raise InputError(str(exc)) from exc


def cmd_sse(args) -> tuple[str, dict, dict]:
    a, b = _matrices(args)
    bounds = {"chain_bound": args.chain_bound, "entry_bound": args.entry_bound, "inner_dim_bound": args.inner_dim_bound}
    try:
        if args.elementary:
            pair = elementary_sse(a, b, args.entry_bound, args.inner_dim_bound)
            chain = None if pair is None else [pair]
        else:
            chain = sse_chain(a, b, args.chain_bound, args.entry_bound, args.inner_dim_bound)
    except SearchBudgetExceeded as exc:
        return "undecided", {"found": False, "note": str(exc)}, bounds
    if chain is None:
        return "undecided", {"found": False}, bounds
    assert verify_chain(a, b, chain)
    se = chain_to_se(a, chain)
    res = {"found": True, "chain": [p.to_json() for p in chain], "se": se.to_json(), "se_verified": se.verifies(a, b)}
    return "decided", res, bounds


def cmd_se(args) -> tuple[str, dict, dict]:
    a, b = _matrices(args)
    bounds = {"lag_bound": args.lag_bound, "entry_bound": args.entry_bound}
    try:
        w = shift_equivalent(a, b, args.lag_bound, args.entry_bound)
    except SearchBudgetExceeded as exc:
        return "undecided", {"found": False, "note": str(exc)}, bounds
    if w is None:
        return "undecided", {"found": False}, bounds
    return "decided", {"found": True, "witness": w.to_json(), "verified": w.verifies(a, b)}, bounds


def cmd_monoid(args) -> tuple[str, dict, dict]:
    g = _graph(args.graph)
    try:
        shifted = any(sh is not None for expr in (args.expr1, args.expr2) for _, _, sh in parse_terms(expr))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    ms, _ = classify(g)
    bounds = {"depth": args.depth}
    try:
        if shifted:
            if ms is None:
                raise InputError("shifted literals need a meteor graph for an exact verdict")
            x = parse_talented_element(g, args.expr1)
            y = parse_talented_element(g, args.expr2)
            rng = random.Random(args.seed) if args.seed is not None else None
            res = {
                "monoid": "talented",
                "verdict": "equal" if talented_equal(ms, x, y) else "unequal",
                "forms": [vw_form(ms, x, rng).to_json(), vw_form(ms, y, rng).to_json()],
            }
            return "decided", res, {}
        x = parse_monoid_element(g, args.expr1)
        y = parse_monoid_element(g, args.expr2)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    verdict = monoid_equal(g, x, y, args.depth)
    status = "undecided" if verdict is Equality.UNKNOWN else "decided"
    return status, {"monoid": "graph", "verdict": verdict.value}, bounds


# -- plumbing -------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="meteorgraphs", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="print a JSON report")
    ap.add_argument("--seed", type=int, default=None, help="seed for randomized steps")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="structure, meteor recognition and profile")
    p.add_argument("graph")
    p.set_defaults(func=cmd_analyze, files=["graph"])

    p = sub.add_parser("equiv", help="decide equivalence of two meteor graphs")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.add_argument("--witness", metavar="OUT", help="write a replay-verified witness here")
    p.set_defaults(func=cmd_equiv, files=["graph1", "graph2"])

    p = sub.add_parser("moves", help="replay a move file")
    p.add_argument("graph")
    p.add_argument("movefile")
    p.add_argument("--out")
    p.add_argument("--check-profile", action="store_true")
    p.set_defaults(func=cmd_moves, files=["graph", "movefile"])

    for name, fn in (("normalize", cmd_normalize), ("canonicalize", cmd_canonicalize)):
        p = sub.add_parser(name, help=f"{name} a meteor graph")
        p.add_argument("graph")
        p.add_argument("--out")
        p.add_argument("--moves-out")
        p.set_defaults(func=fn, files=["graph"])

    p = sub.add_parser("witness-verify", help="replay a witness file")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.add_argument("witness")
    p.set_defaults(func=cmd_witness_verify, files=["graph1", "graph2", "witness"])

    p = sub.add_parser("sse", help="bounded strong shift equivalence search")
    p.add_argument("matrix1")
    p.add_argument("matrix2")
    p.add_argument("--chain-bound", type=int, default=2)
    p.add_argument("--entry-bound", type=int, default=2)
    p.add_argument("--inner-dim-bound", type=int, default=3)
    p.add_argument("--elementary", action="store_true", help="single elementary step only")
    p.set_defaults(func=cmd_sse, files=["matrix1", "matrix2"])

    p = sub.add_parser("se", help="bounded shift equivalence search")
    p.add_argument("matrix1")
    p.add_argument("matrix2")
    p.add_argument("--lag-bound", type=int, default=2)
    p.add_argument("--entry-bound", type=int, default=2)
    p.set_defaults(func=cmd_se, files=["matrix1", "matrix2"])

    p = sub.add_parser("monoid", help="compare two monoid elements")
    p.add_argument("graph")
    p.add_argument("expr1")
    p.add_argument("expr2")
    p.add_argument("--depth", type=int, default=8)
    p.set_defaults(func=cmd_monoid, files=["graph"])
    return ap


def _human(report: dict) -> str:
    lines = [f"{report['command']}: {report['status']}"]
    if "error" in report:
        lines.append(f"error: {report['error']}")
    for k, v in report["result"].items():
        lines.append(f"  {k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
    if report["bounds"]:
        lines.append("  bounds: " + ", ".join(f"{k}={v}" for k, v in report["bounds"].items()))
    return "\n".join(lines)


def execute(args: argparse.Namespace) -> tuple[int, dict]:
    start = time.perf_counter()
    report: dict[str, Any] = {"command": args.command, "inputs": {}, "seed": args.seed, "bounds": {}, "result": {}}
    try:
        for name in args.files:
            report["inputs"][name] = _digest(getattr(args, name))
        status, result, bounds = args.func(args)
        report.update(status=status, result=result, bounds=bounds)
        code = EXIT_DECIDED if status == "decided" else EXIT_UNDECIDED
    except InputError as exc:
        report.update(status="error", error=str(exc), result=exc.result)
        code = EXIT_INPUT
    except OSError as exc:
        report.update(status="error", error=str(exc))
        code = EXIT_INPUT
    report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    return code, report


def run(argv: list[str]) -> tuple[int, dict]:
    return execute(build_parser().parse_args(argv))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    code, report = execute(args)
    print(json.dumps(report, indent=1) if args.json else _human(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
