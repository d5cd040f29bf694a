"""Command line: simulate, search, compose-check, validate-scenario.

Exit codes: 0 success, 1 unknown query or failed check, 2 usage error,
3 scenario error. Reports and traces are JSON Lines.
"""
from __future__ import annotations

import argparse
import json
import random
import re
import sys
import time
from typing import Callable, List, Optional

from .agent import ConfigurationError
from .analysis import (CheckReport, check_compositionality, check_product_laws, replay,
                       search_reachable)
from .robots import QUERIES, StatePredicate
from .scenario import ScenarioError, load_scenario
from .system import KAPPA_COMP, SystemState, agent_phase, agent_tts_in, comp, select_cliques, _settle
from .tes import AlphabetOverlap, Observation, kappa_from_comp
from .values import Loc, parse_loc, show

REPORT = "tesagents-report"
REPORT_VERSION = 1


class QueryError(ValueError):
    pass


# -- query mini-syntax ----------------------------------------------------------

_CLAUSE = re.compile(r"^(?P<lhs>.+?)\s*(?P<op>==|!=|<=|>=|=|<|>)\s*(?P<rhs>.+)$")
_OPS = {"=": lambda a, b: a == b, "==": lambda a, b: a == b, "!=": lambda a, b: a != b,
        "<": lambda a, b: a < b, "<=": lambda a, b: a <= b, ">": lambda a, b: a > b,
        ">=": lambda a, b: a >= b}


def _split_path(lhs: str):
    depth = 0
    for i, ch in enumerate(lhs):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "." and depth == 0:
            return lhs[:i].strip(), lhs[i + 1:].strip()
    raise QueryError(f"expected AGENT.KEY on the left of {lhs!r}")


def _literal(text: str):
    text = text.strip()
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    loc = parse_loc(text)
    return loc if loc is not None else text


def parse_query(text: str) -> StatePredicate:
    """A registered query name, or clauses ``AGENT.KEY OP VALUE`` joined by ``&``.

    Example: ``bat(0).bat = 0 & field.(5;5) = id(0)``. A missing agent or
    key compares as undefined: only ``!=`` holds for it.
    """
    if text in QUERIES:
        return QUERIES[text]
    clauses = []
    for part in text.split("&"):
        m = _CLAUSE.match(part.strip())
        if not m:
            raise QueryError(f"unknown query {text!r}; known: {sorted(QUERIES)} or AGENT.KEY=VALUE clauses")
        aid, key = _split_path(m.group("lhs"))
        clauses.append((aid, _literal(key), m.group("op"), _literal(m.group("rhs"))))

    def test(sys: SystemState) -> bool:
        for aid, key, op, val in clauses:
            v = sys[aid].state.get(key) if aid in sys else None
            if v is None:
                if op != "!=":
                    return False
                continue
            try:
                if not _OPS[op](v, val):
                    return False
            except TypeError:
                return False
        return True

    return StatePredicate(text, test)


# -- output helpers -----------------------------------------------------------------

def _dump(rec) -> str:
    return json.dumps(rec, sort_keys=True)


def _obs_record(o: Observation):
    return {"time": o.time, "events": sorted(map(str, o.events))}


def _write(lines: List[str], out: Optional[str]):
    text = "".join(line + "\n" for line in lines)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _mode_name(mode) -> str:
    return mode if isinstance(mode, str) else f"k_best:{mode}"


# -- commands -----------------------------------------------------------------------

def simulate(sys0: SystemState, steps: int, k: int = 1, seed: Optional[int] = None) -> List[dict]:
    """One record per round, following the best clique (ties shuffled under ``seed``)."""
    rng = random.Random(seed) if seed is not None else None
    recs = [{"kind": "init", "step": 0, "time": sys0.time, "state_digest": sys0.digest()}]
    s = sys0
    for step in range(1, steps + 1):
        ranked = select_cliques(agent_phase(s), k)
        if not ranked:
            recs.append({"kind": "deadlock", "step": step, "time": s.time, "state_digest": s.digest()})
            break
        if rng is not None:
            best = [rc for rc in ranked if rc.clique.combined_weight == ranked[0].clique.combined_weight]
            rc = best[rng.randrange(len(best))]
        else:
            rc = ranked[0]
        s = _settle(rc, s.time + 1)
        recs.append({"kind": "step", "step": step, "time": s.time,
                     "events": sorted(map(str, rc.events)), "clique": str(rc.clique),
                     "weight": show(rc.clique.combined_weight), "state_digest": s.digest()})
    return recs


def search_records(sys0, cfg, query_name, max_solutions, bound, parallel, mode=None):
    pred = parse_query(query_name)
    mode = cfg.clique_mode if mode is None else mode
    res = search_reachable(sys0, pred, max_solutions, bound, mode, parallel)
    recs = [{"kind": "header", "format": REPORT, "version": REPORT_VERSION, "command": "search",
             "scenario": cfg.name, "query": pred.description, "clique_mode": _mode_name(mode),
             "max_solutions": max_solutions, "bound": bound}]
    for i, (s, trace) in enumerate(res.found, start=1):
        recs.append({"kind": "solution", "index": i, "steps": len(trace), "state_digest": s.digest(),
                     "state": str(s), "trace": [_obs_record(o) for o in trace]})
    recs.append({"kind": "summary", "found": len(res.found), "states_explored": res.states_explored,
                 "exhausted": res.exhausted})
    return recs, res


def faulty_comp(a, b) -> bool:
    """Injected fault: a joint step is only accepted when the side listed
    first has the larger agent id, which breaks symmetry."""
    if a.events and b.events:
        return min(a.agents) > min(b.agents) and comp(a, b)
    return comp(a, b)


def compose_check(sys0: SystemState, depth: int, fault: Optional[str] = None) -> List[CheckReport]:
    kappa = kappa_from_comp(faulty_comp) if fault == "asymmetric" else KAPPA_COMP
    reports = [check_compositionality(sys0, depth, kappa)]
    if depth <= 0:
        reports.append(CheckReport("product laws", True, "depth 0: both languages are {[]}"))
    elif len(sys0.ids) >= 3:
        t1, t2, t3 = (agent_tts_in(sys0, aid) for aid in sys0.ids[:3])
        reports.append(check_product_laws(t1, t2, t3, kappa, depth))
    else:
        reports.append(CheckReport("product laws", True, "skipped: needs three agents"))
    return reports


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tesagents", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--scenario", required=True,
                        help="scenario file, or a bundled name (no_protocol, with_protocol)")
        sp.add_argument("--out", help="write the JSON Lines output here instead of stdout")

    sp = sub.add_parser("simulate", help="run k-best rounds and emit a trace")
    common(sp)
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--seed", type=int)

    sp = sub.add_parser("search", help="breadth-first search for states matching a query")
    common(sp)
    sp.add_argument("--query", required=True)
    sp.add_argument("--max-solutions", type=int, default=1)
    sp.add_argument("--bound", type=int, help="maximum number of rounds explored")
    sp.add_argument("--clique-mode", choices=["maximal", "all"],
                    help="override the scenario's clique mode")
    sp.add_argument("--parallel", action="store_true")

    sp = sub.add_parser("compose-check", help="compare system and product languages")
    common(sp)
    sp.add_argument("--depth", type=int, default=4)

    sp = sub.add_parser("validate-scenario", help="check a scenario file against the schema")
    common(sp)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        sys0, cfg = load_scenario(args.scenario)
    except (ScenarioError, ConfigurationError) as e:
        print(f"scenario error: {e}", file=sys.stderr)
        return 3

    if args.command == "validate-scenario":
        _write([_dump({"kind": "valid", "scenario": cfg.name, "agents": list(sys0.ids),
                       "state_digest": sys0.digest()})], args.out)
        return 0

    if args.command == "simulate":
        if args.steps < 0 or args.k < 1:
            print("error: --steps must be >= 0 and --k >= 1", file=sys.stderr)
            return 2
        try:
            recs = simulate(sys0, args.steps, args.k, args.seed)
        except ConfigurationError as e:
            print(f"scenario error: {e}", file=sys.stderr)
            return 3
        _write([_dump(r) for r in recs], args.out)
        return 0

    if args.command == "search":
        if args.max_solutions < 1 or (args.bound is not None and args.bound < 0):
            print("error: --max-solutions must be >= 1 and --bound >= 0", file=sys.stderr)
            return 2
        t0 = time.perf_counter()
        try:
            recs, res = search_records(sys0, cfg, args.query, args.max_solutions, args.bound,
                                       args.parallel, args.clique_mode)
        except QueryError as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        except ConfigurationError as e:
            print(f"scenario error: {e}", file=sys.stderr)
            return 3
        _write([_dump(r) for r in recs], args.out)
        print(f"found={len(res.found)} states={res.states_explored} exhausted={str(res.exhausted).lower()} "
              f"({time.perf_counter() - t0:.1f}s)", file=sys.stderr)
        return 0

    if args.command == "compose-check":
        if args.depth < 0:
            print("error: --depth must be >= 0", file=sys.stderr)
            return 2
        try:
            reports = compose_check(sys0, args.depth, cfg.comp_fault)
        except AlphabetOverlap as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        recs = [{"kind": "header", "format": REPORT, "version": REPORT_VERSION, "command": "compose-check",
                 "scenario": cfg.name, "depth": args.depth, "comp_fault": cfg.comp_fault}]
        recs += [{"kind": "check", "name": r.name, "passed": r.passed, "detail": r.detail,
                  "counterexample": r.counterexample} for r in reports]
        _write([_dump(r) for r in recs], args.out)
        return 0 if all(r.passed for r in reports) else 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
