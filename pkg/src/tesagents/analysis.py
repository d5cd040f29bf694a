"""Reachability search and bounded-depth checks of the algebraic laws."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .agent import AgentBehavior, Environment, CLOSED, agent_tts
from .system import KAPPA_COMP, SystemState, agent_tts_in, round_successors, system_tts
from .tes import (AlphabetOverlap, Kappa, Observation, ObsPrefix, TESTransitionSystem, alive,
                  closure_member, fin_language, fin_language_with_states, fin_star_member,
                  first_difference, fold_product, product_tts, reachable_states, show_prefix)


# -- search --------------------------------------------------------------------

@dataclass
class SearchOutcome:
    found: List[Tuple[SystemState, ObsPrefix]] = field(default_factory=list)
    states_explored: int = 0
    exhausted: bool = False
    depth: int = 0


def _expand(args):
    sys, mode = args
    return round_successors(sys, mode)


def _expand_all(frontier, mode, pool):
    if pool is None:
        return [round_successors(s, mode) for s in frontier]
    chunk = max(1, len(frontier) // (4 * (pool._max_workers or 1)))
    return list(pool.map(_expand, [(s, mode) for s in frontier], chunksize=chunk))


def search_reachable(init: SystemState, pred: Callable[[SystemState], bool], max_solutions: Optional[int] = 1,
                     bound: Optional[int] = None, mode="maximal", parallel: bool = False,
                     workers: Optional[int] = None,
                     on_edge: Optional[Callable[[SystemState, Observation, SystemState], None]] = None
                     ) -> SearchOutcome:
    """Breadth-first search for states satisfying ``pred``.

    States are deduplicated on their time-free identity, so each is
    explored once, at its shallowest depth. ``bound`` limits the number of
    rounds; ``max_solutions=None`` collects every solution. Expansion of a
    level may run in worker processes; results are merged in frontier order,
    so the outcome does not depend on ``parallel``. ``on_edge`` sees every
    transition out of an expanded state, duplicates included.
    """
    if max_solutions is not None and max_solutions < 1:
        raise ValueError("max_solutions must be >= 1")
    parents: Dict[Any, Tuple[Any, Optional[Observation]]] = {init.key(): (None, None)}
    out = SearchOutcome(states_explored=1)

    def hit(s):
        if pred(s):
            out.found.append((s, _witness(parents, s.key())))
        return max_solutions is not None and len(out.found) >= max_solutions

    if hit(init):
        return out
    frontier = [init]
    depth = 0
    pool = ProcessPoolExecutor(workers or os.cpu_count()) if parallel else None
    try:
        while frontier:
            if bound is not None and depth >= bound:
                return out
            nxt = []
            for s, succs in zip(frontier, _expand_all(frontier, mode, pool)):
                for o, s2 in succs:
                    if on_edge is not None:
                        on_edge(s, o, s2)
                    k = s2.key()
                    if k in parents:
                        continue
                    parents[k] = (s.key(), o)
                    out.states_explored += 1
                    nxt.append(s2)
                    if hit(s2):
                        out.depth = depth + 1
                        return out
            frontier = nxt
            depth += 1
            out.depth = depth
    finally:
        if pool is not None:
            pool.shutdown()
    out.exhausted = True
    return out


def _witness(parents, key) -> ObsPrefix:
    trace = []
    while True:
        prev, o = parents[key]
        if prev is None:
            return tuple(reversed(trace))
        trace.append(o)
        key = prev


def replay(init: SystemState, trace: Sequence[Observation], mode="maximal") -> Optional[SystemState]:
    """Follow ``trace`` from ``init``; ``None`` if some observation is not offered."""
    s = init
    for o in trace:
        nxt = [s2 for o2, s2 in round_successors(s, mode) if o2 == o]
        if not nxt:
            return None
        s = nxt[0]
    return s


# -- reports -----------------------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    passed: bool
    detail: str = ""
    counterexample: Optional[str] = None
    stats: Dict[str, Any] = field(default_factory=dict)

    def __str__(self):
        s = f"{self.name}: {'pass' if self.passed else 'FAIL'}"
        if self.detail:
            s += f" ({self.detail})"
        if self.counterexample:
            s += f" counterexample {self.counterexample}"
        return s


def _compare(name, l1, l2, labels=("left", "right"), **stats) -> CheckReport:
    diff = first_difference(l1, l2)
    if diff is None:
        return CheckReport(name, True, f"{len(l1)} prefixes", stats=stats)
    side, u = diff
    where = labels[0] if side == "left" else labels[1]
    return CheckReport(name, False, f"only in {where}", show_prefix(u), stats=stats)


# -- closure (productive agents) ---------------------------------------------------

def stuck_state(T: TESTransitionSystem, depth: int):
    """A state reachable within ``depth`` steps with no outgoing transition."""
    for q, _ in reachable_states(T, T.initial, depth):
        if not T.successors(q):
            return q
    return None


def check_closure(T: TESTransitionSystem, depth: int, horizon: Optional[int] = None) -> CheckReport:
    """Both inclusions of the closure equality, on prefixes of length <= ``depth``.

    Runs are approximated by prefixes whose end state can still take
    ``horizon`` further steps.
    """
    horizon = depth if horizon is None else horizon
    q = stuck_state(T, depth)
    if q is not None:
        return CheckReport("closure", False, "agent is not productive", f"stuck state {q}")
    with_states = fin_language_with_states(T, T.initial, depth)
    memo: dict = {}
    runs = {u for u, ends in with_states.items()
            if any(alive(T, s, horizon, u[-1].time if u else -1, memo) for s in ends)}
    star = set()
    for u in with_states:
        t = u[-1].time if u else _start_time(T)
        for k in range(depth - len(u) + 1):
            star.add(u + tuple(Observation(frozenset(), t + i + 1) for i in range(k)))
    for p in sorted(star, key=show_prefix):
        if not closure_member(runs, p):
            return CheckReport("closure", False, "padded prefix is not in the closure", show_prefix(p))
    closure = set()
    for u in runs:
        for n in range(len(u) + 1):
            v = u[:n]
            t = v[-1].time if v else _start_time(T)
            for k in range(depth - n + 1):
                closure.add(v + tuple(Observation(frozenset(), t + i + 1) for i in range(k)))
    for p in sorted(closure, key=show_prefix):
        if not fin_star_member(T, T.initial, p, depth):
            return CheckReport("closure", False, "closure prefix is not a padded finite run", show_prefix(p))
    return CheckReport("closure", True, f"{len(star)} padded prefixes, {len(closure)} closure prefixes")


def _start_time(T: TESTransitionSystem) -> int:
    """Time stamp of the initial state, when the state carries one."""
    q = T.initial
    if isinstance(q, SystemState):
        return q.time
    if isinstance(q, tuple) and len(q) == 2 and isinstance(q[1], int):
        return q[1]
    return 0


def agent_closure(behavior: AgentBehavior, aid: str, state, depth: int, env: Environment = CLOSED) -> CheckReport:
    return check_closure(agent_tts(behavior, aid, state, 0, env), depth)


# -- product laws -------------------------------------------------------------------

def _alpha(T):
    return T.interface or T.events or frozenset()


def check_disjoint(systems: Sequence[TESTransitionSystem]):
    for i, a in enumerate(systems):
        for b in systems[i + 1:]:
            shared = _alpha(a) & _alpha(b)
            if shared:
                raise AlphabetOverlap(f"{a.name} and {b.name} share {sorted(map(str, shared))}")


def live_language(T: TESTransitionSystem, depth: int, horizon: int) -> set:
    """Prefixes of length <= ``depth`` after which ``horizon`` more steps are possible."""
    memo: dict = {}
    return {u for u, ends in fin_language_with_states(T, T.initial, depth).items()
            if any(alive(T, s, horizon, u[-1].time if u else -1, memo) for s in ends)}


def check_product_laws(t1: TESTransitionSystem, t2: TESTransitionSystem, t3: TESTransitionSystem,
                       k: Kappa, depth: int, horizon: Optional[int] = None) -> CheckReport:
    """Commutativity and associativity of the product, compared as languages.

    The product rules only test the next transitions of both sides, so a
    grouping may admit a prefix that no run extends (a third system has no
    composable continuation). Such dead prefixes are not behaviours; by
    default only prefixes extendable by ``horizon`` further steps (``depth``
    when omitted) are compared. ``horizon=0`` compares the raw languages.
    """
    check_disjoint([t1, t2, t3])
    horizon = depth if horizon is None else horizon
    lang = lambda T: live_language(T, depth, horizon)
    base = lang(product_tts(product_tts(t1, t2, k), t3, k))
    variants = {
        "T1x(T2xT3)": product_tts(t1, product_tts(t2, t3, k), k),
        "(T2xT1)xT3": product_tts(product_tts(t2, t1, k), t3, k),
        "T3x(T1xT2)": product_tts(t3, product_tts(t1, t2, k), k),
        "(T1xT3)xT2": product_tts(product_tts(t1, t3, k), t2, k),
    }
    for name, T in variants.items():
        r = _compare("product laws", base, lang(T), ("(T1xT2)xT3", name))
        if not r.passed:
            return r
    return CheckReport("product laws", True, f"{len(base)} live prefixes at depth {depth}")


def check_compositionality(sys0: SystemState, depth: int, kappa: Kappa = KAPPA_COMP) -> CheckReport:
    """Language of the system against the product of its agents' transition systems."""
    if depth <= 0:
        return CheckReport("compositionality", True, "depth 0: both languages are {[]}")
    parts = [agent_tts_in(sys0, aid) for aid in sys0.ids]
    check_disjoint(parts)
    left = fin_language(system_tts(sys0, "all"), sys0, depth)
    right = fin_language(fold_product(parts, kappa), None, depth)
    return _compare("compositionality", left, right, ("system", "product"), agents=len(parts))
