"""Two robots on a shared field, each with a private battery, optionally
coordinated by an exogenous swap protocol.

Grid convention: E increments x, W decrements x, N decrements y, S
increments y (row 0 at the top). A step that would leave the grid returns
the same location, which the field rejects.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from .agent import (Action, AgentAction, AgentBehavior, AgentConfig, ConfigurationError, NotAllowed,
                    Registry, idle_action)
from .semiring import ValuedActionSet
from .system import SystemState
from .values import EMPTY, END, IDLE, KV, Loc, Name

DIRECTIONS = ("N", "E", "S", "W")
_DELTA = {"N": (0, -1), "E": (1, 0), "S": (0, 1), "W": (-1, 0)}
_LATERAL = {"N": ("E", "W"), "S": ("E", "W"), "E": ("N", "S"), "W": ("N", "S")}

READ = Name("read")


def move(d: str) -> Name:
    return Name("move", (d,))


def is_move(name: Name) -> bool:
    return name.kind == "move"


def charge(j: int) -> Name:
    return Name("charge", (j,))


@dataclass(frozen=True)
class Grid:
    width: int = 6
    height: int = 6

    def contains(self, loc: Loc) -> bool:
        return 0 <= loc.x < self.width and 0 <= loc.y < self.height

    def next(self, loc: Loc, d: str) -> Loc:
        dx, dy = _DELTA[d]
        nxt = Loc(loc.x + dx, loc.y + dy)
        return nxt if self.contains(nxt) else loc

    def cells(self) -> List[Loc]:
        return [Loc(x, y) for y in range(self.height) for x in range(self.width)]


DEFAULT_GRID = Grid()


def next_loc(loc: Loc, d: str, grid: Grid = DEFAULT_GRID) -> Loc:
    return grid.next(loc, d)


def manhattan(a: Loc, b: Loc) -> int:
    return abs(a.x - b.x) + abs(a.y - b.y)


def toward(pos: Loc, goal: Loc) -> List[str]:
    """Directions whose step reduces the Manhattan distance to ``goal``."""
    out = []
    if goal.y < pos.y:
        out.append("N")
    if goal.x > pos.x:
        out.append("E")
    if goal.y > pos.y:
        out.append("S")
    if goal.x < pos.x:
        out.append("W")
    return out


def locate(field_state: KV, aid: str) -> Optional[Loc]:
    for k, v in field_state.items():
        if v == aid and isinstance(k, Loc):
            return k
    return None


class Field(AgentBehavior):
    """Passive agent mapping occupied locations to their occupant."""

    tag = "Field"

    def __init__(self, grid: Grid = DEFAULT_GRID):
        self.grid = grid

    def obstacles(self, state: KV, loc: Loc) -> FrozenSet[str]:
        out = set()
        for d in DIRECTIONS:
            n = self.grid.next(loc, d)
            if n != loc and n in state:
                out.add(d)
        return frozenset(out)

    def get_output(self, rid, actor, name, state):
        if name == READ:
            loc = locate(state, actor)
            if loc is None:
                return EMPTY
            return KV(pos=loc, obstacles=self.obstacles(state, loc))
        return EMPTY

    def get_post_state(self, rid, actor, name, inputs, state):
        if is_move(name):
            loc = locate(state, actor)
            if loc is None:
                return NotAllowed(name, rid)
            nxt = self.grid.next(loc, name.args[0])
            if nxt == loc or nxt in state:
                return NotAllowed(name, rid)
            return state.remove(loc).set(nxt, actor)
        if name.kind == "start":
            west, east = name.args
            loc = locate(state, west)
            if loc is None or locate(state, east) != self.grid.next(loc, "E") or self.grid.next(loc, "E") == loc:
                return NotAllowed(name, rid)
        return state

    def output_domain(self, rid, actor, name):
        if name != READ:
            return (EMPTY,)
        out = [EMPTY]
        for loc in self.grid.cells():
            dirs = [d for d in DIRECTIONS if self.grid.next(loc, d) != loc]
            for r in range(len(dirs) + 1):
                for sub in combinations(dirs, r):
                    out.append(KV(pos=loc, obstacles=frozenset(sub)))
        return out


class Battery(AgentBehavior):
    """Passive energy counter: moves drain one unit, charges refill up to capacity."""

    tag = "Battery"

    def __init__(self, capacity: int = 12):
        self.capacity = capacity

    def get_output(self, rid, actor, name, state):
        if name == READ:
            return KV(bat=state["bat"])
        return EMPTY

    def get_post_state(self, rid, actor, name, inputs, state):
        level = state["bat"]
        if is_move(name):
            if level == 0:
                return NotAllowed(name, rid)
            return state.set("bat", level - 1)
        if name.kind == "charge" and level < self.capacity:
            return state.set("bat", min(level + name.args[0], self.capacity))
        return state

    def output_domain(self, rid, actor, name):
        if name == READ:
            return [KV(bat=v) for v in range(self.capacity + 1)]
        return (EMPTY,)


SENSED = ("pos", "bat", "obstacles")


class Troll(AgentBehavior):
    """Robot alternating a sensor read and a move toward its goal.

    Moves that shorten the Manhattan distance weigh ``optimal``; when the
    next cell in such a direction was sensed occupied, the two lateral moves
    are offered at ``lateral``. At the goal the robot proposes only idle.
    State keys: ``goal``, ``read`` (0: read next, 1: move next), the
    resource sets ``read-on`` and ``move-on``, and the sensed ``pos``,
    ``bat`` and ``obstacles``.
    """

    tag = "Troll"

    def __init__(self, optimal: int = 2, lateral: int = 1, read: int = 1, stay: int = 2):
        self.weights = {"optimal": optimal, "lateral": lateral, "read": read, "stay": stay}

    def _read(self, aid, state) -> AgentAction:
        return AgentAction(aid, Action(READ, frozenset(state.get("read-on", ()))))

    def _move(self, aid, state, d) -> AgentAction:
        return AgentAction(aid, Action(move(d), frozenset(state.get("move-on", ()))))

    def candidate_moves(self, state: KV) -> Dict[str, int]:
        pos, goal = state.get("pos"), state["goal"]
        if pos is None or pos == goal:
            return {}
        blocked = state.get("obstacles", frozenset())
        moves: Dict[str, int] = {}
        for d in toward(pos, goal):
            if d not in blocked:
                moves[d] = max(moves.get(d, 0), self.weights["optimal"])
            else:
                for side in _LATERAL[d]:
                    if side not in blocked:
                        moves.setdefault(side, self.weights["lateral"])
        return moves

    def compute_actions(self, aid, state):
        if state.get("read", 0) == 0:
            return ValuedActionSet.single(self._read(aid, state), self.weights["read"])
        if state.get("pos") is not None and state.get("pos") == state["goal"]:
            return ValuedActionSet.single(idle_action(aid), self.weights["stay"])
        return ValuedActionSet({(self._move(aid, state, d),): w
                                for d, w in self.candidate_moves(state).items()})

    def internal_update(self, aid, state):
        return state.set("read", 1 if state.get("read", 0) == 0 else 0)

    def get_post_state(self, rid, actor, name, inputs, state):
        if rid == actor and name == READ:
            sensed = {}
            for producer in sorted(inputs):
                sensed.update(inputs[producer])
            return state.remove(*SENSED).merge(sensed).set("read", 1)
        return state

    def request_domain(self, aid, state):
        return [Action(READ, frozenset(state.get("read-on", ())))] + \
            [Action(move(d), frozenset(state.get("move-on", ()))) for d in DIRECTIONS]


_SWAP_ID = re.compile(r"^swap\((.+),(.+)\)$")


def parse_swap(aid: str) -> Tuple[str, str]:
    m = _SWAP_ID.match(aid)
    if not m:
        raise ConfigurationError(f"protocol id {aid!r} is not of the form swap(a,b)")
    return m.group(1), m.group(2)


def label(actor: str, name: Name) -> str:
    return f"l({actor},{name})"


def q(i: int) -> FrozenSet[str]:
    return frozenset({f"q({i})"})


class Swap(AgentBehavior):
    """Exogenous protocol exchanging ``west`` and ``east`` on the field.

    Moves of either robot are recorded as they happen; the ``end`` delimiter
    accepts the round only when the recorded labels match a transition of
    the protocol automaton. Idle mode lets the robots advance along their
    lane only; ``start`` (possible when ``east`` is directly east of
    ``west``) enters the exchange: east N, east W, west E, east S, then
    ``finish``. Rounds with nothing recorded keep the current state.
    """

    tag = "Protocol"

    def __init__(self, weight: int = 5):
        self.weight = weight

    def start(self, aid) -> Name:
        return Name("start", parse_swap(aid))

    def transitions(self, aid: str) -> Dict[Tuple[FrozenSet[str], FrozenSet[str]], FrozenSet[str]]:
        west, east = parse_swap(aid)
        fwd = [label(west, move("E")), label(east, move("W"))]
        tr = {}
        for r in range(3):
            for sub in combinations(fwd, r):
                tr[(q(0), frozenset(sub))] = q(0)
        tr[(q(0), frozenset({label(aid, self.start(aid))}))] = q(1)
        sequence = [(east, "N"), (east, "W"), (west, "E"), (east, "S")]
        for i, (who, d) in enumerate(sequence, start=1):
            tr[(q(i), frozenset())] = q(i)
            tr[(q(i), frozenset({label(who, move(d))}))] = q(i + 1)
        tr[(q(5), frozenset())] = q(5)
        tr[(q(5), frozenset({label(aid, Name("finish"))}))] = q(0)
        return tr

    def compute_actions(self, aid, state):
        if state["state"] == q(0):
            return ValuedActionSet.single(
                AgentAction(aid, Action(self.start(aid), frozenset({"field"}))), self.weight)
        if state["state"] == q(5):
            return ValuedActionSet.single(AgentAction(aid, Action(Name("finish"))), self.weight)
        return ValuedActionSet.zero()

    def get_post_state(self, rid, actor, name, inputs, state):
        if name == END and actor == rid:
            key = (state["state"], state["recv"])
            nxt = self.transitions(rid).get(key)
            if nxt is None:
                return NotAllowed(END, rid)
            return state.set("state", nxt).set("recv", frozenset())
        if is_move(name) or (actor == rid and name != IDLE):
            return state.set("recv", state["recv"] | {label(actor, name)})
        return state

    def request_domain(self, aid, state):
        return [Action(self.start(aid), frozenset({"field"})), Action(Name("finish"))]


# -- scenarios -------------------------------------------------------------------

PROTOCOL_ID = "swap(id(0),id(1))"


def default_registry(capacity: int = 12, grid: Grid = DEFAULT_GRID) -> Registry:
    return Registry().add(Troll()).add(Battery(capacity)).add(Field(grid)).add(Swap())


def scenario(kind: str = "no_protocol", capacity: int = 12, grid: Grid = DEFAULT_GRID,
             registry: Optional[Registry] = None) -> SystemState:
    """The two-robot initial system, with or without the swap protocol."""
    if kind not in ("no_protocol", "with_protocol"):
        raise ValueError(f"unknown scenario kind {kind!r}")
    reg = registry if registry is not None else default_registry(capacity, grid)
    cap = reg.behavior("Battery").capacity
    monitors = {PROTOCOL_ID} if kind == "with_protocol" else set()
    agents = []
    for i, goal in ((0, Loc(5, 5)), (1, Loc(0, 5))):
        rid, bid = f"id({i})", f"bat({i})"
        agents.append(AgentConfig(rid, "Troll", KV({
            "goal": goal,
            "read-on": frozenset({bid, "field"}),
            "move-on": frozenset({bid, "field"} | monitors),
        })))
        agents.append(AgentConfig(bid, "Battery", KV(bat=cap)))
    agents.append(AgentConfig("field", "Field", KV({Loc(0, 5): "id(0)", Loc(5, 5): "id(1)"})))
    if kind == "with_protocol":
        agents.append(AgentConfig(PROTOCOL_ID, "Protocol", KV(state=q(0), recv=frozenset())))
    return SystemState(tuple(agents), 0, reg)


@dataclass(frozen=True)
class StatePredicate:
    description: str
    test: Callable[[SystemState], bool]

    def __call__(self, sys: SystemState) -> bool:
        return self.test(sys)


def batteries(sys: SystemState) -> List[AgentConfig]:
    return [c for c in sys.agents if c.cls == "Battery"]


def trolls(sys: SystemState) -> List[AgentConfig]:
    return [c for c in sys.agents if c.cls == "Troll"]


def field_of(sys: SystemState) -> KV:
    return next(c.state for c in sys.agents if c.cls == "Field")


def _batteries_empty(sys: SystemState) -> bool:
    bats = batteries(sys)
    return bool(bats) and all(c.state["bat"] == 0 for c in bats)


def _goals_reached(sys: SystemState) -> bool:
    f = field_of(sys)
    robots = trolls(sys)
    return bool(robots) and all(f.get(c.state["goal"]) == c.id for c in robots)


QUERIES: Dict[str, StatePredicate] = {
    "batteries_empty": StatePredicate("every battery level is 0", _batteries_empty),
    "goals_reached": StatePredicate("every robot occupies its goal cell", _goals_reached),
}


def query(kind: str) -> StatePredicate:
    try:
        return QUERIES[kind]
    except KeyError:
        raise KeyError(f"unknown query {kind!r}; known: {sorted(QUERIES)}") from None
