"""Timed-event streams and TES transition systems.

Observations are sets of events paired with a natural timestamp. A TES
transition system is given by an initial state and a successor function
returning ``(observation, next_state)`` pairs; trace languages are computed
by bounded enumeration.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, FrozenSet, Hashable, Iterable, Iterator, Optional, Sequence, Tuple

from . import _kernel


class ContractError(ValueError):
    """Raised when an operation is called outside its precondition."""


class AlphabetOverlap(ContractError):
    """Two systems that must be composed share part of their alphabet."""


@dataclass(frozen=True, order=True)
class Event:
    """An opaque event, identified by its canonical print."""

    label: str
    owner: Optional[str] = field(default=None, compare=False)

    def __str__(self):
        return self.label


def event_key(e) -> str:
    return str(e)


@dataclass(frozen=True)
class Observation:
    events: FrozenSet[Any]
    time: int

    def __post_init__(self):
        if not isinstance(self.events, frozenset):
            object.__setattr__(self, "events", frozenset(self.events))
        if self.time < 0:
            raise ContractError(f"negative timestamp {self.time}")

    @property
    def silent(self) -> bool:
        return not self.events

    def __str__(self):
        return "({" + ",".join(sorted(map(str, self.events))) + "}," + str(self.time) + ")"

    def sort_key(self):
        return (self.time, tuple(sorted(map(str, self.events))))


def obs(events: Iterable[Any], time: int) -> Observation:
    """Build an observation; bare strings become :class:`Event` instances."""
    return Observation(frozenset(Event(e) if isinstance(e, str) else e for e in events), time)


ObsPrefix = Tuple[Observation, ...]


def union_observations(o1: Observation, o2: Observation) -> Observation:
    if o1.time != o2.time:
        raise ContractError(f"cannot union observations at times {o1.time} and {o2.time}")
    return Observation(o1.events | o2.events, o1.time)


def validate_prefix(p: Sequence[Observation]) -> bool:
    return all(a.time < b.time for a, b in zip(p, p[1:]))


def show_prefix(p: Sequence[Observation]) -> str:
    return "[" + ",".join(map(str, p)) + "]"


Step = Tuple[Observation, Hashable]


class TESTransitionSystem:
    """States, events and labelled transitions, presented by a successor function.

    ``interface`` names the agents whose events may label transitions (empty
    for hand-built systems); ``events``, when given, is the explicit event
    set. Both are used to bind composability relations in products.
    """

    def __init__(self, initial: Hashable, successors: Callable[[Hashable], Iterable[Step]],
                 interface: Iterable[str] = (), events: Optional[Iterable[Any]] = None,
                 name: str = "T"):
        self.initial = initial
        self._successors = successors
        self.interface = frozenset(interface)
        self.events = None if events is None else frozenset(events)
        self.name = name

    def successors(self, q: Hashable) -> Tuple[Step, ...]:
        return tuple(self._successors(q))

    def owns(self, e) -> bool:
        if self.events is not None:
            return e in self.events
        return getattr(e, "owner", None) in self.interface

    def __repr__(self):
        return f"TESTransitionSystem({self.name!r})"

    @classmethod
    def from_table(cls, initial, table, name: str = "T", interface: Iterable[str] = ()):
        """Explicit system: ``table[q]`` lists ``(observation, q2)`` pairs."""
        evs = {e for steps in table.values() for o, _ in steps for e in o.events}
        return cls(initial, lambda q: table.get(q, ()), interface=interface, events=evs, name=name)

    @classmethod
    def ticking(cls, initial, table, t0: int = 0, name: str = "T", interface: Iterable[str] = ()):
        """Control-state system where every transition advances time by a fixed step.

        ``table[q]`` lists ``(events, q2)`` or ``(events, q2, dt)`` entries; the
        state of the resulting system is ``(q, t)`` and a step labelled with
        ``events`` lands at time ``t + dt`` (default 1).
        """
        norm = {}
        evs = set()
        for q, steps in table.items():
            rows = []
            for entry in steps:
                events, q2 = entry[0], entry[1]
                dt = entry[2] if len(entry) > 2 else 1
                events = frozenset(Event(e) if isinstance(e, str) else e for e in events)
                evs |= events
                rows.append((events, q2, dt))
            norm[q] = rows

        def succ(state):
            q, t = state
            for events, q2, dt in norm.get(q, ()):
                yield Observation(events, t + dt), (q2, t + dt)

        return cls((initial, t0), succ, interface=interface, events=evs, name=name)


def fin_language(T: TESTransitionSystem, q=None, depth: int = 0) -> set:
    """All valid observation sequences of length <= depth labelling paths from ``q``."""
    if depth < 0:
        raise ContractError("depth must be >= 0")
    q = T.initial if q is None else q
    return _kernel.enumerate_language(T.successors, q, depth)


def fin_language_with_states(T: TESTransitionSystem, q=None, depth: int = 0) -> dict:
    """Map each prefix of length <= depth to the set of states it can end in."""
    q = T.initial if q is None else q
    out = {(): {q}}
    frontier = {((), q)}
    for _ in range(depth):
        nxt = set()
        for u, s in frontier:
            for o, s2 in T.successors(s):
                if u and u[-1].time >= o.time:
                    continue
                v = u + (o,)
                out.setdefault(v, set()).add(s2)
                nxt.add((v, s2))
        frontier = nxt
    return out


def accepts(T: TESTransitionSystem, q, u: Sequence[Observation]) -> bool:
    """True iff ``u`` labels some path from ``q`` (and is a valid prefix)."""
    if not validate_prefix(u):
        return False
    current = {q}
    for o in u:
        current = {s2 for s in current for o2, s2 in T.successors(s) if o2 == o}
        if not current:
            return False
    return True


def _empty_tail_start(p: Sequence[Observation]) -> int:
    k = len(p)
    while k > 0 and p[k - 1].silent:
        k -= 1
    return k


def fin_star_member(T: TESTransitionSystem, q, p: Sequence[Observation], horizon: int) -> bool:
    """Membership in the finite language padded with empty observations.

    ``p`` must split as ``u ++ tail`` with ``u`` accepted from ``q`` and
    ``tail`` made of empty observations no longer than ``horizon``.
    """
    p = tuple(p)
    if not validate_prefix(p):
        return False
    k0 = _empty_tail_start(p)
    for k in range(len(p), k0 - 1, -1):
        if len(p) - k > horizon:
            break
        if accepts(T, q, p[:k]):
            return True
    return False


def closure_member(prefixes: Iterable[Sequence[Observation]], p: Sequence[Observation]) -> bool:
    """``p`` is a prefix of some element continued with empty observations."""
    p = tuple(p)
    if not validate_prefix(p):
        return False
    k0 = _empty_tail_start(p)
    for x in prefixes:
        n = 0
        for a, b in zip(p, x):
            if a != b:
                break
            n += 1
        if k0 <= n:
            return True
    return False


class Kappa:
    """A symmetric relation on observations, optionally aware of the alphabets.

    ``relate(o1, o2, left, right)`` receives the two systems whose
    transitions are being paired; hand-written relations may ignore them.
    """

    def __init__(self, relate: Callable[..., bool], name: str = "kappa"):
        self._relate = relate
        self.name = name

    def relate(self, o1: Observation, o2: Observation, left=None, right=None) -> bool:
        return self._relate(o1, o2, left, right)

    __call__ = relate

    def flipped(self) -> "Kappa":
        return Kappa(lambda o1, o2, l, r: self._relate(o2, o1, r, l), name=self.name + "^op")


def kappa_of(pred: Callable[[Observation, Observation], bool], name: str = "kappa") -> Kappa:
    """Kappa from a plain two-argument predicate."""
    return Kappa(lambda o1, o2, _l, _r: pred(o1, o2), name=name)


@dataclass(frozen=True)
class Part:
    """Events contributed by a set of agents in one instant (a composite action)."""

    agents: FrozenSet[str]
    events: FrozenSet[Any]

    def __mul__(self, other: "Part") -> "Part":
        return Part(self.agents | other.agents, self.events | other.events)


def _alphabet(T) -> FrozenSet:
    if T is None:
        return frozenset()
    if T.interface:
        return T.interface
    return T.events or frozenset()


def kappa_from_comp(comp: Callable[[Part, Part], bool],
                    idle: Callable[[FrozenSet], FrozenSet] = lambda _agents: frozenset()) -> Kappa:
    """Lift an action-level composability predicate to observations.

    Equal stamps relate iff the two actions compose. When one side is
    earlier, the later side's agents are represented by their idle action.
    """

    def relate(o1, o2, left, right):
        a1, a2 = _alphabet(left), _alphabet(right)
        if o1.time == o2.time:
            return comp(Part(a1, o1.events), Part(a2, o2.events))
        if o1.time < o2.time:
            return comp(Part(a1, o1.events), Part(a2, idle(a2)))
        return comp(Part(a1, idle(a1)), Part(a2, o2.events))

    return Kappa(relate, name="kappa_comp")


def product_tts(T1: TESTransitionSystem, T2: TESTransitionSystem, k: Kappa) -> TESTransitionSystem:
    """Product of two TES transition systems under ``k``.

    Transitions are paired; the earlier one fires alone, equal stamps fire
    jointly with the union label. A state with no outgoing transition on
    either side has none in the product.
    """

    def succ(state):
        q1, q2 = state
        s1 = T1.successors(q1)
        if not s1:
            return ()
        s2 = T2.successors(q2)
        if not s2:
            return ()
        return _kernel.pair_steps(s1, s2, q1, q2, lambda a, b: k.relate(a, b, T1, T2))

    events = None
    if T1.events is not None and T2.events is not None:
        events = T1.events | T2.events
    return TESTransitionSystem((T1.initial, T2.initial), succ,
                               interface=T1.interface | T2.interface, events=events,
                               name=f"({T1.name}x{T2.name})")


def fold_product(systems: Sequence[TESTransitionSystem], k: Kappa) -> TESTransitionSystem:
    it = iter(systems)
    acc = next(it)
    for T in it:
        acc = product_tts(acc, T, k)
    return acc


def flatten_state(state, shape) -> tuple:
    """Flatten a nested product state following the nesting of ``shape``."""
    if shape is None:
        return (state,)
    left, right = shape
    return flatten_state(state[0], left) + flatten_state(state[1], right)


def language_key(lang: Iterable[Sequence[Observation]]) -> Tuple[str, ...]:
    """Sorted canonical prints, for order-independent language comparison."""
    return tuple(sorted(show_prefix(u) for u in lang))


def first_difference(l1: set, l2: set) -> Optional[Tuple[str, ObsPrefix]]:
    """A witness prefix in the symmetric difference, shortest first."""
    diff = [("left", u) for u in l1 - l2] + [("right", u) for u in l2 - l1]
    if not diff:
        return None
    return min(diff, key=lambda item: (len(item[1]), show_prefix(item[1])))


def reachable_states(T: TESTransitionSystem, q=None, depth: int = 0) -> Iterator[Tuple[Hashable, int]]:
    """States reachable in at most ``depth`` steps, with their distance."""
    q = T.initial if q is None else q
    seen = {q}
    frontier = [q]
    yield q, 0
    for d in range(1, depth + 1):
        nxt = []
        for s in frontier:
            for _o, s2 in T.successors(s):
                if s2 not in seen:
                    seen.add(s2)
                    nxt.append(s2)
                    yield s2, d
        frontier = nxt


def alive(T: TESTransitionSystem, q, steps: int, last: int = -1, _memo=None) -> bool:
    """Finite unfolding of the greatest-fixed-point run semantics.

    ``q`` can perform ``steps`` more transitions with stamps increasing
    from after ``last`` (the stamp of the observation that led to ``q``).
    """
    memo = {} if _memo is None else _memo

    def go(s, n, last):
        if n == 0:
            return True
        key = (s, n, last)
        if key in memo:
            return memo[key]
        ok = any(o.time > last and go(s2, n - 1, o.time) for o, s2 in T.successors(s))
        memo[key] = ok
        return ok

    return go(q, steps, last)
