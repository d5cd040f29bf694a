"""Systems of agents: composability, cliques and the synchronous system step.

A round is barrier-scheduled: every agent that is not ready takes its agent
step, then one clique of pending actions is applied. Applying a clique folds
the per-action updates in actor-id order and closes with ``end`` on every
agent; any rejection discards the clique.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from . import _kernel
from .agent import (Act, Action, AgentAction, AgentBehavior, AgentConfig, ConfigurationError,
                    Environment, NotAllowed, Out, Registry, agent_step, agent_tts, own_options)
from .semiring import MaxPlus, ValuedActionSet, weight_key
from .tes import Kappa, Observation, Part, TESTransitionSystem, kappa_from_comp
from .values import EMPTY, END, IDLE, KV, Name


@dataclass(frozen=True)
class SystemState:
    """Agent configurations (sorted by id) and the shared global time."""

    agents: Tuple[AgentConfig, ...]
    time: int = 0
    registry: Registry = field(default_factory=Registry, compare=False, repr=False)

    def __post_init__(self):
        agents = tuple(sorted(self.agents, key=lambda c: c.id))
        ids = [c.id for c in agents]
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"duplicate agent ids in {ids}")
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "_index", {c.id: i for i, c in enumerate(agents)})

    def __getitem__(self, aid: str) -> AgentConfig:
        try:
            return self.agents[self._index[aid]]
        except KeyError:
            raise ConfigurationError(f"no agent {aid!r} in system") from None

    def __contains__(self, aid: str) -> bool:
        return aid in self._index

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(c.id for c in self.agents)

    def state_of(self, aid: str) -> KV:
        return self[aid].state

    def with_agents(self, configs: Iterable[AgentConfig], time: Optional[int] = None) -> "SystemState":
        return SystemState(tuple(configs), self.time if time is None else time, self.registry)

    def behavior(self, aid: str) -> AgentBehavior:
        return self.registry.behavior(self[aid].cls)

    @property
    def all_ready(self) -> bool:
        return all(c.ready for c in self.agents)

    def key(self):
        """Time-free identity used for duplicate detection in search."""
        return self.agents

    def __str__(self):
        return "[" + " ".join(map(str, self.agents)) + "]"

    def untimed(self) -> str:
        return str(self)

    def digest(self) -> str:
        return hashlib.sha256(f"{self.time}|{self}".encode()).hexdigest()[:16]


@dataclass(frozen=True)
class CliqueCandidate:
    actions: Tuple[AgentAction, ...]
    combined_weight: object

    def __str__(self):
        return "[" + "; ".join(map(str, self.actions)) + "]"


@dataclass(frozen=True)
class RankedClique:
    clique: CliqueCandidate
    updated: SystemState
    events: FrozenSet


# -- composability -------------------------------------------------------------

def comp(a: Part, b: Part) -> bool:
    """Two contributions from disjoint agents compose.

    An action composes with its resources only if each of them answers
    it with the very record the actor received; a resource answering an
    action must see that action. Idle agents (no events) answer nothing, so
    an action naming them as a resource does not compose with their idle.
    """
    return (_kernel.acts_answered(a.agents, a.events, b.agents, b.events)
            and _kernel.acts_answered(b.agents, b.events, a.agents, a.events))


def is_clique(parts: Sequence[Part]) -> bool:
    """Pairwise composability over one contribution per agent, idles included."""
    return all(comp(p, q) for i, p in enumerate(parts) for q in parts[i + 1:])


KAPPA_COMP: Kappa = kappa_from_comp(comp)


# -- sequential update ----------------------------------------------------------

def output_from_action(aa: AgentAction, sys: SystemState) -> KV:
    """Outputs of every resource of ``aa``, keyed by producer."""
    outs = {}
    for r in sorted(aa.resources):
        cfg = sys[r]
        outs[r] = sys.registry.behavior(cfg.cls).get_output(r, aa.actor, aa.name, cfg.state)
    return KV(outs)


def _apply_action(aa: AgentAction, states: Dict[str, KV], classes: Mapping[str, str],
                  registry: Registry, events: list):
    for r in aa.resources:
        if r not in states:
            raise ConfigurationError(f"{aa}: resource {r!r} is not in the system")
    res = sorted(aa.resources)
    outs = {r: registry.behavior(classes[r]).get_output(r, aa.actor, aa.name, states[r]) for r in res}
    inputs = KV(outs)
    new = registry.behavior(classes[aa.actor]).get_post_state(aa.actor, aa.actor, aa.name, inputs,
                                                             states[aa.actor])
    if isinstance(new, NotAllowed):
        return NotAllowed(new.name, aa.actor)
    updates = {aa.actor: new}
    for r in res:
        st = registry.behavior(classes[r]).get_post_state(r, aa.actor, aa.name, EMPTY, states[r])
        if isinstance(st, NotAllowed):
            return NotAllowed(st.name, r)
        updates[r] = st
    states.update(updates)
    events.append(Act(aa.actor, aa.name, aa.resources, inputs))
    events.extend(Out(r, aa.actor, aa.name, outs[r]) for r in res)
    return None


def _end_all(states: Dict[str, KV], classes: Mapping[str, str], registry: Registry):
    for aid in sorted(states):
        st = registry.behavior(classes[aid]).get_post_state(aid, aid, END, EMPTY, states[aid])
        if isinstance(st, NotAllowed):
            return NotAllowed(st.name, aid)
        states[aid] = st
    return None


def _run(sys: SystemState, actions: Sequence[AgentAction], with_end: bool):
    states = {c.id: c.state for c in sys.agents}
    classes = {c.id: c.cls for c in sys.agents}
    actors = [a.actor for a in actions if not a.idle]
    if len(set(actors)) != len(actors):
        raise ConfigurationError(f"more than one action per actor in {[str(a) for a in actions]}")
    events: list = []
    for aa in sorted((a for a in actions if not a.idle), key=lambda a: a.actor):
        if aa.actor not in states:
            raise ConfigurationError(f"actor {aa.actor!r} is not in the system")
        bad = _apply_action(aa, states, classes, sys.registry, events)
        if bad is not None:
            return bad, events
    if with_end:
        bad = _end_all(states, classes, sys.registry)
        if bad is not None:
            return bad, events
    configs = [replace(c, state=states[c.id]) for c in sys.agents]
    return sys.with_agents(configs), events


def updated_system_from_action(aa: AgentAction, sys: SystemState) -> Union[SystemState, NotAllowed]:
    """Apply one action to its actor and resources, without the ``end`` delimiter."""
    return _run(sys, [aa], with_end=False)[0]


def update_system(sys: SystemState, actions: Sequence[AgentAction]) -> Union[SystemState, NotAllowed]:
    """Fold the actions in actor-id order, then apply ``end`` to every agent."""
    return _run(sys, actions, with_end=True)[0]


def update_with_events(sys: SystemState, actions: Sequence[AgentAction]):
    return _run(sys, actions, with_end=True)


def contributions(sys: SystemState, events: Iterable) -> List[Part]:
    by_owner: Dict[str, set] = {aid: set() for aid in sys.ids}
    for e in events:
        by_owner[e.owner].add(e)
    return [Part(frozenset({aid}), frozenset(evs)) for aid, evs in sorted(by_owner.items())]


# -- cliques -------------------------------------------------------------------

def build_composite(pending_sets: Mapping[str, ValuedActionSet], sr=MaxPlus) -> List[CliqueCandidate]:
    """Every choice of at most one pending action per agent, weights combined.

    An agent left out of a selection is represented by its idle action and
    weighs the semiring unit.
    """
    options = []
    for aid in sorted(pending_sets):
        best: Dict[Optional[AgentAction], object] = {None: sr.one}
        for entry, w in pending_sets[aid].items():
            for aa in entry:
                key = None if aa.idle else aa
                best[key] = sr.plus(best[key], w) if key in best else w
        options.append(sorted(best.items(), key=lambda kv: "" if kv[0] is None else str(kv[0])))
    out = []
    for combo in _kernel.selections(options):
        w = sr.one
        acts = []
        for aa, wa in combo:
            w = sr.times(w, wa)
            if aa is not None:
                acts.append(aa)
        out.append(CliqueCandidate(tuple(acts), w))
    return out


def k_best_actions(candidates: Iterable[CliqueCandidate], k: Optional[int], sys: SystemState) -> List[RankedClique]:
    """Valid cliques ranked by weight (best first), ties by canonical print.

    ``k=None`` keeps every valid clique.
    """
    if k is not None and k < 1:
        raise ValueError("k must be >= 1")
    ranked = []
    for cand in candidates:
        updated, events = update_with_events(sys, cand.actions)
        if isinstance(updated, NotAllowed):
            continue
        if not is_clique(contributions(sys, events)):
            continue
        ranked.append(RankedClique(cand, updated, frozenset(events)))
    ranked.sort(key=lambda rc: (weight_key(rc.clique.combined_weight), str(rc.clique)))
    return ranked if k is None else ranked[:k]


def agent_phase(sys: SystemState) -> SystemState:
    """Step every agent that is not ready (the agent step is deterministic)."""
    if sys.all_ready:
        return sys
    configs = []
    for c in sys.agents:
        if c.ready:
            configs.append(c)
        else:
            (stepped,) = agent_step(c, sys.registry)
            configs.append(stepped)
    return sys.with_agents(configs)


def maximal_cliques(ranked: Sequence[RankedClique]) -> List[RankedClique]:
    """Valid cliques not strictly contained in another valid clique."""
    sets = [frozenset(rc.clique.actions) for rc in ranked]
    return [rc for rc, s in zip(ranked, sets) if not any(s < other for other in sets)]


def select_cliques(sys: SystemState, mode="all") -> List[RankedClique]:
    """Cliques a system step may apply.

    ``"all"``: every valid clique (any subset of agents may act);
    ``"maximal"``: valid cliques no further agent can join;
    an int ``k``: the ``k`` best by weight.
    """
    pend = {c.id: c.pending for c in sys.agents}
    cands = build_composite(pend)
    if mode == "all":
        return k_best_actions(cands, None, sys)
    if mode == "maximal":
        return maximal_cliques(k_best_actions(cands, None, sys))
    if isinstance(mode, int) and not isinstance(mode, bool):
        return k_best_actions(cands, mode, sys)
    raise ValueError(f"unknown clique mode {mode!r}")


def _settle(rc: RankedClique, time: int) -> SystemState:
    configs = [AgentConfig(c.id, c.cls, c.state) for c in rc.updated.agents]
    return rc.updated.with_agents(configs, time)


def system_step(sys: SystemState, mode="all") -> List[Tuple[Observation, SystemState]]:
    """Successors of a ready system, one per selected clique (see :func:`select_cliques`).

    Each successor is one time unit later with every agent back to not
    ready. An empty result is a deadlock.
    """
    if not sys.all_ready:
        raise ValueError("system_step needs every agent ready; run agent_phase first")
    ranked = select_cliques(sys, mode)
    t = sys.time + 1
    seen = set()
    out = []
    for rc in ranked:
        nxt = _settle(rc, t)
        o = Observation(rc.events, t)
        if (o, nxt) in seen:
            continue
        seen.add((o, nxt))
        out.append((o, nxt))
    return out


def round_successors(sys: SystemState, mode="all") -> List[Tuple[Observation, SystemState]]:
    """Barrier round from a system whose agents are not all ready."""
    return system_step(agent_phase(sys), mode)


def system_tts(sys0: SystemState, mode="all") -> TESTransitionSystem:
    return TESTransitionSystem(sys0, lambda s: round_successors(s, mode), interface=sys0.ids, name="system")


def is_deadlocked(sys: SystemState, mode="all") -> bool:
    return not round_successors(sys, mode)


# -- stand-alone agents in a system context ---------------------------------------

def environment_of(sys: SystemState, aid: str) -> Environment:
    """Open environment of one agent: requests other agents may address to
    it, and every record its own resources may answer with."""
    reqs = []
    for c in sys.agents:
        if c.id == aid:
            continue
        for action in sys.registry.behavior(c.cls).request_domain(c.id, c.state):
            if aid in action.resources:
                reqs.append((c.id, action))
    classes = {c.id: c.cls for c in sys.agents}

    def outputs(r, actor, name):
        if r not in classes:
            return (EMPTY,)
        return sys.registry.behavior(classes[r]).output_domain(r, actor, name)

    return Environment(tuple(sorted(reqs, key=lambda ca: (ca[0], str(ca[1])))), outputs)


def agent_tts_in(sys: SystemState, aid: str) -> TESTransitionSystem:
    cfg = sys[aid]
    return agent_tts(sys.registry.behavior(cfg.cls), aid, cfg.state, sys.time, environment_of(sys, aid))
