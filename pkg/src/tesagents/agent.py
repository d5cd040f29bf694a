"""Agents: key-value state, valued action proposals and the four behavior operations.

An agent configuration is ``[id : class | state ; ready ; pending]``. An agent
step turns a configuration that is not ready into a ready one holding its
whole set of proposed actions; the system step later picks among them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .semiring import MaxPlus, ValuedActionSet
from .tes import Observation, TESTransitionSystem
from .values import EMPTY, END, IDLE, KV, Name, show


class ConfigurationError(ValueError):
    """Unknown class tag, missing resource, malformed agent state."""


@dataclass(frozen=True)
class Action:
    name: Name
    resources: FrozenSet[str] = frozenset()

    def __str__(self):
        return f"({self.name} ; {show(self.resources)})"


@dataclass(frozen=True)
class AgentAction:
    actor: str
    action: Action

    @property
    def name(self) -> Name:
        return self.action.name

    @property
    def resources(self) -> FrozenSet[str]:
        return self.action.resources

    @property
    def idle(self) -> bool:
        return self.action.name == IDLE

    def __str__(self):
        return f"({self.actor}, {self.action})"

    def __lt__(self, other):
        return str(self) < str(other)


def idle_action(actor: str) -> AgentAction:
    return AgentAction(actor, Action(IDLE))


@dataclass(frozen=True)
class NotAllowed:
    """A resource's rejection of an action; absorbing in system updates."""

    name: Name
    by: Optional[str] = field(default=None, compare=False)

    def __str__(self):
        return f"notAllowed({self.name})"


# -- events -----------------------------------------------------------------

@dataclass(frozen=True)
class Act:
    """Occurrence of an agent's own action, with the inputs it received."""

    kind = "act"
    actor: str
    name: Name
    resources: FrozenSet[str]
    inputs: KV = EMPTY

    @property
    def owner(self) -> str:
        return self.actor

    def __str__(self):
        s = f"{self.actor}.{self.name}@{show(self.resources)}"
        return s + f"<{self.inputs}>" if self.inputs else s

    def __lt__(self, other):
        return str(self) < str(other)


@dataclass(frozen=True)
class Out:
    """A resource's response to another agent's action."""

    kind = "out"
    producer: str
    actor: str
    name: Name
    record: KV = EMPTY

    @property
    def owner(self) -> str:
        return self.producer

    def __str__(self):
        return f"{self.producer}>{self.actor}.{self.name}={self.record}"

    def __lt__(self, other):
        return str(self) < str(other)


# -- configurations -----------------------------------------------------------

@dataclass(frozen=True)
class AgentConfig:
    id: str
    cls: str
    state: KV
    ready: bool = False
    pending: ValuedActionSet = field(default_factory=ValuedActionSet)

    def __post_init__(self):
        if not self.ready and len(self.pending):
            raise ConfigurationError(f"{self.id}: a configuration that is not ready has no pending actions")

    def __str__(self):
        return f"[{self.id} : {self.cls} | {self.state} ; {show(self.ready)} ; {self.pending}]"


class AgentBehavior:
    """The four operations every agent class implements.

    The defaults describe a passive agent that never acts, never changes on
    its own, outputs nothing and accepts every action it is a resource of.
    ``request_domain`` and ``output_domain`` describe the agent to an open
    environment and are only used to build stand-alone transition systems.
    """

    tag = "Agent"
    sr = MaxPlus

    def compute_actions(self, aid: str, state: KV) -> ValuedActionSet:
        return ValuedActionSet.zero(self.sr)

    def internal_update(self, aid: str, state: KV) -> KV:
        return state

    def get_output(self, rid: str, actor: str, name: Name, state: KV) -> KV:
        return EMPTY

    def get_post_state(self, rid: str, actor: str, name: Name, inputs: KV,
                       state: KV) -> Union[KV, NotAllowed]:
        return state

    def request_domain(self, aid: str, state: KV) -> Iterable[Action]:
        """Every action this agent may ever propose (its request alphabet)."""
        return ()

    def output_domain(self, rid: str, actor: str, name: Name) -> Iterable[KV]:
        """Every record this agent may output in response to ``name``."""
        return (EMPTY,)


class Registry(dict):
    """Class tag -> behavior instance."""

    def behavior(self, tag: str) -> AgentBehavior:
        try:
            return self[tag]
        except KeyError:
            raise ConfigurationError(f"unknown agent class {tag!r}") from None

    def add(self, behavior: AgentBehavior) -> "Registry":
        self[behavior.tag] = behavior
        return self


def compute_actions(registry: Registry, aid: str, cls: str, state: KV) -> ValuedActionSet:
    return registry.behavior(cls).compute_actions(aid, state)


def internal_update(registry: Registry, aid: str, cls: str, state: KV) -> KV:
    return registry.behavior(cls).internal_update(aid, state)


def get_output(registry: Registry, rid: str, cls: str, actor: str, name: Name, state: KV) -> KV:
    return registry.behavior(cls).get_output(rid, actor, name, state)


def get_post_state(registry: Registry, rid: str, cls: str, actor: str, name: Name,
                   inputs: KV, state: KV):
    return registry.behavior(cls).get_post_state(rid, actor, name, inputs, state)


def proposals(behavior: AgentBehavior, aid: str, state: KV) -> Tuple[KV, ValuedActionSet]:
    """Internal update and pending set of one agent rewrite, idle-padded."""
    acts = behavior.compute_actions(aid, state)
    if not len(acts):
        acts = ValuedActionSet.single(idle_action(aid), behavior.sr.one, behavior.sr)
    return behavior.internal_update(aid, state), acts


def agent_step(cfg: AgentConfig, registry: Registry) -> FrozenSet[AgentConfig]:
    """Successors of a configuration that is not ready; empty when it is."""
    if cfg.ready:
        return frozenset()
    state, acts = proposals(registry.behavior(cfg.cls), cfg.id, cfg.state)
    return frozenset({AgentConfig(cfg.id, cfg.cls, state, True, acts)})


def own_options(pending: ValuedActionSet) -> List[Optional[AgentAction]]:
    """Distinct single actions of a pending set; ``None`` stands for idle."""
    opts = {None}
    for entry in pending:
        for aa in entry:
            opts.add(None if aa.idle else aa)
    return sorted(opts, key=lambda a: "" if a is None else str(a))


# -- stand-alone transition system -------------------------------------------------

@dataclass(frozen=True)
class Environment:
    """What an agent may meet when composed with others.

    ``requests`` lists ``(client, action)`` pairs naming this agent as a
    resource; ``outputs(resource, actor, name)`` lists the records a resource
    may answer with. Without an environment the agent runs alone and its
    actions receive no inputs.
    """

    requests: Tuple[Tuple[str, Action], ...] = ()
    outputs: Optional[Callable[[str, str, Name], Iterable[KV]]] = None

    def input_options(self, aa: AgentAction) -> List[KV]:
        if self.outputs is None or not aa.resources:
            return [EMPTY]
        res = sorted(aa.resources)
        per = [list(self.outputs(r, aa.actor, aa.name)) for r in res]
        return [KV(zip(res, combo)) for combo in cartesian(*per)]

    def client_options(self) -> List[Tuple[str, List[Optional[Action]]]]:
        by_client: Dict[str, List[Optional[Action]]] = {}
        for client, action in self.requests:
            by_client.setdefault(client, [None]).append(action)
        return sorted(by_client.items())


CLOSED = Environment()


def local_steps(behavior: AgentBehavior, aid: str, state: KV, env: Environment = CLOSED):
    """One round of a single agent: ``(events, next_state)`` pairs.

    The agent proposes, updates internally, then processes (in actor-id order)
    its own chosen action with some admissible inputs and the requests of its
    clients, and finally the ``end`` delimiter. Rejections drop the branch.
    """
    updated, acts = proposals(behavior, aid, state)
    own = own_options(acts)
    clients = env.client_options()
    out = set()
    for mine in own:
        inputs = env.input_options(mine) if mine is not None else [None]
        for inp in inputs:
            for choice in cartesian(*(opts for _, opts in clients)):
                requests = [(c, a) for (c, _), a in zip(clients, choice) if a is not None]
                if mine is not None:
                    requests.append((aid, mine.action))
                requests.sort(key=lambda ca: ca[0])
                st = updated
                events = []
                for actor, action in requests:
                    if actor == aid:
                        st = behavior.get_post_state(aid, aid, action.name, inp, st)
                        events.append(Act(aid, action.name, action.resources, inp))
                    else:
                        rec = behavior.get_output(aid, actor, action.name, st)
                        st = behavior.get_post_state(aid, actor, action.name, EMPTY, st)
                        events.append(Out(aid, actor, action.name, rec))
                    if isinstance(st, NotAllowed):
                        break
                if isinstance(st, NotAllowed):
                    continue
                st = behavior.get_post_state(aid, aid, END, EMPTY, st)
                if isinstance(st, NotAllowed):
                    continue
                out.add((frozenset(events), st))
    return out


def agent_tts(behavior: AgentBehavior, aid: str, init_state: KV, t0: int = 0,
              env: Environment = CLOSED) -> TESTransitionSystem:
    """TES transition system of one agent; states are ``(state, time)``."""

    def succ(q):
        state, t = q
        return [(Observation(ev, t + 1), (st, t + 1)) for ev, st in local_steps(behavior, aid, state, env)]

    return TESTransitionSystem((init_state, t0), succ, interface={aid}, name=aid)


def is_productive(behavior: AgentBehavior, aid: str, state: KV) -> bool:
    """The agent rewrite yields a non-empty action set (always, with idle padding)."""
    return len(proposals(behavior, aid, state)[1]) > 0
