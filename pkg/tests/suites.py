"""Shared generators and suites for the property tests and the acceptance run."""
import random
from collections import defaultdict
from itertools import product

from tesagents.agent import AgentBehavior, AgentConfig, NotAllowed
from tesagents.analysis import check_closure, check_product_laws, search_reachable
from tesagents.robots import query, scenario
from tesagents.semiring import ValuedActionSet
from tesagents.system import SystemState, agent_phase, agent_tts_in, comp, contributions, select_cliques
from tesagents.tes import Event, Part, TESTransitionSystem, kappa_from_comp
from tesagents.values import END, KV

from conftest import robot_battery, robot_battery_field

AGENTS = ("A", "B", "C")


def random_relation(rng):
    """Pairwise conflicts and synchronisation demands between events of different agents."""
    events = [f"{a.lower()}{i}" for a in AGENTS for i in range(2)]
    owner = {e: e[0].upper() for e in events}
    conflicts = {frozenset(p) for p in product(events, events)
                 if owner[p[0]] != owner[p[1]] and rng.random() < 0.15}
    needs = defaultdict(set)      # event -> {(agent, partner event)}
    for e in events:
        if rng.random() < 0.3:
            other = rng.choice([a for a in AGENTS if a != owner[e]])
            needs[e].add((other, f"{other.lower()}{rng.randrange(2)}"))
    return conflicts, dict(needs)


def make_comp(conflicts, needs):
    def one_way(x, y):
        xs, ys = {str(e) for e in x.events}, {str(e) for e in y.events}
        for e in xs:
            for agent, partner in needs.get(e, ()):
                if agent in y.agents and partner not in ys:
                    return False
        return True

    def comp(x, y):
        xs, ys = {str(e) for e in x.events}, {str(e) for e in y.events}
        if any(frozenset((a, b)) in conflicts for a in xs for b in ys):
            return False
        return one_way(x, y) and one_way(y, x)

    return comp


def random_tts(rng, agent):
    """At most three control states; every step advances time by one or two."""
    states = list(range(rng.randint(1, 3)))
    table = {}
    for q in states:
        rows = []
        for _ in range(rng.randint(1, 2)):
            evs = {f"{agent.lower()}{i}" for i in range(2) if rng.random() < 0.5}
            rows.append((evs, rng.choice(states), rng.choice((1, 1, 2))))
        table[q] = rows
    return TESTransitionSystem.ticking(0, table, name=agent, interface={agent})


def random_triple(rng):
    conflicts, needs = random_relation(rng)
    return [random_tts(rng, a) for a in AGENTS], make_comp(conflicts, needs)


def exchange_law(c, x, y, z):
    return (c(x, y) and c(x * y, z)) == (c(y, z) and c(x, y * z))


def product_law_suite(n=50, depth=5, seed=2024):
    results = []
    rng = random.Random(seed)
    for i in range(n):
        ts, c = random_triple(rng)
        results.append(check_product_laws(*ts, kappa_from_comp(c), depth))
    return results


# -- closure over the case-study classes --------------------------------------------

class DeadEnd(AgentBehavior):
    """Refuses to close its second round: not productive."""

    tag = "DeadEnd"

    def get_post_state(self, rid, actor, name, inputs, state):
        if name == END and actor == rid:
            n = state.get("n", 0)
            return NotAllowed(END, rid) if n >= 1 else state.set("n", n + 1)
        return state


def closure_cases():
    """``(class tag, transition system)`` for each case-study class, each in
    an environment small enough for depth-5 enumeration."""
    rb, rbf = robot_battery(), robot_battery_field()
    proto = scenario("with_protocol")
    return [
        ("Troll", agent_tts_in(rb, "id(0)")),
        ("Battery", agent_tts_in(rb, "bat(0)")),
        ("Field", agent_tts_in(rbf, "field")),
        ("Protocol", agent_tts_in(proto, "swap(id(0),id(1))")),
    ]


def dead_end_tts():
    from tesagents.agent import agent_tts
    return agent_tts(DeadEnd(), "x", KV())


def closure_suite(depth=5):
    return [(tag, check_closure(T, depth)) for tag, T in closure_cases()]


# -- states visited by the case-study searches ---------------------------------------

def visited_transitions():
    """Every transition expanded by the searches of the three case-study queries,
    as ``(scenario, state, observation, successor)``."""
    out = []
    for kind in ("no_protocol", "with_protocol"):
        for q in ("batteries_empty", "goals_reached"):
            search_reachable(scenario(kind), query(q),
                             on_edge=lambda s, o, s2, k=kind: out.append((k, s, o, s2)))
    return out


def case_study_parts(transitions):
    """Per-agent contributions of every valid clique at the visited states,
    grouped by state so that co-occurring triples can be formed."""
    per_state = []
    seen = set()
    for kind, s, _, _ in transitions:
        key = (kind, s.key())
        if key in seen:
            continue
        seen.add(key)
        ready = agent_phase(s)
        by_agent = defaultdict(set)
        for aid in s.ids:
            by_agent[aid].add(Part(frozenset({aid}), frozenset()))
        for rc in select_cliques(ready, "all"):
            for p in contributions(s, rc.events):
                by_agent[min(p.agents)].add(p)
        per_state.append(by_agent)
    return per_state


# -- invariant checks over visited transitions ------------------------------------------

def _moves(o):
    return [e for e in o.events if getattr(e, "kind", None) == "act" and e.name.kind == "move"]


def battery_invariant(transitions):
    for kind, s, o, s2 in transitions:
        cap = s.registry.behavior("Battery").capacity
        drained = {r for e in _moves(o) for r in e.resources if r.startswith("bat")}
        for c in s2.agents:
            if c.cls != "Battery":
                continue
            before, after = s[c.id].state["bat"], c.state["bat"]
            if not 0 <= after <= cap:
                return False, f"{c.id} level {after} outside 0..{cap}"
            if after != before - (1 if c.id in drained else 0):
                return False, f"{c.id} went {before}->{after} on {o}"
    return True, f"{len(transitions)} transitions"


def field_invariants(transitions):
    for kind, s, o, s2 in transitions:
        f = s2["field"].state
        grid = s2.registry.behavior("Field").grid
        if len(set(f.values())) != len(f):
            return False, f"two robots share a cell in {f}"
        if not all(grid.contains(loc) for loc in f):
            return False, f"occupant outside the grid in {f}"
    return True, f"{len(transitions)} transitions"


def time_invariant(transitions):
    for kind, s, o, s2 in transitions:
        if not (o.time == s.time + 1 == s2.time):
            return False, f"{s.time} -> {o.time} -> {s2.time}"
    return True, f"{len(transitions)} transitions"


def protocol_invariant(transitions):
    from tesagents.robots import PROTOCOL_ID, Swap, label
    expected = {}
    for (st, recv), nxt in Swap().transitions(PROTOCOL_ID).items():
        if st != nxt and len(recv) == 1:
            expected[st] = recv
    n = 0
    for kind, s, o, s2 in transitions:
        if kind != "with_protocol":
            continue
        st = s[PROTOCOL_ID].state["state"]
        if st not in expected or not any(f"q({i})" in st for i in range(1, 5)):
            continue
        got = frozenset(label(e.actor, e.name) for e in _moves(o))
        if got and got != expected[st]:
            return False, f"{got} accepted in {set(st)}"
        n += 1
    return True, f"{n} mid-sequence transitions"


def comp_symmetry(per_state):
    alphabet = defaultdict(set)
    for by in per_state:
        for aid, parts in by.items():
            alphabet[aid] |= parts
    n = 0
    ids = sorted(alphabet)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            for x in alphabet[a]:
                for y in alphabet[b]:
                    n += 1
                    if comp(x, y) != comp(y, x):
                        return False, f"comp({x.events}, {y.events}) is not symmetric"
    return True, f"{n} pairs"


def comp_exchange(per_state):
    from itertools import combinations, permutations
    triples = set()
    for by in per_state:
        for a, b, c in combinations(sorted(by), 3):
            for x, y, z in product(by[a], by[b], by[c]):
                triples.add((x, y, z))
    for t in triples:
        for x, y, z in permutations(t):
            if not exchange_law(comp, x, y, z):
                return False, f"exchange law fails on {[sorted(map(str, p.events)) for p in (x, y, z)]}"
    return True, f"{len(triples)} triples in every order"
