"""Pure-Python hot loops: language enumeration, transition pairing, clique
products and the resource-answer test behind composability."""
from itertools import product as _cartesian


def enumerate_language(successors, q, depth):
    lang = {()}
    frontier = {((), q)}
    for _ in range(depth):
        nxt = set()
        for u, s in frontier:
            last = u[-1].time if u else -1
            for o, s2 in successors(s):
                if o.time <= last:
                    continue
                v = u + (o,)
                lang.add(v)
                nxt.add((v, s2))
        if not nxt:
            break
        frontier = nxt
    return lang


def pair_steps(s1, s2, q1, q2, relate):
    out = set()
    for o1, p1 in s1:
        t1 = o1.time
        for o2, p2 in s2:
            if not relate(o1, o2):
                continue
            t2 = o2.time
            if t1 < t2:
                out.add((o1, (p1, q2)))
            elif t2 < t1:
                out.add((o2, (q1, p2)))
            else:
                out.add((type(o1)(o1.events | o2.events, t1), (p1, p2)))
    return out


def selections(options):
    """Cartesian product of per-agent option lists, as a list of tuples."""
    return list(_cartesian(*options))


def acts_answered(x_agents, x_events, y_agents, y_events):
    """Every action in ``x`` is answered by the resources of ``y`` it names,
    with the record its actor received, and every answer in ``y`` addressed
    to an agent of ``x`` matches an action of it."""
    outs = {}
    for e in y_events:
        if getattr(e, "kind", None) == "out":
            outs[(e.producer, e.actor)] = e
    acts = {}
    for e in x_events:
        if getattr(e, "kind", None) != "act":
            continue
        acts[e.actor] = e
        for r in e.resources:
            if r not in y_agents:
                continue
            o = outs.get((r, e.actor))
            if o is None or o.name != e.name or e.inputs.get(r) != o.record:
                return False
    for o in outs.values():
        if o.actor not in x_agents:
            continue
        a = acts.get(o.actor)
        if a is None or a.name != o.name or o.producer not in a.resources:
            return False
    return True
