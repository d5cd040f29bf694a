# cython: language_level=3
"""Compiled versions of the hot loops in ``_pykernel``; same signatures and results."""
from itertools import product as _cartesian


def enumerate_language(successors, q, int depth):
    cdef set lang = {()}
    cdef set frontier = {((), q)}
    cdef set nxt
    cdef tuple u, v
    cdef long last
    cdef int i
    for i in range(depth):
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
    cdef set out = set()
    cdef long t1, t2
    cdef list right = [(o2, p2, o2.time) for o2, p2 in s2]
    cdef tuple item
    cls = None
    for o1, p1 in s1:
        t1 = o1.time
        for item in right:
            o2 = item[0]
            if not relate(o1, o2):
                continue
            t2 = item[2]
            if t1 < t2:
                out.add((o1, (p1, q2)))
            elif t2 < t1:
                out.add((o2, (q1, item[1])))
            else:
                if cls is None:
                    cls = type(o1)
                out.add((cls(o1.events | o2.events, t1), (p1, item[1])))
    return out


def selections(options):
    return list(_cartesian(*options))


def acts_answered(x_agents, x_events, y_agents, y_events):
    cdef dict outs = {}
    cdef dict acts = {}
    for e in y_events:
        if getattr(e, "kind", None) == "out":
            outs[(e.producer, e.actor)] = e
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
