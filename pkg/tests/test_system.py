import pytest

from tesagents.agent import (Action, AgentAction, AgentBehavior, AgentConfig, ConfigurationError, NotAllowed,
                             Registry, idle_action)
from tesagents.robots import READ, Battery, Field, PROTOCOL_ID, default_registry, move, q, scenario
from tesagents.semiring import ValuedActionSet
from tesagents.system import (CliqueCandidate, SystemState, agent_phase, build_composite, comp, contributions,
                              is_deadlocked, k_best_actions, output_from_action, round_successors,
                              select_cliques, system_step, update_system, update_with_events,
                              updated_system_from_action)
from tesagents.tes import Part
from tesagents.values import EMPTY, KV, Loc

from conftest import robot_battery_field

RES0 = frozenset({"bat(0)", "field"})


def act(actor, name, res=RES0):
    return AgentAction(actor, Action(name, frozenset(res)))


def test_output_from_action(no_protocol):
    outs = output_from_action(act("id(0)", READ), no_protocol)
    assert outs == KV({"bat(0)": KV(bat=12), "field": KV(pos=Loc(0, 5), obstacles=frozenset())})
    assert output_from_action(act("id(0)", READ, ()), no_protocol) == EMPTY
    assert output_from_action(act("id(0)", move("E")), no_protocol) == KV({"bat(0)": EMPTY, "field": EMPTY})


def test_missing_resource(no_protocol):
    with pytest.raises(ConfigurationError):
        update_system(no_protocol, [act("id(0)", READ, {"bat(9)"})])


def test_move_updates_field_and_battery(no_protocol):
    s = updated_system_from_action(act("id(0)", move("E")), no_protocol)
    assert s["field"].state == KV({Loc(1, 5): "id(0)", Loc(5, 5): "id(1)"})
    assert s["bat(0)"].state["bat"] == 11


def test_move_with_empty_battery(no_protocol):
    s = no_protocol.with_agents([AgentConfig("bat(0)", "Battery", KV(bat=0)) if c.id == "bat(0)" else c
                                 for c in no_protocol.agents])
    assert isinstance(update_system(s, [act("id(0)", move("E"))]), NotAllowed)


def test_update_system_empty_list(no_protocol):
    assert update_system(no_protocol, []) == no_protocol


def test_protocol_rejects_wrong_move(with_protocol):
    mid = with_protocol.with_agents([
        AgentConfig(PROTOCOL_ID, "Protocol", KV(state=q(1), recv=frozenset())) if c.id == PROTOCOL_ID else c
        for c in with_protocol.agents])
    res = frozenset({"bat(1)", "field", PROTOCOL_ID})
    bad = update_system(mid, [act("id(1)", move("W"), res)])   # the protocol expects N here
    assert isinstance(bad, NotAllowed) and bad.by == PROTOCOL_ID
    # with nothing received the protocol stays put
    assert update_system(mid, [])[PROTOCOL_ID].state["state"] == q(1)


def test_two_independent_moves(no_protocol):
    s = update_system(no_protocol, [act("id(0)", move("E")),
                                    act("id(1)", move("W"), {"bat(1)", "field"})])
    assert s["field"].state == KV({Loc(1, 5): "id(0)", Loc(4, 5): "id(1)"})
    assert s["bat(0)"].state["bat"] == s["bat(1)"].state["bat"] == 11


def test_update_order_commutes(no_protocol):
    a, b = act("id(0)", move("E")), act("id(1)", move("W"), {"bat(1)", "field"})
    assert update_system(no_protocol, [a, b]) == update_system(no_protocol, [b, a])


def test_not_allowed_absorbs(no_protocol):
    # id(1) moving east leaves the grid; id(0) is fine but the whole clique is rejected
    res = update_system(no_protocol, [act("id(0)", move("E")), act("id(1)", move("E"), {"bat(1)", "field"})])
    assert isinstance(res, NotAllowed)


def test_one_action_per_actor(no_protocol):
    with pytest.raises(ConfigurationError):
        update_system(no_protocol, [act("id(0)", move("E")), act("id(0)", move("N"))])


def _parts(sys, actions):
    _, events = update_with_events(sys, actions)
    return {p.agents: p for p in contributions(sys, events)}


def test_comp_examples(no_protocol):
    parts = _parts(no_protocol, [act("id(0)", move("E"))])
    robot, bat, field = parts[frozenset({"id(0)"})], parts[frozenset({"bat(0)"})], parts[frozenset({"field"})]
    assert comp(robot, bat) and comp(bat, robot)
    idle_bat = Part(frozenset({"bat(0)"}), frozenset())
    assert not comp(robot, idle_bat) and not comp(idle_bat, robot)
    idle_field = Part(frozenset({"field"}), frozenset())
    assert comp(idle_bat, idle_field)
    assert comp(robot * bat, field)


def test_build_composite_passive_only():
    pend = {"a": ValuedActionSet.single(idle_action("a"), 0), "b": ValuedActionSet.single(idle_action("b"), 0)}
    assert [c.actions for c in build_composite(pend)] == [()]


def test_build_composite_robot_with_two_moves():
    moves = ValuedActionSet({(act("id(0)", move("E")),): 2, (act("id(0)", move("N")),): 1})
    idle = lambda a: ValuedActionSet.single(idle_action(a), 0)
    cands = build_composite({"id(0)": moves, "bat(0)": idle("bat(0)"), "field": idle("field")})
    assert sorted(str(c) for c in cands) == sorted(
        ["[]", f"[{act('id(0)', move('E'))}]", f"[{act('id(0)', move('N'))}]"])
    assert sorted(c.combined_weight for c in cands) == [0, 1, 2]


def test_build_composite_joint():
    a, b = act("id(0)", move("E")), act("id(1)", move("W"), {"bat(1)", "field"})
    cands = build_composite({"id(0)": ValuedActionSet.single(a, 2), "id(1)": ValuedActionSet.single(b, 2)})
    assert any(set(c.actions) == {a, b} and c.combined_weight == 4 for c in cands)


def test_k_best(no_protocol):
    a = act("id(0)", move("E"))
    far = act("id(0)", move("W"))          # clamps at the edge: rejected
    assert k_best_actions([CliqueCandidate((far,), 9)], 3, no_protocol) == []
    cands = [CliqueCandidate((a,), 3), CliqueCandidate((act("id(1)", move("W"), {"bat(1)", "field"}),), 5)]
    (best,) = k_best_actions(cands, 1, no_protocol)
    assert best.clique.combined_weight == 5
    assert len(k_best_actions(cands, 10, no_protocol)) == 2
    with pytest.raises(ValueError):
        k_best_actions(cands, 0, no_protocol)


def test_all_passive_system_steps_silently():
    reg = Registry().add(Battery()).add(Field())
    s = SystemState((AgentConfig("b", "Battery", KV(bat=1)), AgentConfig("f", "Field", EMPTY)), 0, reg)
    ((o, s2),) = system_step(agent_phase(s))
    assert o.silent and o.time == 1 and s2.time == 1 and not any(c.ready for c in s2.agents)


class Insistent(AgentBehavior):
    """Moves on its battery every round and refuses to close a round without moving."""

    tag = "Insistent"

    def compute_actions(self, aid, state):
        return ValuedActionSet.single(AgentAction(aid, Action(move("E"), frozenset({"bat"}))), 1)

    def get_post_state(self, rid, actor, name, inputs, state):
        if name.kind == "end":
            return state.remove("moved") if state.get("moved") else NotAllowed(name, rid)
        if actor == rid and name.kind == "move":
            return state.set("moved", 1)
        return state


def test_deadlock_is_reported():
    reg = Registry().add(Battery()).add(Insistent())
    s = SystemState((AgentConfig("r", "Insistent", EMPTY), AgentConfig("bat", "Battery", KV(bat=1))), 0, reg)
    ((_, s1),) = round_successors(s)
    assert s1["bat"].state["bat"] == 0
    assert round_successors(s1) == [] and is_deadlocked(s1)


def test_system_step_requires_ready(no_protocol):
    with pytest.raises(ValueError):
        system_step(no_protocol)


def test_init_reads_then_both_robots_move(no_protocol):
    succ = round_successors(no_protocol, "maximal")
    assert len(succ) == 1
    ((o, s1),) = succ
    assert {str(e) for e in o.events if e.kind == "act"} == {
        "id(0).read@{bat(0),field}<{bat(0)|->{bat|->12}, field|->{obstacles|->{}, pos|->(0;5)}}>",
        "id(1).read@{bat(1),field}<{bat(1)|->{bat|->12}, field|->{obstacles|->{}, pos|->(5;5)}}>"}
    (o2, s2), = round_successors(s1, "maximal")
    assert s2["field"].state == KV({Loc(1, 5): "id(0)", Loc(4, 5): "id(1)"})


def test_clique_modes(no_protocol):
    ready = agent_phase(no_protocol)
    every = select_cliques(ready, "all")
    maximal = select_cliques(ready, "maximal")
    assert len(every) == 4 and len(maximal) == 1      # each robot reads or not
    assert len(select_cliques(ready, 2)) == 2
    with pytest.raises(ValueError):
        select_cliques(ready, "some")


def test_time_advances_by_one():
    s = robot_battery_field()
    for _ in range(4):
        o, s2 = round_successors(s)[0]
        assert o.time == s.time + 1 == s2.time
        s = s2
