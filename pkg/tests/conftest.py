import pytest

from tesagents.agent import AgentConfig
from tesagents.robots import default_registry, scenario
from tesagents.system import SystemState
from tesagents.values import KV, Loc


def robot_battery(capacity=3, level=2, pos=Loc(3, 5)):
    """A robot wired only to its battery, with its position preset."""
    reg = default_registry(capacity=capacity)
    on = frozenset({"bat(0)"})
    return SystemState((
        AgentConfig("id(0)", "Troll", KV({"goal": Loc(5, 5), "pos": pos, "read-on": on, "move-on": on})),
        AgentConfig("bat(0)", "Battery", KV(bat=level)),
    ), 0, reg)


def robot_battery_field(capacity=3, level=2, at=Loc(3, 5)):
    reg = default_registry(capacity=capacity)
    on = frozenset({"bat(0)", "field"})
    return SystemState((
        AgentConfig("id(0)", "Troll", KV({"goal": Loc(5, 5), "read-on": on, "move-on": on})),
        AgentConfig("bat(0)", "Battery", KV(bat=level)),
        AgentConfig("field", "Field", KV({at: "id(0)"})),
    ), 0, reg)


@pytest.fixture
def no_protocol():
    return scenario("no_protocol")


@pytest.fixture
def with_protocol():
    return scenario("with_protocol")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
