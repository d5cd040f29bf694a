"""Compiled kernel vs pure-Python fallback on the three hot paths.

Each workload runs in a fresh interpreter so the kernel choice made at
import time is honoured. Usage: python benchmarks/bench_kernel.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOADS = {
    "compose-check robot+battery+field, depth 4": """
from tesagents.agent import AgentConfig
from tesagents.analysis import check_compositionality
from tesagents.robots import default_registry
from tesagents.system import SystemState
from tesagents.values import KV, Loc
reg = default_registry(capacity=3)
on = frozenset({"bat(0)", "field"})
s = SystemState((AgentConfig("id(0)", "Troll", KV({"goal": Loc(5, 5), "read-on": on, "move-on": on})),
                 AgentConfig("bat(0)", "Battery", KV(bat=2)),
                 AgentConfig("field", "Field", KV({Loc(3, 5): "id(0)"}))), 0, reg)
run = lambda: check_compositionality(s, 4)
""",
    "compose-check no_protocol scenario, depth 1": """
from tesagents.analysis import check_compositionality
from tesagents.robots import scenario
s = scenario("no_protocol")
run = lambda: check_compositionality(s, 1)
""",
    "search no_protocol batteries_empty": """
from tesagents.analysis import search_reachable
from tesagents.robots import query, scenario
s = scenario("no_protocol")
run = lambda: search_reachable(s, query("batteries_empty"))
""",
}

TIMER = """
import json, time, tesagents
best = None
for _ in range({repeat}):
    t = time.perf_counter(); run(); dt = time.perf_counter() - t
    best = dt if best is None else min(best, dt)
print(json.dumps({{"compiled": tesagents.COMPILED, "seconds": best}}))
"""


def measure(setup, pure, repeat):
    env = dict(os.environ)
    env.pop("TESAGENTS_PURE", None)
    if pure:
        env["TESAGENTS_PURE"] = "1"
    out = subprocess.run([sys.executable, "-c", setup + TIMER.format(repeat=repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'workload':48} {'pure s':>8} {'compiled s':>11} {'speedup':>8}")
    for name, setup in WORKLOADS.items():
        pure = measure(setup, True, args.repeat)
        comp = measure(setup, False, args.repeat)
        if not comp["compiled"]:
            print(f"{name:48} {pure['seconds']:8.3f} {'n/a':>11}  (extension not built)")
            continue
        print(f"{name:48} {pure['seconds']:8.3f} {comp['seconds']:11.3f} {pure['seconds'] / comp['seconds']:7.2f}x")


if __name__ == "__main__":
    main()
