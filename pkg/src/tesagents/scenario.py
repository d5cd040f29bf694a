"""Scenario files: JSON Lines, one header line then one line per agent.

Header keys: ``format`` ("tesagents-scenario"), ``version`` (1), ``grid``
([width, height]), ``capacity``, ``semiring`` ("maxplus"), ``clique_mode``
("maximal", "all" or {"k_best": k}), optional ``time`` and ``comp_fault``.
Agent lines: ``{"id": ..., "class": ..., "state": {...}}``. State values are
JSON scalars, locations written "(x;y)", and sets as {"set": [...]}; keys
that look like locations are read back as locations.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .agent import AgentConfig, ConfigurationError
from .robots import Grid, default_registry
from .semiring import SEMIRINGS
from .system import SystemState
from .values import KV, Loc, parse_loc

FORMAT = "tesagents-scenario"
VERSION = 1
BUNDLED = ("no_protocol", "with_protocol")
FAULTS = (None, "asymmetric")


class ScenarioError(ValueError):
    """A scenario file that does not match the schema."""


@dataclass
class ScenarioConfig:
    grid: Grid = field(default_factory=Grid)
    capacity: int = 12
    semiring: str = "maxplus"
    clique_mode: Any = "maximal"
    comp_fault: Optional[str] = None
    name: str = ""


# -- values ---------------------------------------------------------------------

def encode_value(v):
    if isinstance(v, bool) or isinstance(v, int) or v is None:
        return v
    if isinstance(v, Loc):
        return str(v)
    if isinstance(v, str):
        if parse_loc(v) is not None:
            raise ScenarioError(f"string {v!r} would read back as a location")
        return v
    if isinstance(v, (frozenset, set)):
        return {"set": sorted((encode_value(x) for x in v), key=lambda x: json.dumps(x))}
    raise ScenarioError(f"cannot encode value {v!r}")


def decode_value(v, where: str):
    if isinstance(v, bool) or isinstance(v, int) or v is None:
        return v
    if isinstance(v, str):
        loc = parse_loc(v)
        return loc if loc is not None else v
    if isinstance(v, dict) and set(v) == {"set"} and isinstance(v["set"], list):
        return frozenset(decode_value(x, where) for x in v["set"])
    raise ScenarioError(f"{where}: unsupported value {v!r}")


def encode_state(state: KV) -> Dict[str, Any]:
    return {str(k): encode_value(v) for k, v in sorted(state.items(), key=lambda kv: str(kv[0]))}


def decode_state(d, where: str) -> KV:
    if not isinstance(d, dict):
        raise ScenarioError(f"{where}: 'state' must be an object")
    out = {}
    for k, v in d.items():
        loc = parse_loc(k)
        out[loc if loc is not None else k] = decode_value(v, f"{where}.{k}")
    return KV(out)


# -- header -----------------------------------------------------------------------

def _clique_mode(v):
    if v in ("maximal", "all"):
        return v
    if isinstance(v, dict) and set(v) == {"k_best"} and isinstance(v["k_best"], int) \
            and not isinstance(v["k_best"], bool) and v["k_best"] >= 1:
        return v["k_best"]
    raise ScenarioError(f"header.clique_mode: expected 'maximal', 'all' or {{\"k_best\": k>=1}}, got {v!r}")


def _nat(header, key, default):
    v = header.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ScenarioError(f"header.{key}: expected a natural number, got {v!r}")
    return v


def parse_header(h) -> ScenarioConfig:
    if not isinstance(h, dict):
        raise ScenarioError("header: first line must be an object")
    if h.get("format") != FORMAT:
        raise ScenarioError(f"header.format: expected {FORMAT!r}, got {h.get('format')!r}")
    if h.get("version") != VERSION:
        raise ScenarioError(f"header.version: unsupported version {h.get('version')!r}")
    grid = h.get("grid", [6, 6])
    if not (isinstance(grid, list) and len(grid) == 2 and all(isinstance(g, int) and g > 0 for g in grid)):
        raise ScenarioError(f"header.grid: expected [width, height], got {grid!r}")
    sr = h.get("semiring", "maxplus")
    if sr not in SEMIRINGS:
        raise ScenarioError(f"header.semiring: unknown semiring {sr!r}")
    fault = h.get("comp_fault")
    if fault not in FAULTS:
        raise ScenarioError(f"header.comp_fault: unknown fault {fault!r}")
    return ScenarioConfig(Grid(*grid), _nat(h, "capacity", 12), sr,
                          _clique_mode(h.get("clique_mode", "maximal")), fault)


def header_of(cfg: ScenarioConfig, time: int = 0) -> Dict[str, Any]:
    mode = cfg.clique_mode if isinstance(cfg.clique_mode, str) else {"k_best": cfg.clique_mode}
    h = {"format": FORMAT, "version": VERSION, "grid": [cfg.grid.width, cfg.grid.height],
         "capacity": cfg.capacity, "semiring": cfg.semiring, "clique_mode": mode, "time": time}
    if cfg.comp_fault:
        h["comp_fault"] = cfg.comp_fault
    return h


# -- load / emit --------------------------------------------------------------------

def loads(text: str, name: str = "<string>"):
    """Parse scenario text into ``(SystemState, ScenarioConfig)``."""
    rows = []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append((n, json.loads(line)))
        except json.JSONDecodeError as e:
            raise ScenarioError(f"line {n}: invalid JSON ({e.msg})") from None
    if not rows:
        raise ScenarioError("empty scenario: missing header line")
    cfg = parse_header(rows[0][1])
    cfg.name = name
    registry = default_registry(cfg.capacity, cfg.grid)
    agents: List[AgentConfig] = []
    seen = set()
    for n, row in rows[1:]:
        where = f"line {n}"
        if not isinstance(row, dict):
            raise ScenarioError(f"{where}: agent line must be an object")
        for key in ("id", "class", "state"):
            if key not in row:
                raise ScenarioError(f"{where}: missing field {key!r}")
        extra = set(row) - {"id", "class", "state"}
        if extra:
            raise ScenarioError(f"{where}: unknown field {sorted(extra)[0]!r}")
        aid, cls = row["id"], row["class"]
        if not isinstance(aid, str) or not aid:
            raise ScenarioError(f"{where}.id: expected a non-empty string")
        if aid in seen:
            raise ScenarioError(f"{where}.id: duplicate agent id {aid!r}")
        seen.add(aid)
        if cls not in registry:
            raise ScenarioError(f"{where}.class: unknown agent class {cls!r}")
        agents.append(AgentConfig(aid, cls, decode_state(row["state"], f"{where}.state")))
    if not agents:
        raise ScenarioError("scenario has no agents")
    time = _nat(rows[0][1], "time", 0)
    try:
        sys = SystemState(tuple(agents), time, registry)
    except ConfigurationError as e:
        raise ScenarioError(str(e)) from None
    _check_resources(sys)
    return sys, cfg


def _check_resources(sys: SystemState):
    for c in sys.agents:
        for key in ("read-on", "move-on"):
            for r in sorted(c.state.get(key, ())):
                if r not in sys:
                    raise ScenarioError(f"agent {c.id}: state.{key} names unknown agent {r!r}")


def load_scenario(path: Union[str, Path]):
    """Load a scenario file, or a bundled scenario by name."""
    if str(path) in BUNDLED:
        return loads(bundled_text(str(path)), str(path))
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read {p}: {e.strerror}") from None
    return loads(text, p.stem)


def bundled_text(name: str) -> str:
    return resources.files("tesagents").joinpath("scenarios", f"{name}.jsonl").read_text()


def dumps(sys: SystemState, cfg: Optional[ScenarioConfig] = None) -> str:
    cfg = cfg or ScenarioConfig(capacity=sys.registry.behavior("Battery").capacity
                                if "Battery" in sys.registry else 12)
    lines = [json.dumps(header_of(cfg, sys.time), sort_keys=True)]
    for c in sys.agents:
        if c.ready:
            raise ScenarioError(f"agent {c.id} is mid-round (ready); only settled systems can be saved")
        lines.append(json.dumps({"id": c.id, "class": c.cls, "state": encode_state(c.state)}, sort_keys=True))
    return "\n".join(lines) + "\n"
