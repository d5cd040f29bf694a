"""Interacting agents with timed-event-stream semantics.

Agents propose weighted actions, a system step applies one composable
clique of them per time unit, and the resulting transition systems can be
searched or compared against the product of their parts.
"""
from ._kernel import COMPILED
from .agent import (Action, AgentAction, AgentBehavior, AgentConfig, ConfigurationError, NotAllowed,
                    Registry, agent_step, agent_tts)
from .analysis import (CheckReport, SearchOutcome, check_closure, check_compositionality,
                       check_product_laws, replay, search_reachable)
from .robots import QUERIES, StatePredicate, default_registry, query, scenario
from .scenario import ScenarioError, dumps, load_scenario, loads
from .semiring import MaxPlus, ValuedActionSet
from .system import (KAPPA_COMP, SystemState, build_composite, comp, k_best_actions, round_successors,
                     system_step, system_tts, update_system)
from .tes import (AlphabetOverlap, Kappa, Observation, TESTransitionSystem, fin_language,
                  kappa_from_comp, product_tts)

__version__ = "0.1.0"
