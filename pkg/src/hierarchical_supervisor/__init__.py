"""Hierarchical supervisory control of partially observed discrete-event systems.

Public API:
- `load_des(...)` / `parse_des(...)` read automata from the `.des` format.
- `check_oc(...)`, `check_moc(...)`, `check_loc(...)` return three-valued `Verdict`s.
- `hier_synthesize_normal(...)` synthesizes a high-level supervisor and its closed loop.
- `workflow_modular(...)` runs the modular alphabet-selection workflow.
"""

from hierarchical_supervisor.automaton import Alphabet, Automaton
from hierarchical_supervisor.des_format import load_des, parse_des, serialize_des
from hierarchical_supervisor.hierarchical import SynthesisReport, hier_synthesize_normal, workflow_modular
from hierarchical_supervisor.projection import ProjectionContext
from hierarchical_supervisor.relational import check_loc, check_moc, check_oc
from hierarchical_supervisor.verdict import Verdict

__all__ = [
    "Alphabet",
    "Automaton",
    "ProjectionContext",
    "SynthesisReport",
    "Verdict",
    "check_loc",
    "check_moc",
    "check_oc",
    "hier_synthesize_normal",
    "load_des",
    "parse_des",
    "serialize_des",
    "workflow_modular",
]
