"""Deterministic collision-avoidance simulation with contrastive
explanations for a human supervisor.

The package simulates an autonomous surface vessel following a waypoint
route among straight-running traffic, plans evasive maneuvers with a
simulation-based receding-horizon search over course/speed offsets, and —
whenever the planner wants to leave the route — explains the chosen
maneuver against a nominal or supervisor-selected alternative, component
by component.  Sessions are supervised live over HTTP/SSE or run headless
from the CLI; every run yields a byte-reproducible JSONL trace.
"""
from .config import (Config, ConfigError, EncounterConfig, GuidanceConfig,
                     PlannerConfig, ProbeConfig, ServerConfig, SessionConfig,
                     VesselConfig, load_config)
from .errors import (BridgewatchError, DecisionConflictError,
                     MissingDecisionPointError, MissingMeasureError,
                     ScenarioError, TraceError)
from .explain import (ContrastiveExplanation, DecisionPoint, FoilSelection,
                      ahead_of_time_probe, build_decision_point,
                      build_explanation, contrastive_set, event_trigger,
                      render_explanation, reselect_foil,
                      select_contrastive_cost, select_foil)
from .planner import (COST_COMPONENTS, NOMINAL_OFFSET, CandidateRollout,
                      ControlOffset, CostBreakdown, CostContext, CostMeasures,
                      PlanResult, WorldView, candidate_sort_key, evaluate_costs,
                      generate_candidates, plan, rollout_candidate)
from .scenario import (Characteristic, CpaResult, EncounterType, ObstacleTrack,
                       Scenario, ScenarioStore, advance_track,
                       classify_encounter, cpa, load_scenario,
                       predict_obstacle, relative_bearing)
from .session import Session, create_session, run_headless
from .trace import AuditReport, audit_trace, dump_trace, load_trace
from .vessel import (GuidanceCommand, VesselState, Waypoint, los_guidance,
                     propagate, wrap_angle)

__version__ = "0.1.0"
