"""Guidance-vector-field tracking and distributed circular formation flight
for constant-speed fixed-wing aircraft."""

from gvf_formation.dynamics import VehicleState, step
from gvf_formation.formation import (
    ConsensusParams,
    FormationGraph,
    consensus_input,
    incidence_matrix,
    modulated_curve,
    phase,
    phase_errors,
)
from gvf_formation.gvf import (
    FieldSample,
    GvfParams,
    ImplicitCurve,
    bank_angle,
    build_field,
    gradient,
    hessian,
    level_error,
    yaw_rate_command,
)
from gvf_formation.kernels import BACKEND
from gvf_formation.netsim import LinkModel, Network, PhaseMessage
from gvf_formation.protocol import (
    Agent,
    AgentConfig,
    GpsStatus,
    NeighborTable,
    control_step,
    delete_neighbor,
    on_message,
    register_neighbor,
)
from gvf_formation.runner import run
from gvf_formation.scenario import Scenario, load_scenario
from gvf_formation.telemetry import TelemetryLog, sync_time

__version__ = "0.1.0"
