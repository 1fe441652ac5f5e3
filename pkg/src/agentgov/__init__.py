"""Governance control plane for AI-agent and machine identities.

Registry and lifecycle governance, ephemeral task-scoped credentials with
zero standing privilege, composite risk scoring with an intent verification
gate, a tamper-evident audit chain with human accountability attribution,
model provenance gating, cross-jurisdictional compliance mapping, a
state-actor threat overlay, and program metrics with phase gates — plus a
seeded simulator that exercises all of it.
"""

from .audit import AuditEntry, AuditLedger, EventKind
from .config import Config, load_config
from .credentials import (
    ChainVerdict,
    Credential,
    CredentialAuthority,
    CredentialVerdict,
    DelegationEdge,
    ToolsetMeasurement,
)
from .errors import GovernanceError
from .governor import (
    AccessGovernor,
    AccessRequest,
    BehavioralBaseline,
    Decision,
    RiskAssessment,
    RiskPolicy,
    TaskSpec,
)
from .metrics import MetricsReport, SystemSnapshot, compute_metrics, phase_gate
from .model import AccessGrant, ActionVerb, DataClass, OwnerRef, ScopeEntry
from .plane import ControlPlane
from .provenance import AibomRecord, IntegrityVerdict, ProvenanceStore
from .registry import (
    AgentIdentity,
    DiscoveryRecord,
    IdentityKind,
    IdentityRegistry,
    IdentitySpec,
    LifecycleEvent,
    LifecycleState,
)
from .regulatory import ConflictEntry, ConflictRegistry, load_matrix, tier_deployment
from .riskcatalog import RiskCatalog, Severity, assess_severity, detect_intersections
from .simulate import Scenario, SimulationReport, run_simulation
from .threatintel import ThreatIndicator, ThreatOverlay

__version__ = "0.1.0"
