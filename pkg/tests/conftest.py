"""Shared fixtures: planes with controllable clocks and provisioning helpers."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from agentgov.canonical import sha3_256_hex
from agentgov.config import Config
from agentgov.governor import AccessRequest, TaskSpec
from agentgov.model import AccessGrant, ActionVerb, DataClass, OwnerRef, ScopeEntry
from agentgov.plane import ControlPlane
from agentgov.provenance import AibomRecord
from agentgov.registry import IdentityKind, IdentitySpec, LifecycleEvent

T0 = datetime(2026, 3, 2, 9, 0, 0, tzinfo=timezone.utc)


class FakeClock:
    def __init__(self, start: datetime = T0):
        self.now = start

    def __call__(self) -> datetime:
        return self.now

    def tick(self, seconds: float = 1.0) -> None:
        self.now = self.now + timedelta(seconds=seconds)

    def advance_days(self, days: float) -> None:
        self.now = self.now + timedelta(days=days)


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def plane(clock):
    return ControlPlane(Config(trust_domain="test.example"), clock_base=clock)


@pytest.fixture
def owner():
    return OwnerRef(owner_id="alice", display_name="Alice", contact="alice@corp.example")


MODEL_BLOB = b"weights-v1" * 4096
MODEL_DIGEST = sha3_256_hex(MODEL_BLOB)


def provision_model(plane, model_id="model-a"):
    plane.register_aibom(
        AibomRecord(model_id=model_id, architecture="tiny", parameter_digest=MODEL_DIGEST)
    )
    plane.verify_model_integrity(model_id, iter([MODEL_BLOB]))
    return MODEL_DIGEST


def make_spec(identity_id="migt://test.example/agent-1", *, owner=None, kind=IdentityKind.AGENT,
              grants=frozenset(), autonomy=2, aibom_ref=None, purpose="runs reports"):
    return IdentitySpec(
        id=identity_id,
        kind=kind,
        purpose=purpose,
        owner=owner,
        grants=grants,
        autonomy=autonomy,
        aibom_ref=aibom_ref,
    )


def activate(plane, identity_id, *, with_key=True):
    plane.transition_lifecycle(identity_id, LifecycleEvent.APPROVE)
    plane.transition_lifecycle(identity_id, LifecycleEvent.ACTIVATE)
    if with_key:
        plane.register_key(identity_id)


def provision_agent(plane, owner, identity_id="migt://test.example/agent-1", *,
                    autonomy=2, grants=frozenset(), task=True, active=True):
    digest = provision_model(plane, model_id=f"model-{identity_id.rsplit('/', 1)[-1]}")
    spec = make_spec(identity_id, owner=owner, grants=grants, autonomy=autonomy,
                     aibom_ref=digest)
    plane.register_identity(spec, approval=owner)
    if active:
        activate(plane, identity_id)
    if task:
        plane.register_task(
            TaskSpec(
                task_id=f"task-{identity_id.rsplit('/', 1)[-1]}",
                description="routine reporting",
                tool_data_scope={
                    "report-writer": DataClass.CONFIDENTIAL,
                    "doc-search": DataClass.INTERNAL,
                },
                recipients_allowlist=frozenset({"archive@corp.example"}),
            )
        )
    return spec


def build_history_baseline(plane, identity_id, *, tool="report-writer", n=60):
    """Install a baseline of n conforming requests at hour 9, volume ~1000."""
    history = [
        make_request(
            identity_id,
            tool=tool,
            volume=1000 + (j % 5),
            timestamp=T0 - timedelta(days=3) + timedelta(hours=24 * (j / n)),
            session=f"hist-{j}",
        )
        for j in range(n)
    ]
    return plane.build_baseline(identity_id, history)


def make_request(identity_id="migt://test.example/agent-1", *, tool="report-writer",
                 action=ActionVerb.READ, data_class=DataClass.INTERNAL,
                 recipients=frozenset(), volume=1000, timestamp=None,
                 task=None, session="session-1"):
    name = identity_id.rsplit("/", 1)[-1]
    return AccessRequest(
        identity_id=identity_id,
        session_id=session,
        task_id=task or f"task-{name}",
        tool_id=tool,
        action=action,
        data_class=data_class,
        recipients=recipients,
        data_volume=volume,
        timestamp=timestamp or T0,
        requested_scope=frozenset({ScopeEntry(f"sys-{tool}", f"data/{tool}/*", action)}),
    )
