"""TOML configuration for the service, CLI and simulator.

All defaults match the shipped policy: equal dimension weights, risk
thresholds 0.5 / 0.7 / 0.85, 300 s credential TTL, delegation depth 8,
90-day certification cadence, 100-decision promotion streak.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import InvalidConfigError
from .governor import RiskPolicy


@dataclass
class Config:
    trust_domain: str = "example.org"
    listen_host: str = "127.0.0.1"
    listen_port: int = 8787
    data_dir: Optional[str] = None
    policy: RiskPolicy = field(default_factory=RiskPolicy)
    max_ttl: int = 300
    max_delegation_depth: int = 8
    certification_cadence_days: int = 90
    promotion_streak: int = 100
    min_history: int = 50
    aggregation_alert_systems: int = 10
    rotation_policy_days: int = 90
    pam_system_tags: Tuple[str, ...] = ()
    jurisdictions: Tuple[str, ...] = ("EU", "US", "CN")
    production_models: Tuple[str, ...] = ()
    eu_ai_act_doc: str = "in-progress"
    provisioning_enabled: bool = True
    jit_pilot_active: bool = True
    pdp_automation_enabled: bool = True


def load_config(path: Union[None, str, Path] = None) -> Config:
    """Load a TOML config file; no file means all defaults."""
    if path is None:
        return Config()
    try:
        with open(path, "rb") as f:
            raw = tomllib.load(f)
    except OSError as exc:
        raise InvalidConfigError(f"cannot read config: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InvalidConfigError(f"config is not valid TOML: {exc}") from exc
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> Config:
    policy_raw = raw.get("risk_policy", {})
    try:
        policy = RiskPolicy(
            w_sens=policy_raw.get("w_sens", 0.25),
            w_irrev=policy_raw.get("w_irrev", 0.25),
            w_dev=policy_raw.get("w_dev", 0.25),
            w_align=policy_raw.get("w_align", 0.25),
            t_risk=policy_raw.get("t_risk", 0.5),
            t_align=policy_raw.get("t_align", 0.7),
            t_critical=policy_raw.get("t_critical", 0.85),
            threat_modifier=policy_raw.get("threat_modifier", 0.6),
        )
    except ValueError as exc:
        raise InvalidConfigError(str(exc)) from exc

    creds = raw.get("credentials", {})
    registry = raw.get("registry", {})
    governor = raw.get("governor", {})
    threat = raw.get("threat", {})
    program = raw.get("program", {})
    service = raw.get("service", {})

    try:
        config = Config(
            trust_domain=raw.get("trust_domain", "example.org"),
            listen_host=service.get("host", "127.0.0.1"),
            listen_port=int(service.get("port", 8787)),
            data_dir=raw.get("data_dir"),
            policy=policy,
            max_ttl=int(creds.get("max_ttl", 300)),
            max_delegation_depth=int(creds.get("max_delegation_depth", 8)),
            certification_cadence_days=int(registry.get("certification_cadence_days", 90)),
            promotion_streak=int(governor.get("promotion_streak", 100)),
            min_history=int(governor.get("min_history", 50)),
            aggregation_alert_systems=int(governor.get("aggregation_alert_systems", 10)),
            rotation_policy_days=int(creds.get("rotation_policy_days", 90)),
            pam_system_tags=tuple(threat.get("pam_system_tags", ())),
            jurisdictions=tuple(program.get("jurisdictions", ("EU", "US", "CN"))),
            production_models=tuple(program.get("production_models", ())),
            eu_ai_act_doc=program.get("eu_ai_act_doc", "in-progress"),
            provisioning_enabled=bool(program.get("provisioning_enabled", True)),
            jit_pilot_active=bool(program.get("jit_pilot_active", True)),
            pdp_automation_enabled=bool(program.get("pdp_automation_enabled", True)),
        )
    except (TypeError, ValueError) as exc:
        raise InvalidConfigError(str(exc)) from exc
    if config.max_ttl <= 0:
        raise InvalidConfigError("max_ttl must be positive")
    if config.max_delegation_depth <= 0:
        raise InvalidConfigError("max_delegation_depth must be positive")
    return config
