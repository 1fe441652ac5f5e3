"""Command-line interface.

Exit codes: 0 success, 1 operational error (failed verification, failed
gate, rejected operation), 2 usage error. ``--json`` switches machine-readable
output on commands that default to a human-readable table.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .audit import AuditLedger
from .config import Config, load_config
from .errors import ChainImportError, GovernanceError
from .model import parse_iso
from .plane import ControlPlane
from .simulate import SCENARIO_NAMES, Scenario, run_simulation


def _plane(ctx) -> ControlPlane:
    config: Config = ctx.obj["config"]
    if config.data_dir:
        return ControlPlane.open(config)
    return ControlPlane(config)


def _read_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="TOML config file.")
@click.option("--data-dir", type=click.Path(), default=None,
              help="Data directory (overrides the config file).")
@click.pass_context
def main(ctx, config_path, data_dir):
    """Governance control plane for AI-agent identities."""
    config = load_config(config_path)
    if data_dir:
        config.data_dir = data_dir
    ctx.ensure_object(dict)
    ctx.obj["config"] = config


@main.command()
@click.argument("spec_file", type=click.Path(exists=True, allow_dash=True))
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def register(ctx, spec_file, as_json):
    """Register an identity from a JSON file: {"spec": ..., "approval": ...}."""
    payload = _read_json(spec_file)
    plane = _plane(ctx)
    try:
        identity = plane.register_identity(payload["spec"], payload["approval"])
    except GovernanceError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        click.echo(json.dumps(identity.to_dict(), indent=2))
    else:
        click.echo(f"registered {identity.id} ({identity.lifecycle.value})")


@main.command()
@click.argument("request_file", type=click.Path(exists=True, allow_dash=True))
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def decide(ctx, request_file, as_json):
    """Evaluate an access request from a JSON file."""
    payload = _read_json(request_file)
    plane = _plane(ctx)
    try:
        assessment = plane.decide(payload)
    except GovernanceError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        click.echo(json.dumps(assessment.to_dict(), indent=2))
    else:
        d = assessment.dims
        click.echo(
            f"{assessment.decision.value}  composite={assessment.composite:.3f} "
            f"dims=({d.sensitivity:.2f}, {d.irreversibility:.2f}, "
            f"{d.deviation:.2f}, {d.alignment_static:.2f})"
        )


@main.group()
def audit():
    """Audit chain verification and forensic reconstruction."""


@audit.command()
@click.option("--file", "ledger_file", type=click.Path(exists=True), default=None,
              help="Verify an exported ledger JSONL instead of the live store.")
@click.pass_context
def verify(ctx, ledger_file):
    """Recompute the hash chain; exit 1 and print the break point if broken."""
    if ledger_file:
        text = Path(ledger_file).read_text("utf-8")
        try:
            ledger = AuditLedger.import_jsonl(text, verify=False)
        except ChainImportError as exc:
            raise click.ClickException(str(exc))
        verdict = ledger.verify_chain()
    else:
        verdict = _plane(ctx).verify_audit()
    if verdict.valid:
        click.echo("valid")
    else:
        click.echo(f"broken-at {verdict.broken_at}")
        sys.exit(1)


@audit.command()
@click.option("--identity", default=None)
@click.option("--session", default=None)
@click.option("--task", default=None)
@click.option("--start", default=None, help="ISO-8601 lower bound.")
@click.option("--end", default=None, help="ISO-8601 upper bound.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def reconstruct(ctx, identity, session, task, start, end, as_json):
    """Reconstruct an action sequence with owner attribution."""
    plane = _plane(ctx)
    try:
        entries, attribution = plane.reconstruct(
            identity=identity,
            session=session,
            task=task,
            start=parse_iso(start) if start else None,
            end=parse_iso(end) if end else None,
        )
    except (GovernanceError, ValueError) as exc:
        raise click.ClickException(str(exc))
    if as_json:
        out = {
            "entries": [e.to_wire() for e in entries],
            "attribution": None
            if attribution is None
            else {
                "agent": attribution.agent,
                "model_ref": attribution.model_ref,
                "owners": [
                    {
                        "owner": s.owner,
                        "start": s.start.isoformat(),
                        "end": s.end.isoformat() if s.end else None,
                    }
                    for s in attribution.owners
                ],
            },
        }
        click.echo(json.dumps(out, indent=2))
        return
    for e in entries:
        click.echo(f"{e.seq:6d}  {e.timestamp.isoformat()}  {e.kind.value:22s} {e.actor}")
    if attribution:
        click.echo(f"agent: {attribution.agent}  model: {attribution.model_ref or '-'}")
        for span in attribution.owners:
            owner_id = span.owner["owner_id"] if span.owner else "(none)"
            click.echo(f"  owner {owner_id}: {span.start.isoformat()} .. "
                       f"{span.end.isoformat() if span.end else 'now'}")


@main.command()
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def metrics(ctx, as_json):
    """Compute the five program metric groups over the current state."""
    report = _plane(ctx).metrics()
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
        return
    d = report.to_dict()
    for group, values in d.items():
        click.echo(group)
        for key, value in values.items():
            if isinstance(value, float):
                click.echo(f"  {key:34s} {value:10.2f}")
            else:
                click.echo(f"  {key:34s} {value}")


@main.command("phase-check")
@click.argument("phase", type=int)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def phase_check(ctx, phase, as_json):
    """Check one implementation phase gate; exit 1 on FAIL."""
    plane = _plane(ctx)
    try:
        result = plane.phase_check(phase)
    except GovernanceError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        click.echo(json.dumps(
            {"phase": result.phase, "passed": result.passed, "failures": list(result.failures)}
        ))
    elif result.passed:
        click.echo(f"phase {phase}: PASS")
    else:
        click.echo(f"phase {phase}: FAIL ({'; '.join(result.failures)})")
    if not result.passed:
        sys.exit(1)


@main.command()
@click.argument("scenario", type=click.Choice(SCENARIO_NAMES))
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--identities", type=int, default=100, show_default=True)
@click.option("--requests", type=int, default=1000, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def simulate(scenario, seed, identities, requests, as_json):
    """Run a seeded desk-scale scenario through the whole pipeline."""
    report = run_simulation(
        Scenario(name=scenario, seed=seed, identity_count=identities, request_count=requests)
    )
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
        return
    click.echo(f"{scenario} seed={seed} identities={identities} requests={requests}")
    click.echo(f"  decisions: {report.decision_counts}")
    if report.planted_total:
        click.echo(f"  planted contained: {report.planted_contained}/{report.planted_total}")
    click.echo(f"  issued={report.credentials_issued} revoked={report.credentials_revoked}")
    click.echo(f"  standing violations: {report.standing_violations}")
    click.echo(f"  chain valid: {report.chain_valid}  entries: {report.ledger_entries}")
    if report.alerts:
        click.echo(f"  alerts: {', '.join(report.alerts)}")
    if report.exposure_campaigns:
        click.echo(f"  exposed standing: {report.exposed_standing} "
                   f"campaigns: {', '.join(report.exposure_campaigns)}")


@main.command("import-scan")
@click.argument("scan_file", type=click.Path(exists=True, allow_dash=True))
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def import_scan(ctx, scan_file, as_json):
    """Shadow-import a discovery scan (JSON Lines of source/discovered_locator)."""
    from .registry import parse_scan_jsonl

    text = sys.stdin.read() if scan_file == "-" else Path(scan_file).read_text("utf-8")
    try:
        records = parse_scan_jsonl(text)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    plane = _plane(ctx)
    imported = plane.import_discovered(records)
    if as_json:
        click.echo(json.dumps([i.to_dict() for i in imported], indent=2))
    else:
        for identity in imported:
            click.echo(f"{identity.id}  [{identity.lifecycle.value}]  flags: "
                       f"{', '.join(sorted(f.value for f in identity.flags)) or '-'}")
        click.echo(f"imported {len(imported)} (triage queue: "
                   f"{len(plane.registry.triage_queue)})")


@main.command()
@click.option("--all", "show_all", is_flag=True, help="Include managed and closed.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def conflicts(ctx, show_all, as_json):
    """List cross-jurisdictional conflicts (open ones by default)."""
    plane = _plane(ctx)
    rows = plane.conflicts.all() if show_all else plane.conflicts.open_conflicts()
    if as_json:
        click.echo(json.dumps([c.to_dict() for c in rows], indent=2))
        return
    if not rows:
        click.echo("no conflicts")
        return
    for c in rows:
        click.echo(f"{c.conflict_id}  [{c.status}]  domains={','.join(c.domains)} "
                   f"jurisdictions={','.join(c.jurisdictions)}  {c.description}")


@main.command()
@click.argument(
    "what",
    type=click.Choice(
        ["registry", "ledger", "delegations", "matrix", "matrix-csv", "keys", "catalog"]
    ),
)
@click.option("-o", "--output", type=click.Path(), default=None)
@click.pass_context
def export(ctx, what, output):
    """Export a store in its wire format (JSONL / JSON / CSV)."""
    plane = _plane(ctx)
    producers = {
        "registry": plane.registry.export_jsonl,
        "ledger": plane.ledger.export_jsonl,
        "delegations": plane.authority.export_delegations_jsonl,
        "matrix": plane.matrix.export_json,
        "matrix-csv": plane.matrix.export_csv,
        "keys": plane.authority.export_keys_json,
        "catalog": plane.catalog.export_json,
    }
    text = producers[what]()
    if output:
        Path(output).write_text(text + ("\n" if not text.endswith("\n") else ""), "utf-8")
        click.echo(f"wrote {output}")
    else:
        click.echo(text)


@main.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--seed-demo", is_flag=True, help="Preload demo approvals and an escalation.")
@click.pass_context
def serve(ctx, host, port, seed_demo):
    """Run the HTTP/JSON service."""
    from .api import serve as run_server

    config: Config = ctx.obj["config"]
    if host:
        config.listen_host = host
    if port:
        config.listen_port = port
    try:
        run_server(config, seed_demo=seed_demo)
    except GovernanceError as exc:
        raise click.ClickException(str(exc))


if __name__ == "__main__":
    main()
