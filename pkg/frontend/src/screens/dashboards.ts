// Dashboards: program metrics, phase-gate cards, the conflict registry and an
// orphan banner. Every figure comes verbatim from one gateway response.

import {
  badge,
  conflictTone,
  formatPct,
  html,
  joinRaw,
  shortUri,
} from "../render.js";
import type {
  ConflictEntry,
  Identity,
  MetricsReport,
  PhaseResult,
  RegulatoryMatrix,
} from "../types.js";

export function renderMetrics(report: MetricsReport): string {
  const rows = [
    ["registry coverage", formatPct(report.coverage.registered_pct)],
    ["designated owners", formatPct(report.coverage.owner_pct)],
    ["cryptographic identity", formatPct(report.coverage.crypto_pct)],
    ["behavioral baselines", formatPct(report.coverage.baseline_pct)],
    ["keys rotated in policy", formatPct(report.hygiene.rotated_in_policy_pct)],
    ["fully JIT identities", formatPct(report.hygiene.jit_pct)],
    ["standing static credentials", String(report.hygiene.standing_static_count)],
    ["baseline deviations", String(report.behavioral.deviations_count)],
    [
      "mean time to investigate",
      `${report.behavioral.mean_time_to_investigate_s.toFixed(1)} s`,
    ],
    ["threat-attributed deviations", formatPct(report.behavioral.threat_attributed_pct)],
    [
      "reconstructable incidents",
      formatPct(report.accountability.reconstructable_incident_pct),
    ],
    ["orphaned identities", String(report.accountability.orphan_count)],
    ["obligations mapped", formatPct(report.compliance.obligations_mapped_pct)],
    ["open conflicts", String(report.compliance.open_conflict_count)],
    ["EU AI Act documentation", report.compliance.eu_ai_act_doc],
  ].map(([label, value]) => html`<tr><td>${label}</td><td class="numeric">${value}</td></tr>`);
  return html`<table class="metrics" data-screen="metrics">
    <tbody>${joinRaw(rows)}</tbody>
  </table>`;
}

export function renderPhaseCard(result: PhaseResult): string {
  if (result.passed) {
    return html`<div class="phase-card phase-pass" data-phase="${result.phase}">
      <h3>Phase ${result.phase}</h3>
      ${badge("PASS", "ok")}
    </div>`;
  }
  const failures = result.failures.map((f) => html`<li>${f}</li>`);
  return html`<div class="phase-card phase-fail" data-phase="${result.phase}">
    <h3>Phase ${result.phase}</h3>
    ${badge("FAIL", "danger")}
    <ul class="failures">${joinRaw(failures)}</ul>
  </div>`;
}

export function renderConflicts(
  conflicts: ConflictEntry[],
  matrix: RegulatoryMatrix,
): string {
  if (conflicts.length === 0) {
    return html`<div class="empty-state" data-screen="conflicts">
      Conflict registry is empty.
    </div>`;
  }
  const levelByDomain = new Map(matrix.domains.map((d) => [d.domain, d.conflict_level]));
  const rows = conflicts.map((conflict) => {
    const levels = conflict.domains.map((d) => levelByDomain.get(d) ?? "LOW");
    const worst = levels.includes("HIGH")
      ? "HIGH"
      : levels.includes("MODERATE")
        ? "MODERATE"
        : "LOW";
    return html`<tr class="conflict-${worst.toLowerCase()}" data-conflict="${conflict.conflict_id}">
      <td>${conflict.conflict_id}</td>
      <td>${conflict.domains.map((d) => `Domain ${d}`).join(", ")}</td>
      <td>${conflict.jurisdictions.join(", ")}</td>
      <td>${badge(worst, conflictTone(worst))}</td>
      <td>${conflict.description}</td>
      <td>${conflict.status}</td>
      <td>${conflict.management_approach || "—"}</td>
    </tr>`;
  });
  return html`<table class="queue" data-screen="conflicts">
    <thead>
      <tr>
        <th>id</th><th>domains</th><th>jurisdictions</th><th>level</th>
        <th>description</th><th>status</th><th>management</th>
      </tr>
    </thead>
    <tbody>${joinRaw(rows)}</tbody>
  </table>`;
}

export function renderOrphanBanner(orphans: string[]): string {
  if (orphans.length === 0) {
    return "";
  }
  return html`<div class="banner banner-warn" data-screen="orphans">
    ${badge(`${orphans.length} orphaned`, "warn")}
    <a href="#registry" data-action="show-orphans">review ownerless identities</a>
  </div>`;
}

export function renderRegistry(identities: Identity[], orphanIds: string[]): string {
  if (identities.length === 0) {
    return html`<div class="empty-state" data-screen="registry">Registry is empty.</div>`;
  }
  const orphanSet = new Set(orphanIds);
  const rows = identities.map(
    (identity) => html`<tr
      class="${orphanSet.has(identity.id) ? "row-orphan" : ""}"
      data-identity="${identity.id}"
    >
      <td><code title="${identity.id}">${shortUri(identity.id)}</code></td>
      <td>${identity.kind}</td>
      <td>${identity.lifecycle}</td>
      <td>autonomy ${identity.autonomy}</td>
      <td>${identity.owner ? identity.owner.owner_id : badge("no owner", "danger")}</td>
      <td>${identity.flags.length ? identity.flags.join(", ") : "—"}</td>
      <td>${identity.review_due}</td>
    </tr>`,
  );
  return html`<table class="queue" data-screen="registry">
    <thead>
      <tr>
        <th>identity</th><th>kind</th><th>lifecycle</th><th>autonomy</th>
        <th>owner</th><th>flags</th><th>review due</th>
      </tr>
    </thead>
    <tbody>${joinRaw(rows)}</tbody>
  </table>`;
}
