// Escalation triage queue. Scores are rendered exactly as the gateway sent
// them — the console never recomputes a composite or alignment value.

import { ApiError, GatewayClient } from "../api.js";
import { badge, decisionTone, formatScore, html, joinRaw, shortUri } from "../render.js";
import type { ActionResult, EscalationView } from "../types.js";

export interface EscalationFilter {
  flaggedOnly: boolean;
  flaggedIdentityIds: ReadonlySet<string>;
}

export function renderEscalationQueue(
  escalations: EscalationView[],
  filter?: EscalationFilter,
): string {
  const visible = filter?.flaggedOnly
    ? escalations.filter((e) => filter.flaggedIdentityIds.has(e.assessment.request.identity_id))
    : escalations;
  if (visible.length === 0) {
    return html`<div class="empty-state" data-screen="escalations">
      Escalation queue is empty — nothing waiting on human review.
    </div>`;
  }
  const rows = visible.map((escalation) => {
    const assessment = escalation.assessment;
    const request = assessment.request;
    const dims = assessment.dims;
    return html`<tr data-escalation="${escalation.escalation_id}">
      <td><code title="${request.identity_id}">${shortUri(request.identity_id)}</code></td>
      <td>
        <div>${request.tool_id} · ${request.action} · ${request.data_class}</div>
        <small>task ${request.task_id} — recipients: ${
          request.recipients.length ? request.recipients.join(", ") : "none"
        }</small>
      </td>
      <td class="numeric">
        <div>composite ${formatScore(assessment.composite)}</div>
        <small>
          sens ${formatScore(dims.sensitivity)} · irrev ${formatScore(dims.irreversibility)}
          · dev ${formatScore(dims.deviation)} · align ${formatScore(dims.alignment_static)}
        </small>
      </td>
      <td class="numeric">${formatScore(assessment.alignment_score)}</td>
      <td>${badge(assessment.decision, decisionTone(assessment.decision))}</td>
      <td>${escalation.created_at}</td>
      <td>
        <button data-action="resolve-approved" data-id="${escalation.escalation_id}">
          Approve
        </button>
        <button
          data-action="resolve-violation"
          data-id="${escalation.escalation_id}"
          class="danger"
        >
          Violation
        </button>
        <input
          data-role="justification"
          data-id="${escalation.escalation_id}"
          placeholder="resolution justification"
        />
      </td>
    </tr>`;
  });
  return html`<table class="queue" data-screen="escalations">
    <thead>
      <tr>
        <th>identity</th><th>request</th><th>risk</th><th>alignment</th>
        <th>decision</th><th>raised</th><th>resolve</th>
      </tr>
    </thead>
    <tbody>${joinRaw(rows)}</tbody>
  </table>`;
}

export function validateResolution(justification: string): ActionResult {
  if (!justification.trim()) {
    return { kind: "validation", message: "a resolution needs a justification" };
  }
  return { kind: "ok" };
}

export async function resolveEscalation(
  client: GatewayClient,
  escalationId: string,
  verdict: "approved" | "violation",
  justification: string,
  resolver: string,
): Promise<ActionResult> {
  const validation = validateResolution(justification);
  if (validation.kind !== "ok") {
    return validation;
  }
  try {
    await client.resolveEscalation(escalationId, verdict, justification, resolver);
    return { kind: "ok" };
  } catch (error) {
    if (error instanceof ApiError && (error.status === 404 || error.status === 409)) {
      return { kind: "conflict", message: "escalation already resolved elsewhere" };
    }
    return { kind: "error", message: error instanceof Error ? error.message : String(error) };
  }
}
