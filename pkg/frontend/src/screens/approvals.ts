// Provisioning approval queue: pending Requested identities with approve /
// deny actions. Denial requires a justification (validated client-side);
// a stale row (already transitioned elsewhere) surfaces as a conflict so the
// app can toast and refresh.

import { ApiError, GatewayClient } from "../api.js";
import { badge, html, joinRaw, shortUri } from "../render.js";
import type { ActionResult, Identity } from "../types.js";

export function renderApprovalQueue(pending: Identity[]): string {
  if (pending.length === 0) {
    return html`<div class="empty-state" data-screen="approvals">
      No provisioning requests waiting for review.
    </div>`;
  }
  const rows = pending.map(
    (identity) => html`<tr data-identity="${identity.id}">
      <td><code title="${identity.id}">${shortUri(identity.id)}</code></td>
      <td>${identity.kind}</td>
      <td>${identity.purpose}</td>
      <td>${identity.owner ? identity.owner.owner_id : "—"}</td>
      <td>${identity.aibom_ref ? badge("model on file", "ok") : badge("no model ref", "warn")}</td>
      <td>
        <button data-action="approve" data-id="${identity.id}">Approve</button>
        <button data-action="deny" data-id="${identity.id}" class="secondary">Deny</button>
        <input
          data-role="justification"
          data-id="${identity.id}"
          placeholder="denial justification"
        />
      </td>
    </tr>`,
  );
  return html`<table class="queue" data-screen="approvals">
    <thead>
      <tr>
        <th>identity</th><th>kind</th><th>purpose</th><th>owner</th>
        <th>provenance</th><th>review</th>
      </tr>
    </thead>
    <tbody>${joinRaw(rows)}</tbody>
  </table>`;
}

export function validateDenial(justification: string): ActionResult {
  if (!justification.trim()) {
    return { kind: "validation", message: "a denial needs a justification" };
  }
  return { kind: "ok" };
}

export async function approveIdentity(
  client: GatewayClient,
  identityId: string,
): Promise<ActionResult> {
  try {
    await client.transition(identityId, "approve");
    return { kind: "ok" };
  } catch (error) {
    return classifyTransitionError(error);
  }
}

export async function denyIdentity(
  client: GatewayClient,
  identityId: string,
  justification: string,
): Promise<ActionResult> {
  const validation = validateDenial(justification);
  if (validation.kind !== "ok") {
    return validation;
  }
  try {
    await fetchDeny(client, identityId, justification);
    return { kind: "ok" };
  } catch (error) {
    return classifyTransitionError(error);
  }
}

async function fetchDeny(client: GatewayClient, identityId: string, justification: string) {
  const response = await fetch(
    `${client.baseUrl}/identities/${encodeURIComponent(identityId)}/lifecycle`,
    {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ event: "deny", justification }),
    },
  );
  if (!response.ok) {
    const payload = await response.json();
    throw new ApiError(response.status, payload.error ?? "Error", payload.detail ?? "");
  }
}

function classifyTransitionError(error: unknown): ActionResult {
  if (error instanceof ApiError) {
    if (error.status === 409 || error.status === 404) {
      return { kind: "conflict", message: "request already handled elsewhere" };
    }
    return { kind: "error", message: error.message };
  }
  return { kind: "error", message: String(error) };
}
