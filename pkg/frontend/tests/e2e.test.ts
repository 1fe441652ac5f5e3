// End-to-end against a real seeded gateway spawned for the test run:
// approving one provisioning request and resolving one escalation as a
// violation must produce the lifecycle transition and the autonomy demotion,
// each verified through subsequent API reads.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api.js";
import { approveIdentity, denyIdentity } from "../src/screens/approvals.js";
import { resolveEscalation } from "../src/screens/escalations.js";

const PORT = 8795;
const BASE = `http://127.0.0.1:${PORT}`;

let gateway: ChildProcess;
const client = new GatewayClient(BASE);

async function waitForGateway(timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      await client.health();
      return;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 300));
    }
  }
  throw new Error("gateway did not come up");
}

beforeAll(async () => {
  gateway = spawn(
    "python3",
    ["-m", "agentgov.cli", "serve", "--port", String(PORT), "--seed-demo"],
    { stdio: "ignore" },
  );
  await waitForGateway();
}, 30_000);

afterAll(() => {
  gateway?.kill();
});

describe("console end-to-end against the seeded gateway", () => {
  it("approving a provisioning request transitions it to Approved", async () => {
    const pending = await client.identities("Requested");
    expect(pending.length).toBeGreaterThanOrEqual(2);
    const target = pending[0]!.id;

    const result = await approveIdentity(client, target);
    expect(result).toEqual({ kind: "ok" });

    const after = await client.identity(target);
    expect(after.lifecycle).toBe("Approved");

    const stillPending = await client.identities("Requested");
    expect(stillPending.map((i) => i.id)).not.toContain(target);
  });

  it("a stale approve surfaces as a conflict for the toast-and-refresh path", async () => {
    const approved = await client.identities("Approved");
    const target = approved[0]!.id;
    const result = await approveIdentity(client, target); // already approved
    expect(result).toMatchObject({ kind: "conflict" });
  });

  it("denying a request with a justification terminally rejects it", async () => {
    const pending = await client.identities("Requested");
    const target = pending[0]!.id;
    const result = await denyIdentity(client, target, "duplicate of an existing workload");
    expect(result).toEqual({ kind: "ok" });
    const after = await client.identity(target);
    expect(after.lifecycle).toBe("Decommissioned");
  });

  it("resolving an escalation as a violation demotes autonomy by one", async () => {
    const queue = await client.escalations();
    expect(queue.length).toBe(1);
    const escalation = queue[0]!;
    const identityId = escalation.assessment.request.identity_id;
    const before = (await client.identity(identityId)).autonomy;

    const result = await resolveEscalation(
      client,
      escalation.escalation_id,
      "violation",
      "confirmed unauthorized exfiltration",
      "e2e-operator",
    );
    expect(result).toEqual({ kind: "ok" });

    const after = await client.identity(identityId);
    expect(after.autonomy).toBe(before - 1);

    expect(await client.escalations()).toHaveLength(0);
  });

  it("dashboards read consistent gateway state", async () => {
    const [metrics, phase1, conflicts, matrix, orphans] = await Promise.all([
      client.metrics(),
      client.phase(1),
      client.conflicts("open"),
      client.matrix(),
      client.orphans(),
    ]);
    expect(metrics.compliance.open_conflict_count).toBe(conflicts.length);
    expect(typeof phase1.passed).toBe("boolean");
    expect(matrix.domains.map((d) => d.conflict_level)).toEqual([
      "LOW", "LOW", "MODERATE", "MODERATE", "HIGH", "HIGH",
    ]);
    expect(metrics.accountability.orphan_count).toBe(orphans.length);
  });
});
