// Typed client over the gateway HTTP/JSON API. Every console figure comes
// from exactly one of these calls.

import type {
  ConflictEntry,
  EscalationView,
  Identity,
  MetricsReport,
  PhaseResult,
  RegulatoryMatrix,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail);
  }
}

export class GatewayClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const payload = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(response.status, payload.error ?? "Error", payload.detail ?? text);
    }
    return payload as T;
  }

  health(): Promise<{ status: string; ledger_entries: number }> {
    return this.request("GET", "/healthz");
  }

  identities(lifecycle?: string): Promise<Identity[]> {
    const query = lifecycle ? `?lifecycle=${encodeURIComponent(lifecycle)}` : "";
    return this.request<{ identities: Identity[] }>("GET", `/identities${query}`).then(
      (r) => r.identities,
    );
  }

  identity(id: string): Promise<Identity & { privilege: { alerts: string[] } }> {
    return this.request("GET", `/identities/${encodeURIComponent(id)}`);
  }

  transition(id: string, event: string): Promise<{ id: string; lifecycle: string }> {
    return this.request("POST", `/identities/${encodeURIComponent(id)}/lifecycle`, { event });
  }

  orphans(): Promise<string[]> {
    return this.request<{ orphans: string[] }>("GET", "/orphans").then((r) => r.orphans);
  }

  escalations(): Promise<EscalationView[]> {
    return this.request<{ escalations: EscalationView[] }>("GET", "/escalations").then(
      (r) => r.escalations,
    );
  }

  resolveEscalation(
    id: string,
    verdict: "approved" | "violation",
    justification: string,
    resolver: string,
  ): Promise<EscalationView> {
    return this.request("POST", `/escalations/${encodeURIComponent(id)}/resolve`, {
      verdict,
      justification,
      resolver,
    });
  }

  metrics(): Promise<MetricsReport> {
    return this.request("GET", "/metrics");
  }

  phase(n: number): Promise<PhaseResult> {
    return this.request("GET", `/phase/${n}`);
  }

  conflicts(status?: string): Promise<ConflictEntry[]> {
    const query = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.request<{ conflicts: ConflictEntry[] }>(
      "GET",
      `/regulatory/conflicts${query}`,
    ).then((r) => r.conflicts);
  }

  registerConflict(entry: Partial<ConflictEntry>): Promise<ConflictEntry> {
    return this.request("POST", "/regulatory/conflicts", entry);
  }

  setConflictStatus(
    id: string,
    status: string,
    managementApproach?: string,
  ): Promise<ConflictEntry> {
    return this.request("POST", `/regulatory/conflicts/${encodeURIComponent(id)}/status`, {
      status,
      management_approach: managementApproach,
    });
  }

  matrix(): Promise<RegulatoryMatrix> {
    return this.request("GET", "/regulatory/matrix");
  }
}
