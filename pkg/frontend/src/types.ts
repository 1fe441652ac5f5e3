// Wire types mirroring the gateway's JSON payloads. The console renders these
// verbatim: no score or percentage is ever recomputed client-side.

export interface OwnerRef {
  owner_id: string;
  display_name: string;
  contact: string;
  accountability_level: string;
}

export interface Identity {
  id: string;
  kind: string;
  purpose: string;
  owner: OwnerRef | null;
  provisioned_at: string;
  review_due: string;
  lifecycle: string;
  autonomy: number;
  grants: unknown[];
  associated_systems: string[];
  flags: string[];
  jurisdiction_tier: string;
  aibom_ref: string | null;
  decommissioned_at: string | null;
}

export interface AccessRequestView {
  identity_id: string;
  session_id: string;
  task_id: string;
  tool_id: string;
  action: string;
  data_class: string;
  recipients: string[];
  data_volume: number;
  timestamp: string | null;
  context_notes: string;
}

export interface AssessmentView {
  assessment_id: string;
  request: AccessRequestView;
  dims: {
    sensitivity: number;
    irreversibility: number;
    deviation: number;
    alignment_static: number;
  };
  composite: number;
  alignment_score: number | null;
  decision: string;
  modifiers: string[];
  decided_at: string | null;
}

export interface EscalationView {
  escalation_id: string;
  created_at: string;
  resolved: boolean;
  resolution: string | null;
  justification: string;
  resolver: string;
  assessment: AssessmentView;
}

export interface MetricsReport {
  coverage: {
    registered_pct: number;
    owner_pct: number;
    crypto_pct: number;
    baseline_pct: number;
  };
  hygiene: {
    rotated_in_policy_pct: number;
    jit_pct: number;
    standing_static_count: number;
  };
  behavioral: {
    deviations_count: number;
    mean_time_to_investigate_s: number;
    threat_attributed_pct: number;
  };
  accountability: {
    reconstructable_incident_pct: number;
    mean_time_to_attribution_s: number;
    orphan_count: number;
  };
  compliance: {
    obligations_mapped_pct: number;
    open_conflict_count: number;
    eu_ai_act_doc: string;
  };
  ops: Record<string, number | boolean | string>;
}

export interface PhaseResult {
  phase: number;
  passed: boolean;
  failures: string[];
}

export interface ConflictEntry {
  conflict_id: string;
  domains: string[];
  jurisdictions: string[];
  description: string;
  management_approach: string;
  residual_risk: string;
  status: string;
  opened_at: string | null;
}

export interface MatrixDomain {
  domain: string;
  title: string;
  conflict_level: string;
  conflict_note: string;
  obligations: { jurisdiction: string; obligation: string; citations: string[] }[];
}

export interface RegulatoryMatrix {
  version: string;
  changelog: string[];
  domains: MatrixDomain[];
}

export type ActionResult =
  | { kind: "ok" }
  | { kind: "validation"; message: string }
  | { kind: "conflict"; message: string }
  | { kind: "error"; message: string };
