import { describe, expect, it } from "vitest";

import {
  renderConflicts,
  renderMetrics,
  renderOrphanBanner,
  renderPhaseCard,
  renderRegistry,
} from "../src/screens/dashboards.js";
import type {
  ConflictEntry,
  Identity,
  MetricsReport,
  PhaseResult,
  RegulatoryMatrix,
} from "../src/types.js";

import conflictsFixture from "./fixtures/conflicts.json";
import identitiesFixture from "./fixtures/identities_all.json";
import matrixFixture from "./fixtures/matrix.json";
import metricsFixture from "./fixtures/metrics.json";
import orphansFixture from "./fixtures/orphans.json";
import phase1Fixture from "./fixtures/phase1.json";
import phase3Fixture from "./fixtures/phase3.json";

const metrics = metricsFixture as MetricsReport;
const matrix = matrixFixture as RegulatoryMatrix;
const conflicts = (conflictsFixture as { conflicts: ConflictEntry[] }).conflicts;
const identities = (identitiesFixture as { identities: Identity[] }).identities;
const orphans = (orphansFixture as { orphans: string[] }).orphans;

describe("metrics dashboard", () => {
  it("renders every gateway figure verbatim", () => {
    const markup = renderMetrics(metrics);
    expect(markup).toContain(`${metrics.coverage.owner_pct.toFixed(1)}%`);
    expect(markup).toContain(`${metrics.coverage.crypto_pct.toFixed(1)}%`);
    expect(markup).toContain(String(metrics.hygiene.standing_static_count));
    expect(markup).toContain(String(metrics.accountability.orphan_count));
    expect(markup).toContain(metrics.compliance.eu_ai_act_doc);
  });

  it("matches the recorded-fixture snapshot", () => {
    expect(renderMetrics(metrics)).toMatchSnapshot();
  });
});

describe("phase gate cards", () => {
  it("renders a green PASS card for a passing gate", () => {
    const markup = renderPhaseCard(phase1Fixture as PhaseResult);
    expect(markup).toContain("phase-pass");
    expect(markup).toContain("PASS");
  });

  it("renders failing criteria verbatim from the gateway", () => {
    const result = phase3Fixture as PhaseResult;
    expect(result.passed).toBe(false);
    const markup = renderPhaseCard(result);
    expect(markup).toContain("phase-fail");
    for (const failure of result.failures) {
      expect(markup).toContain(
        failure.replaceAll("&", "&amp;").replaceAll("<", "&lt;").replaceAll(">", "&gt;"),
      );
    }
  });
});

describe("conflict registry view", () => {
  it("marks the open Domain V conflict as a HIGH (red) row", () => {
    const markup = renderConflicts(conflicts, matrix);
    const domainV = conflicts.find((c) => c.domains.includes("V"))!;
    expect(markup).toContain(`data-conflict="${domainV.conflict_id}"`);
    expect(markup).toContain('class="conflict-high"');
    expect(markup).toContain("Domain V");
    expect(markup).toContain(domainV.description);
  });

  it("shows an empty state with no conflicts", () => {
    expect(renderConflicts([], matrix)).toContain("Conflict registry is empty");
  });
});

describe("orphan banner and registry browser", () => {
  it("renders no banner when there are no orphans", () => {
    expect(renderOrphanBanner([])).toBe("");
  });

  it("warns with a count and link when orphans exist", () => {
    const markup = renderOrphanBanner(["migt://t/a", "migt://t/b"]);
    expect(markup).toContain("2 orphaned");
    expect(markup).toContain('data-action="show-orphans"');
  });

  it("renders the registry with lifecycle, autonomy and owner columns", () => {
    const markup = renderRegistry(identities, orphans);
    for (const identity of identities) {
      expect(markup).toContain(`data-identity="${identity.id}"`);
      expect(markup).toContain(`autonomy ${identity.autonomy}`);
    }
  });
});
