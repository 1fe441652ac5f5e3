// Console shell: tab routing, data refresh, event delegation, toasts.
// All state beyond the active tab lives server-side.

import { GatewayClient } from "./api.js";
import {
  approveIdentity,
  denyIdentity,
  renderApprovalQueue,
} from "./screens/approvals.js";
import {
  renderConflicts,
  renderMetrics,
  renderOrphanBanner,
  renderPhaseCard,
  renderRegistry,
} from "./screens/dashboards.js";
import {
  renderEscalationQueue,
  resolveEscalation,
} from "./screens/escalations.js";
import type { ActionResult } from "./types.js";

type Tab = "approvals" | "escalations" | "dashboards" | "registry";

export class ConsoleApp {
  private tab: Tab = "approvals";
  private flaggedOnly = false;
  private readonly resolver = "console-operator";

  constructor(
    private readonly client: GatewayClient,
    private readonly root: HTMLElement,
    private readonly toastHost: HTMLElement,
  ) {}

  async start(): Promise<void> {
    this.root.addEventListener("click", (event) => {
      const target = event.target as HTMLElement;
      const action = target.dataset.action;
      if (action) {
        event.preventDefault();
        void this.dispatch(action, target);
      }
    });
    document.querySelectorAll<HTMLElement>("[data-tab]").forEach((el) => {
      el.addEventListener("click", () => {
        this.tab = el.dataset.tab as Tab;
        void this.refresh();
      });
    });
    await this.refresh();
  }

  async refresh(): Promise<void> {
    try {
      this.root.innerHTML = await this.renderTab();
    } catch (error) {
      this.root.innerHTML =
        `<div class="banner banner-danger">gateway unreachable: ` +
        `${error instanceof Error ? error.message : String(error)}</div>`;
    }
  }

  private async renderTab(): Promise<string> {
    switch (this.tab) {
      case "approvals": {
        const pending = await this.client.identities("Requested");
        return renderApprovalQueue(pending);
      }
      case "escalations": {
        const [escalations, identities] = await Promise.all([
          this.client.escalations(),
          this.client.identities(),
        ]);
        const flagged = new Set(
          identities
            .filter((i) => i.flags.includes("foreign-exposed") || i.flags.includes("pam-adjacent"))
            .map((i) => i.id),
        );
        const toggle =
          `<label class="filter"><input type="checkbox" data-action="toggle-flagged"` +
          `${this.flaggedOnly ? " checked" : ""}/> threat-flagged identities only</label>`;
        return (
          toggle +
          renderEscalationQueue(escalations, {
            flaggedOnly: this.flaggedOnly,
            flaggedIdentityIds: flagged,
          })
        );
      }
      case "dashboards": {
        const [metrics, phases, conflicts, matrix, orphans] = await Promise.all([
          this.client.metrics(),
          Promise.all([1, 2, 3, 4].map((n) => this.client.phase(n))),
          this.client.conflicts(),
          this.client.matrix(),
          this.client.orphans(),
        ]);
        return (
          renderOrphanBanner(orphans) +
          `<div class="phase-row">${phases.map(renderPhaseCard).join("")}</div>` +
          renderMetrics(metrics) +
          `<h2>Cross-jurisdictional conflicts</h2>` +
          renderConflicts(conflicts, matrix)
        );
      }
      case "registry": {
        const [identities, orphans] = await Promise.all([
          this.client.identities(),
          this.client.orphans(),
        ]);
        return renderRegistry(identities, orphans);
      }
    }
  }

  private justificationFor(id: string): string {
    const input = this.root.querySelector<HTMLInputElement>(
      `input[data-role="justification"][data-id="${CSS.escape(id)}"]`,
    );
    return input?.value ?? "";
  }

  private async dispatch(action: string, target: HTMLElement): Promise<void> {
    const id = target.dataset.id ?? "";
    let result: ActionResult | null = null;
    switch (action) {
      case "approve":
        result = await approveIdentity(this.client, id);
        break;
      case "deny":
        result = await denyIdentity(this.client, id, this.justificationFor(id));
        break;
      case "resolve-approved":
        result = await resolveEscalation(
          this.client, id, "approved", this.justificationFor(id), this.resolver,
        );
        break;
      case "resolve-violation":
        result = await resolveEscalation(
          this.client, id, "violation", this.justificationFor(id), this.resolver,
        );
        break;
      case "toggle-flagged":
        this.flaggedOnly = !this.flaggedOnly;
        await this.refresh();
        return;
      case "show-orphans":
        this.tab = "registry";
        await this.refresh();
        return;
      default:
        return;
    }
    this.report(result);
    if (result.kind === "ok" || result.kind === "conflict") {
      await this.refresh(); // reflect the new server state without a reload
    }
  }

  private report(result: ActionResult): void {
    if (result.kind === "ok") {
      this.toast("done", "ok");
    } else if (result.kind === "validation") {
      this.toast(result.message, "warn");
    } else if (result.kind === "conflict") {
      this.toast(result.message, "warn");
    } else {
      this.toast(result.message, "danger");
    }
  }

  private toast(message: string, tone: "ok" | "warn" | "danger"): void {
    const el = document.createElement("div");
    el.className = `toast toast-${tone}`;
    el.textContent = message;
    this.toastHost.appendChild(el);
    setTimeout(() => el.remove(), 4000);
  }
}

export function mountConsole(baseUrl: string): ConsoleApp {
  const root = document.getElementById("console-root");
  const toasts = document.getElementById("toast-host");
  if (!root || !toasts) {
    throw new Error("console mount points missing");
  }
  const app = new ConsoleApp(new GatewayClient(baseUrl), root, toasts);
  void app.start();
  return app;
}
