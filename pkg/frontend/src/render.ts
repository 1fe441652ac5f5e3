// HTML rendering helpers. Screens are pure functions from gateway payloads to
// markup so they can be snapshot-tested against recorded fixtures.

export function escapeHtml(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

// Tagged template that escapes interpolations unless wrapped in raw().
export function html(strings: TemplateStringsArray, ...values: unknown[]): string {
  let out = "";
  strings.forEach((chunk, i) => {
    out += chunk;
    if (i < values.length) {
      const value = values[i];
      out += value instanceof RawHtml ? value.markup : escapeHtml(value);
    }
  });
  return out;
}

class RawHtml {
  constructor(readonly markup: string) {}
}

export function raw(markup: string): RawHtml {
  return new RawHtml(markup);
}

export function joinRaw(parts: string[]): RawHtml {
  return new RawHtml(parts.join(""));
}

// Values arrive pre-computed from the gateway; this only formats for display.
export function formatPct(value: number): string {
  return `${value.toFixed(1)}%`;
}

export function formatScore(value: number | null): string {
  return value === null ? "–" : value.toFixed(3);
}

export function shortUri(uri: string): string {
  const tail = uri.split("/").pop();
  return tail ?? uri;
}

export function badge(text: string, tone: "ok" | "warn" | "danger" | "muted"): RawHtml {
  return new RawHtml(`<span class="badge badge-${tone}">${escapeHtml(text)}</span>`);
}

export function decisionTone(decision: string): "ok" | "warn" | "danger" | "muted" {
  switch (decision) {
    case "ALLOW":
      return "ok";
    case "ALLOW_ENHANCED_LOGGING":
      return "warn";
    case "ESCALATE":
      return "warn";
    case "DENY":
      return "danger";
    default:
      return "muted";
  }
}

export function conflictTone(level: string): "ok" | "warn" | "danger" | "muted" {
  switch (level) {
    case "LOW":
      return "ok";
    case "MODERATE":
      return "warn";
    case "HIGH":
      return "danger";
    default:
      return "muted";
  }
}
