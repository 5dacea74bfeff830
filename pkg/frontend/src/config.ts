/** API base resolution: build-time global, then ?api= override, then
 * same-host default matching the server's default listen port. */

export const DEFAULT_API_BASE = "http://127.0.0.1:8000";

export function apiBase(): string {
  const injected = (globalThis as Record<string, unknown>)["__RPS_API_BASE__"];
  if (typeof injected === "string" && injected.length > 0) return injected;
  if (typeof location !== "undefined") {
    const param = new URLSearchParams(location.search).get("api");
    if (param) return param;
  }
  return DEFAULT_API_BASE;
}
