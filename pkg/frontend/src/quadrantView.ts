import { El, el } from "./descriptor.js";
import { ViewState, languageMatches } from "./state.js";
import { GraphDoc } from "./types.js";

export const QUADRANT_LABELS = {
  donor_recipient: "Universal",
  donor_nonrecipient: "O",
  nondonor_recipient: "ABplus",
  nondonor_nonrecipient: "Isolate",
} as const;

export type QuadrantKey = keyof typeof QUADRANT_LABELS;

/** Zero counts as donating/receiving, matching the node classification. */
export function quadrantOf(donation: number, recipience: number): QuadrantKey {
  if (donation >= 0) {
    return recipience >= 0 ? "donor_recipient" : "donor_nonrecipient";
  }
  return recipience >= 0 ? "nondonor_recipient" : "nondonor_nonrecipient";
}

/**
 * Scatter of donation (x) against recipience (y). Point coordinates are a
 * linear map of the served values into the viewport; the served values ride
 * along as data attributes so nothing displayed needs recomputation.
 */
export function renderQuadrantView(snapshot: GraphDoc, state: ViewState): El {
  const spanOf = (values: number[]) =>
    Math.max(...values.map(Math.abs), 1e-12);
  const xSpan = spanOf(snapshot.languages.map((l) => l.donation));
  const ySpan = spanOf(snapshot.languages.map((l) => l.recipience));

  const points = snapshot.languages.map((lang) => {
    const quadrant = quadrantOf(lang.donation, lang.recipience);
    return el("circle", {
      class: "point" + (state.selectedLanguages.has(lang.code) ? " selected" : ""),
      "data-code": lang.code,
      "data-donation": String(lang.donation),
      "data-recipience": String(lang.recipience),
      "data-quadrant": quadrant,
      "data-quadrant-label": QUADRANT_LABELS[quadrant],
      cx: (100 + 95 * (lang.donation / xSpan)).toFixed(2),
      cy: (100 - 95 * (lang.recipience / ySpan)).toFixed(2),
      hidden: languageMatches(lang, state.activeFilters) ? "false" : "true",
    });
  });

  const labels = (Object.keys(QUADRANT_LABELS) as QuadrantKey[]).map((key) =>
    el("text", { class: "quadrant-label", "data-quadrant": key }, [],
       QUADRANT_LABELS[key])
  );

  return el("svg", { class: "quadrant-view", viewBox: "0 0 200 200" }, [
    el("line", { class: "axis x-axis", x1: "0", y1: "100", x2: "200", y2: "100" }),
    el("line", { class: "axis y-axis", x1: "100", y1: "0", x2: "100", y2: "200" }),
    el("g", { class: "labels" }, labels),
    el("g", { class: "points" }, points),
  ]);
}
