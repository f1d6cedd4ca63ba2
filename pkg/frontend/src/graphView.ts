import { El, el } from "./descriptor.js";
import { ViewState, edgeMatches, languageMatches } from "./state.js";
import { GraphDoc } from "./types.js";

const MAX_EDGE_WIDTH = 8;
const MIN_EDGE_WIDTH = 0.5;

/**
 * Directed graph view. Nodes sit on a circle (layout is free-form per the
 * service contract; only the data attributes are load-bearing). Edge width
 * grows linearly with |ft|; donor nodes (donation >= 0) tint differently
 * from recipient-leaning nodes. Filtering marks elements hidden instead of
 * dropping them, so toggling a filter never refetches.
 */
export function renderGraphView(snapshot: GraphDoc, state: ViewState): El {
  const byCode = new Map(snapshot.languages.map((l) => [l.code, l]));
  const n = snapshot.languages.length;
  const maxAbsFt = Math.max(...snapshot.edges.map((e) => Math.abs(e.ft)), 1e-12);

  const nodes = snapshot.languages.map((lang, i) => {
    const angle = (2 * Math.PI * i) / Math.max(n, 1);
    const matches = languageMatches(lang, state.activeFilters);
    return el("g", {
      class: "node" + (state.selectedLanguages.has(lang.code) ? " selected" : ""),
      "data-code": lang.code,
      "data-donation": String(lang.donation),
      "data-recipience": String(lang.recipience),
      "data-blood-type": lang.blood_type,
      "data-tint": lang.donation >= 0 ? "donor" : "recipient",
      cx: (100 + 90 * Math.cos(angle)).toFixed(2),
      cy: (100 + 90 * Math.sin(angle)).toFixed(2),
      hidden: matches ? "false" : "true",
      title: `${lang.code} (${lang.blood_type})`,
    });
  });

  const edges = snapshot.edges.map((edge) => {
    const width =
      MIN_EDGE_WIDTH + (MAX_EDGE_WIDTH - MIN_EDGE_WIDTH) * (Math.abs(edge.ft) / maxAbsFt);
    const matches = edgeMatches(edge, byCode, state.activeFilters);
    const highlighted =
      state.selectedLanguages.has(edge.source) ||
      state.selectedLanguages.has(edge.target);
    return el("path", {
      class: "edge" + (highlighted ? " highlighted" : ""),
      "data-source": edge.source,
      "data-target": edge.target,
      "data-ft": String(edge.ft),
      "data-bin": edge.bin,
      "stroke-width": width.toFixed(3),
      hidden: matches ? "false" : "true",
      // hover payload: ft, bin, and both endpoint blood types
      title:
        `${edge.source}->${edge.target} ft=${edge.ft.toFixed(4)} ${edge.bin} ` +
        `(${byCode.get(edge.source)?.blood_type}/${byCode.get(edge.target)?.blood_type})`,
    });
  });

  return el("svg", { class: "graph-view", viewBox: "0 0 200 200" }, [
    el("g", { class: "edges" }, edges),
    el("g", { class: "nodes" }, nodes),
  ]);
}

export function renderErrorBanner(message: string): El {
  return el("div", { class: "error-banner", role: "alert" }, [], message);
}
