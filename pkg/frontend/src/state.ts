import { EdgeDoc, GraphDoc, LanguageDoc, WhatIfParams } from "./types.js";

export type Layout = "graph" | "matrix" | "quadrant";

export interface Filters {
  family?: string;
  script?: string;
  blood_type?: string;
  bin?: string;
  wals?: { feature: string; value: string };
}

export interface ViewState {
  activeFilters: Filters;
  selectedLanguages: Set<string>;
  whatifParams: WhatIfParams;
  layout: Layout;
}

export function initialState(): ViewState {
  return {
    activeFilters: {},
    selectedLanguages: new Set(),
    whatifParams: { k: 4, mode: "most_donating" },
    layout: "graph",
  };
}

/** selected_languages must stay within the served snapshot */
export function selectLanguage(
  state: ViewState,
  snapshot: GraphDoc,
  code: string
): ViewState {
  if (!snapshot.languages.some((l) => l.code === code)) {
    throw new Error(`unknown language: ${code}`);
  }
  const selected = new Set(state.selectedLanguages);
  selected.add(code);
  return { ...state, selectedLanguages: selected };
}

export function languageMatches(lang: LanguageDoc, filters: Filters): boolean {
  if (filters.family !== undefined && lang.family !== filters.family) return false;
  if (filters.script !== undefined && lang.script !== filters.script) return false;
  if (filters.blood_type !== undefined && lang.blood_type !== filters.blood_type) {
    return false;
  }
  if (filters.wals !== undefined) {
    if (lang.wals[filters.wals.feature] !== filters.wals.value) return false;
  }
  return true;
}

/** An edge stays visible only while both endpoints and its bin match. */
export function edgeMatches(
  edge: EdgeDoc,
  byCode: Map<string, LanguageDoc>,
  filters: Filters
): boolean {
  if (filters.bin !== undefined && edge.bin !== filters.bin) return false;
  const source = byCode.get(edge.source);
  const target = byCode.get(edge.target);
  if (!source || !target) return false;
  return languageMatches(source, filters) && languageMatches(target, filters);
}
