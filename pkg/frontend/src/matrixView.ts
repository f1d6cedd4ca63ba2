import { El, el } from "./descriptor.js";
import { GraphDoc } from "./types.js";

/**
 * Adjacency heatmap: rows are sources, columns targets, diagonal cells hold
 * monolingual MRR, off-diagonal cells the directed ft. The trailing column
 * and row carry the served donation (Don.) and recipience (Recp.) marginals.
 */
export function renderMatrixView(snapshot: GraphDoc): El {
  const codes = snapshot.languages.map((l) => l.code);
  const byCode = new Map(snapshot.languages.map((l) => [l.code, l]));
  const ft = new Map(
    snapshot.edges.map((e) => [`${e.source}\t${e.target}`, e])
  );

  const header = el("tr", { class: "header" }, [
    el("th", {}, [], "src"),
    ...codes.map((c) => el("th", {}, [], c)),
    el("th", { class: "marginal" }, [], "Don."),
  ]);

  const rows = codes.map((source) => {
    const lang = byCode.get(source)!;
    const cells = codes.map((target) => {
      if (source === target) {
        return el("td", {
          class: "cell mono",
          "data-value": String(lang.mono_mrr),
        }, [], lang.mono_mrr.toFixed(4));
      }
      const edge = ft.get(`${source}\t${target}`)!;
      return el("td", {
        class: "cell ft",
        "data-source": source,
        "data-target": target,
        "data-value": String(edge.ft),
        "data-bin": edge.bin,
      }, [], edge.ft.toFixed(4));
    });
    return el("tr", { class: "row", "data-code": source }, [
      el("th", {}, [], source),
      ...cells,
      el("td", {
        class: "marginal donation",
        "data-value": String(lang.donation),
      }, [], lang.donation.toFixed(4)),
    ]);
  });

  const recipienceRow = el("tr", { class: "marginal-row" }, [
    el("th", {}, [], "Recp."),
    ...codes.map((code) =>
      el("td", {
        class: "marginal recipience",
        "data-value": String(byCode.get(code)!.recipience),
      }, [], byCode.get(code)!.recipience.toFixed(4))
    ),
    el("td", { class: "corner" }),
  ]);

  return el("table", { class: "matrix-view" }, [header, ...rows, recipienceRow]);
}
