import { ApiClient, ApiError } from "./api.js";
import { El, el } from "./descriptor.js";
import { WhatIfParams } from "./types.js";

/**
 * What-if panel: POSTs the current parameters and renders exactly what the
 * service returned. The donor list and every number come straight from the
 * parsed response; the raw body is kept on the root element so the display
 * can be audited against the service byte for byte.
 */
export async function renderWhatIfPanel(
  client: ApiClient,
  params: WhatIfParams
): Promise<El> {
  let raw: string;
  let result;
  try {
    ({ result, raw } = await client.whatif(params));
  } catch (err) {
    if (err instanceof ApiError) {
      return el("div", { class: "whatif-panel error", "data-code": err.detail.code },
        [], err.detail.message);
    }
    throw err;
  }

  const donorItems = result.donors.map((code) => {
    const per = result.per_language[code]!;
    return el("li", {
      class: "donor",
      "data-code": code,
      "data-donation": String(per.donation),
      "data-family": per.family,
    }, [], code);
  });

  return el("div", {
    class: "whatif-panel",
    "data-raw": raw,
    "data-donors": result.donors.join(","),
    "data-mode": result.mode,
  }, [
    el("ul", { class: "donors" }, donorItems),
    el("div", {
      class: "donation-sum",
      "data-value": String(result.donation_sum),
    }, [], `Σ donation ${result.donation_sum.toFixed(4)}`),
    el("div", { class: "params" }, [],
      `k=${result.k} mode=${result.mode} min_families=${result.min_families}`),
  ]);
}

/** Codes the graph and quadrant views should highlight after a what-if. */
export function highlightedCodes(panel: El): Set<string> {
  const donors = panel.attrs["data-donors"];
  return new Set(donors ? donors.split(",").filter(Boolean) : []);
}
