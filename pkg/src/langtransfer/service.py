"""Read-only HTTP service over a built workspace.

The workspace (graph, configs, downstream results, cached hypothesis
results, WALS features) is loaded once at startup and never mutated;
every endpoint is a pure function over it. /whatif is stateless: it runs
the donor selector with the posted parameters and returns the manifest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import selection, transfer_graph
from .corpus import LanguageMeta
from .errors import InfeasibleError, InputError, ToolkitError, ValidationError
from .selection import PretrainConfig
from .transfer_graph import TransferGraph


@dataclass(frozen=True)
class Workspace:
    graph: TransferGraph
    configs: tuple[PretrainConfig, ...] = ()
    downstream: tuple[selection.DownstreamResults, ...] = ()
    hypothesis_cache: tuple[selection.HypothesisResult, ...] = ()

    def __post_init__(self):
        codes = set(self.graph.nodes)
        for cfg in self.configs:
            missing = [c for c in cfg.languages if c not in codes]
            if missing:
                raise ValidationError(
                    f"config '{cfg.id}' references unknown languages: {missing}"
                )


def load_wals(path) -> dict[str, dict[str, str]]:
    """Local WALS CSV: language_code,feature_id,value."""
    features: dict[str, dict[str, str]] = {}
    p = Path(path)
    if not p.exists():
        raise InputError(f"WALS file not found: {p}")
    for ln, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("language_code"):
            continue
        cells = line.split(",")
        if len(cells) != 3:
            raise ValidationError(f"{p}:{ln}: expected 3 columns")
        code, feature, value = (c.strip() for c in cells)
        features.setdefault(code, {})[feature] = value
    return features


def attach_wals(graph: TransferGraph, features: dict[str, dict[str, str]]) -> TransferGraph:
    nodes = {}
    for code, node in graph.nodes.items():
        wals = features.get(code, {})
        meta = LanguageMeta(
            code=node.meta.code,
            family=node.meta.family,
            script=node.meta.script,
            wals_features={**node.meta.wals_features, **wals},
        )
        nodes[code] = transfer_graph.LanguageNode(
            meta=meta,
            mono_mrr=node.mono_mrr,
            donation=node.donation,
            recipience=node.recipience,
        )
    return TransferGraph(
        nodes=nodes,
        edges=graph.edges,
        provenance=graph.provenance,
        seeds=graph.seeds,
        regime=graph.regime,
    )


def load_workspace(directory) -> Workspace:
    """Load graph.json plus optional wals.csv, manifests, results, cache."""
    d = Path(directory)
    graph_path = d / "graph.json"
    if not graph_path.exists():
        raise InputError(f"workspace has no graph.json: {d}")
    graph = transfer_graph.load_graph(graph_path)
    wals_path = d / "wals.csv"
    if wals_path.exists():
        graph = attach_wals(graph, load_wals(wals_path))
    configs = tuple(
        selection.read_config_manifest(f) for f in sorted(d.glob("*.manifest"))
    )
    downstream: tuple = ()
    results_path = d / "results.tsv"
    if results_path.exists():
        downstream = tuple(selection.load_downstream_results(results_path).values())
    return Workspace(graph=graph, configs=configs, downstream=downstream)


def _error(code: str, message: str, status: int) -> JSONResponse:
    return JSONResponse({"code": code, "message": message}, status_code=status)


def _test_result_doc(result) -> dict:
    return {
        "statistic": None if math.isinf(result.statistic) else result.statistic,
        "df": result.df,
        "p_value": result.p_value,
        "degenerate": result.degenerate,
    }


def _hypothesis_doc(h: selection.HypothesisResult) -> dict:
    return {
        "hypothesis_id": h.hypothesis_id,
        "satisfied": h.satisfied,
        "margins": list(h.margins),
        "ties": list(h.ties),
        "details": [dict(d) for d in h.details],
    }


def _compute_analytics(graph: TransferGraph) -> dict:
    r, test = transfer_graph.reciprocity_correlation(graph)
    mono = transfer_graph.mono_correlations(graph)
    chi = transfer_graph.script_family_analysis(graph)
    hist = transfer_graph.bin_histogram(graph)
    return {
        "reciprocity": {"r": r, "test": _test_result_doc(test)},
        "mono_correlations": {
            name: {"r": value[0], "test": _test_result_doc(value[1])}
            for name, value in mono.items()
        },
        "bin_histogram": {b.value: c for b, c in hist.items()},
        "factors": {
            name: {
                "table": None
                if table is None
                else {
                    "rows": list(table.rows),
                    "cols": list(table.cols),
                    "counts": [list(r_) for r_ in table.counts],
                },
                "test": _test_result_doc(test_),
            }
            for name, (table, test_) in chi.items()
        },
    }


def create_app(workspace: Workspace, cors_origin: str | None = None) -> FastAPI:
    app = FastAPI(title="langtransfer explorer service")
    if cors_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )
    graph = workspace.graph
    graph_doc = transfer_graph.graph_to_doc(graph)
    analytics = _compute_analytics(graph)
    language_docs = graph_doc["languages"]
    edge_docs = graph_doc["edges"]

    @app.exception_handler(ToolkitError)
    async def _toolkit_error(_req: Request, exc: ToolkitError):
        if isinstance(exc, InfeasibleError):
            return _error("infeasible", str(exc), 409)
        if isinstance(exc, InputError):
            return _error("io", str(exc), 404)
        return _error("validation", str(exc), 400)

    @app.get("/graph")
    def get_graph():
        return graph_doc

    @app.get("/languages")
    def get_languages(
        family: str | None = None,
        script: str | None = None,
        blood_type: str | None = None,
        wals_feature: str | None = None,
        value: str | None = None,
    ):
        if (wals_feature is None) != (value is None):
            raise ValidationError("wals_feature and value must be given together")
        out = []
        for lang in language_docs:
            if family is not None and lang["family"] != family:
                continue
            if script is not None and lang["script"] != script:
                continue
            if blood_type is not None and lang["blood_type"] != blood_type:
                continue
            if wals_feature is not None and lang["wals"].get(wals_feature) != value:
                continue
            out.append(lang)
        return out

    @app.get("/edges")
    def get_edges(
        source: str | None = None,
        target: str | None = None,
        bin: str | None = None,
        min_ft: float | None = None,
        max_ft: float | None = None,
        shared_script: bool | None = None,
        shared_family: bool | None = None,
    ):
        out = []
        for e in edge_docs:
            if source is not None and e["source"] != source:
                continue
            if target is not None and e["target"] != target:
                continue
            if bin is not None and e["bin"] != bin:
                continue
            if min_ft is not None and e["ft"] < min_ft:
                continue
            if max_ft is not None and e["ft"] > max_ft:
                continue
            src = graph.nodes[e["source"]].meta
            tgt = graph.nodes[e["target"]].meta
            if shared_script is not None and (src.script == tgt.script) != shared_script:
                continue
            if shared_family is not None and (src.family == tgt.family) != shared_family:
                continue
            out.append(e)
        return out

    @app.get("/analytics")
    def get_analytics():
        return analytics

    @app.get("/hypotheses")
    def get_hypotheses():
        return [_hypothesis_doc(h) for h in workspace.hypothesis_cache]

    @app.post("/whatif")
    async def whatif(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error("validation", "request body is not valid JSON", 400)
        if not isinstance(body, dict):
            return _error("validation", "request body must be an object", 400)
        known = {"k", "mode", "min_families", "exclude", "seed", "force_include"}
        unknown = set(body) - known
        if unknown:
            return _error("validation", f"unknown fields: {sorted(unknown)}", 400)
        try:
            k = int(body.get("k", 4))
            mode = str(body.get("mode", "most_donating"))
            min_families = int(body.get("min_families", selection.DEFAULT_MIN_FAMILIES))
            exclude = [str(c) for c in body.get("exclude", [])]
            seed = int(body.get("seed", 0))
            force_include = [str(c) for c in body.get("force_include", [])]
        except (TypeError, ValueError):
            return _error("validation", "malformed parameter types", 400)
        donors = selection.select_pretrain_set(
            graph,
            k=k,
            mode=mode,
            min_families=min_families,
            excluded=exclude,
            seed=seed,
            force_include=force_include,
        )
        donation_sum = math.fsum(graph.nodes[c].donation for c in donors)
        return {
            "donors": donors,
            "mode": mode,
            "k": k,
            "min_families": min_families,
            "exclude": sorted(exclude),
            "seed": seed,
            "donation_sum": donation_sum,
            "per_language": {
                c: {
                    "donation": graph.nodes[c].donation,
                    "recipience": graph.nodes[c].recipience,
                    "family": graph.nodes[c].meta.family,
                    "script": graph.nodes[c].meta.script,
                }
                for c in donors
            },
        }

    return app


def read_service_config(path) -> dict[str, str]:
    """key=value config: workspace_dir, bind, cors_origin."""
    p = Path(path)
    if not p.exists():
        raise InputError(f"service config not found: {p}")
    cfg: dict[str, str] = {}
    for line in p.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        k, v = line.split("=", 1)
        cfg[k.strip()] = v.strip()
    return cfg


def serve(workspace: Workspace, bind: str = "127.0.0.1:8000", cors_origin: str | None = None) -> None:
    import uvicorn

    host, _, port = bind.partition(":")
    app = create_app(workspace, cors_origin=cors_origin)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))
