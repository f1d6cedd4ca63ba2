"""Directed bilingual pretraining transfer graph and its analytics.

Each edge carries the relative MRR gain of the target language under
bilingual pretraining versus its monolingual baseline. Node-level donation
and recipience are sums of outgoing / incoming edge scores; the sign pair
classifies every language into one of four "blood types". Edge scores are
binned in percentage points at the fixed borders -10 / 10 / 55.
"""

from __future__ import annotations

import datetime
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping

from . import stats
from .corpus import LanguageMeta
from .errors import InputError, ValidationError
from .proxy_mlm import ScoreMatrix

BIN_BORDERS = (-10.0, 10.0, 55.0)  # percentage points; each border belongs to the upper bin


class TransferBin(Enum):
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"
    POSITIVE = "Positive"
    VERY_POSITIVE = "VeryPositive"

    @classmethod
    def from_percent(cls, ft_percent: float) -> "TransferBin":
        if ft_percent < BIN_BORDERS[0]:
            return cls.NEGATIVE
        if ft_percent < BIN_BORDERS[1]:
            return cls.NEUTRAL
        if ft_percent < BIN_BORDERS[2]:
            return cls.POSITIVE
        return cls.VERY_POSITIVE


class BloodType(Enum):
    O = "O"
    AB_PLUS = "ABplus"
    UNIVERSAL = "Universal"  # invented label: donates and receives
    ISOLATE = "Isolate"  # invented label: neither donates nor receives

    @classmethod
    def classify(cls, donation: float, recipience: float) -> "BloodType":
        # tie rule: zero counts as donating / receiving
        donating = donation >= 0.0
        receiving = recipience >= 0.0
        if donating and not receiving:
            return cls.O
        if receiving and not donating:
            return cls.AB_PLUS
        if donating and receiving:
            return cls.UNIVERSAL
        return cls.ISOLATE


@dataclass(frozen=True)
class TransferEdge:
    source: str
    target: str
    ft: float

    def __post_init__(self):
        if self.source == self.target:
            raise ValidationError("self edge")

    @property
    def ft_percent(self) -> float:
        return 100.0 * self.ft

    @property
    def bin(self) -> TransferBin:
        return TransferBin.from_percent(self.ft_percent)


@dataclass(frozen=True)
class LanguageNode:
    meta: LanguageMeta
    mono_mrr: float
    donation: float
    recipience: float

    @property
    def blood_type(self) -> BloodType:
        return BloodType.classify(self.donation, self.recipience)


@dataclass(frozen=True)
class TransferGraph:
    nodes: dict[str, LanguageNode]
    edges: dict[tuple[str, str], TransferEdge]
    provenance: str = "proxy"
    seeds: tuple[int, ...] = ()
    regime: str = "joint"

    def codes(self) -> list[str]:
        return sorted(self.nodes)

    def edge(self, s: str, t: str) -> TransferEdge:
        try:
            return self.edges[(s, t)]
        except KeyError:
            raise ValidationError(f"no edge {s}->{t}") from None

    # The three totals below sum the same multiset of edge scores with
    # exact accumulation (math.fsum), so they are bit-identical regardless
    # of grouping. Summing the rounded per-node scalars instead can drift
    # by an ulp.
    def donation_total(self) -> float:
        return math.fsum(
            self.edges[(s, t)].ft for s in self.codes() for t in self.codes() if t != s
        )

    def recipience_total(self) -> float:
        return math.fsum(
            self.edges[(s, t)].ft for t in self.codes() for s in self.codes() if s != t
        )

    def edge_total(self) -> float:
        return math.fsum(e.ft for _, e in sorted(self.edges.items()))


def finetune_score(matrix: ScoreMatrix, s: str, t: str) -> float:
    """Relative gain of target t from bilingual pretraining with source s."""
    if s == t:
        raise ValidationError("finetune score needs distinct languages")
    if t not in matrix.mono:
        raise ValidationError(f"missing monolingual score for '{t}'")
    mono_t = matrix.mono[t]
    if mono_t == 0:
        raise ValidationError(f"zero monolingual score for '{t}'")
    if (s, t) not in matrix.bilingual:
        raise ValidationError(f"missing bilingual entry ({s},{t})")
    return (matrix.bilingual[(s, t)] - mono_t) / mono_t


def build_graph(
    matrix: ScoreMatrix, metas: Mapping[str, LanguageMeta] | None = None
) -> TransferGraph:
    """Build the complete directed graph from a full score matrix.

    Donation and recipience are exact sums (math.fsum) over outgoing and
    incoming edge scores in sorted partner order.
    """
    if not matrix.is_complete():
        raise ValidationError("score matrix is not complete over its language list")
    codes = sorted(matrix.languages)
    metas = metas or {}
    edges = {
        (s, t): TransferEdge(source=s, target=t, ft=finetune_score(matrix, s, t))
        for s, t in itertools.permutations(codes, 2)
    }
    nodes: dict[str, LanguageNode] = {}
    for code in codes:
        meta = metas.get(code) or LanguageMeta(
            code=code, family="unknown", script="unknown"
        )
        donation = math.fsum(edges[(code, t)].ft for t in codes if t != code)
        recipience = math.fsum(edges[(s, code)].ft for s in codes if s != code)
        nodes[code] = LanguageNode(
            meta=meta,
            mono_mrr=matrix.mono[code],
            donation=donation,
            recipience=recipience,
        )
    return TransferGraph(
        nodes=nodes,
        edges=edges,
        provenance=matrix.provenance,
        seeds=matrix.seeds,
    )


def detect_asymmetry(graph: TransferGraph, l1: str, l2: str) -> tuple[float, bool]:
    """Difference and sign opposition of a pair's two directed scores.

    Zero is not opposite-signed to anything.
    """
    a = graph.edge(l1, l2).ft
    b = graph.edge(l2, l1).ft
    sign_flip = (a > 0 and b < 0) or (a < 0 and b > 0)
    return a - b, sign_flip


def reciprocity_correlation(graph: TransferGraph) -> tuple[float, stats.TestResult]:
    """Correlation between the two directions of every unordered pair."""
    codes = graph.codes()
    pairs = list(itertools.combinations(codes, 2))
    if len(pairs) < 3:
        raise ValidationError("need at least 3 unordered pairs")
    x = [graph.edge(a, b).ft for a, b in pairs]
    y = [graph.edge(b, a).ft for a, b in pairs]
    r = stats.pearson_r(x, y)
    return r, stats.t_test_correlation(r, len(pairs))


def _mean_outgoing(graph: TransferGraph, code: str) -> float:
    others = [t for t in graph.codes() if t != code]
    return math.fsum(graph.edge(code, t).ft for t in others) / len(others)


def _mean_incoming(graph: TransferGraph, code: str) -> float:
    others = [s for s in graph.codes() if s != code]
    return math.fsum(graph.edge(s, code).ft for s in others) / len(others)


def mono_correlations(
    graph: TransferGraph,
) -> dict[str, tuple[float, stats.TestResult]]:
    """Monolingual MRR vs. mean outgoing / incoming transfer per language.

    Means rather than sums keep the statistic independent of graph size;
    donation/recipience classification still uses sums.
    """
    codes = graph.codes()
    if len(codes) < 3:
        raise ValidationError("need at least 3 nodes")
    mono = [graph.nodes[c].mono_mrr for c in codes]
    out_means = [_mean_outgoing(graph, c) for c in codes]
    in_means = [_mean_incoming(graph, c) for c in codes]
    r_src = stats.pearson_r(mono, out_means)
    r_tgt = stats.pearson_r(mono, in_means)
    return {
        "as_source": (r_src, stats.t_test_correlation(r_src, len(codes))),
        "as_target": (r_tgt, stats.t_test_correlation(r_tgt, len(codes))),
    }


_BIN_ORDER = (
    TransferBin.NEGATIVE,
    TransferBin.NEUTRAL,
    TransferBin.POSITIVE,
    TransferBin.VERY_POSITIVE,
)


def _factor_table(
    graph: TransferGraph, shared: callable
) -> tuple[stats.ContingencyTable | None, stats.TestResult]:
    counts = {True: dict.fromkeys(_BIN_ORDER, 0), False: dict.fromkeys(_BIN_ORDER, 0)}
    for edge in graph.edges.values():
        src = graph.nodes[edge.source].meta
        tgt = graph.nodes[edge.target].meta
        counts[shared(src, tgt)][edge.bin] += 1
    # drop bins empty in both rows; df shrinks accordingly
    kept = [b for b in _BIN_ORDER if counts[True][b] + counts[False][b] > 0]
    row_shared = [counts[True][b] for b in kept]
    row_diff = [counts[False][b] for b in kept]
    if len(kept) < 2 or sum(row_shared) == 0 or sum(row_diff) == 0:
        # one bin or one row only: no variation to test
        return None, stats.TestResult(0.0, 0, 1.0, degenerate=True)
    table = stats.ContingencyTable(
        rows=("shared", "different"),
        cols=tuple(b.value for b in kept),
        counts=(tuple(row_shared), tuple(row_diff)),
    )
    return table, stats.chi_square(table)


def script_family_analysis(
    graph: TransferGraph,
) -> dict[str, tuple[stats.ContingencyTable | None, stats.TestResult]]:
    """Chi-square tests of shared-script and shared-family vs. transfer bin."""
    return {
        "script": _factor_table(graph, lambda a, b: a.script == b.script),
        "family": _factor_table(graph, lambda a, b: a.family == b.family),
    }


def bin_histogram(graph: TransferGraph) -> dict[TransferBin, int]:
    hist = dict.fromkeys(_BIN_ORDER, 0)
    for edge in graph.edges.values():
        hist[edge.bin] += 1
    return hist


# --- graph document ---------------------------------------------------------


def graph_to_doc(graph: TransferGraph) -> dict:
    """Serializable graph document; the explorer consumes this verbatim."""
    return {
        "languages": [
            {
                "code": code,
                "family": node.meta.family,
                "script": node.meta.script,
                "mono_mrr": node.mono_mrr,
                "donation": node.donation,
                "recipience": node.recipience,
                "blood_type": node.blood_type.value,
                "wals": dict(node.meta.wals_features),
            }
            for code, node in sorted(graph.nodes.items())
        ],
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "ft": e.ft,
                "ft_percent": e.ft_percent,
                "bin": e.bin.value,
            }
            for (_, _), e in sorted(graph.edges.items())
        ],
        "meta": {
            "provenance": graph.provenance,
            "seeds": list(graph.seeds),
            "regime": graph.regime,
            "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "conventions": {
                "bin_borders": list(BIN_BORDERS),
                "blood_type_tie_rule": "zero donation or recipience counts as positive",
                "correlation_aggregation": "sums for donation/recipience, means for mono correlations",
                "invented_labels": ["Universal", "Isolate"],
            },
        },
    }


def export_graph(graph: TransferGraph, path: str | os.PathLike) -> None:
    Path(path).write_text(
        json.dumps(graph_to_doc(graph), ensure_ascii=False, indent=1) + "\n",
        encoding="utf-8",
    )


def load_graph(path: str | os.PathLike) -> TransferGraph:
    p = Path(path)
    if not p.exists():
        raise InputError(f"graph document not found: {p}")
    doc = json.loads(p.read_text(encoding="utf-8"))
    nodes: dict[str, LanguageNode] = {}
    for lang in doc["languages"]:
        meta = LanguageMeta(
            code=lang["code"],
            family=lang["family"],
            script=lang["script"],
            wals_features=dict(lang.get("wals", {})),
        )
        nodes[lang["code"]] = LanguageNode(
            meta=meta,
            mono_mrr=lang["mono_mrr"],
            donation=lang["donation"],
            recipience=lang["recipience"],
        )
    edges = {
        (e["source"], e["target"]): TransferEdge(
            source=e["source"], target=e["target"], ft=e["ft"]
        )
        for e in doc["edges"]
    }
    meta = doc.get("meta", {})
    return TransferGraph(
        nodes=nodes,
        edges=edges,
        provenance=meta.get("provenance", "ingested"),
        seeds=tuple(meta.get("seeds", [])),
        regime=meta.get("regime", "joint"),
    )
