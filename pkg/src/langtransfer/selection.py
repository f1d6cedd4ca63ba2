"""Pretraining-set construction and hypothesis checking.

Donor sets are picked from the transfer graph by donation score under a
family-diversity constraint; downstream task results (POS / NER F1) are
ingested, never produced, and the aggregate zero-shot hypotheses are
evaluated against them. Strict inequalities that tie are reported as ties,
never silently dropped.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import stats
from .errors import InfeasibleError, InputError, ValidationError
from .proxy_mlm import ScoreMatrix
from .transfer_graph import TransferGraph

SELECTION_MODES = ("most_donating", "least_donating", "random", "control")
DEFAULT_BUDGET_CHARS = 100_000_000
DEFAULT_MIN_FAMILIES = 3


@dataclass(frozen=True)
class PretrainConfig:
    id: str
    donors: tuple[str, ...]
    recipients_high: tuple[str, ...]
    recipients_low: tuple[str, ...]
    budget_chars: int = DEFAULT_BUDGET_CHARS
    mode: str = "most_donating"

    def __post_init__(self):
        if self.mode not in SELECTION_MODES:
            raise ValidationError(f"unknown mode: {self.mode}")
        if self.mode == "control" and self.donors:
            raise ValidationError("control configuration must have no donors")
        recipients = set(self.recipients_high) | set(self.recipients_low)
        overlap = set(self.donors) & recipients
        if overlap:
            raise ValidationError(f"donors overlap recipients: {sorted(overlap)}")

    @property
    def languages(self) -> tuple[str, ...]:
        return tuple(
            sorted(set(self.donors) | set(self.recipients_high) | set(self.recipients_low))
        )

    @property
    def per_language_chars(self) -> int:
        return self.budget_chars // len(self.languages)


@dataclass(frozen=True)
class DownstreamResults:
    task: str
    scores: dict[tuple[str, str, str], float]  # (config_id, source, target) -> mean F1
    seeds: int = 1

    def __post_init__(self):
        for key, f1 in self.scores.items():
            if not (0.0 <= f1 <= 1.0):
                raise ValidationError(f"F1 out of [0,1] for {key}: {f1}")


@dataclass(frozen=True)
class HypothesisResult:
    hypothesis_id: str  # Eq3 | Eq7 | Eq8 | Eq9 | Eq10
    satisfied: str  # yes | no | partial
    margins: tuple[float, ...]
    ties: tuple[str, ...] = ()
    details: tuple = ()


def _verdict(holds: Sequence[bool]) -> str:
    if all(holds):
        return "yes"
    if any(holds):
        return "partial"
    return "no"


def rank_donors(graph: TransferGraph) -> list[str]:
    """Languages by donation, descending; ties break on code."""
    return sorted(graph.codes(), key=lambda c: (-graph.nodes[c].donation, c))


def _diversity_feasible(
    picked_families: set[str], remaining: Sequence[str], families: Mapping[str, str],
    slots_left: int, min_families: int,
) -> bool:
    new_available = {families[c] for c in remaining} - picked_families
    reachable = len(picked_families) + min(slots_left, len(new_available))
    return reachable >= min_families


def select_pretrain_set(
    graph: TransferGraph,
    k: int = 4,
    mode: str = "most_donating",
    min_families: int = DEFAULT_MIN_FAMILIES,
    excluded: Iterable[str] = (),
    seed: int = 0,
    force_include: Iterable[str] = (),
) -> list[str]:
    """Pick k donor languages under an at-least-f-distinct-families constraint.

    most/least_donating are greedy on the donation ranking, skipping any
    candidate that would make the family constraint unreachable; random is
    uniform over feasible completions, seed-deterministic. Control returns
    no donors. force_include reserves slots before ranking applies.
    """
    if mode not in SELECTION_MODES:
        raise ValidationError(f"unknown mode: {mode}")
    if mode == "control":
        return []
    excluded = set(excluded)
    families = {c: graph.nodes[c].meta.family for c in graph.codes()}
    eligible = [c for c in graph.codes() if c not in excluded]
    forced = [c for c in force_include if c not in excluded]
    if len(set(forced)) != len(forced):
        raise ValidationError("duplicate codes in force_include")
    unknown = [c for c in forced if c not in graph.nodes]
    if unknown:
        raise ValidationError(f"force_include codes not in graph: {unknown}")
    if len(forced) > k:
        raise InfeasibleError("force_include larger than k")
    if len(eligible) < k:
        raise InfeasibleError(
            f"cannot pick {k} donors from {len(eligible)} eligible languages"
        )
    effective_min = min(min_families, k)

    if mode == "random":
        rng = random.Random(seed)
        pool = [c for c in eligible if c not in forced]
        for _ in range(10_000):
            picked = forced + rng.sample(pool, k - len(forced))
            if len({families[c] for c in picked}) >= effective_min:
                return sorted(picked)
        raise InfeasibleError(
            f"no random set of {k} languages spans {effective_min} families"
        )

    reverse = mode == "most_donating"
    ranked = sorted(
        eligible,
        key=lambda c: (-graph.nodes[c].donation if reverse else graph.nodes[c].donation, c),
    )
    picked = list(forced)
    picked_families = {families[c] for c in picked}
    candidates = [c for c in ranked if c not in forced]
    for idx, cand in enumerate(candidates):
        if len(picked) == k:
            break
        slots_after = k - len(picked) - 1
        fam_after = picked_families | {families[cand]}
        rest = candidates[idx + 1 :]
        rest = [c for c in rest if c not in picked]
        if not _diversity_feasible(fam_after, rest, families, slots_after, effective_min):
            continue
        picked.append(cand)
        picked_families = fam_after
    if len(picked) < k or len(picked_families) < effective_min:
        raise InfeasibleError(
            f"cannot reach {k} donors spanning {effective_min} families"
        )
    return sorted(picked)


def zero_shot_score(
    results: DownstreamResults, config_id: str, languages: Iterable[str]
) -> float:
    """Mean zero-shot score over all ordered pairs of a language set."""
    langs = sorted(set(languages))
    if len(langs) < 2:
        raise ValidationError("zero-shot score needs at least 2 languages")
    missing = [
        (s, t)
        for s in langs
        for t in langs
        if s != t and (config_id, s, t) not in results.scores
    ]
    if missing:
        raise ValidationError(
            f"missing zero-shot entries for config '{config_id}': {missing}"
        )
    values = [
        results.scores[(config_id, s, t)] for s in langs for t in langs if s != t
    ]
    return math.fsum(values) / len(values)


def monolingual_score(
    results: DownstreamResults, config_id: str, languages: Iterable[str]
) -> float:
    """Mean source=target F1 over a language set."""
    langs = sorted(set(languages))
    if not langs:
        raise ValidationError("empty language set")
    missing = [l for l in langs if (config_id, l, l) not in results.scores]
    if missing:
        raise ValidationError(
            f"missing diagonal entries for config '{config_id}': {missing}"
        )
    return math.fsum(results.scores[(config_id, l, l)] for l in langs) / len(langs)


def check_recipience_hypothesis(
    results: DownstreamResults,
    config_ids: Sequence[str],
    recipients_high: Iterable[str],
    recipients_low: Iterable[str],
) -> HypothesisResult:
    """For every configuration, high recipients should beat low recipients."""
    if not config_ids:
        raise ValidationError("no configurations to check")
    margins = []
    holds = []
    ties = []
    details = []
    for cid in config_ids:
        zh = zero_shot_score(results, cid, recipients_high)
        zl = zero_shot_score(results, cid, recipients_low)
        margin = zh - zl
        margins.append(margin)
        holds.append(margin > 0)
        if margin == 0:
            ties.append(cid)
        details.append({"config": cid, "z_high": zh, "z_low": zl, "margin": margin})
    return HypothesisResult(
        hypothesis_id="Eq9",
        satisfied=_verdict(holds),
        margins=tuple(margins),
        ties=tuple(ties),
        details=tuple(details),
    )


def check_donation_hypothesis(
    results: DownstreamResults,
    most_id: str,
    random_id: str,
    least_id: str,
    languages: Iterable[str],
) -> HypothesisResult:
    """Most donating > random > least donating on the shared recipient set."""
    z = {
        cid: zero_shot_score(results, cid, languages)
        for cid in (most_id, random_id, least_id)
    }
    comparisons = [
        ("most>random", z[most_id], z[random_id]),
        ("random>least", z[random_id], z[least_id]),
    ]
    margins = []
    holds = []
    ties = []
    details = []
    for name, a, b in comparisons:
        margin = a - b
        margins.append(margin)
        holds.append(margin > 0)
        if margin == 0:
            ties.append(name)
        details.append({"comparison": name, "left": a, "right": b, "margin": margin})
    return HypothesisResult(
        hypothesis_id="Eq10",
        satisfied=_verdict(holds),
        margins=tuple(margins),
        ties=tuple(ties),
        details=tuple(details),
    )


def recipience_proportionality(
    graph: TransferGraph,
    results: DownstreamResults,
    observations: Sequence[tuple[str, Iterable[str]]],
) -> dict[str, tuple[float, stats.TestResult]]:
    """Correlate summed recipience with aggregate zero-shot score.

    Observations are (config_id, language set) pairs. Proportionality is
    operationalized as a significantly positive correlation; Pearson and
    Spearman are both reported.
    """
    if len(observations) < 3:
        raise ValidationError("need at least 3 observations")
    x = []
    y = []
    for cid, langs in observations:
        langs = sorted(set(langs))
        x.append(math.fsum(graph.nodes[l].recipience for l in langs))
        y.append(zero_shot_score(results, cid, langs))
    r = stats.pearson_r(x, y)
    rho = stats.spearman_rho(x, y)
    return {
        "pearson": (r, stats.t_test_correlation(r, len(x))),
        "spearman": (rho, stats.t_test_correlation(rho, len(x))),
    }


def check_donation_sum_hypothesis(
    graph: TransferGraph,
    results: DownstreamResults,
    configs: Sequence[PretrainConfig],
    languages: Iterable[str],
) -> HypothesisResult:
    """Higher summed donation in the pretraining set should not hurt Z.

    Because it is unstated whether the shared recipients' donation counts
    toward the set sum, both variants (donors only and the full language
    set) are computed and reported in the details.
    """
    if len(configs) < 2:
        raise ValidationError("need at least 2 configurations")
    sums = {}
    for cfg in configs:
        donors_only = math.fsum(graph.nodes[l].donation for l in cfg.donors)
        full_set = math.fsum(graph.nodes[l].donation for l in cfg.languages)
        sums[cfg.id] = (donors_only, full_set)
    z = {cfg.id: zero_shot_score(results, cfg.id, languages) for cfg in configs}
    margins = []
    holds = []
    ties = []
    details = []
    ordered = sorted(configs, key=lambda c: sums[c.id][0])
    for lo, hi in zip(ordered, ordered[1:]):
        margin = z[hi.id] - z[lo.id]
        margins.append(margin)
        holds.append(margin >= 0)
        if margin == 0:
            ties.append(f"{lo.id}<={hi.id}")
        details.append(
            {
                "lower": lo.id,
                "higher": hi.id,
                "donation_sum_donors_only": (sums[lo.id][0], sums[hi.id][0]),
                "donation_sum_full_set": (sums[lo.id][1], sums[hi.id][1]),
                "z_lower": z[lo.id],
                "z_higher": z[hi.id],
                "margin": margin,
            }
        )
    return HypothesisResult(
        hypothesis_id="Eq8",
        satisfied=_verdict(holds),
        margins=tuple(margins),
        ties=tuple(ties),
        details=tuple(details),
    )


def monotonicity_probe(
    tagged_matrices: Sequence[tuple[Iterable[str], ScoreMatrix]],
    languages: Iterable[str],
) -> HypothesisResult:
    """Probe the adding-languages-never-hurts assumption on proxy scores.

    Matrices must be tagged with nested pretraining sets; the aggregate is
    the mean bilingual MRR over ordered pairs of the probe languages. This
    is an empirical probe of a stated assumption, not a verified theorem.
    """
    if len(tagged_matrices) < 2:
        raise ValidationError("need at least 2 matrices")
    sets = [frozenset(tag) for tag, _ in tagged_matrices]
    for smaller, larger in zip(sets, sets[1:]):
        if not smaller <= larger:
            raise ValidationError("pretraining sets are not nested")
    langs = sorted(set(languages))
    if len(langs) < 2:
        raise ValidationError("probe needs at least 2 languages")

    def aggregate(matrix: ScoreMatrix) -> float:
        values = []
        for s in langs:
            for t in langs:
                if s == t:
                    continue
                if (s, t) not in matrix.bilingual:
                    raise ValidationError(f"matrix missing bilingual entry ({s},{t})")
                values.append(matrix.bilingual[(s, t)])
        return math.fsum(values) / len(values)

    aggregates = [aggregate(m) for _, m in tagged_matrices]
    margins = []
    holds = []
    ties = []
    details = []
    for i, (lo, hi) in enumerate(zip(aggregates, aggregates[1:])):
        margin = hi - lo
        margins.append(margin)
        holds.append(margin >= 0)
        if margin == 0:
            ties.append(f"step{i}")
        details.append({"step": i, "lower": lo, "higher": hi, "margin": margin})
    return HypothesisResult(
        hypothesis_id="Eq3",
        satisfied=_verdict(holds),
        margins=tuple(margins),
        ties=tuple(ties),
        details=tuple(details),
    )


# --- file formats -----------------------------------------------------------


def load_downstream_results(path: str | os.PathLike) -> dict[str, DownstreamResults]:
    """Load the results TSV, averaging over seeds, one entry per task."""
    p = Path(path)
    if not p.exists():
        raise InputError(f"results file not found: {p}")
    per_task: dict[str, dict[tuple[str, str, str], list[float]]] = {}
    seed_counts: dict[str, set[str]] = {}
    for ln, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cells = line.split("\t")
        if cells[0] == "config_id":  # header
            continue
        if len(cells) != 6:
            raise ValidationError(f"{p}:{ln}: expected 6 columns, got {len(cells)}")
        config_id, task, source, target, f1_str, seed = cells
        try:
            f1 = float(f1_str)
        except ValueError as e:
            raise ValidationError(f"{p}:{ln}: bad F1 value {f1_str!r}") from e
        per_task.setdefault(task, {}).setdefault((config_id, source, target), []).append(f1)
        seed_counts.setdefault(task, set()).add(seed)
    if not per_task:
        raise ValidationError(f"no data rows in {p}")
    return {
        task: DownstreamResults(
            task=task,
            scores={k: math.fsum(v) / len(v) for k, v in rows.items()},
            seeds=len(seed_counts[task]),
        )
        for task, rows in per_task.items()
    }


def write_config_manifest(config: PretrainConfig, path: str | os.PathLike) -> None:
    lines = [
        f"id={config.id}",
        f"mode={config.mode}",
        f"donors={','.join(config.donors)}",
        f"recipients_high={','.join(config.recipients_high)}",
        f"recipients_low={','.join(config.recipients_low)}",
        f"budget_chars={config.budget_chars}",
        # documented downstream truncation constants; informational only
        "pos_sentence_cap=1000",
        "ner_sentence_cap=5000",
    ]
    for lang in config.languages:
        lines.append(f"alloc.{lang}={config.per_language_chars}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_config_manifest(path: str | os.PathLike) -> PretrainConfig:
    p = Path(path)
    if not p.exists():
        raise InputError(f"manifest not found: {p}")
    kv: dict[str, str] = {}
    for line in p.read_text(encoding="utf-8").splitlines():
        if "=" in line and not line.startswith("alloc."):
            k, v = line.split("=", 1)
            kv[k.strip()] = v.strip()

    def codes(key: str) -> tuple[str, ...]:
        raw = kv.get(key, "")
        return tuple(c for c in raw.split(",") if c)

    return PretrainConfig(
        id=kv["id"],
        donors=codes("donors"),
        recipients_high=codes("recipients_high"),
        recipients_low=codes("recipients_low"),
        budget_chars=int(kv.get("budget_chars", DEFAULT_BUDGET_CHARS)),
        mode=kv.get("mode", "most_donating"),
    )
