"""Masking protocol and count-based proxy masked language model.

The proxy is a backoff n-gram predictor with additive smoothing. It stands
in for neural MLM pretraining: anything downstream only needs an MRR per
(model, evaluation language), and externally produced matrices can be
ingested through the same ScoreMatrix schema. Masked positions are chosen
by the standard corruption protocol; prediction is causal over the clean
left context, so corrupting a neighbor never poisons another position's
context (see evaluate_mrr).
"""

from __future__ import annotations

import itertools
import math
import os
import random
import zlib
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputError, ValidationError
from .subword import NUM_SPECIALS, SubwordVocabulary, TokenSequence

DEFAULT_MAX_SEQ_LEN = 128


@dataclass(frozen=True)
class MaskingPolicy:
    select_rate: float = 0.15
    mask_frac: float = 0.8
    random_frac: float = 0.1
    keep_frac: float = 0.1
    max_seq_len: int = DEFAULT_MAX_SEQ_LEN

    def __post_init__(self):
        if not (0.0 < self.select_rate < 1.0):
            raise ValidationError(f"select_rate must be in (0,1): {self.select_rate}")
        if abs(self.mask_frac + self.random_frac + self.keep_frac - 1.0) > 1e-12:
            raise ValidationError("mask/random/keep fractions must sum to 1")
        if self.max_seq_len < 1:
            raise ValidationError("max_seq_len must be >= 1")


@dataclass(frozen=True)
class MaskedSequence:
    input_ids: tuple[int, ...]
    gold: tuple[tuple[int, int], ...]  # (position, original id)


def _ids_of(tokens) -> tuple[int, ...]:
    if isinstance(tokens, TokenSequence):
        return tokens.ids
    return tuple(tokens)


def _mix_seed(seed: int, ids: Sequence[int]) -> int:
    # stable across platforms and runs, unlike hash()
    payload = b"".join(i.to_bytes(8, "little", signed=True) for i in ids)
    return (seed * 1_000_003) ^ zlib.crc32(payload)


def apply_masking(
    tokens, policy: MaskingPolicy, seed: int, vocab: SubwordVocabulary
) -> MaskedSequence:
    """Corrupt a token sequence for masked-position evaluation.

    Each non-special position is selected independently with probability
    select_rate, then replaced by MASK / a random regular token / kept,
    per the policy split. Deterministic for a fixed (tokens, seed).
    """
    ids = _ids_of(tokens)[: policy.max_seq_len]
    if not ids:
        raise ValidationError("cannot mask an empty sequence")
    from .subword import MASK_ID  # local to keep module constants together

    rng = random.Random(_mix_seed(seed, ids))
    out = list(ids)
    gold: list[tuple[int, int]] = []
    for pos, tid in enumerate(ids):
        if tid < NUM_SPECIALS:
            continue
        if rng.random() >= policy.select_rate:
            continue
        gold.append((pos, tid))
        u = rng.random()
        if u < policy.mask_frac:
            out[pos] = MASK_ID
        elif u < policy.mask_frac + policy.random_frac:
            out[pos] = rng.randrange(NUM_SPECIALS, len(vocab))
        # else: keep the original token
    return MaskedSequence(input_ids=tuple(out), gold=tuple(gold))


class ProxyModel:
    """Backoff n-gram counter over token ids.

    counts maps a context tuple (length 0 .. order-1) to a Counter of next
    ids. Prediction looks up the longest observed context suffix and falls
    back toward the unigram table.
    """

    def __init__(
        self,
        order: int = 3,
        smoothing_alpha: float = 0.1,
        vocab_size: int = 0,
    ):
        if order < 1:
            raise ValidationError("order must be >= 1")
        if smoothing_alpha <= 0:
            raise ValidationError("smoothing_alpha must be positive")
        self.order = order
        self.smoothing_alpha = smoothing_alpha
        self.vocab_size = vocab_size
        self.counts: dict[tuple[int, ...], Counter] = {}

    def observe_sequence(self, ids: Sequence[int]) -> None:
        ids = tuple(ids)
        for i, tid in enumerate(ids):
            max_ctx = min(self.order - 1, i)
            for k in range(max_ctx + 1):
                ctx = ids[i - k : i]
                self.counts.setdefault(ctx, Counter())[tid] += 1

    def merged(self, other: "ProxyModel") -> "ProxyModel":
        """Joint model: exact sum of both count tables."""
        out = ProxyModel(self.order, self.smoothing_alpha, self.vocab_size)
        for src in (self, other):
            for ctx, ctr in src.counts.items():
                tgt = out.counts.setdefault(ctx, Counter())
                for tid, c in ctr.items():
                    tgt[tid] += c
        return out

    def decayed(self, factor: float) -> "ProxyModel":
        """Scale all counts by `factor`, dropping zeroed entries."""
        if factor < 0:
            raise ValidationError("decay factor must be >= 0")
        out = ProxyModel(self.order, self.smoothing_alpha, self.vocab_size)
        if factor == 0:
            return out
        for ctx, ctr in self.counts.items():
            scaled = Counter({tid: c * factor for tid, c in ctr.items() if c * factor > 0})
            if scaled:
                out.counts[ctx] = scaled
        return out

    def _match_context(self, context: Sequence[int]) -> Counter:
        ctx = tuple(context)[-(self.order - 1) :] if self.order > 1 else ()
        while True:
            ctr = self.counts.get(tuple(ctx))
            if ctr is not None:
                return ctr
            if not ctx:
                return Counter()
            ctx = ctx[1:]

    def probability(self, context: Sequence[int], token_id: int) -> float:
        """Additively smoothed probability at the matched backoff level."""
        ctr = self._match_context(context)
        total = sum(ctr.values())
        a = self.smoothing_alpha
        return (ctr.get(token_id, 0) + a) / (total + a * self.vocab_size)

    def rank(self, context: Sequence[int], gold_id: int) -> int:
        """Competition rank of the gold id: 1 + #tokens strictly more probable.

        Smoothed probability is monotone in the raw count at a fixed
        backoff level, so ranks reduce to count comparisons.
        """
        ctr = self._match_context(context)
        gold_count = ctr.get(gold_id, 0)
        return 1 + sum(1 for c in ctr.values() if c > gold_count)


@dataclass(frozen=True)
class ProxyConfig:
    order: int = 3
    smoothing_alpha: float = 0.1
    decay: float = 0.5
    heldout_frac: float = 0.1


def train_proxy(
    partitions: Sequence,
    vocab: SubwordVocabulary,
    config: ProxyConfig = ProxyConfig(),
    init_from: ProxyModel | None = None,
    max_seq_len: int = DEFAULT_MAX_SEQ_LEN,
) -> ProxyModel:
    """Train a proxy model on partition text.

    Joint mode (no init_from) accumulates counts over all partitions.
    Sequential mode decays the initial model's counts, emulating continued
    pretraining where the earlier language's statistics fade.
    """
    if not partitions:
        raise ValidationError("no partitions to train on")
    if init_from is not None:
        model = init_from.decayed(config.decay)
        model.vocab_size = len(vocab)
    else:
        model = ProxyModel(config.order, config.smoothing_alpha, len(vocab))
    for part in partitions:
        sentences = part.sentences if hasattr(part, "sentences") else [part]
        for sent in sentences:
            ids = vocab.tokenize(sent).ids[:max_seq_len]
            if ids:
                model.observe_sequence(ids)
    return model


def evaluate_mrr(model: ProxyModel, eval_set: Sequence[MaskedSequence]) -> float:
    """Mean reciprocal rank over all gold positions.

    Contexts are the clean left context: gold originals are restored before
    context lookup, so the proxy predicts each selected position from
    uncorrupted history.
    """
    reciprocal_ranks: list[float] = []
    for seq in eval_set:
        restored = list(seq.input_ids)
        for pos, orig in seq.gold:
            restored[pos] = orig
        for pos, orig in seq.gold:
            context = restored[max(0, pos - (model.order - 1)) : pos]
            reciprocal_ranks.append(1.0 / model.rank(context, orig))
    if not reciprocal_ranks:
        raise ValidationError("evaluation set has no gold positions")
    return math.fsum(reciprocal_ranks) / len(reciprocal_ranks)


@dataclass(frozen=True)
class ScoreMatrix:
    languages: tuple[str, ...]
    mono: dict[str, float]
    bilingual: dict[tuple[str, str], float]
    provenance: str = "proxy"  # proxy | ingested
    seeds: tuple[int, ...] = ()

    def __post_init__(self):
        for (s, t) in self.bilingual:
            if s == t:
                raise ValidationError(f"bilingual entry on diagonal: {s}")
            for code in (s, t):
                if code not in self.mono:
                    raise ValidationError(f"bilingual language '{code}' lacks a monolingual score")
        for name, value in itertools.chain(
            self.mono.items(), self.bilingual.items()
        ):
            if not (0.0 < value <= 1.0):
                raise ValidationError(f"MRR out of (0,1] for {name}: {value}")

    def is_complete(self) -> bool:
        langs = self.languages
        return all(
            (s, t) in self.bilingual for s in langs for t in langs if s != t
        ) and all(l in self.mono for l in langs)


def _split_heldout(partition, frac: float):
    sentences = list(partition.sentences)
    if not sentences:
        raise ValidationError(f"{partition.meta.code}: empty partition")
    n_held = max(1, int(len(sentences) * frac))
    if n_held >= len(sentences):
        raise ValidationError(
            f"{partition.meta.code}: partition too small to reserve held-out data"
        )
    return sentences[:-n_held], sentences[-n_held:]


def score_all_pairs(
    partitions: Sequence,
    vocab: SubwordVocabulary,
    policy: MaskingPolicy = MaskingPolicy(),
    config: ProxyConfig = ProxyConfig(),
    seeds: Sequence[int] = (0,),
    regime: str = "joint",
) -> ScoreMatrix:
    """Score every monolingual and ordered bilingual configuration.

    The joint regime trains one model per unordered pair on pooled data and
    evaluates it on both member languages; the sequential regime trains one
    model per ordered pair via decayed continued training. The last
    `heldout_frac` of each partition's sentences is reserved for evaluation
    and never trained on. Values are averaged over the seed list.
    """
    if regime not in ("joint", "sequential"):
        raise ValidationError(f"unknown regime: {regime}")
    if len(partitions) < 2:
        raise ValidationError("need at least two partitions")
    if not seeds:
        raise ValidationError("need at least one seed")
    parts = sorted(partitions, key=lambda p: p.meta.code)
    codes = [p.meta.code for p in parts]
    if len(set(codes)) != len(codes):
        raise ValidationError("duplicate language codes")

    train_ids: dict[str, list[tuple[int, ...]]] = {}
    held_ids: dict[str, list[tuple[int, ...]]] = {}
    for part in parts:
        train_sents, held_sents = _split_heldout(part, config.heldout_frac)
        code = part.meta.code
        train_ids[code] = [
            ids
            for s in train_sents
            if (ids := vocab.tokenize(s).ids[: policy.max_seq_len])
        ]
        held_ids[code] = [
            ids
            for s in held_sents
            if (ids := vocab.tokenize(s).ids[: policy.max_seq_len])
        ]
        if not held_ids[code]:
            raise ValidationError(f"{code}: held-out slice is empty")
        if not train_ids[code]:
            raise ValidationError(f"{code}: training slice is empty")

    def build_model(code: str) -> ProxyModel:
        m = ProxyModel(config.order, config.smoothing_alpha, len(vocab))
        for ids in train_ids[code]:
            m.observe_sequence(ids)
        return m

    mono_models = {code: build_model(code) for code in codes}

    # eval sets depend only on (language, seed), never on the model
    eval_sets: dict[tuple[str, int], list[MaskedSequence]] = {}
    for code in codes:
        for seed in seeds:
            masked = [
                apply_masking(ids, policy, seed, vocab) for ids in held_ids[code]
            ]
            masked = [m for m in masked if m.gold]
            if not masked:
                raise ValidationError(
                    f"{code}: no masked positions in held-out data for seed {seed}"
                )
            eval_sets[(code, seed)] = masked

    def mean_mrr(model: ProxyModel, code: str) -> float:
        return math.fsum(
            evaluate_mrr(model, eval_sets[(code, seed)]) for seed in seeds
        ) / len(seeds)

    mono = {code: mean_mrr(mono_models[code], code) for code in codes}

    bilingual: dict[tuple[str, str], float] = {}
    if regime == "joint":
        for s, t in itertools.combinations(codes, 2):
            pair_model = mono_models[s].merged(mono_models[t])
            bilingual[(s, t)] = mean_mrr(pair_model, t)
            bilingual[(t, s)] = mean_mrr(pair_model, s)
    else:
        for s, t in itertools.permutations(codes, 2):
            m = mono_models[s].decayed(config.decay)
            m.vocab_size = len(vocab)
            for ids in train_ids[t]:
                m.observe_sequence(ids)
            bilingual[(s, t)] = mean_mrr(m, t)

    return ScoreMatrix(
        languages=tuple(codes),
        mono=mono,
        bilingual=bilingual,
        provenance="proxy",
        seeds=tuple(seeds),
    )


# --- ScoreMatrix TSV --------------------------------------------------------

ORIENTATIONS = ("row-source", "column-source")


def write_score_matrix(matrix: ScoreMatrix, path: str | os.PathLike) -> None:
    langs = list(matrix.languages)
    lines = ["# orientation=row-source"]
    if matrix.seeds:
        lines.append("# seeds=" + ",".join(str(s) for s in matrix.seeds))
    lines.append("# provenance=" + matrix.provenance)
    lines.append("src\t" + "\t".join(langs))
    for s in langs:
        cells = []
        for t in langs:
            if s == t:
                v = matrix.mono.get(s)
            else:
                v = matrix.bilingual.get((s, t))
            cells.append("" if v is None else f"{v:.6f}")
        lines.append(s + "\t" + "\t".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def ingest_score_matrix(
    path: str | os.PathLike, known_codes: Iterable[str] | None = None
) -> ScoreMatrix:
    """Parse a ScoreMatrix TSV.

    The `# orientation=` header is mandatory: the source published matrices
    whose caption and row header disagree about direction, so we never
    guess. Values must lie in (0,1]; percent-form matrices must be
    converted before ingestion.
    """
    p = Path(path)
    if not p.exists():
        raise InputError(f"matrix file not found: {p}")
    orientation = None
    header: list[str] | None = None
    rows: dict[str, list[str]] = {}
    for line in p.read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("orientation="):
                orientation = body.split("=", 1)[1].strip()
            continue
        if not line.strip():
            continue
        cells = line.split("\t")
        if header is None:
            header = cells[1:]
            continue
        rows[cells[0]] = cells[1:]
    if orientation is None:
        raise ValidationError("missing mandatory '# orientation=' header")
    if orientation not in ORIENTATIONS:
        raise ValidationError(f"unknown orientation: {orientation}")
    if header is None or not rows:
        raise ValidationError("matrix file has no data")

    langs = header
    if known_codes is not None:
        unknown = [c for c in langs if c not in set(known_codes)]
        if unknown:
            raise ValidationError(f"unknown language codes: {', '.join(unknown)}")

    mono: dict[str, float] = {}
    bilingual: dict[tuple[str, str], float] = {}
    for row_code, cells in rows.items():
        if len(cells) != len(langs):
            raise ValidationError(f"row '{row_code}' has {len(cells)} cells, expected {len(langs)}")
        for col_code, cell in zip(langs, cells):
            if cell == "":
                continue
            try:
                value = float(cell)
            except ValueError as e:
                raise ValidationError(f"bad cell at ({row_code},{col_code}): {cell!r}") from e
            if not (0.0 < value <= 1.0):
                raise ValidationError(
                    f"MRR out of (0,1] at ({row_code},{col_code}): {value}"
                )
            if row_code == col_code:
                mono[row_code] = value
            elif orientation == "row-source":
                bilingual[(row_code, col_code)] = value
            else:
                bilingual[(col_code, row_code)] = value
    missing_diag = [l for l in langs if l not in mono]
    if missing_diag:
        raise ValidationError(
            "missing diagonal (monolingual) entries: " + ", ".join(missing_diag)
        )
    return ScoreMatrix(
        languages=tuple(langs),
        mono=mono,
        bilingual=bilingual,
        provenance="ingested",
        seeds=(),
    )
