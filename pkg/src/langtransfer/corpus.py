"""Corpus ingestion, balanced partition sampling, and balance diagnostics.

Raw text is ingested per language, a fixed character budget of consecutive
sentences is sampled from it, and the sample is validated against the full
corpus by comparing three discrete length distributions with earth mover's
distance. Character counts are Unicode scalar values throughout, never
bytes, so multi-byte scripts are not penalized.
"""

from __future__ import annotations

import math
import os
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import stats
from .errors import InputError, ValidationError

DEFAULT_BUDGET = 10_000_000
DEFAULT_EMD_THRESHOLD = 0.001

# Sentence terminators recognized by the segmenter. A terminator ends a
# sentence only when followed by whitespace or end of text; no abbreviation
# handling.
SENTENCE_TERMINATORS = frozenset(".!?。।؟")


@dataclass(frozen=True)
class LanguageMeta:
    code: str
    family: str
    script: str
    wals_features: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.code:
            raise ValidationError("language code must be non-empty")
        if not self.family or not self.script:
            raise ValidationError(f"{self.code}: family and script must be non-empty")


@dataclass(frozen=True)
class RawCorpus:
    meta: LanguageMeta
    documents: tuple[str, ...]

    @property
    def total_chars(self) -> int:
        return sum(len(d) for d in self.documents)


@dataclass(frozen=True)
class LanguagePartition:
    meta: LanguageMeta
    sentences: tuple[str, ...]
    target_budget: int = DEFAULT_BUDGET
    sample_seed: int = 0

    @property
    def char_count(self) -> int:
        # separator characters are not billed against the budget
        return sum(len(s) for s in self.sentences)

    @property
    def text(self) -> str:
        return "\n".join(self.sentences)

    @property
    def underfull(self) -> bool:
        return self.char_count < math.ceil(0.99 * self.target_budget)


@dataclass(frozen=True)
class DistributionSet:
    sentence_len_words: dict[int, float]
    sentence_len_tokens: dict[int, float]
    word_len_chars: dict[int, float]

    def as_dict(self) -> dict[str, dict[int, float]]:
        return {
            "sentence_len_words": self.sentence_len_words,
            "sentence_len_tokens": self.sentence_len_tokens,
            "word_len_chars": self.word_len_chars,
        }


@dataclass(frozen=True)
class BalanceReport:
    per_distribution_emd: dict[str, float]
    threshold: float
    passed: bool


@dataclass(frozen=True)
class InfoBalanceReport:
    per_language_total_tokens: dict[str, int]
    per_language_unique_tokens: dict[str, int]
    pearson_r: float


def split_sentences(text: str) -> list[str]:
    """Deterministic sentence segmentation.

    Splits after any terminator character that is followed by whitespace or
    end of text; the terminator stays with its sentence and inter-sentence
    whitespace is dropped.
    """
    sentences: list[str] = []
    start = 0
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch in SENTENCE_TERMINATORS and (i + 1 == n or text[i + 1].isspace()):
            sent = text[start : i + 1].strip()
            if sent:
                sentences.append(sent)
            i += 1
            while i < n and text[i].isspace():
                i += 1
            start = i
        else:
            i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _split_documents(blob: str) -> list[str]:
    docs = []
    for chunk in blob.replace("\r\n", "\n").split("\n\n"):
        chunk = chunk.strip()
        if chunk:
            docs.append(chunk)
    return docs


def load_raw_corpus(path: str | os.PathLike, meta: LanguageMeta) -> RawCorpus:
    """Load a directory (or single file) of UTF-8 text into a RawCorpus.

    Blank lines separate documents within a file; files are read in sorted
    name order so the corpus order is stable across platforms.
    """
    p = Path(path)
    if not p.exists():
        raise InputError(f"corpus path does not exist: {p}")
    files = [p] if p.is_file() else sorted(f for f in p.iterdir() if f.is_file())
    documents: list[str] = []
    for f in files:
        data = f.read_bytes()
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise InputError(
                f"non-UTF-8 content in {f} at byte offset {e.start}"
            ) from e
        documents.extend(_split_documents(text))
    return RawCorpus(meta=meta, documents=tuple(documents))


def _start_offset(seed: int, code: str, n_sentences: int) -> int:
    # Mix the seed with the language code so one workspace seed yields
    # independent, reproducible offsets per language.
    h = zlib.crc32(code.encode("utf-8"))
    mixed = (seed * 2654435761 + h) & 0xFFFFFFFF
    mixed ^= mixed >> 16
    return mixed % n_sentences


def sample_partition(
    raw: RawCorpus, budget: int = DEFAULT_BUDGET, seed: int = 0
) -> LanguagePartition:
    """Sample a consecutive run of sentences up to a character budget.

    The run starts at a seed-determined sentence offset, wraps across
    documents in corpus order, and stops at the last full sentence that
    keeps the cumulative character count <= budget. A corpus smaller than
    the budget yields an underfull partition, not an error.
    """
    if budget <= 0:
        raise ValidationError("budget must be positive")
    all_sentences: list[str] = []
    for doc in raw.documents:
        all_sentences.extend(split_sentences(doc))
    if not all_sentences:
        return LanguagePartition(
            meta=raw.meta, sentences=(), target_budget=budget, sample_seed=seed
        )
    start = _start_offset(seed, raw.meta.code, len(all_sentences))
    chosen: list[str] = []
    used = 0
    for k in range(len(all_sentences)):
        sent = all_sentences[(start + k) % len(all_sentences)]
        if used + len(sent) > budget:
            break
        chosen.append(sent)
        used += len(sent)
    return LanguagePartition(
        meta=raw.meta, sentences=tuple(chosen), target_budget=budget, sample_seed=seed
    )


def _sentences_of(source) -> list[str]:
    if isinstance(source, LanguagePartition):
        return list(source.sentences)
    if isinstance(source, RawCorpus):
        sents: list[str] = []
        for doc in source.documents:
            sents.extend(split_sentences(doc))
        return sents
    if isinstance(source, str):
        return split_sentences(source)
    return list(source)


def _normalize(counts: dict[int, int]) -> dict[int, float]:
    total = sum(counts.values())
    return {k: v / total for k, v in sorted(counts.items())}


def length_distributions(source, vocab) -> DistributionSet:
    """Three normalized length histograms for a text source.

    Words are maximal non-whitespace runs; word length is counted in
    Unicode scalar values; token lengths come from the shared subword
    vocabulary.
    """
    sentences = _sentences_of(source)
    if not sentences:
        raise ValidationError("no sentences: length distributions undefined")
    words_per_sent: dict[int, int] = {}
    tokens_per_sent: dict[int, int] = {}
    word_lens: dict[int, int] = {}
    for sent in sentences:
        words = sent.split()
        words_per_sent[len(words)] = words_per_sent.get(len(words), 0) + 1
        for w in words:
            word_lens[len(w)] = word_lens.get(len(w), 0) + 1
        n_tok = len(vocab.tokenize(sent).ids)
        tokens_per_sent[n_tok] = tokens_per_sent.get(n_tok, 0) + 1
    return DistributionSet(
        sentence_len_words=_normalize(words_per_sent),
        sentence_len_tokens=_normalize(tokens_per_sent),
        word_len_chars=_normalize(word_lens),
    )


def validate_balance(
    sample: DistributionSet,
    full: DistributionSet,
    threshold: float = DEFAULT_EMD_THRESHOLD,
) -> BalanceReport:
    """Compare sample vs. full length distributions with 1-D EMD."""
    emds = {
        name: stats.emd_1d(s_hist, f_hist)
        for (name, s_hist), f_hist in zip(
            sample.as_dict().items(), full.as_dict().values()
        )
    }
    return BalanceReport(
        per_distribution_emd=emds,
        threshold=threshold,
        passed=all(v < threshold for v in emds.values()),
    )


def information_balance(
    partitions: Sequence[LanguagePartition], vocab
) -> InfoBalanceReport:
    """Correlate total vs. unique token counts across languages.

    A strong positive correlation suggests the partitions carry comparable
    amounts of information per character budget.
    """
    if len(partitions) < 3:
        raise ValidationError("information balance needs >= 3 partitions")
    totals: dict[str, int] = {}
    uniques: dict[str, int] = {}
    for part in sorted(partitions, key=lambda p: p.meta.code):
        total, unique = vocab.token_stats(part.text)
        if total == 0:
            raise ValidationError(f"{part.meta.code}: partition tokenizes to nothing")
        totals[part.meta.code] = total
        uniques[part.meta.code] = unique
    codes = sorted(totals)
    r = stats.pearson_r([float(totals[c]) for c in codes], [float(uniques[c]) for c in codes])
    return InfoBalanceReport(
        per_language_total_tokens=totals,
        per_language_unique_tokens=uniques,
        pearson_r=r,
    )


# --- partition files --------------------------------------------------------


def write_partition(partition: LanguagePartition, out_dir: str | os.PathLike) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    code = partition.meta.code
    (out / f"{code}.partition.txt").write_text(partition.text, encoding="utf-8")
    meta_lines = [
        f"code={code}",
        f"family={partition.meta.family}",
        f"script={partition.meta.script}",
        f"char_count={partition.char_count}",
        f"seed={partition.sample_seed}",
        f"budget={partition.target_budget}",
    ]
    (out / f"{code}.partition.meta").write_text(
        "\n".join(meta_lines) + "\n", encoding="utf-8"
    )


def read_partition(directory: str | os.PathLike, code: str) -> LanguagePartition:
    d = Path(directory)
    txt_path = d / f"{code}.partition.txt"
    meta_path = d / f"{code}.partition.meta"
    if not txt_path.exists() or not meta_path.exists():
        raise InputError(f"partition files for '{code}' not found in {d}")
    kv: dict[str, str] = {}
    for line in meta_path.read_text(encoding="utf-8").splitlines():
        if "=" in line:
            k, v = line.split("=", 1)
            kv[k.strip()] = v.strip()
    meta = LanguageMeta(code=kv["code"], family=kv["family"], script=kv["script"])
    text = txt_path.read_text(encoding="utf-8")
    sentences = tuple(s for s in text.split("\n") if s)
    return LanguagePartition(
        meta=meta,
        sentences=sentences,
        target_budget=int(kv.get("budget", DEFAULT_BUDGET)),
        sample_seed=int(kv.get("seed", 0)),
    )


def list_partitions(directory: str | os.PathLike) -> list[LanguagePartition]:
    d = Path(directory)
    if not d.is_dir():
        raise InputError(f"partition directory not found: {d}")
    codes = sorted(
        f.name[: -len(".partition.txt")]
        for f in d.iterdir()
        if f.name.endswith(".partition.txt")
    )
    return [read_partition(d, code) for code in codes]
