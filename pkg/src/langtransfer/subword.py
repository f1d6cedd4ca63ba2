"""Shared subword vocabulary: wordpiece-style training and tokenization.

One vocabulary is trained jointly over every language partition in a
workspace. Training greedily merges adjacent piece pairs scored by
pair_count / (left_count * right_count); ties break on the lexicographic
order of the merged token so training is fully deterministic. Every
character observed in the training data is kept as a token (in both
word-initial and continuation form), so UNK can only appear for characters
never seen in training.
"""

from __future__ import annotations

import os
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputError, ValidationError

SPECIALS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")
PAD_ID, UNK_ID, CLS_ID, SEP_ID, MASK_ID = range(5)
NUM_SPECIALS = len(SPECIALS)
CONTINUATION = "##"

_WORD_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class TokenSequence:
    ids: tuple[int, ...]
    offsets: tuple[tuple[int, int], ...]


class SubwordVocabulary:
    def __init__(self, tokens: Sequence[str]):
        if tuple(tokens[:NUM_SPECIALS]) != SPECIALS:
            raise ValidationError("vocabulary must start with the five special tokens")
        self.tokens: tuple[str, ...] = tuple(tokens)
        self._ids = {tok: i for i, tok in enumerate(self.tokens)}
        if len(self._ids) != len(self.tokens):
            raise ValidationError("duplicate token in vocabulary")
        self._max_piece = max(
            (len(t) for t in self.tokens[NUM_SPECIALS:]), default=0
        )

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int | None:
        return self._ids.get(token)

    def tokenize(self, text: str) -> TokenSequence:
        """Greedy longest-match-first wordpiece tokenization.

        Unseen characters become single UNK tokens; offsets cover exactly
        the non-whitespace content of the input.
        """
        ids: list[int] = []
        offsets: list[tuple[int, int]] = []
        for m in _WORD_RE.finditer(text):
            word = m.group()
            base = m.start()
            pos = 0
            while pos < len(word):
                prefix = "" if pos == 0 else CONTINUATION
                end = min(len(word), pos + self._max_piece)
                match_id = None
                match_len = 0
                while end > pos:
                    cand = prefix + word[pos:end]
                    tid = self._ids.get(cand)
                    if tid is not None:
                        match_id, match_len = tid, end - pos
                        break
                    end -= 1
                if match_id is None:
                    # character never seen in training
                    ids.append(UNK_ID)
                    offsets.append((base + pos, base + pos + 1))
                    pos += 1
                else:
                    ids.append(match_id)
                    offsets.append((base + pos, base + pos + match_len))
                    pos += match_len
        return TokenSequence(ids=tuple(ids), offsets=tuple(offsets))

    def token_stats(self, text: str) -> tuple[int, int]:
        """(total, unique) token counts, excluding special tokens."""
        seq = self.tokenize(text)
        regular = [i for i in seq.ids if i >= NUM_SPECIALS]
        return len(regular), len(set(regular))

    def save(self, path: str | os.PathLike) -> None:
        Path(path).write_text("\n".join(self.tokens) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | os.PathLike) -> "SubwordVocabulary":
        p = Path(path)
        if not p.exists():
            raise InputError(f"vocabulary file not found: {p}")
        lines = p.read_text(encoding="utf-8").splitlines()
        return cls([ln for ln in lines if ln])


def _word_counts(sources: Iterable) -> Counter:
    counts: Counter = Counter()
    for src in sources:
        text = src if isinstance(src, str) else src.text
        counts.update(text.split())
    return counts


def train_vocabulary(partitions: Iterable, vocab_size: int) -> SubwordVocabulary:
    """Train the shared vocabulary over all partitions.

    Merging stops when vocab_size is reached or no adjacent pair occurs at
    least twice.
    """
    words = _word_counts(partitions)
    if not words:
        raise ValidationError("no training text for vocabulary")

    alphabet: set[str] = set()
    for w in words:
        for ch in w:
            alphabet.add(ch)
            alphabet.add(CONTINUATION + ch)
    floor = NUM_SPECIALS + len(alphabet)
    if vocab_size < floor:
        raise ValidationError(
            f"vocab_size {vocab_size} below minimum {floor} "
            f"(5 specials + {len(alphabet)} alphabet tokens)"
        )

    # word -> (piece tuple, count); pieces start as single characters
    reps: dict[str, list] = {
        w: [
            tuple([w[0]] + [CONTINUATION + c for c in w[1:]]),
            c,
        ]
        for w, c in words.items()
    }

    merged_tokens: list[str] = []
    tokens_so_far = floor
    while tokens_so_far < vocab_size:
        pair_counts: Counter = Counter()
        piece_counts: Counter = Counter()
        for pieces, count in reps.values():
            for p in pieces:
                piece_counts[p] += count
            for a, b in zip(pieces, pieces[1:]):
                pair_counts[(a, b)] += count
        best_pair = None
        best_score = 0.0
        best_merged = None
        for (a, b), pc in pair_counts.items():
            if pc < 2:
                continue
            merged = a + b[len(CONTINUATION):]
            score = pc / (piece_counts[a] * piece_counts[b])
            if (
                best_pair is None
                or score > best_score
                or (score == best_score and merged < best_merged)
            ):
                best_pair, best_score, best_merged = (a, b), score, merged
        if best_pair is None:
            break
        a, b = best_pair
        for w, (pieces, count) in reps.items():
            if a not in pieces or b not in pieces:
                continue
            out = []
            i = 0
            while i < len(pieces):
                if i + 1 < len(pieces) and pieces[i] == a and pieces[i + 1] == b:
                    out.append(best_merged)
                    i += 2
                else:
                    out.append(pieces[i])
                    i += 1
            reps[w][0] = tuple(out)
        merged_tokens.append(best_merged)
        tokens_so_far += 1

    tokens = list(SPECIALS) + sorted(alphabet) + merged_tokens
    return SubwordVocabulary(tokens)


def tokenize(vocab: SubwordVocabulary, text: str) -> TokenSequence:
    return vocab.tokenize(text)


def token_stats(vocab: SubwordVocabulary, partition) -> tuple[int, int]:
    text = partition if isinstance(partition, str) else partition.text
    return vocab.token_stats(text)
