"""Shared subword vocabulary: training, greedy tokenization, persistence."""

import pytest

from langtransfer import corpus, subword
from langtransfer.errors import ValidationError

import synthlang


def _partition(text, code="xx"):
    meta = corpus.LanguageMeta(code=code, family="f", script="s")
    return corpus.LanguagePartition(
        meta=meta, sentences=tuple(corpus.split_sentences(text)),
        target_budget=10**6, sample_seed=0,
    )


class TestTraining:
    def test_specials_pinned_to_first_ids(self):
        vocab = subword.train_vocabulary([_partition("aaaa aaaa")], 8)
        assert tuple(vocab.tokens[:5]) == subword.SPECIALS
        assert vocab.id_of("[MASK]") == 4

    def test_single_merge_example(self):
        # alphabet contributes a and ##a; size 8 leaves room for one merge
        vocab = subword.train_vocabulary([_partition("aaaa aaaa")], 8)
        assert len(vocab) == 8
        assert list(vocab.tokens[5:7]) == ["##a", "a"]  # alphabet sorts "##a" first
        assert vocab.tokens[7] in ("aa", "##aa")

    def test_vocab_too_small_raises(self):
        with pytest.raises(ValidationError):
            subword.train_vocabulary([_partition("abcdef")], 7)

    def test_merges_stop_below_pair_count_two(self):
        # every bigram unique: no merge can fire, vocab stays at alphabet size
        vocab = subword.train_vocabulary([_partition("abcd")], 100)
        assert all(len(t.removeprefix("##")) == 1 for t in vocab.tokens[5:])

    def test_deterministic(self):
        parts = synthlang.four_language_fixture()
        a = subword.train_vocabulary(parts, 300)
        b = subword.train_vocabulary(parts, 300)
        assert a.tokens == b.tokens


@pytest.fixture(scope="module")
def vocab():
    return subword.SubwordVocabulary(
        list(subword.SPECIALS) + ["a", "b", "c", "ab", "##c", "##b", "abc"]
    )


class TestTokenization:
    def test_longest_match_first(self, vocab):
        seq = vocab.tokenize("abc")
        assert [vocab.tokens[i] for i in seq.ids] == ["abc"]
        seq = vocab.tokenize("abb")
        assert [vocab.tokens[i] for i in seq.ids] == ["ab", "##b"]

    def test_continuation_only_word_internally(self, vocab):
        seq = vocab.tokenize("cc")
        assert [vocab.tokens[i] for i in seq.ids] == ["c", "##c"]

    def test_unseen_character_is_unk(self, vocab):
        seq = vocab.tokenize("aZb")
        names = [vocab.tokens[i] for i in seq.ids]
        assert "[UNK]" in names

    def test_offsets_reconstruct_nonwhitespace(self, vocab):
        text = "ab  cc\tabc"
        seq = vocab.tokenize(text)
        rebuilt = "".join(text[s:e] for s, e in seq.offsets)
        assert rebuilt == "".join(text.split())

    def test_token_stats_excludes_specials(self, vocab):
        total, unique = vocab.token_stats("ab ab cc")
        assert total == 4  # ab, ab, c, ##c
        assert unique == 3

    def test_whitespace_only_text(self, vocab):
        assert vocab.tokenize("   ").ids == ()


class TestPersistence:
    def test_save_load_round_trip(self, tmp_path):
        parts = synthlang.four_language_fixture()
        vocab = subword.train_vocabulary(parts, 300)
        path = tmp_path / "vocab.txt"
        vocab.save(path)
        back = subword.SubwordVocabulary.load(path)
        assert back.tokens == vocab.tokens
        sample = parts[0].sentences[0]
        assert back.tokenize(sample).ids == vocab.tokenize(sample).ids
