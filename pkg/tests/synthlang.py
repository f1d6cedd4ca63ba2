"""Synthetic language fixtures shared across the test suite.

Each generator is a near-deterministic word chain: every word in the
inventory has one dominant successor, followed 90% of the time. Two
languages drawn from the same generator share transition structure (and
an alphabet); languages from different generators share nothing beyond
the sentence terminator. Word inventories are small and sentence counts
low on purpose, so a single language's sample leaves real coverage gaps
in the bigram table.
"""

import random

from langtransfer import corpus

LATIN = list("abcdefghijklmnop")
GREEK = list("αβγδεζηθικλμνξοπ")

N_WORDS = 300
NOISE = 0.1
N_SENTENCES = 60
VOCAB_SIZE = 4000  # large enough that frequent words merge into single tokens


def make_inventory(alphabet, n_words, rng):
    words = set()
    while len(words) < n_words:
        length = rng.randrange(3, 7)
        words.add("".join(rng.choice(alphabet) for _ in range(length)))
    return sorted(words)


def make_generator(alphabet, seed, n_words=N_WORDS, noise=NOISE):
    rng = random.Random(seed)
    inventory = make_inventory(alphabet, n_words, rng)
    successor = {w: rng.choice(inventory) for w in inventory}
    return inventory, successor, noise


def sample_sentences(generator, seed, n_sentences=N_SENTENCES):
    inventory, successor, noise = generator
    rng = random.Random(seed)
    sentences = []
    for _ in range(n_sentences):
        word = rng.choice(inventory)
        words = [word]
        for _ in range(rng.randrange(5, 10)):
            word = successor[word] if rng.random() >= noise else rng.choice(inventory)
            words.append(word)
        sentences.append(" ".join(words) + ".")
    return sentences


def sample_language(generator, code, seed, n_sentences=N_SENTENCES,
                    family="synth", script="latin"):
    meta = corpus.LanguageMeta(code=code, family=family, script=script)
    return corpus.LanguagePartition(
        meta=meta,
        sentences=tuple(sample_sentences(generator, seed, n_sentences)),
        target_budget=10**9,
        sample_seed=seed,
    )


def four_language_fixture(base=200):
    """Two languages per generator: aa/ab share one, ba/bb share another."""
    gen_a = make_generator(LATIN, base)
    gen_b = make_generator(GREEK, base + 50)
    return [
        sample_language(gen_a, "aa", base + 11, script="latin"),
        sample_language(gen_a, "ab", base + 12, script="latin"),
        sample_language(gen_b, "ba", base + 13, script="greek"),
        sample_language(gen_b, "bb", base + 14, script="greek"),
    ]


def write_raw_corpora(root, base=200, n_sentences=N_SENTENCES):
    """Lay out per-language raw corpus directories for the CLI pipeline."""
    gen_a = make_generator(LATIN, base)
    gen_b = make_generator(GREEK, base + 50)
    plan = [("aa", gen_a, base + 11), ("ab", gen_a, base + 12),
            ("ba", gen_b, base + 13), ("bb", gen_b, base + 14)]
    for code, gen, seed in plan:
        d = root / code
        d.mkdir(parents=True, exist_ok=True)
        text = " ".join(sample_sentences(gen, seed, n_sentences))
        (d / "corpus.txt").write_text(text, encoding="utf-8")
    return [code for code, _, _ in plan]


def random_score_matrix(rng, n, low=0.005, high=0.1):
    """Complete random ScoreMatrix; values scale by 10 without leaving (0,1]."""
    from langtransfer.proxy_mlm import ScoreMatrix

    codes = tuple(f"l{i}" for i in range(n))
    mono = {c: rng.uniform(low, high) for c in codes}
    bilingual = {
        (s, t): rng.uniform(low, high)
        for s in codes
        for t in codes
        if s != t
    }
    return ScoreMatrix(languages=codes, mono=mono, bilingual=bilingual)
