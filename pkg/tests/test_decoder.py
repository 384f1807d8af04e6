import math
import random

import pytest

from morphsmt import decoder, lm, morpho
from morphsmt.phrasex import PhraseEntry, PhraseTable


def entry(src, tgt, phi_f=1.0, phi_b=1.0, lex_f=1.0, lex_b=1.0, extras=()):
    return PhraseEntry(tuple(src), tuple(tgt), phi_f, phi_b, lex_f, lex_b,
                       math.e, 1, frozenset({(0, 0)}), tuple(extras))


def table(entries, granularity="morpheme", **kw):
    return PhraseTable({(e.source, e.target): e for e in entries}, granularity, **kw)


def tiny_lms(morph_corpus, word_corpus):
    lm_m = lm.train_lm(morph_corpus, 2, "witten-bell")
    lm_w = lm.train_lm(word_corpus, 2, "witten-bell")
    return lm_m, lm_w


def test_single_option():
    src = morpho.parse_segmented_line("a/STM")
    tab = table([entry(("a/STM",), ("x/STM",))])
    lm_m, lm_w = tiny_lms([["x/STM"]], [["x"]])
    h = decoder.decode(src, tab, lm_m, lm_w, decoder.default_weights())
    assert decoder.target_tokens(h) == ("x/STM",)


def test_score_equals_weighted_features():
    src = morpho.parse_segmented_line("a/STM b/STM")
    tab = table([
        entry(("a/STM",), ("x/STM",), 0.5),
        entry(("b/STM",), ("y/STM",), 0.5),
        entry(("a/STM", "b/STM"), ("z/STM",), 0.9),
    ])
    lm_m, lm_w = tiny_lms([["x/STM", "y/STM"], ["z/STM"]], [["x", "y"], ["z"]])
    weights = decoder.default_weights()
    for h in decoder.search(src, tab, lm_m, lm_w, weights, None, 0):
        assert h.score == pytest.approx(decoder.dot(weights, h.features), abs=1e-9)


def test_score_decomposes_over_extensions():
    src = morpho.parse_segmented_line("a/STM b/STM")
    tab = table([
        entry(("a/STM",), ("x/STM+", "q/SUF"), 0.5),
        entry(("b/STM",), ("y/STM",), 0.5),
    ])
    lm_m, lm_w = tiny_lms([["x/STM+", "q/SUF", "y/STM"]], [["xq", "y"]])
    weights = decoder.default_weights()
    best = decoder.decode(src, tab, lm_m, lm_w, weights, None, 0)
    # recompute features offline from the target token stream
    tokens = decoder.target_tokens(best)
    offline = {
        "lm_morph": lm.sentence_logprob(lm_m, tokens),
        "lm_word": lm.sentence_logprob(lm_w, morpho.words_from_tokens(tokens)),
        "phi_fwd": math.log(0.5) * 2,
        "phi_bwd": 0.0,
        "lex_fwd": 0.0,
        "lex_bwd": 0.0,
        "phrase_penalty": 2.0,
        "word_penalty": 2.0,
    }
    for name, value in offline.items():
        assert best.features.get(name, 0.0) == pytest.approx(value, abs=1e-9), name


def test_oov_copies_through_as_own_word():
    src = morpho.parse_segmented_line("zz/STM+ q/SUF")
    tab = table([entry(("a/STM",), ("x/STM",))])
    lm_m, lm_w = tiny_lms([["x/STM"]], [["x"]])
    h = decoder.decode(src, tab, lm_m, lm_w, decoder.default_weights(), None, 0)
    assert decoder.target_tokens(h) == ("zz/STM+", "q/SUF")
    assert h.features["oov"] == 1.0
    assert morpho.words_from_tokens(decoder.target_tokens(h)) == ["zzq"]


def test_phi_only_weights_pick_per_word_argmax():
    src = morpho.parse_segmented_line("a/STM b/STM")
    tab = table([
        entry(("a/STM",), ("x1/STM",), 0.8),
        entry(("a/STM",), ("x2/STM",), 0.2),
        entry(("b/STM",), ("y1/STM",), 0.3),
        entry(("b/STM",), ("y2/STM",), 0.7),
    ])
    lm_m, lm_w = tiny_lms([["x1/STM"]], [["x1"]])
    weights = {"phi_fwd": 1.0}
    h = decoder.decode(src, tab, None, None, weights, None, 0)
    assert decoder.target_tokens(h) == ("x1/STM", "y2/STM")
    assert h.score == pytest.approx(math.log(0.8) + math.log(0.7))


def test_word_lm_weight_zero_makes_grouping_irrelevant():
    # equal morpheme sequences grouped differently: same score when lm_word=0
    src = morpho.parse_segmented_line("a/STM")
    t1 = table([entry(("a/STM",), ("x/STM+", "y/SUF"))])
    t2 = table([entry(("a/STM",), ("x/STM", "y/STM"))])
    lm_m, lm_w = tiny_lms([["x/STM+", "y/SUF"], ["x/STM", "y/STM"]], [["xy"], ["x", "y"]])
    weights = {"lm_morph": 1.0, "lm_word": 0.0, "phi_fwd": 1.0, "word_penalty": 0.0}
    h1 = decoder.decode(src, t1, lm_m, lm_w, weights, None, 0)
    h2 = decoder.decode(src, t2, lm_m, lm_w, weights, None, 0)
    m1 = h1.features["lm_morph"]
    m2 = h2.features["lm_morph"]
    # the twin state is carried but inert: scores agree iff morph streams agree
    assert m1 != m2 or h1.score == pytest.approx(h2.score)
    tok1 = [morpho.split_token_string(t)[0] for t in decoder.target_tokens(h1)]
    tok2 = [morpho.split_token_string(t)[0] for t in decoder.target_tokens(h2)]
    assert tok1 == tok2


def test_distortion_limit_zero_is_monotone():
    src = morpho.parse_segmented_line("a/STM b/STM")
    tab = table([
        entry(("a/STM",), ("x/STM",)),
        entry(("b/STM",), ("y/STM",)),
    ])
    h = decoder.decode(src, tab, None, None, {"phi_fwd": 1.0}, None, 0)
    assert h.features.get("distortion", 0.0) == 0.0
    assert decoder.target_tokens(h) == ("x/STM", "y/STM")


def test_coverage_strictly_grows():
    src = morpho.parse_segmented_line("a/STM b/STM c/STM")
    tab = table([entry((f"{w}/STM",), (f"{w}{w}/STM",)) for w in "abc"])
    h = decoder.decode(src, tab, None, None, {"phi_fwd": 1.0}, None, 6)
    seen = []
    node = h
    while node is not None:
        seen.append(node.n_covered)
        node = node.parent
    assert seen == sorted(seen, reverse=True)
    assert len(set(seen)) == len(seen)


def test_word_granularity_system():
    src = cliless_words(["hello", "world"])
    tab = table([
        entry(("hello",), ("moi",)),
        entry(("world",), ("maailma",)),
        entry(("hello", "world"), ("moi", "maailma")),
    ], granularity="word")
    lm_w = lm.train_lm([["moi", "maailma"]], 2, "witten-bell")
    weights = decoder.default_weights(with_morph_lm=False)
    h = decoder.decode(src, tab, None, lm_w, weights, None, 0)
    assert decoder.target_tokens(h) == ("moi", "maailma")
    assert morpho.words_from_tokens(decoder.target_tokens(h)) == ["moi", "maailma"]


def cliless_words(words):
    return morpho.MorphSentence(tuple(
        morpho.MorphToken(w, morpho.MorphTag.STM, False) for w in words
    ))


def test_nbest_sorted_distinct_and_consistent():
    src = morpho.parse_segmented_line("a/STM b/STM")
    tab = table([
        entry(("a/STM",), ("x1/STM",), 0.8),
        entry(("a/STM",), ("x2/STM",), 0.2),
        entry(("b/STM",), ("y1/STM",), 0.6),
        entry(("b/STM",), ("y2/STM",), 0.4),
    ])
    lm_m, lm_w = tiny_lms([["x1/STM", "y1/STM"]], [["x1", "y1"]])
    weights = decoder.default_weights()
    lists = decoder.nbest(src, tab, lm_m, lm_w, weights, None, 0, 10)
    assert len(lists) == 4
    surfaces = [e.tokens for e in lists]
    assert len(set(surfaces)) == len(surfaces)
    scores = [e.score for e in lists]
    assert scores == sorted(scores, reverse=True)
    for e in lists:
        assert e.score == pytest.approx(decoder.dot(weights, e.features), abs=1e-9)


def test_nbest_single_option_list_of_one():
    src = morpho.parse_segmented_line("a/STM")
    tab = table([entry(("a/STM",), ("x/STM",))])
    lists = decoder.nbest(src, tab, None, None, {"phi_fwd": 1.0}, None, 0, 5)
    assert len(lists) == 1


def test_trace_reports_word_spans():
    src = morpho.parse_segmented_line("aa/STM+ b/SUF c/STM")
    tab = table([
        entry(("aa/STM+", "b/SUF"), ("x/STM",)),
        entry(("c/STM",), ("y/STM+", "z/SUF")),
    ])
    h = decoder.decode(src, tab, None, None, {"phi_fwd": 1.0}, None, 0)
    got = decoder.trace(h, src)
    assert got == [
        (0, 1, ("aab",), ("x",)),
        (1, 2, ("c",), ("yz",)),
    ]


def test_nbest_file_roundtrip(tmp_path):
    src = morpho.parse_segmented_line("a/STM")
    tab = table([entry(("a/STM",), ("x/STM",), 0.5)])
    lm_m, lm_w = tiny_lms([["x/STM"]], [["x"]])
    lists = [decoder.nbest(src, tab, lm_m, lm_w, decoder.default_weights(), None, 0, 5)]
    path = tmp_path / "nbest.txt"
    decoder.write_nbest(path, lists)
    back = decoder.read_nbest(path)
    assert back == lists


def test_weights_file_roundtrip(tmp_path):
    weights = decoder.default_weights(n_extras=2)
    path = tmp_path / "weights.tsv"
    decoder.write_weights(path, weights)
    assert decoder.read_weights(path) == weights


def exhaustive_monotone_best(src_words, options, lm_m, lm_w, weights):
    """Independent oracle: enumerate all monotone segmentations, score offline."""
    n = len(src_words)
    best = [None]

    def score(chosen):
        feats = {}
        tokens = []
        for opt in chosen:
            tokens.extend(opt.target)
            for k, v in opt.tm_features:
                feats[k] = feats.get(k, 0.0) + v
        feats["word_penalty"] = float(len(morpho.words_from_tokens(tokens)))
        if lm_m is not None:
            feats["lm_morph"] = lm.sentence_logprob(lm_m, tokens)
        if lm_w is not None:
            feats["lm_word"] = lm.sentence_logprob(
                lm_w, morpho.words_from_tokens(tokens))
        return decoder.dot(weights, feats)

    def rec(pos, chosen):
        if pos == n:
            s = score(chosen)
            if best[0] is None or s > best[0]:
                best[0] = s
            return
        for opt in options:
            if opt.start == pos:
                rec(opt.end, chosen + [opt])

    rec(0, [])
    return best[0]


def test_matches_exhaustive_search_on_random_instances():
    rng = random.Random(99)
    for _ in range(40):
        n_words = rng.randint(1, 4)
        words = [f"w{i}/STM" for i in range(n_words)]
        src = morpho.parse_segmented_line(" ".join(words))
        entries = []
        vocab = []
        for i in range(n_words):
            for o in range(rng.randint(1, 3)):
                tgt = (f"t{i}{o}/STM",)
                vocab.append(tgt[0])
                entries.append(entry((words[i],), tgt, rng.uniform(0.05, 1.0),
                                     rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0),
                                     rng.uniform(0.05, 1.0)))
        for i in range(n_words - 1):
            if rng.random() < 0.5:
                tgt = (f"p{i}/STM+", f"s{i}/SUF")
                vocab.extend(tgt)
                entries.append(entry(tuple(words[i:i + 2]), tgt,
                                     rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0),
                                     rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0)))
        tab = table(entries)
        lm_m = lm.train_lm([[v] for v in vocab], 2, "witten-bell")
        lm_w = lm.train_lm([[morpho.split_token_string(v)[0]] for v in vocab], 2,
                           "witten-bell")
        weights = decoder.default_weights()
        got = decoder.decode(src, tab, lm_m, lm_w, weights, None, 0)
        want = exhaustive_monotone_best(words, decoder.build_options(src, tab),
                                        lm_m, lm_w, weights)
        assert got.score == pytest.approx(want, abs=1e-9)
