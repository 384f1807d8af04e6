import pytest

from morphsmt import mert, metrics
from morphsmt.decoder import NBestEntry
from morphsmt.mert import Candidate, line_search, mert_run


def cand(words, feats, ref):
    return Candidate(tuple(words), dict(feats), metrics.bleu_stats(tuple(words), tuple(ref)))


REF = ("a", "b", "c", "d")


def test_constant_features_return_step_zero():
    pool = [[cand(["a", "b"], {"f": 1.0}, REF), cand(["a", "c"], {"f": 1.0}, REF)]]
    step, _ = line_search(pool, None, {"f": 1.0}, {"f": 1.0})
    assert step == 0.0


def test_crossing_candidates_step_beyond_crossing():
    good = cand(REF, {"f": 1.0}, REF)
    bad = cand(["x", "y"], {"f": 0.0}, REF)
    # scores: good = -2 + step, bad = 0; they cross at step 2
    step, bleu = line_search([[good, bad]], None, {"f": -2.0}, {"f": 1.0})
    assert step > 2.0
    assert bleu == 1.0


def test_search_never_worse_than_step_zero():
    pools = [
        [[cand(REF, {"f": -1.0}, REF), cand(["a", "b"], {"f": 1.0}, REF)]],
        [[cand(["z"], {"f": 2.0, "g": 1.0}, REF), cand(REF, {"f": 1.0}, REF)]],
    ]
    for pool in pools:
        weights = {"f": 0.5, "g": -0.25}
        base = mert.select_bleu(mert._ensure_candidates(pool, None), weights)
        for direction in ({"f": 1.0}, {"g": 1.0}, {"f": -1.0, "g": 2.0}):
            _, bleu = line_search(pool, None, weights, direction)
            assert bleu >= base - 1e-12


def test_line_search_accepts_raw_pairs_with_refs():
    pool = [[(("a/STM+", "b/SUF"), {"f": 1.0})]]
    step, bleu = line_search(pool, [("ab",)], {"f": 0.0}, {"f": 1.0})
    assert step == 0.0 and bleu > 0.0


def fake_handle(per_iteration_lists):
    """Returns candidates independent of the weights."""

    def handle(_weights):
        return per_iteration_lists

    return handle


def test_singleton_nbests_leave_weights_unchanged():
    lists = [[NBestEntry(("a/STM+", "b/SUF"), {"phi_fwd": -1.0}, -1.0)]]
    got = mert.mert([("ab",)], {"phi_fwd": 0.7}, fake_handle(lists), max_iters=4)
    assert got == {"phi_fwd": 0.7}


def test_optimizes_word_bleu_not_morpheme_bleu():
    """Word-BLEU and m-BLEU rank two candidates oppositely; word wins."""
    filler_ref_w = ("w", "x", "y", "z", "q")
    filler_tokens = ("w/STM", "x/STM", "y/STM", "z/STM", "q/STM")
    contested_ref_w = ("ab", "c", "d", "e")
    ref_morphs = ("a/STM+", "b/SUF", "c/STM", "d/STM", "e/STM")
    cand_a = ("ab/STM", "c/STM", "d/STM", "e/STM")       # perfect words, odd morphs
    cand_b = ("a/STM", "b/SUF", "c/STM", "d/STM", "e/STM")  # close morphs, bad words

    # sanity: the two metrics really do disagree
    word_a = metrics.bleu(
        [filler_ref_w, ("ab", "c", "d", "e")], [filler_ref_w, contested_ref_w]
    ).score
    word_b = metrics.bleu(
        [filler_ref_w, ("a", "b", "c", "d", "e")], [filler_ref_w, contested_ref_w]
    ).score
    morph_a = metrics.m_bleu([filler_tokens, cand_a], [filler_tokens, ref_morphs]).score
    morph_b = metrics.m_bleu([filler_tokens, cand_b], [filler_tokens, ref_morphs]).score
    assert word_a > word_b
    assert morph_a < morph_b

    lists = [
        [NBestEntry(filler_tokens, {"f": 0.0}, 0.0)],
        [NBestEntry(cand_a, {"f": 1.0}, -1.0), NBestEntry(cand_b, {"f": -1.0}, 1.0)],
    ]
    weights = mert.mert(
        [filler_ref_w, contested_ref_w], {"f": -1.0}, fake_handle(lists), max_iters=5
    )
    assert weights["f"] * 1.0 > weights["f"] * -1.0  # candidate A selected


def test_scale_invariance_of_initial_selection():
    lists = [[
        NBestEntry(("a/STM", "b/STM"), {"f": 2.0, "g": -1.0}, 0.0),
        NBestEntry(("a/STM",), {"f": 1.0, "g": 3.0}, 0.0),
    ]]
    refs = [("a", "b")]
    s1 = mert_run(refs, {"f": 1.0, "g": 0.5}, fake_handle(lists), max_iters=1)
    s2 = mert_run(refs, {"f": 2.0, "g": 1.0}, fake_handle(lists), max_iters=1)
    assert s1.history[0] == pytest.approx(s2.history[0], abs=1e-12)


def test_pool_only_grows_and_dedups():
    lists_by_iter = [
        [[NBestEntry(("a/STM",), {"f": 1.0}, 0.0)]],
        [[NBestEntry(("a/STM",), {"f": 1.0}, 0.0),
          NBestEntry(("b/STM",), {"f": 2.0}, 0.0)]],
    ]
    calls = {"n": 0}

    def handle(_weights):
        lists = lists_by_iter[min(calls["n"], 1)]
        calls["n"] += 1
        return lists

    state = mert_run([("a",)], {"f": 1.0}, handle, max_iters=2, epsilon=1e-9)
    assert len(state.pool[0]) == 2


def test_empty_dev_is_error():
    with pytest.raises(ValueError):
        mert.mert([], {"f": 1.0}, fake_handle([]), max_iters=1)


def test_returns_argmax_over_iterations():
    # iteration 2 adds a candidate that can only lower selected BLEU at any
    # weight; best weights should come from the best iteration
    good = NBestEntry(("a", "b"), {"f": 1.0}, 0.0)
    trap = NBestEntry(("z", "z", "z", "z", "z", "z"), {"f": 5.0}, 0.0)
    seq = [[[good]], [[good, trap]]]
    calls = {"n": 0}

    def handle(_weights):
        out = seq[min(calls["n"], 1)]
        calls["n"] += 1
        return out

    state = mert_run([("a", "b")], {"f": 1.0}, handle, max_iters=3, epsilon=1e-12)
    assert state.best_bleu == max(state.history)
