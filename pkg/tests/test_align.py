import random

import pytest
from hypothesis import given, settings, strategies as st

from morphsmt import align
from morphsmt.align import AlignmentMatrix, LexicalTable, ParallelCorpus

from conftest import random_alignment


def toy_corpus():
    return ParallelCorpus([(("a",), ("x",)), (("a", "b"), ("x", "y"))])


def test_model1_concentrates_mass():
    table = align.train_model1(toy_corpus(), 10)
    assert table.prob("x", "a") > table.prob("y", "a")


def test_model1_normalization():
    table = align.train_model1(toy_corpus(), 5)
    for src, total in table.source_sums().items():
        assert total == pytest.approx(1.0, abs=1e-6), src


def test_model1_single_pair_single_iteration():
    table = align.train_model1(ParallelCorpus([(("a",), ("x",))]), 1)
    assert table.prob("x", "a") == pytest.approx(1.0, abs=1e-9)
    assert table.prob("x", None) == pytest.approx(1.0, abs=1e-9)


def test_model1_statelessness():
    corpus = toy_corpus()
    once = align.train_model1(corpus, 10)
    half = align.train_model1(corpus, 5)
    resumed = align.train_model1(corpus, 5, initial=half)
    assert set(once.probs) == set(resumed.probs)
    for key, p in once.probs.items():
        assert resumed.probs[key] == pytest.approx(p, abs=1e-12)


def test_model1_errors():
    with pytest.raises(ValueError):
        align.train_model1(ParallelCorpus([]), 5)
    with pytest.raises(ValueError):
        align.train_model1(toy_corpus(), 0)


def test_em_never_decreases_loglikelihood():
    corpora = [
        toy_corpus(),
        ParallelCorpus([(("a", "b", "c"), ("z", "y")), (("b",), ("y",)),
                        (("c", "a"), ("z", "w"))]),
    ]
    for corpus in corpora:
        prev = None
        for iters in range(1, 9):
            ll = align.corpus_logprob(corpus, align.train_model1(corpus, iters))
            if prev is not None:
                assert ll >= prev - 1e-9
            prev = ll


def test_corpus_loader_drops_empty_pairs():
    corpus = ParallelCorpus.from_sentences([["a"], [], ["b"]], [["x"], ["y"], []])
    assert len(corpus) == 1
    assert corpus.dropped == 2


def test_viterbi_dominant_diagonal():
    table = LexicalTable({("a", "x"): 0.9, ("a", "y"): 0.05,
                          ("b", "x"): 0.05, ("b", "y"): 0.9})
    m = align.viterbi_align(["a", "b"], ["x", "y"], table)
    assert m.links == {(0, 0), (1, 1)}


def test_viterbi_uniform_ties_pick_smallest_index():
    table = LexicalTable({(s, t): 0.5 for s in "ab" for t in "xy"})
    m = align.viterbi_align(["a", "b"], ["x", "y"], table)
    assert m.links == {(0, 0), (0, 1)}


def test_viterbi_unseen_target_gets_no_link():
    table = LexicalTable({("a", "x"): 0.9})
    m = align.viterbi_align(["a"], ["unseen"], table)
    assert m.links == frozenset()


def test_symmetrize_fixed_point():
    m = AlignmentMatrix(frozenset({(0, 0)}), 1, 1)
    for heuristic in ("intersection", "union", "grow-diag-final-and"):
        assert align.symmetrize(m, m, heuristic).links == {(0, 0)}


def test_symmetrize_empty_intersection():
    fwd = AlignmentMatrix(frozenset({(0, 0)}), 2, 2)
    rev = AlignmentMatrix(frozenset({(1, 1)}), 2, 2)
    assert align.symmetrize(fwd, rev, "intersection").links == frozenset()


def test_symmetrize_grow_diag_hand_case():
    fwd = AlignmentMatrix(frozenset({(0, 0), (0, 1)}), 1, 2)
    rev = AlignmentMatrix(frozenset({(0, 0)}), 2, 1)
    got = align.symmetrize(fwd, rev, "grow-diag-final-and")
    assert got.links == {(0, 0), (0, 1)}


def test_symmetrize_dimension_mismatch():
    fwd = AlignmentMatrix(frozenset(), 2, 3)
    rev = AlignmentMatrix(frozenset(), 2, 3)  # should be 3x2
    with pytest.raises(ValueError):
        align.symmetrize(fwd, rev, "union")


@settings(max_examples=200)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_symmetrize_nesting_property(seed):
    rng = random.Random(seed)
    sl, tl = rng.randint(1, 5), rng.randint(1, 5)
    fwd = random_alignment(rng, sl, tl)
    rev = random_alignment(rng, tl, sl)
    inter = align.symmetrize(fwd, rev, "intersection").links
    gdfa = align.symmetrize(fwd, rev, "grow-diag-final-and").links
    union = align.symmetrize(fwd, rev, "union").links
    assert inter <= gdfa <= union


def test_alignment_file_roundtrip(tmp_path):
    mats = [
        AlignmentMatrix(frozenset({(0, 0), (1, 2)}), 2, 3),
        AlignmentMatrix(frozenset(), 1, 1),
    ]
    path = tmp_path / "a.txt"
    align.write_alignments(path, mats)
    back = align.read_alignments(path, [(2, 3), (1, 1)])
    assert [m.links for m in back] == [m.links for m in mats]


def test_lexical_table_roundtrip(tmp_path):
    table = LexicalTable({("a", "x"): 0.25, (None, "x"): 0.5, ("b", "y"): 1.0})
    path = tmp_path / "lex.tsv"
    align.write_lexical_table(path, table)
    back = align.read_lexical_table(path)
    assert back.probs == table.probs


def test_align_corpus_deterministic():
    corpus = toy_corpus()
    a1 = align.align_corpus(corpus, 3)
    a2 = align.align_corpus(corpus, 3)
    assert [m.links for m in a1[0]] == [m.links for m in a2[0]]
    assert a1[1].probs == a2[1].probs
