"""Command-line pipeline: ingestion, stage subcommands, end-to-end systems.

Eight named systems cover the usual grid: the two baselines, each single
enhancement (phr / lm / tune), their combinations, and the merged twin-table
system.  Artifacts land in a run directory under fixed names with a manifest
of input digests and settings, so identical configs give identical bytes.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import align as al
from . import decoder as dec
from . import lm as lmod
from . import merge as mg
from . import mert as mt
from . import metrics as ev
from . import morpho as mo
from . import phrasex as px
from .config import PipelineConfig, load_config

SYSTEMS = (
    "w-system", "m-system", "m+phr", "m+lm", "m+tune",
    "m+phr+lm", "m+phr+lm+tune", "merged",
)


@dataclass(frozen=True)
class SystemPlan:
    granularity: str  # "word" or "morpheme"
    boundary_aware: bool
    word_lm: bool
    morph_lm: bool
    tune: bool
    merged: bool


PLANS = {
    "w-system": SystemPlan("word", False, True, False, False, False),
    "m-system": SystemPlan("morpheme", False, False, True, False, False),
    "m+phr": SystemPlan("morpheme", True, False, True, False, False),
    "m+lm": SystemPlan("morpheme", False, True, True, False, False),
    "m+tune": SystemPlan("morpheme", False, False, True, True, False),
    "m+phr+lm": SystemPlan("morpheme", True, True, True, False, False),
    "m+phr+lm+tune": SystemPlan("morpheme", True, True, True, True, False),
    "merged": SystemPlan("morpheme", True, True, True, False, True),
}


def words_as_sentence(words: Sequence[str]) -> mo.MorphSentence:
    """Word-granularity input wrapped as monomorphemic tokens."""
    return mo.MorphSentence(tuple(
        mo.MorphToken(w, mo.MorphTag.STM, False) for w in words
    ))


def _read_tokens(path) -> list[list[str]]:
    return mo.read_word_file(path)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# pipeline stages
# ---------------------------------------------------------------------------


@dataclass
class CorpusData:
    words: dict[str, list[list[str]]]  # e.g. "train_src" -> sentences
    morphs: dict[str, list[mo.MorphSentence]]


def _load_data(cfg: PipelineConfig) -> CorpusData:
    words = {}
    morphs = {}
    for split in ("train", "dev", "test"):
        for side in ("src", "tgt"):
            words[f"{split}_{side}"] = mo.read_word_file(cfg.paths[f"{split}_{side}_words"])
            morphs[f"{split}_{side}"] = mo.read_segmented_file(cfg.paths[f"{split}_{side}_morphs"])
    return CorpusData(words, morphs)


def _word_table(cfg: PipelineConfig, data: CorpusData):
    corpus = al.ParallelCorpus.from_sentences(
        data.words["train_src"], data.words["train_tgt"], "word"
    )
    alignments, lt_f, lt_b = al.align_corpus(
        corpus, cfg.align_iterations, cfg.align_heuristic
    )
    counts = px.extract_corpus(
        [s for s, _ in corpus.pairs], [t for _, t in corpus.pairs],
        alignments, cfg.max_words,
    )
    table = px.score_phrase_table(counts, lt_f, lt_b, "word", cfg.max_words)
    return table, lt_f, lt_b


def _morph_table(cfg: PipelineConfig, data: CorpusData, boundary_aware: bool):
    src = data.morphs["train_src"]
    tgt = data.morphs["train_tgt"]
    corpus = al.ParallelCorpus.from_sentences(
        [mo.token_strings(s) for s in src], [mo.token_strings(t) for t in tgt],
        "morpheme",
    )
    alignments, lt_f, lt_b = al.align_corpus(
        corpus, cfg.align_iterations, cfg.align_heuristic
    )
    if boundary_aware:
        counts = px.extract_corpus_boundary_aware(src, tgt, alignments, cfg.max_words)
        table = px.score_phrase_table(
            counts, lt_f, lt_b, "morpheme", cfg.max_words, True
        )
    else:
        counts = px.extract_corpus(
            [s for s, _ in corpus.pairs], [t for _, t in corpus.pairs],
            alignments, cfg.max_morphemes,
        )
        table = px.score_phrase_table(
            counts, lt_f, lt_b, "morpheme", cfg.max_morphemes, False
        )
    return table, lt_f, lt_b


def _segmentation_lexicon(data: CorpusData) -> mg.SegmentationLexicon:
    word_lines: list[list[str]] = []
    morph_lines: list[mo.MorphSentence] = []
    for split in ("train", "dev", "test"):
        for side in ("src", "tgt"):
            word_lines.extend(data.words[f"{split}_{side}"])
            morph_lines.extend(data.morphs[f"{split}_{side}"])
    return mg.build_lexicon(word_lines, morph_lines)


def _merged_table(cfg: PipelineConfig, data: CorpusData):
    pt_m, ltm_f, ltm_b = _morph_table(cfg, data, boundary_aware=True)
    pt_w, ltw_f, ltw_b = _word_table(cfg, data)
    lexicon = _segmentation_lexicon(data)
    pt_wm = mg.retokenize_pt(pt_w, lexicon)
    method = cfg.merge_method
    if method == "our-method":
        return mg.merge_our_method(
            pt_m, pt_wm, pt_w, cfg.merge_alpha, ltm_f, ltm_b, ltw_f, ltw_b
        )
    if method == "interpolation":
        return mg.merge_interpolate(pt_m, pt_wm, cfg.merge_alpha)
    n_features = 1 if method == "add-1" else 2
    primary, secondary = (pt_wm, pt_m) if cfg.merge_primary == "wm" else (pt_m, pt_wm)
    return mg.merge_add_features(primary, secondary, n_features)


def _proximity(cfg: PipelineConfig, data: CorpusData, traces):
    """Translation proximity via src-ref alignments on train+test concatenation."""
    train = al.ParallelCorpus.from_sentences(
        data.words["train_src"], data.words["train_tgt"], "word"
    )
    test = al.ParallelCorpus.from_sentences(
        data.words["test_src"], data.words["test_tgt"], "word"
    )
    combined = train.concat(test)
    table = al.train_model1(combined, cfg.align_iterations)
    alignments = []
    for src, ref in zip(data.words["test_src"], data.words["test_tgt"]):
        alignments.append(al.viterbi_align(src, ref, table))
    return ev.proximity_triples(traces, data.words["test_tgt"], alignments)


def run_pipeline(system: str, cfg: PipelineConfig, run_dir) -> dict[str, Path]:
    if system not in PLANS:
        raise ValueError(f"unknown system {system!r}; expected one of {', '.join(SYSTEMS)}")
    plan = PLANS[system]
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    data = _load_data(cfg)
    artifacts: dict[str, Path] = {}

    if plan.merged:
        table = _merged_table(cfg, data)
    elif plan.granularity == "word":
        table, _, _ = _word_table(cfg, data)
    else:
        table, _, _ = _morph_table(cfg, data, plan.boundary_aware)
    artifacts["pt"] = run_dir / "pt.txt"
    px.write_phrase_table(artifacts["pt"], table)

    smoothing = cfg.lm_smoothing
    lm_m = lm_w = None
    if plan.morph_lm:
        lm_m = lmod.train_lm(
            [mo.token_strings(s) for s in data.morphs["train_tgt"]],
            cfg.lm_morph_order, smoothing,
        )
        artifacts["lm_m"] = run_dir / "lm_m.arpa"
        lmod.write_arpa(artifacts["lm_m"], lm_m)
    if plan.word_lm:
        lm_w = lmod.train_lm(data.words["train_tgt"], cfg.lm_word_order, smoothing)
        artifacts["lm_w"] = run_dir / "lm_w.arpa"
        lmod.write_arpa(artifacts["lm_w"], lm_w)

    weights = dec.default_weights(
        n_extras=table.n_extras,
        with_morph_lm=plan.morph_lm,
        with_word_lm=plan.word_lm,
    )

    if plan.granularity == "word":
        dev_sources = [words_as_sentence(s) for s in data.words["dev_src"]]
        test_sources = [words_as_sentence(s) for s in data.words["test_src"]]
    else:
        dev_sources = data.morphs["dev_src"]
        test_sources = data.morphs["test_src"]

    if plan.tune:
        def handle(wts):
            return [
                dec.nbest(s, table, lm_m, lm_w, wts, cfg.beam,
                          cfg.distortion_limit, cfg.nbest)
                for s in dev_sources
            ]

        state = mt.mert_run(
            [tuple(r) for r in data.words["dev_tgt"]], weights, handle,
            cfg.mert_max_iters, cfg.mert_epsilon, seed=cfg.seed,
        )
        weights = state.best_weights
        artifacts["mert_log"] = run_dir / "mert_log.txt"
        mt.write_mert_log(artifacts["mert_log"], state)

    artifacts["weights"] = run_dir / "weights.tsv"
    dec.write_weights(artifacts["weights"], weights)

    outputs = []
    traces = []
    nbest_lists = []
    for source in test_sources:
        lists = dec.nbest(source, table, lm_m, lm_w, weights, cfg.beam,
                          cfg.distortion_limit, cfg.nbest)
        nbest_lists.append(lists)
        best = dec.decode(source, table, lm_m, lm_w, weights, cfg.beam,
                          cfg.distortion_limit)
        outputs.append(dec.target_tokens(best))
        traces.append(dec.trace(best, source))

    artifacts["output"] = run_dir / "output.txt"
    mo.write_word_lines(artifacts["output"], outputs)
    artifacts["nbest"] = run_dir / "nbest.txt"
    dec.write_nbest(artifacts["nbest"], nbest_lists)
    artifacts["trace"] = run_dir / "trace.txt"
    with open(artifacts["trace"], "w", encoding="utf-8") as fh:
        for sent_id, items in enumerate(traces):
            for start, end, src_words, out_words in items:
                fh.write(f"{sent_id} ||| {start}-{end} ||| "
                         f"{' '.join(src_words)} ||| {' '.join(out_words)}\n")

    hyp_words = [mo.words_from_tokens(toks) for toks in outputs]
    report = {}
    bleu_report = ev.bleu(hyp_words, data.words["test_tgt"])
    _fill_report(report, "bleu", bleu_report)
    lexicon = _segmentation_lexicon(data)
    hyp_morphs = [
        [tok for w in words for tok in lexicon.segment(w)] for words in hyp_words
    ]
    ref_morphs = [mo.token_strings(s) for s in data.morphs["test_tgt"]]
    _fill_report(report, "m_bleu", ev.m_bleu(hyp_morphs, ref_morphs))
    prox = _proximity(cfg, data, traces)
    report["triples"] = str(prox.total)
    report["exact_matches"] = str(prox.exact_matches)
    report["skipped"] = str(prox.skipped)

    artifacts["report"] = run_dir / "report.txt"
    _write_report(artifacts["report"], report)
    artifacts["manifest"] = run_dir / "manifest.txt"
    _write_manifest(artifacts["manifest"], system, cfg)
    return artifacts


def _fill_report(report: dict, prefix: str, r: ev.BleuReport) -> None:
    report[prefix] = f"{r.score:.6f}"
    for n, p in enumerate(r.precisions, start=1):
        report[f"{prefix}_p{n}"] = f"{p:.6f}"
    report[f"{prefix}_bp"] = f"{r.brevity_penalty:.6f}"
    report[f"{prefix}_hyp_len"] = str(r.hyp_length)
    report[f"{prefix}_ref_len"] = str(r.ref_length)


def _write_report(path, report: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in report.items():
            fh.write(f"{key}={value}\n")


def _write_manifest(path, system: str, cfg: PipelineConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"system={system}\n")
        for key, value in cfg.settings_items():
            fh.write(f"{key}={value}\n")
        for key in sorted(cfg.paths):
            fh.write(f"digest.{key}={sha256_file(cfg.paths[key])}\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_segment_apply(args) -> int:
    suffixes = tuple(args.suffixes.split(",")) if args.suffixes else mo.DEFAULT_STUB_SUFFIXES
    sentences = [
        mo.segment_words(words, suffixes) for words in mo.read_word_file(args.input)
    ]
    mo.write_sentences(args.output, sentences)
    return 0


def _cmd_align(args) -> int:
    corpus = al.ParallelCorpus.from_sentences(
        _read_tokens(args.source), _read_tokens(args.target)
    )
    alignments, _, _ = al.align_corpus(corpus, args.iterations, args.heuristic)
    al.write_alignments(args.output, alignments)
    if corpus.dropped:
        print(f"dropped {corpus.dropped} empty-side pairs", file=sys.stderr)
    return 0


def _cmd_extract(args) -> int:
    if args.boundary_aware:
        src = mo.read_segmented_file(args.source)
        tgt = mo.read_segmented_file(args.target)
        src_tok = [mo.token_strings(s) for s in src]
        tgt_tok = [mo.token_strings(t) for t in tgt]
    else:
        src_tok = _read_tokens(args.source)
        tgt_tok = _read_tokens(args.target)
    corpus = al.ParallelCorpus.from_sentences(src_tok, tgt_tok, args.granularity)
    if args.alignments:
        dims = [(len(s), len(t)) for s, t in zip(src_tok, tgt_tok)]
        alignments = al.read_alignments(args.alignments, dims)
        lt_f = al.train_model1(corpus, args.iterations)
        rev = al.ParallelCorpus([(t, s) for s, t in corpus.pairs], corpus.granularity)
        lt_b = al.train_model1(rev, args.iterations)
    else:
        alignments, lt_f, lt_b = al.align_corpus(corpus, args.iterations)
    if args.boundary_aware:
        counts = px.extract_corpus_boundary_aware(src, tgt, alignments, args.max_span)
    else:
        counts = px.extract_corpus(src_tok, tgt_tok, alignments, args.max_span)
    table = px.score_phrase_table(
        counts, lt_f, lt_b, args.granularity, args.max_span, args.boundary_aware
    )
    px.write_phrase_table(args.output, table)
    return 0


def _cmd_lm_train(args) -> int:
    model = lmod.train_lm(_read_tokens(args.input), args.order, args.smoothing)
    lmod.write_arpa(args.output, model)
    return 0


def _cmd_decode(args) -> int:
    table = px.read_phrase_table(args.table, args.granularity)
    lm_m = lmod.read_arpa(args.lm_morph) if args.lm_morph else None
    lm_w = lmod.read_arpa(args.lm_word) if args.lm_word else None
    weights = dec.read_weights(args.weights) if args.weights else dec.default_weights(
        table.n_extras, lm_m is not None, lm_w is not None
    )
    if args.granularity == "word":
        sources = [words_as_sentence(w) for w in mo.read_word_file(args.input)]
    else:
        sources = mo.read_segmented_file(args.input)
    outputs = []
    nbest_lists = []
    for source in sources:
        best = dec.decode(source, table, lm_m, lm_w, weights,
                          args.beam, args.distortion_limit, args.max_span)
        outputs.append(dec.target_tokens(best))
        if args.nbest_output:
            nbest_lists.append(dec.nbest(
                source, table, lm_m, lm_w, weights,
                args.beam, args.distortion_limit, args.nbest, args.max_span,
            ))
    mo.write_word_lines(args.output, outputs)
    if args.nbest_output:
        dec.write_nbest(args.nbest_output, nbest_lists)
    return 0


def _cmd_mert(args) -> int:
    table = px.read_phrase_table(args.table, args.granularity)
    lm_m = lmod.read_arpa(args.lm_morph) if args.lm_morph else None
    lm_w = lmod.read_arpa(args.lm_word) if args.lm_word else None
    if args.granularity == "word":
        sources = [words_as_sentence(w) for w in mo.read_word_file(args.dev_source)]
    else:
        sources = mo.read_segmented_file(args.dev_source)
    refs = [tuple(r) for r in mo.read_word_file(args.dev_refs)]
    initial = dec.read_weights(args.weights) if args.weights else dec.default_weights(
        table.n_extras, lm_m is not None, lm_w is not None
    )

    def handle(wts):
        return [
            dec.nbest(s, table, lm_m, lm_w, wts, args.beam,
                      args.distortion_limit, args.nbest)
            for s in sources
        ]

    state = mt.mert_run(refs, initial, handle, args.max_iters, args.epsilon,
                        seed=args.seed)
    dec.write_weights(args.output, state.best_weights)
    if args.log:
        mt.write_mert_log(args.log, state)
    return 0


def _cmd_eval(args) -> int:
    hyps = mo.read_word_file(args.hyp)
    refs = mo.read_word_file(args.ref)
    report: dict[str, str] = {}
    _fill_report(report, "bleu", ev.bleu(hyps, refs))
    if args.hyp_morphs and args.ref_morphs:
        hyp_m = _read_tokens(args.hyp_morphs)
        ref_m = _read_tokens(args.ref_morphs)
        _fill_report(report, "m_bleu", ev.m_bleu(hyp_m, ref_m))
    if args.compare:
        other = mo.read_word_file(args.compare)
        wins_a = wins_b = 0
        for h, o, r in zip(hyps, other, refs, strict=True):
            sa = ev.bleu_from_stats(ev.bleu_stats(h, r)).score
            sb = ev.bleu_from_stats(ev.bleu_stats(o, r)).score
            wins_a += sa > sb
            wins_b += sb > sa
        report["wins_hyp"] = str(wins_a)
        report["wins_compare"] = str(wins_b)
        if wins_a + wins_b:
            report["p_value"] = repr(ev.sign_test(wins_a, wins_b))
    _write_report(args.output, report)
    print("\n".join(f"{k}={v}" for k, v in report.items()))
    return 0


def _cmd_merge_pt(args) -> int:
    if args.method in ("add-1", "add-2"):
        primary = px.read_phrase_table(args.primary, args.granularity)
        secondary = px.read_phrase_table(args.secondary, args.granularity)
        merged = mg.merge_add_features(
            primary, secondary, 1 if args.method == "add-1" else 2
        )
    elif args.method == "interpolation":
        primary = px.read_phrase_table(args.primary, args.granularity)
        secondary = px.read_phrase_table(args.secondary, args.granularity)
        merged = mg.merge_interpolate(primary, secondary, args.alpha)
    elif args.method == "our-method":
        needed = (args.pt_w, args.lex_m_fwd, args.lex_m_bwd,
                  args.lex_w_fwd, args.lex_w_bwd)
        if any(p is None for p in needed):
            print("our-method needs --pt-w and the four --lex-* tables",
                  file=sys.stderr)
            return 2
        pt_m = px.read_phrase_table(args.primary, "morpheme")
        pt_wm = px.read_phrase_table(args.secondary, "morpheme")
        pt_w = px.read_phrase_table(args.pt_w, "word")
        merged = mg.merge_our_method(
            pt_m, pt_wm, pt_w, args.alpha,
            al.read_lexical_table(args.lex_m_fwd),
            al.read_lexical_table(args.lex_m_bwd),
            al.read_lexical_table(args.lex_w_fwd),
            al.read_lexical_table(args.lex_w_bwd),
        )
    else:
        print(f"unknown merge method: {args.method}", file=sys.stderr)
        return 2
    px.write_phrase_table(args.output, merged)
    return 0


def _cmd_pipeline(args) -> int:
    overrides = dict(kv.split("=", 1) for kv in args.set or [])
    cfg = load_config(args.config, overrides)
    artifacts = run_pipeline(args.system, cfg, args.run_dir)
    for name in sorted(artifacts):
        print(f"{name}: {artifacts[name]}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphsmt",
        description="desk-scale hybrid morpheme-word phrase-based SMT",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment-apply", help="stub-segment plain text")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--suffixes", default=None, help="comma-separated suffix list")
    p.set_defaults(func=_cmd_segment_apply)

    p = sub.add_parser("align", help="train IBM Model 1 and write Pharaoh alignments")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--heuristic", default="grow-diag-final-and",
                   choices=["intersection", "union", "grow-diag-final-and"])
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("extract", help="extract and score a phrase table")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--alignments", default=None,
                   help="Pharaoh file; omitted = align internally")
    p.add_argument("--output", required=True)
    p.add_argument("--granularity", default="morpheme", choices=["word", "morpheme"])
    p.add_argument("--boundary-aware", action="store_true")
    p.add_argument("--max-span", type=int, default=7,
                   help="words (boundary-aware/word) or tokens (classic)")
    p.add_argument("--iterations", type=int, default=5)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("lm-train", help="train a backoff n-gram LM, write ARPA")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--smoothing", default="witten-bell",
                   choices=["mle", "witten-bell", "kneser-ney"])
    p.set_defaults(func=_cmd_lm_train)

    p = sub.add_parser("decode", help="translate a file with a phrase table")
    p.add_argument("--input", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--granularity", default="morpheme", choices=["word", "morpheme"])
    p.add_argument("--lm-morph", default=None)
    p.add_argument("--lm-word", default=None)
    p.add_argument("--weights", default=None)
    p.add_argument("--beam", type=int, default=100)
    p.add_argument("--distortion-limit", type=int, default=6)
    p.add_argument("--nbest", type=int, default=100)
    p.add_argument("--nbest-output", default=None)
    p.add_argument("--max-span", type=int, default=None)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("mert", help="tune weights on a dev set (word-level BLEU)")
    p.add_argument("--dev-source", required=True)
    p.add_argument("--dev-refs", required=True, help="word-token references")
    p.add_argument("--table", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--granularity", default="morpheme", choices=["word", "morpheme"])
    p.add_argument("--lm-morph", default=None)
    p.add_argument("--lm-word", default=None)
    p.add_argument("--weights", default=None, help="initial weights file")
    p.add_argument("--beam", type=int, default=100)
    p.add_argument("--distortion-limit", type=int, default=6)
    p.add_argument("--nbest", type=int, default=100)
    p.add_argument("--max-iters", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=0.0001)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--log", default=None)
    p.set_defaults(func=_cmd_mert)

    p = sub.add_parser("eval", help="BLEU/m-BLEU report, optional paired sign test")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp-morphs", default=None)
    p.add_argument("--ref-morphs", default=None)
    p.add_argument("--compare", default=None, help="second hypothesis file")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("merge-pt", help="combine two phrase tables")
    p.add_argument("--method", required=True,
                   choices=["add-1", "add-2", "interpolation", "our-method"])
    p.add_argument("--primary", required=True,
                   help="primary table (pt_m for our-method)")
    p.add_argument("--secondary", required=True,
                   help="secondary table (retokenized pt_w->m for our-method)")
    p.add_argument("--output", required=True)
    p.add_argument("--granularity", default="morpheme", choices=["word", "morpheme"])
    p.add_argument("--alpha", type=float, default=0.6)
    p.add_argument("--pt-w", default=None)
    p.add_argument("--lex-m-fwd", default=None)
    p.add_argument("--lex-m-bwd", default=None)
    p.add_argument("--lex-w-fwd", default=None)
    p.add_argument("--lex-w-bwd", default=None)
    p.set_defaults(func=_cmd_merge_pt)

    p = sub.add_parser("pipeline", help="run a named end-to-end system")
    p.add_argument("system", choices=list(SYSTEMS))
    p.add_argument("--config", required=True)
    p.add_argument("--run-dir", required=True)
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="config override, repeatable")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
