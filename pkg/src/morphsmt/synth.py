"""Deterministic synthetic bitext for desk-scale runs and tests.

A toy language pair: source words are stem(+suffix), target words mirror them
through fixed stem/suffix maps and pick up an extra case suffix after the
function word "zu", so the target side is the morphologically richer one.
Occasional local reordering keeps the distortion features alive.  Everything
flows from one seeded RNG; the same seed always yields byte-identical files.
"""

from __future__ import annotations

import random
from pathlib import Path

STEM_MAP = {
    "bal": "laba", "dor": "roda", "fem": "mefa", "gat": "taga",
    "hil": "liha", "jun": "nuja", "kap": "paka", "lem": "mela",
    "mon": "noma", "nir": "rina", "pol": "lopa", "qof": "foqa",
    "ras": "sara", "sil": "lisa", "tam": "mata", "vur": "ruva",
}
FUNC_MAP = {"zu": "su", "ri": "ja", "bo": "ke"}
SUF_MAP = {"s": "t", "ed": "nut"}
CASE_SUF = "ssa"  # target case marker triggered by a preceding "zu"

DEFAULT_SEED = 7
DEFAULT_SIZES = (500, 50, 50)  # train, dev, test

_STEMS = sorted(STEM_MAP)
_FUNCS = sorted(FUNC_MAP)


def _content_word(rng: random.Random, case: bool):
    stem = rng.choice(_STEMS)
    suf = rng.choice(("", "", "s", "ed"))
    src_morphs = [f"{stem}/STM+", f"{suf}/SUF"] if suf else [f"{stem}/STM"]
    tgt_sufs = ([SUF_MAP[suf]] if suf else []) + ([CASE_SUF] if case else [])
    tgt_morphs = [f"{STEM_MAP[stem]}/STM{'+' if tgt_sufs else ''}"]
    for i, ts in enumerate(tgt_sufs):
        cont = "+" if i + 1 < len(tgt_sufs) else ""
        tgt_morphs.append(f"{ts}/SUF{cont}")
    return stem + suf, src_morphs, STEM_MAP[stem] + "".join(tgt_sufs), tgt_morphs


def make_pair(rng: random.Random):
    """One sentence pair: (src words, src morphs, tgt words, tgt morphs)."""
    n = rng.randint(3, 8)
    src_words, tgt_units = [], []  # tgt_units: (word, morphs) so swaps stay aligned
    src_morphs: list[str] = []
    case_next = False
    for _ in range(n):
        if rng.random() < 0.25:
            f = rng.choice(_FUNCS)
            src_words.append(f)
            src_morphs.append(f"{f}/STM")
            tgt_units.append((FUNC_MAP[f], [f"{FUNC_MAP[f]}/STM"]))
            case_next = f == "zu"
        else:
            w, sm, tw, tm = _content_word(rng, case_next)
            src_words.append(w)
            src_morphs.extend(sm)
            tgt_units.append((tw, tm))
            case_next = False
    if len(tgt_units) >= 2 and rng.random() < 0.15:
        k = rng.randrange(len(tgt_units) - 1)
        tgt_units[k], tgt_units[k + 1] = tgt_units[k + 1], tgt_units[k]
    tgt_words = [w for w, _ in tgt_units]
    tgt_morphs = [m for _, ms in tgt_units for m in ms]
    return src_words, src_morphs, tgt_words, tgt_morphs


def generate(seed: int = DEFAULT_SEED, sizes: tuple[int, int, int] = DEFAULT_SIZES):
    """{'train'|'dev'|'test': list of (src words, src morphs, tgt words, tgt morphs)}."""
    rng = random.Random(seed)
    splits = {}
    for name, size in zip(("train", "dev", "test"), sizes):
        splits[name] = [make_pair(rng) for _ in range(size)]
    return splits


def write_corpus(
    outdir, seed: int = DEFAULT_SEED, sizes: tuple[int, int, int] = DEFAULT_SIZES
) -> dict[str, Path]:
    """Write the 12 corpus files; returns {key: path} as the pipeline names them."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for split, pairs in generate(seed, sizes).items():
        columns = {
            "src_words": [p[0] for p in pairs],
            "src_morphs": [p[1] for p in pairs],
            "tgt_words": [p[2] for p in pairs],
            "tgt_morphs": [p[3] for p in pairs],
        }
        for key, rows in columns.items():
            path = outdir / f"{split}.{key.replace('_', '.')}"
            with open(path, "w", encoding="utf-8") as fh:
                for row in rows:
                    fh.write(" ".join(row) + "\n")
            paths[f"{split}_{key}"] = path
    return paths


SYNTH_CONFIG = """\
# bundled synthetic bitext, desk-scale settings
data.train_src_words = train.src.words
data.train_src_morphs = train.src.morphs
data.train_tgt_words = train.tgt.words
data.train_tgt_morphs = train.tgt.morphs
data.dev_src_words = dev.src.words
data.dev_src_morphs = dev.src.morphs
data.dev_tgt_words = dev.tgt.words
data.dev_tgt_morphs = dev.tgt.morphs
data.test_src_words = test.src.words
data.test_src_morphs = test.src.morphs
data.test_tgt_words = test.tgt.words
data.test_tgt_morphs = test.tgt.morphs
granularity.max_words = 7
granularity.max_morphemes = 10
lm.word_order = 4
lm.morph_order = 5
lm.smoothing = witten-bell
align.iterations = 5
align.heuristic = grow-diag-final-and
decoder.beam = 20
decoder.distortion_limit = 6
decoder.nbest = 50
mert.max_iters = 3
mert.epsilon = 0.0001
merge.method = our-method
merge.alpha = 0.6
merge.primary = wm
seed = 42
"""


def write_workspace(outdir, seed: int = DEFAULT_SEED,
                    sizes: tuple[int, int, int] = DEFAULT_SIZES) -> Path:
    """Corpus files plus a ready-to-run config; returns the config path."""
    outdir = Path(outdir)
    write_corpus(outdir, seed, sizes)
    cfg = outdir / "synth.cfg"
    cfg.write_text(SYNTH_CONFIG, encoding="utf-8")
    return cfg


def bundled_dir() -> Path:
    """Location of the corpus shipped inside the package."""
    return Path(__file__).resolve().parent / "data" / "synth"
