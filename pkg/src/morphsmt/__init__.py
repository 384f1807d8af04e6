"""Desk-scale phrase-based SMT with a hybrid morpheme-word translation model.

Morphemes are the translation unit; word boundaries are respected during
phrase extraction, language-model scoring (twin morpheme/word LMs), and
tuning (word-level BLEU over morpheme output).  Phrase tables built at the
two granularities can be merged four different ways.
"""

__version__ = "0.1.0"

from . import align, cli, config, decoder, lm, merge, mert, metrics, morpho, phrasex, synth

__all__ = [
    "align", "cli", "config", "decoder", "lm", "merge", "mert",
    "metrics", "morpho", "phrasex", "synth", "__version__",
]
