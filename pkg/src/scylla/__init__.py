"""Scylla: domain adaptation of black-box MT systems by frame-semantic terminology injection.

The package is organised as a library plus a ``scylla`` command line tool:

- :mod:`scylla.lexicon` -- the qualia-enriched multilingual frame lexicon
- :mod:`scylla.ingest` -- CoNLL-U ingestion, MWE matching, lemma clustering
- :mod:`scylla.daisy` -- spread-activation frame disambiguation
- :mod:`scylla.providers` -- NMT and bilingual-dictionary provider abstractions
- :mod:`scylla.scylla_s` -- pre-translation terminology injection
- :mod:`scylla.scylla_t` -- post-translation n-best injection search
- :mod:`scylla.metrics` -- BLEU, TER and HTER
- :mod:`scylla.report` -- figure rendering for evaluation reports and graphs
"""

__version__ = "0.1.0"

from scylla.lexicon import Lexicon, load_lexicon, lus_for_lemma, qualia_between, equivalents_of
from scylla.ingest import parse_conllu, match_mwes, build_clusters
from scylla.daisy import output_fn, build_graph, spread, backpropagate_and_score, frames_of_sentence
from scylla.metrics import tokenize_for_eval, ter, hter, bleu
from scylla.scylla_s import inject_source, translate_s
from scylla.scylla_t import jaro_winkler, semantic_similarity, translate_t

__all__ = [
    "Lexicon",
    "load_lexicon",
    "lus_for_lemma",
    "qualia_between",
    "equivalents_of",
    "parse_conllu",
    "match_mwes",
    "build_clusters",
    "output_fn",
    "build_graph",
    "spread",
    "backpropagate_and_score",
    "frames_of_sentence",
    "tokenize_for_eval",
    "ter",
    "hter",
    "bleu",
    "inject_source",
    "translate_s",
    "jaro_winkler",
    "semantic_similarity",
    "translate_t",
]
