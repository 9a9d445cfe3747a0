"""Shared test helpers: random end-to-end fixtures and independent oracles."""

import random
from collections import Counter

from scylla.daisy import ActivationGraph, assignments_for_sentence, output_fn
from scylla.ingest import ParsedSentence, ParsedToken
from scylla.lexicon import loads_lexicon
from scylla.providers import DictionaryEntry, MockTranslationProvider
from scylla.scylla_t import align, frames_of_target_text, injection_points, iter_candidates


class DictDictionary:
    """In-memory dictionary for generated fixtures."""

    def __init__(self, entries):
        self.entries = entries

    def lookup(self, word, source_language, target_language):
        return self.entries.get((word.casefold(), source_language, target_language))


def naive_similarity(frames_a, frames_b) -> int:
    """Brute-force double sum of the equality indicator over all cross pairs."""
    total = 0
    for fa in frames_a:
        for fb in frames_b:
            if fa == fb:
                total += 1
    return total


def flat_sentence(words: list[str], sent_id: str = "r") -> ParsedSentence:
    """Flat NOUN parse: first token is the root, the rest attach to it."""
    tokens = tuple(
        ParsedToken(
            index=i,
            form=w,
            lemma=w,
            upos="NOUN",
            head=0 if i == 1 else 1,
            deprel="root" if i == 1 else "dep",
        )
        for i, w in enumerate(words, start=1)
    )
    return ParsedSentence(sent_id=sent_id, text=" ".join(words), tokens=tokens)


def random_injection_fixture(rng: random.Random):
    """A random source sentence, lexicon, dictionary and mock n-best list.

    Source words carry single-sense LUs; each has up to two target-language
    equivalents evoking the same frame.  Hypotheses mix equivalents, loose
    dictionary-only translations and out-of-lexicon fillers, so alignment
    points vary in replacement count.  Candidate totals stay at or below
    100 by construction.
    """
    n_words = rng.randint(2, 4)
    frames = [f"F{i}" for i in range(rng.randint(2, 4))]
    lex_lines = ["LEXICON\trand"] + [f"FRAME\t{f}" for f in frames]
    dict_entries: dict[tuple[str, str, str], DictionaryEntry] = {}

    source_words = []
    for i in range(n_words):
        word = f"src{i}"
        frame = rng.choice(frames)
        n_eq = rng.randint(0, 2)
        equivalents = [f"tgt{i}x{j}" for j in range(n_eq)]
        refs = ",".join(f"yy:{e}.n@{frame}" for e in equivalents) or "-"
        for e in equivalents:
            lex_lines.append(f"LU\tyy\t{e}\tn\t{frame}")
            dict_entries[(e, "yy", "xx")] = DictionaryEntry(
                headword=e, language="yy", translations=(word,)
            )
        lex_lines.append(f"LU\txx\t{word}\tn\t{frame}\t{refs}")
        source_words.append((word, frame, equivalents))

    # loose words: back-translate to a source word via the dictionary only
    loose_words = []
    for i in range(rng.randint(0, 2)):
        word = f"loose{i}"
        target_of = rng.choice(source_words)[0]
        dict_entries[(word, "yy", "xx")] = DictionaryEntry(
            headword=word, language="yy", translations=(target_of,)
        )
        if rng.random() < 0.5:
            frame = rng.choice(frames)
            lex_lines.append(f"LU\tyy\t{word}\tn\t{frame}")
        loose_words.append(word)

    lexicon = loads_lexicon("\n".join(lex_lines) + "\n")
    sentence = flat_sentence([w for w, _, _ in source_words])

    n_hyps = rng.randint(1, 2)
    hypotheses = []
    for _ in range(n_hyps):
        tokens = []
        for word, frame, equivalents in source_words:
            roll = rng.random()
            if equivalents and roll < 0.5:
                tokens.append(rng.choice(equivalents))
            elif loose_words and roll < 0.75:
                tokens.append(rng.choice(loose_words))
            else:
                tokens.append(f"filler{rng.randint(0, 3)}")
        hypotheses.append(" ".join(tokens))

    provider = MockTranslationProvider({sentence.text: hypotheses})
    dictionary = DictDictionary(dict_entries)
    return sentence, lexicon, provider, dictionary


def oracle_spread(graph: ActivationGraph, seeds: set[str]) -> dict[str, float]:
    """Exhaustive recursive evaluation of the layered activation semantics.

    Pure functional recursion over the phase equations; no shared mutable
    state with the implementation.  Exponential in graph size, fine <= 12
    nodes.
    """
    links = graph.links
    kind = {nid: n.kind for nid, n in graph.nodes.items()}

    def inputs(target, pred):
        return [l for l in links if l.target == target and pred(l)]

    def a_wf(n):
        return 1.0 if n in seeds else 0.0

    def a_lemma(n):
        return sum(
            output_fn(a_wf(l.source)) * l.weight
            for l in inputs(n, lambda l: kind[l.source] == "word_form")
        )

    def a_lu_initial(n):
        return sum(
            output_fn(a_lemma(l.source)) * l.weight
            for l in inputs(n, lambda l: kind[l.source] == "lemma")
        )

    def a_lu(n):
        return a_lu_initial(n) + sum(
            output_fn(a_lu_initial(l.source)) * l.weight
            for l in inputs(n, lambda l: kind[l.source] == "lu")
        )

    def a_frame_evoked(n):
        return sum(
            output_fn(a_lu(l.source)) * l.weight
            for l in inputs(n, lambda l: kind[l.source] == "lu")
        )

    def a_frame(n):
        return a_frame_evoked(n) + sum(
            output_fn(a_frame_evoked(l.source)) * l.weight
            for l in inputs(n, lambda l: kind[l.source] == "frame")
        )

    out = {}
    for nid, k in kind.items():
        if k == "word_form":
            out[nid] = a_wf(nid)
        elif k == "lemma":
            out[nid] = a_lemma(nid)
        elif k == "lu":
            out[nid] = a_lu(nid)
        else:
            out[nid] = a_frame(nid)
    return out


def random_activation_graph(rng: random.Random) -> tuple[ActivationGraph, set[str]]:
    """Random layered graph with at most 12 nodes for oracle comparison."""
    while True:
        g = ActivationGraph()
        n_words = rng.randint(1, 3)
        lus = []
        frames = []
        for i in range(n_words):
            g.add_node(f"wf:{i}", "word_form", f"w{i}")
            g.add_node(f"lm:{i}", "lemma", f"w{i}")
            g.add_link(f"wf:{i}", f"lm:{i}", "evocation")
            for j in range(rng.randint(0, 2)):
                lu = f"lu:{i}:{j}"
                g.add_node(lu, "lu", lu)
                g.add_link(f"lm:{i}", lu, "evocation")
                lus.append(lu)
        for f in range(rng.randint(1, 3)):
            frames.append(g.add_node(f"fr:{f}", "frame", f"F{f}").id)
        for lu in lus:
            g.add_link(lu, rng.choice(frames), "evocation")
        for i, a in enumerate(lus):
            for b in lus[i + 1 :]:
                if rng.random() < 0.3:
                    g.add_link(a, b, "qualia")
                    g.add_link(b, a, "qualia")
        for i, a in enumerate(frames):
            for b in frames[i + 1 :]:
                if rng.random() < 0.4:
                    kind = rng.choice(["inheritance", "perspective", "subframe", "fe_to_frame"])
                    g.add_link(a, b, kind)
        if len(g.nodes) <= 12:
            return g, {f"wf:{i}" for i in range(n_words)}


def enumerate_all_scored(sentence, lexicon, provider, dictionary, n_best=5, threshold=0.85):
    """Every candidate with its independently recomputed similarity score."""
    from scylla.providers import TranslationRequest

    assignments, _, _ = assignments_for_sentence(sentence, lexicon, "xx")
    source_frames = [a.chosen_frame for a in assignments]
    hyps = provider.translate(
        TranslationRequest(
            source_text=sentence.text, source_language="xx", target_language="yy", n_best=n_best
        )
    )
    scored = []
    for hyp in hyps:
        alignments = align(
            sentence,
            hyp,
            lexicon,
            dictionary,
            source_language="xx",
            target_language="yy",
            threshold=threshold,
            assignments=assignments,
        )
        points = injection_points(alignments, assignments, lexicon, "yy")
        for cand in iter_candidates(hyp, points):
            frames = frames_of_target_text(cand.text, lexicon, "yy", dictionary)
            score = naive_similarity(source_frames, list(frames.elements()))
            scored.append((cand, score))
    return scored, Counter(source_frames)
