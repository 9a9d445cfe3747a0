"""Scylla-T: terminology injection after translation.

The source sentence is translated normally and the n-best hypotheses are
aligned back to the source: every content span of a hypothesis is looked up
in the lexicon and the bilingual dictionary for its possible
back-translations, which are fuzzy-compared (Jaro-Winkler) to the source
lemmas and their synonyms.  Each alignment point then admits either keeping
the translated word or injecting one of the lexicon equivalents of the
aligned source term; the recursive search enumerates every combination
exactly once and keeps the candidate whose frame multiset best overlaps the
source's (ties prefer fewer substitutions, then better NMT rank).
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

from scylla.daisy import FrameAssignment, assignments_for_sentence, frames_of_clusters
from scylla.ingest import Cluster, LemmaSpan, ParsedSentence, detokenize, match_mwes
from scylla.lexicon import Lexicon, equivalents_of, lus_for_lemma
from scylla.providers import TranslationHypothesis, TranslationRequest

DEFAULT_JW_THRESHOLD = 0.85

# How a hypothesis word was traced back to a source word.
VIA_PRIORITY = {"framenet_equivalent": 0, "dictionary_translation": 1, "synonym": 2}


def jaro_winkler(a: str, b: str) -> float:
    """Jaro-Winkler similarity with prefix scale 0.1 over at most 4 characters."""
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    window = max(len(a), len(b)) // 2 - 1
    matched_a = [False] * len(a)
    matched_b = [False] * len(b)
    matches = 0
    for i, ch in enumerate(a):
        lo = max(0, i - window)
        hi = min(len(b), i + window + 1)
        for j in range(lo, hi):
            if not matched_b[j] and b[j] == ch:
                matched_a[i] = True
                matched_b[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    seq_a = [ch for i, ch in enumerate(a) if matched_a[i]]
    seq_b = [ch for j, ch in enumerate(b) if matched_b[j]]
    transpositions = sum(1 for x, y in zip(seq_a, seq_b) if x != y) // 2
    m = float(matches)
    jaro = (m / len(a) + m / len(b) + (m - transpositions) / m) / 3.0
    prefix = 0
    for x, y in zip(a, b):
        if x != y or prefix == 4:
            break
        prefix += 1
    return jaro + prefix * 0.1 * (1.0 - jaro)


@dataclass(frozen=True)
class TargetSpan:
    """A hypothesis-side lookup unit: token slice, surface and resolved lemma."""

    token_indices: tuple[int, ...]  # 0-based indices into the hypothesis token list
    surface: str
    lemma: str
    is_mwe: bool

    @property
    def start(self) -> int:
        return self.token_indices[0]

    @property
    def end(self) -> int:
        return self.token_indices[-1]


@dataclass(frozen=True)
class AlignmentPair:
    target_span: TargetSpan
    source_span: LemmaSpan
    match_score: float
    via: str

    def __post_init__(self):
        if not 0.0 <= self.match_score <= 1.0:
            raise ValueError("match_score must lie in [0, 1]")


@dataclass(frozen=True)
class InjectionPoint:
    """One alignment with its admissible replacements (lexicon equivalents)."""

    alignment: AlignmentPair
    replacements: tuple[str, ...]


@dataclass(frozen=True)
class Candidate:
    hypothesis_rank: int
    text: str
    substitutions: tuple[tuple[str, str], ...]  # (original surface, injected surface)

    @property
    def n_substitutions(self) -> int:
        return len(self.substitutions)


_WORD_RE = re.compile(r"\w+(?:[-']\w+)*|[^\w\s]", re.UNICODE)


def tokenize_target(text: str) -> list[str]:
    """Whitespace/punctuation tokenizer for hypotheses; keeps case and hyphens."""
    return _WORD_RE.findall(text)


def _resolve_lemma(token: str, lexicon: Lexicon, language: str, dictionary) -> str:
    """Surface form -> lemma: exact lexicon hit, else the dictionary's lemma field."""
    folded = token.casefold()
    if lus_for_lemma(lexicon, folded, language):
        return folded
    if dictionary is not None:
        # the lemma field may live on an entry for any translation direction
        for lang in lexicon.languages():
            entry = dictionary.lookup(folded, language, lang)
            if entry is not None and entry.lemma:
                return entry.lemma.casefold()
    return folded


def analyze_target(
    text: str, lexicon: Lexicon, language: str, dictionary=None
) -> tuple[list[str], list[TargetSpan]]:
    """Tokenize a hypothesis and group tokens into lemma spans.

    MWEs are greedy longest matches over the resolved lemma sequence;
    punctuation tokens never form spans.
    """
    tokens = tokenize_target(text)
    lemmas = [_resolve_lemma(t, lexicon, language, dictionary) for t in tokens]
    is_word = [bool(re.match(r"\w", t)) for t in tokens]

    mwe_seqs = {tuple(m.casefold().split(" ")) for m in lexicon.mwe_lemmas(language)}
    candidates = []
    for seq in mwe_seqs:
        n = len(seq)
        for start in range(0, len(lemmas) - n + 1):
            if tuple(lemmas[start : start + n]) == seq:
                candidates.append((start, n))

    taken: set[int] = set()
    spans: list[TargetSpan] = []
    for start, n in sorted(candidates, key=lambda c: (-c[1], c[0])):
        covered = range(start, start + n)
        if any(i in taken for i in covered):
            continue
        taken.update(covered)
        spans.append(
            TargetSpan(
                token_indices=tuple(covered),
                surface=" ".join(tokens[i] for i in covered),
                lemma=" ".join(lemmas[i] for i in covered),
                is_mwe=True,
            )
        )
    for i, token in enumerate(tokens):
        if i in taken or not is_word[i]:
            continue
        spans.append(TargetSpan(token_indices=(i,), surface=token, lemma=lemmas[i], is_mwe=False))
    spans.sort(key=lambda s: s.start)
    return tokens, spans


def _window_clusters(spans: list[TargetSpan], window: int = 2) -> list[Cluster]:
    """Linear adjacency clustering for target-side analysis (no parse available)."""
    lemma_spans = [
        LemmaSpan(
            token_indices=tuple(i + 1 for i in span.token_indices),
            surface_lemma=span.lemma,
            is_mwe=span.is_mwe,
        )
        for span in spans
    ]
    clusters: list[Cluster] = []
    current: list[LemmaSpan] = []
    for i, span in enumerate(lemma_spans):
        if current and i - prev_index <= window:
            current.append(span)
        else:
            if current:
                clusters.append(Cluster(id=f"c{current[0].start}", members=tuple(current)))
            current = [span]
        prev_index = i
    if current:
        clusters.append(Cluster(id=f"c{current[0].start}", members=tuple(current)))
    return clusters


def frames_of_target_text(
    text: str, lexicon: Lexicon, language: str, dictionary=None
) -> Counter:
    """Frame multiset of a target-language sentence under the reduced analysis."""
    _, spans = analyze_target(text, lexicon, language, dictionary)
    clusters = _window_clusters(spans)
    return frames_of_clusters(clusters, lexicon, language)


def _back_translations(
    span: TargetSpan, lexicon: Lexicon, target_language: str, source_language: str, dictionary
) -> list[tuple[str, str]]:
    """Possible source-language forms of a hypothesis span, tagged by provenance."""
    out: list[tuple[str, str]] = []
    for lu in lus_for_lemma(lexicon, span.lemma, target_language):
        for equivalent in equivalents_of(lexicon, lu, source_language):
            out.append((equivalent.lemma, "framenet_equivalent"))
    entry = dictionary.lookup(span.lemma, target_language, source_language) if dictionary else None
    if entry is None and dictionary is not None and span.surface.casefold() != span.lemma:
        entry = dictionary.lookup(span.surface, target_language, source_language)
    if entry is not None:
        for translation in entry.translations:
            out.append((translation, "dictionary_translation"))
    seen = set()
    unique = []
    for item in out:
        if item not in seen:
            seen.add(item)
            unique.append(item)
    return unique


def _source_comparables(
    span: LemmaSpan,
    assignment: FrameAssignment | None,
    lexicon: Lexicon,
    source_language: str,
    target_language: str,
    dictionary,
) -> list[tuple[str, str]]:
    """The span's own lemma plus its synonyms (co-evoking LUs and dictionary)."""
    comparables = [(span.surface_lemma, "self")]
    if assignment is not None:
        chosen = lexicon.lu(assignment.chosen_lu)
        for lu in lexicon.lexical_units.values():
            if (
                lu.language == source_language
                and lu.evokes == chosen.evokes
                and lu.lemma.casefold() != span.surface_lemma.casefold()
            ):
                comparables.append((lu.lemma, "synonym"))
    entry = dictionary.lookup(span.surface_lemma, source_language, target_language) if dictionary else None
    if entry is not None:
        for synonym in entry.synonyms:
            comparables.append((synonym, "synonym"))
    return comparables


def align(
    source: ParsedSentence,
    hypothesis: TranslationHypothesis,
    lexicon: Lexicon,
    dictionary,
    source_language: str = "br-pt",
    target_language: str = "en",
    threshold: float = DEFAULT_JW_THRESHOLD,
    assignments: list[FrameAssignment] | None = None,
) -> list[AlignmentPair]:
    """Align hypothesis spans to source spans through back-translations.

    A pair is admissible when the Jaro-Winkler similarity between a
    back-translation of the hypothesis span and a source lemma (or one of
    its synonyms) reaches the threshold.  Matching is one-to-one: best
    score first, leftmost on ties.
    """
    if assignments is None:
        assignments, _, _ = assignments_for_sentence(source, lexicon, source_language)
    assignment_by_span = {a.lemma_span.token_indices: a for a in assignments}
    source_spans = match_mwes(source, lexicon, source_language)
    _, target_spans = analyze_target(hypothesis.text, lexicon, target_language, dictionary)

    scored: list[tuple[float, int, int, int, TargetSpan, LemmaSpan, str]] = []
    for t_pos, t_span in enumerate(target_spans):
        bts = _back_translations(t_span, lexicon, target_language, source_language, dictionary)
        if not bts:
            continue
        for s_pos, s_span in enumerate(source_spans):
            comparables = _source_comparables(
                s_span,
                assignment_by_span.get(s_span.token_indices),
                lexicon,
                source_language,
                target_language,
                dictionary,
            )
            best: tuple[float, int, str] | None = None
            for bt, via in bts:
                for comp, comp_kind in comparables:
                    score = jaro_winkler(bt.casefold(), comp.casefold())
                    if score < threshold:
                        continue
                    via_used = via if comp_kind == "self" else "synonym"
                    key = (score, -VIA_PRIORITY[via_used])
                    if best is None or key > (best[0], -best[1]):
                        best = (score, VIA_PRIORITY[via_used], via_used)
            if best is not None:
                scored.append((best[0], best[1], t_pos, s_pos, t_span, s_span, best[2]))

    scored.sort(key=lambda item: (-item[0], item[1], item[2], item[3]))
    used_targets: set[int] = set()
    used_sources: set[int] = set()
    pairs: list[AlignmentPair] = []
    for score, _, t_pos, s_pos, t_span, s_span, via in scored:
        if t_pos in used_targets or s_pos in used_sources:
            continue
        used_targets.add(t_pos)
        used_sources.add(s_pos)
        pairs.append(AlignmentPair(target_span=t_span, source_span=s_span, match_score=score, via=via))
    pairs.sort(key=lambda p: p.target_span.start)
    return pairs


def injection_points(
    alignments: list[AlignmentPair],
    assignments: list[FrameAssignment],
    lexicon: Lexicon,
    target_language: str,
) -> list[InjectionPoint]:
    """Attach each alignment's replacement set: the equivalents of the aligned source LU."""
    assignment_by_span = {a.lemma_span.token_indices: a for a in assignments}
    points = []
    for alignment in alignments:
        assignment = assignment_by_span.get(alignment.source_span.token_indices)
        replacements: tuple[str, ...] = ()
        if assignment is not None:
            replacements = tuple(
                eq.lemma for eq in equivalents_of(lexicon, assignment.chosen_lu, target_language)
            )
        points.append(InjectionPoint(alignment=alignment, replacements=replacements))
    return points


def _apply_decisions(
    tokens: list[str], decisions: list[tuple[InjectionPoint, str | None]]
) -> tuple[str, tuple[tuple[str, str], ...]]:
    replaced: dict[int, tuple[tuple[int, ...], str]] = {}
    substitutions: list[tuple[str, str]] = []
    for point, choice in decisions:
        if choice is None:
            continue
        span = point.alignment.target_span
        surface = choice
        if span.start == 0 and span.surface[:1].isupper():
            surface = surface[:1].upper() + surface[1:]
        replaced[span.start] = (span.token_indices, surface)
        substitutions.append((span.surface, surface))
    out: list[str] = []
    i = 0
    while i < len(tokens):
        if i in replaced:
            indices, surface = replaced[i]
            out.extend(surface.split(" "))
            i = indices[-1] + 1
        else:
            out.append(tokens[i])
            i += 1
    return detokenize(out), tuple(substitutions)


def iter_candidates(
    hypothesis: TranslationHypothesis,
    points: list[InjectionPoint],
) -> Iterator[Candidate]:
    """Walk the injection search tree: at each point, keep (left branch) or
    inject one of the alternatives (one right branch per equivalent).

    Every combination is produced exactly once, so the candidate count is
    the product of (1 + len(replacements)) over the points.
    """
    tokens = tokenize_target(hypothesis.text)

    def walk(i: int, decisions: list[tuple[InjectionPoint, str | None]]) -> Iterator[Candidate]:
        if i == len(points):
            text, substitutions = _apply_decisions(tokens, decisions)
            yield Candidate(hypothesis_rank=hypothesis.rank, text=text, substitutions=substitutions)
            return
        point = points[i]
        yield from walk(i + 1, decisions + [(point, None)])
        for replacement in point.replacements:
            yield from walk(i + 1, decisions + [(point, replacement)])

    yield from walk(0, [])


def enumerate_candidates(
    hypotheses: list[TranslationHypothesis],
    points_per_hypothesis: list[list[InjectionPoint]],
    lexicon: Lexicon,
) -> Iterator[Candidate]:
    for hypothesis, points in zip(hypotheses, points_per_hypothesis):
        yield from iter_candidates(hypothesis, points)


def semantic_similarity(frames_a: Counter | Iterable[str], frames_b: Counter | Iterable[str]) -> int:
    """Number of coincident frame pairs between the two multisets.

    Equals sum over frames of multiplicity_a * multiplicity_b, i.e. the
    double sum of the indicator over all cross pairs; symmetric by
    construction.
    """
    ca = frames_a if isinstance(frames_a, Counter) else Counter(frames_a)
    cb = frames_b if isinstance(frames_b, Counter) else Counter(frames_b)
    return sum(mult * cb[frame] for frame, mult in ca.items())


def translate_t(
    sentence: ParsedSentence,
    lexicon: Lexicon,
    provider,
    dictionary,
    target_language: str = "en",
    n_best: int = 5,
    jw_threshold: float = DEFAULT_JW_THRESHOLD,
    source_language: str = "br-pt",
    trace_path=None,
) -> str:
    """Pick the candidate maximising frame overlap with the source.

    Ties prefer fewer substitutions (preserving NMT fluency), then the
    higher-ranked hypothesis, then lexicographic text order.  The rank-1
    hypothesis itself is always among the candidates, so the result never
    scores below the plain translation.
    """
    assignments, _, _ = assignments_for_sentence(sentence, lexicon, source_language)
    source_frames = Counter(a.chosen_frame for a in assignments)

    source_text = sentence.text or detokenize([t.form for t in sentence.tokens])
    hypotheses = provider.translate(
        TranslationRequest(
            source_text=source_text,
            source_language=source_language,
            target_language=target_language,
            n_best=n_best,
        )
    )

    best: tuple[tuple, Candidate] | None = None
    trace_rows = []
    for hypothesis in hypotheses:
        alignments = align(
            sentence,
            hypothesis,
            lexicon,
            dictionary,
            source_language=source_language,
            target_language=target_language,
            threshold=jw_threshold,
            assignments=assignments,
        )
        points = injection_points(alignments, assignments, lexicon, target_language)
        for candidate in iter_candidates(hypothesis, points):
            frames = frames_of_target_text(candidate.text, lexicon, target_language, dictionary)
            score = semantic_similarity(source_frames, frames)
            key = (-score, candidate.n_substitutions, candidate.hypothesis_rank, candidate.text)
            if trace_path is not None:
                trace_rows.append(
                    {
                        "rank": candidate.hypothesis_rank,
                        "text": candidate.text,
                        "substitutions": [list(s) for s in candidate.substitutions],
                        "score": score,
                    }
                )
            if best is None or key < best[0]:
                best = (key, candidate)

    assert best is not None  # provider guarantees at least one hypothesis
    if trace_path is not None:
        with open(trace_path, "w", encoding="utf-8") as fh:
            for row in trace_rows:
                row["selected"] = row["text"] == best[1].text and row["rank"] == best[1].hypothesis_rank
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return best[1].text
