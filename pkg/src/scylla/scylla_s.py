"""Scylla-S: terminology injection before translation.

Domain spans recognised in the source sentence are replaced by their first
target-language equivalent, producing a hybrid sentence that the NMT
provider translates with its copy-unknown setting on.  The injected terms,
being mostly unknown to the source-side model, survive into the output.
"""

from __future__ import annotations

from dataclasses import dataclass

from scylla.daisy import FrameAssignment, assignments_for_sentence
from scylla.ingest import ParsedSentence, detokenize
from scylla.lexicon import Lexicon, equivalents_of
from scylla.providers import TranslationRequest, strip_no_translate


@dataclass(frozen=True)
class InjectedSpan:
    span_start: int
    span_end: int
    source_lu: str
    injected_lu: str
    surface: str


@dataclass(frozen=True)
class HybridSentence:
    tokens: tuple[tuple[str, str], ...]  # (surface, origin): origin is "source" or "injected"
    injected_spans: tuple[InjectedSpan, ...]

    @property
    def text(self) -> str:
        return detokenize([surface for surface, _ in self.tokens])


def inject_source(
    sentence: ParsedSentence,
    assignments: list[FrameAssignment],
    lexicon: Lexicon,
    target_language: str,
    wrap: tuple[str, str] | None = None,
) -> HybridSentence:
    """Replace each assigned span that has a target equivalent.

    The first equivalent in lexicon declaration order is used; MWE spans
    are replaced as a unit; everything else keeps its original surface and
    position.  Sentence-initial replacements keep the capitalisation.
    ``wrap`` optionally wraps injected surfaces in no-translate delimiters.
    """
    replacements: dict[int, tuple[int, InjectedSpan]] = {}
    for assignment in assignments:
        candidates = equivalents_of(lexicon, assignment.chosen_lu, target_language)
        if not candidates:
            continue
        equivalent = candidates[0]
        span = assignment.lemma_span
        first_tok = sentence.token(span.start)
        surface = equivalent.lemma
        if span.start == 1 and first_tok.form[:1].isupper():
            surface = surface[:1].upper() + surface[1:]
        replacements[span.start] = (
            span.end,
            InjectedSpan(
                span_start=span.start,
                span_end=span.end,
                source_lu=assignment.chosen_lu,
                injected_lu=equivalent.id,
                surface=surface,
            ),
        )

    injected_positions = set()
    for start, (end, _) in replacements.items():
        injected_positions.update(range(start, end + 1))

    mwt_by_start = {m.start: m for m in sentence.multiword_tokens}
    tokens: list[tuple[str, str]] = []
    injected: list[InjectedSpan] = []
    i = 1
    n = len(sentence.tokens)
    while i <= n:
        if i in replacements:
            end, info = replacements[i]
            surface = info.surface
            if wrap:
                surface = f"{wrap[0]}{surface}{wrap[1]}"
            tokens.append((surface, "injected"))
            injected.append(info)
            i = end + 1
            continue
        mwt = mwt_by_start.get(i)
        if mwt is not None and not any(j in injected_positions for j in range(mwt.start, mwt.end + 1)):
            # keep the surface contraction when none of its parts were replaced
            tokens.append((mwt.form, "source"))
            i = mwt.end + 1
            continue
        tokens.append((sentence.token(i).form, "source"))
        i += 1

    return HybridSentence(tokens=tuple(tokens), injected_spans=tuple(injected))


def translate_s(
    sentence: ParsedSentence,
    lexicon: Lexicon,
    provider,
    target_language: str,
    source_language: str = "br-pt",
) -> str:
    """Disambiguate, inject, translate; return the provider's top hypothesis."""
    text, _ = translate_s_with_hybrid(sentence, lexicon, provider, target_language, source_language)
    return text


def translate_s_with_hybrid(
    sentence: ParsedSentence,
    lexicon: Lexicon,
    provider,
    target_language: str,
    source_language: str = "br-pt",
) -> tuple[str, HybridSentence]:
    """Like :func:`translate_s` but also returns the hybrid for tracing."""
    assignments, _, _ = assignments_for_sentence(sentence, lexicon, source_language)
    delimiters = getattr(provider, "no_translate_delimiters", None)
    hybrid = inject_source(sentence, assignments, lexicon, target_language, wrap=delimiters)
    hypotheses = provider.translate(
        TranslationRequest(
            source_text=hybrid.text,
            source_language=source_language,
            target_language=target_language,
            n_best=1,
            copy_unknown=True,
        )
    )
    return strip_no_translate(hypotheses[0].text, delimiters), hybrid
