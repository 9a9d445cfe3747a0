from scylla.daisy import assignments_for_sentence
from scylla.lexicon import lus_for_lemma
from scylla.providers import MockTranslationProvider, TranslationRequest
from scylla.scylla_s import inject_source, translate_s

HYBRID_3 = "O wing é o player que menos tempo tem para pensar na armação de uma play."
OUTPUT_3 = "The wing is the player that has less time to think in the setup of a play."


def _assign(sentence, lexicon):
    assignments, _, _ = assignments_for_sentence(sentence, lexicon, "br-pt")
    return assignments


def test_hybrid_sentence3_matches_expected_exactly(sentence3, sports_lexicon):
    hybrid = inject_source(sentence3, _assign(sentence3, sports_lexicon), sports_lexicon, "en")
    assert hybrid.text == HYBRID_3


def test_hybrid_keeps_surface_contraction(sentence3, sports_lexicon):
    hybrid = inject_source(sentence3, _assign(sentence3, sports_lexicon), sports_lexicon, "en")
    surfaces = [s for s, _ in hybrid.tokens]
    assert "na" in surfaces  # em + a stays contracted because neither part was injected
    assert "em" not in surfaces


def test_hybrid_records_injected_spans(sentence3, sports_lexicon):
    hybrid = inject_source(sentence3, _assign(sentence3, sports_lexicon), sports_lexicon, "en")
    injected = {(i.source_lu, i.injected_lu) for i in hybrid.injected_spans}
    assert ("br-pt:ponta.n@Athletes", "en:wing.n@Athletes") in injected
    assert ("br-pt:jogada.n@Moves", "en:play.n@Moves") in injected
    origins = {origin for _, origin in hybrid.tokens}
    assert origins == {"source", "injected"}


def test_zero_assignments_yield_identity(sentence_tempo, sports_lexicon):
    hybrid = inject_source(sentence_tempo, _assign(sentence_tempo, sports_lexicon), sports_lexicon, "en")
    assert hybrid.text == "O tempo passou."
    assert hybrid.injected_spans == ()


def test_sentence1_hybrid_contains_lay_up(sentence1, sports_lexicon):
    hybrid = inject_source(sentence1, _assign(sentence1, sports_lexicon), sports_lexicon, "en")
    assert "lay-up" in hybrid.text
    assert hybrid.text == "O basketball player score a lay-up."


def test_mwe_span_is_replaced_as_a_unit(sentence1, sports_lexicon):
    hybrid = inject_source(sentence1, _assign(sentence1, sports_lexicon), sports_lexicon, "en")
    assert "jogador" not in hybrid.text and "basquete" not in hybrid.text
    assert "basketball player" in hybrid.text


def test_sentence_initial_injection_keeps_capitalization(sports_lexicon):
    from scylla.ingest import ParsedSentence, ParsedToken

    tokens = (
        ParsedToken(index=1, form="Bandeja", lemma="bandeja", upos="NOUN", head=0, deprel="root"),
        ParsedToken(index=2, form="perfeita", lemma="perfeito", upos="ADJ", head=1, deprel="amod"),
        ParsedToken(index=3, form=".", lemma=".", upos="PUNCT", head=1, deprel="punct"),
    )
    sentence = ParsedSentence(sent_id="cap", text="Bandeja perfeita.", tokens=tokens)
    hybrid = inject_source(sentence, _assign(sentence, sports_lexicon), sports_lexicon, "en")
    first = hybrid.text.split()[0]
    assert first[0].isupper()


def test_injection_token_count_delta(sentence1, sports_lexicon):
    # MWE of length 3 replaced by a 2-token equivalent: net delta is k - m per span
    hybrid = inject_source(sentence1, _assign(sentence1, sports_lexicon), sports_lexicon, "en")
    rendered_tokens = hybrid.text.replace(".", " .").split()
    deltas = 0
    for span in hybrid.injected_spans:
        m = span.span_end - span.span_start + 1
        k = len(span.surface.split(" "))
        deltas += k - m
    assert len(rendered_tokens) == len(sentence1.tokens) + deltas


def test_every_injected_surface_is_a_target_lemma(sentence3, sports_lexicon):
    hybrid = inject_source(sentence3, _assign(sentence3, sports_lexicon), sports_lexicon, "en")
    for span in hybrid.injected_spans:
        assert lus_for_lemma(sports_lexicon, span.surface, "en")


def test_translate_s_sentence3(sentence3, sports_lexicon, mock_provider):
    assert translate_s(sentence3, sports_lexicon, mock_provider, "en") == OUTPUT_3


def test_translate_s_all_unknown_hybrid_is_copied(sentence_tempo, sports_lexicon):
    provider = MockTranslationProvider({})  # knows nothing; copy-unknown echoes
    assert translate_s(sentence_tempo, sports_lexicon, provider, "en") == "O tempo passou."


def test_translate_s_levantamento_hazard(sentence_levantamento, sports_lexicon, mock_provider):
    # the provider re-translates the injected "lift" as br-pt vocabulary
    out = translate_s(sentence_levantamento, sports_lexicon, mock_provider, "en")
    assert "facelift" in out


def test_translate_s_non_domain_equals_plain_translation(sentence_tempo, sports_lexicon, mock_provider):
    plain = mock_provider.translate(
        TranslationRequest(
            source_text="O tempo passou.",
            source_language="br-pt",
            target_language="en",
            n_best=1,
            copy_unknown=True,
        )
    )[0].text
    assert translate_s(sentence_tempo, sports_lexicon, mock_provider, "en") == plain


def test_translate_s_wraps_injections_with_delimiters(sentence3, sports_lexicon):
    table = {
        "O ⟦wing⟧ é o ⟦player⟧ que menos tempo tem para pensar na armação de uma ⟦play⟧.": [
            "The ⟦wing⟧ is the ⟦player⟧ that has less time to think in the setup of a ⟦play⟧."
        ]
    }
    provider = MockTranslationProvider(table)
    provider.no_translate_delimiters = ("⟦", "⟧")
    out = translate_s(sentence3, sports_lexicon, provider, "en")
    assert out == "The wing is the player that has less time to think in the setup of a play."
