import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scylla.ingest import (
    CyclicHeadError,
    LemmaSpan,
    MalformedLineError,
    MultiwordToken,
    ParsedSentence,
    ParsedToken,
    build_clusters,
    detokenize,
    match_mwes,
    parse_conllu,
    serialize_conllu,
)
from scylla.lexicon import loads_lexicon


def test_parse_sentence1(sentence1):
    assert len(sentence1.tokens) == 8
    assert [t.lemma for t in sentence1.tokens] == ["o", "jogador", "de", "basquete", "converter", "o", "bandeja", "."]
    assert sentence1.text == "O jogador de basquete converteu a bandeja."


def test_parse_empty_input():
    assert parse_conllu("") == []
    assert parse_conllu("\n\n") == []


def test_parse_rejects_wrong_column_count():
    bad = "1\tA\ta\tNOUN\t_\t_\t0\troot\t_\n"  # 9 columns
    with pytest.raises(MalformedLineError) as excinfo:
        parse_conllu(bad)
    assert excinfo.value.line_no == 1


def test_parse_rejects_self_head():
    bad = "1\tA\ta\tNOUN\t_\t_\t1\troot\t_\t_\n"
    with pytest.raises(MalformedLineError):
        parse_conllu(bad)


def test_parse_rejects_cycles():
    bad = (
        "1\tA\ta\tNOUN\t_\t_\t2\tdep\t_\t_\n"
        "2\tB\tb\tNOUN\t_\t_\t1\tdep\t_\t_\n"
    )
    with pytest.raises(CyclicHeadError):
        parse_conllu(bad)


def test_multiword_token_expansion(sentence2):
    # surface "na" covers em + a
    assert [t.form for t in sentence2.tokens[4:8]] == ["tijelas", "em", "a", "bandeja"]
    assert sentence2.multiword_tokens == (MultiwordToken(start=6, end=7, form="na"),)


def test_empty_nodes_are_skipped():
    text = (
        "1\tA\ta\tNOUN\t_\t_\t0\troot\t_\t_\n"
        "1.1\tB\tb\tNOUN\t_\t_\t_\t_\t_\t_\n"
        "2\tC\tc\tNOUN\t_\t_\t1\tdep\t_\t_\n"
    )
    sentences = parse_conllu(text)
    assert [t.form for t in sentences[0].tokens] == ["A", "C"]


_token_st = st.builds(
    lambda form, lemma, upos: (form, lemma, upos),
    st.text(alphabet="abcdeçãé", min_size=1, max_size=6),
    st.text(alphabet="abcdeçãé", min_size=1, max_size=6),
    st.sampled_from(["NOUN", "VERB", "ADJ", "DET", "PUNCT"]),
)


@settings(max_examples=50, deadline=None)
@given(st.lists(_token_st, min_size=1, max_size=8), st.randoms())
def test_serialize_parse_round_trip(raw_tokens, rng):
    tokens = []
    for i, (form, lemma, upos) in enumerate(raw_tokens, start=1):
        head = rng.choice([h for h in range(0, len(raw_tokens) + 1) if h != i and h < i or h == 0])
        tokens.append(ParsedToken(index=i, form=form, lemma=lemma, upos=upos, head=head, deprel="dep"))
    sentence = ParsedSentence(sent_id="rt", text=None, tokens=tuple(tokens))
    assert parse_conllu(serialize_conllu(sentence)) == [sentence]


def test_match_mwes_sentence1(sentence1, sports_lexicon):
    spans = match_mwes(sentence1, sports_lexicon, "br-pt")
    assert [(s.surface_lemma, s.is_mwe) for s in spans] == [
        ("jogador de basquete", True),
        ("converter", False),
        ("bandeja", False),
    ]


def test_match_mwes_without_lexicon_entries(sentence1):
    empty = loads_lexicon("LEXICON\tempty\n")
    spans = match_mwes(sentence1, empty, "br-pt")
    # content words only; determiners, adpositions and punctuation drop out
    assert [s.surface_lemma for s in spans] == ["jogador", "basquete", "converter", "bandeja"]


def test_overlapping_mwes_longest_leftmost_wins():
    # "a b c" and "b c d" overlap; "a b c" is leftmost of the equally long;
    # "c d" nests inside "b c d".
    lex_text = (
        "LEXICON\tmwe\nFRAME\tF\n"
        "LU\ten\ta b c\tn\tF\n"
        "LU\ten\tb c d\tn\tF\n"
        "LU\ten\tc d\tn\tF\n"
    )
    lex = loads_lexicon(lex_text)
    tokens = tuple(
        ParsedToken(index=i, form=w, lemma=w, upos="NOUN", head=0 if i == 1 else 1, deprel="dep")
        for i, w in enumerate(["a", "b", "c", "d"], start=1)
    )
    sentence = ParsedSentence(sent_id="x", text=None, tokens=tokens)
    spans = match_mwes(sentence, lex, "en")
    chosen = [(s.surface_lemma, s.token_indices) for s in spans if s.is_mwe]
    assert chosen == [("a b c", (1, 2, 3))]

    # independent check: greedy-longest-leftmost over the brute-force candidate set
    candidates = [(0, 3), (1, 3), (2, 2)]
    taken: set[int] = set()
    expected = []
    for start, length in sorted(candidates, key=lambda c: (-c[1], c[0])):
        span = set(range(start, start + length))
        if not (span & taken):
            taken |= span
            expected.append((start, length))
    assert [(s.token_indices[0] - 1, len(s.token_indices)) for s in spans if s.is_mwe] == expected


def test_mwe_interior_function_word_is_kept(sentence1, sports_lexicon):
    spans = match_mwes(sentence1, sports_lexicon, "br-pt")
    mwe = next(s for s in spans if s.is_mwe)
    assert 3 in mwe.token_indices  # "de" (ADP) sits inside the MWE


def test_clusters_sentence1(sentence1, sports_lexicon):
    spans = match_mwes(sentence1, sports_lexicon, "br-pt")
    clusters = build_clusters(sentence1, spans)
    assert len(clusters) == 1
    assert {s.surface_lemma for s in clusters[0].members} == {
        "jogador de basquete",
        "converter",
        "bandeja",
    }


def test_single_span_sentence_gets_singleton_cluster(sports_lexicon):
    tokens = (ParsedToken(index=1, form="bandeja", lemma="bandeja", upos="NOUN", head=0, deprel="root"),)
    sentence = ParsedSentence(sent_id="s", text=None, tokens=tokens)
    spans = match_mwes(sentence, sports_lexicon, "br-pt")
    clusters = build_clusters(sentence, spans)
    assert len(clusters) == 1 and len(clusters[0].members) == 1


def test_two_independent_clauses_make_two_clusters(sentence_two_clauses, sports_lexicon):
    spans = match_mwes(sentence_two_clauses, sports_lexicon, "br-pt")
    clusters = build_clusters(sentence_two_clauses, spans)
    assert len(clusters) == 2
    groups = [{s.surface_lemma for s in c.members} for c in clusters]
    assert groups == [{"jogador", "marcar"}, {"garçom", "sorrir"}]
    # partition must match connected components of the span-adjacency relation
    all_members = [s for c in clusters for s in c.members]
    assert sorted(all_members, key=lambda s: s.start) == sorted(spans, key=lambda s: s.start)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 8), st.randoms())
def test_clustering_is_a_partition(n, rng):
    tokens = []
    for i in range(1, n + 1):
        head = 0 if i == 1 else rng.randrange(0, i)
        upos = rng.choice(["NOUN", "VERB", "ADJ"])
        tokens.append(ParsedToken(index=i, form=f"w{i}", lemma=f"w{i}", upos=upos, head=head, deprel="dep"))
    sentence = ParsedSentence(sent_id="p", text=None, tokens=tuple(tokens))
    spans = [LemmaSpan(token_indices=(t.index,), surface_lemma=t.lemma, is_mwe=False) for t in tokens]
    clusters = build_clusters(sentence, spans)
    seen = [s for c in clusters for s in c.members]
    assert sorted(seen, key=lambda s: s.start) == spans  # every span exactly once


def test_detokenize_attaches_punctuation():
    assert detokenize(["Olá", ",", "mundo", "!"]) == "Olá, mundo!"
    assert detokenize(["a", "(", "b", ")", "."]) == "a (b)."
