"""CoNLL-U ingestion, multiword-expression matching and lemma clustering.

This module turns a dependency-parsed sentence (10-column CoNLL-U, the
output of whichever parser the user runs) into the lemma spans and clusters
that seed the activation graph.  No tokenisation or parsing happens here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from scylla.lexicon import Lexicon

# Tokens with these universal POS tags never form spans of their own; they
# only participate as interior tokens of a matched multiword expression.
FUNCTION_UPOS = frozenset({"PUNCT", "DET", "ADP", "AUX", "CCONJ", "SCONJ", "PRON"})


class ConlluError(Exception):
    """Base class for CoNLL-U ingestion errors."""


class MalformedLineError(ConlluError):
    def __init__(self, message: str, line_no: int):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class CyclicHeadError(ConlluError):
    def __init__(self, sent_id: str, token_index: int):
        self.sent_id = sent_id
        self.token_index = token_index
        super().__init__(f"sentence {sent_id!r}: head chain from token {token_index} never reaches the root")


@dataclass(frozen=True)
class ParsedToken:
    index: int  # 1-based position
    form: str
    lemma: str
    upos: str
    head: int  # 0 = root
    deprel: str


@dataclass(frozen=True)
class MultiwordToken:
    """Surface contraction covering token positions start..end (e.g. pt 'na' = em + a)."""

    start: int
    end: int
    form: str


@dataclass(frozen=True)
class ParsedSentence:
    sent_id: str
    text: str | None
    tokens: tuple[ParsedToken, ...]
    multiword_tokens: tuple[MultiwordToken, ...] = ()

    def token(self, index: int) -> ParsedToken:
        return self.tokens[index - 1]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class LemmaSpan:
    """One or more tokens treated as a single lexical lookup unit."""

    token_indices: tuple[int, ...]
    surface_lemma: str
    is_mwe: bool

    def __post_init__(self):
        if not self.token_indices:
            raise ValueError("LemmaSpan needs at least one token index")
        if list(self.token_indices) != sorted(set(self.token_indices)):
            raise ValueError("token_indices must be strictly increasing")
        if self.is_mwe != (len(self.token_indices) > 1):
            raise ValueError("is_mwe must hold exactly for multi-token spans")

    @property
    def start(self) -> int:
        return self.token_indices[0]

    @property
    def end(self) -> int:
        return self.token_indices[-1]


@dataclass(frozen=True)
class Cluster:
    id: str
    members: tuple[LemmaSpan, ...]


_TOKEN_COLUMNS = 10


def parse_conllu(text: str) -> list[ParsedSentence]:
    """Parse CoNLL-U text into sentences.

    Multiword-token range lines are recorded (for surface reconstruction)
    and expanded to their component tokens; empty nodes (decimal ids) are
    skipped.  Raises :class:`MalformedLineError` with the line number for
    format violations and :class:`CyclicHeadError` for head cycles.
    """
    sentences: list[ParsedSentence] = []
    tokens: list[ParsedToken] = []
    mwts: list[MultiwordToken] = []
    sent_id = ""
    sent_text: str | None = None

    def flush(line_no: int):
        nonlocal tokens, mwts, sent_id, sent_text
        if not tokens and not mwts:
            sent_id, sent_text = "", None
            return
        sentence = ParsedSentence(
            sent_id=sent_id or str(len(sentences) + 1),
            text=sent_text,
            tokens=tuple(tokens),
            multiword_tokens=tuple(mwts),
        )
        _check_heads(sentence)
        sentences.append(sentence)
        tokens, mwts = [], []
        sent_id, sent_text = "", None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            flush(line_no)
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("sent_id"):
                sent_id = body.partition("=")[2].strip()
            elif body.startswith("text"):
                sent_text = body.partition("=")[2].strip()
            continue
        cols = line.split("\t")
        if len(cols) != _TOKEN_COLUMNS:
            raise MalformedLineError(f"expected {_TOKEN_COLUMNS} tab-separated columns, got {len(cols)}", line_no)
        tok_id = cols[0]
        if "-" in tok_id:
            m = re.fullmatch(r"(\d+)-(\d+)", tok_id)
            if not m:
                raise MalformedLineError(f"bad multiword token id {tok_id!r}", line_no)
            start, end = int(m.group(1)), int(m.group(2))
            if end < start:
                raise MalformedLineError(f"multiword token range {tok_id!r} is reversed", line_no)
            mwts.append(MultiwordToken(start=start, end=end, form=cols[1]))
            continue
        if "." in tok_id:
            continue  # empty node (ellipsis); not part of the basic tree
        if not tok_id.isdigit():
            raise MalformedLineError(f"bad token id {tok_id!r}", line_no)
        index = int(tok_id)
        if index != len(tokens) + 1:
            raise MalformedLineError(f"token id {index} out of sequence (expected {len(tokens) + 1})", line_no)
        head_col = cols[6]
        if not head_col.isdigit():
            raise MalformedLineError(f"head must be a non-negative integer, got {head_col!r}", line_no)
        head = int(head_col)
        if head == index:
            raise MalformedLineError(f"token {index} is its own head", line_no)
        tokens.append(
            ParsedToken(index=index, form=cols[1], lemma=cols[2], upos=cols[3], head=head, deprel=cols[7])
        )
    flush(len(text.splitlines()) + 1)
    return sentences


def _check_heads(sentence: ParsedSentence):
    n = len(sentence.tokens)
    for tok in sentence.tokens:
        if tok.head > n:
            raise MalformedLineError(f"token {tok.index} has head {tok.head} outside the sentence", 0)
        seen = set()
        cur = tok.index
        while cur != 0:
            if cur in seen:
                raise CyclicHeadError(sentence.sent_id, tok.index)
            seen.add(cur)
            cur = sentence.token(cur).head


def serialize_conllu(sentence: ParsedSentence) -> str:
    """Inverse of :func:`parse_conllu` for the fields this module keeps."""
    lines = []
    if sentence.sent_id:
        lines.append(f"# sent_id = {sentence.sent_id}")
    if sentence.text is not None:
        lines.append(f"# text = {sentence.text}")
    mwt_by_start = {m.start: m for m in sentence.multiword_tokens}
    for tok in sentence.tokens:
        mwt = mwt_by_start.get(tok.index)
        if mwt is not None:
            lines.append("\t".join([f"{mwt.start}-{mwt.end}", mwt.form, "_", "_", "_", "_", "_", "_", "_", "_"]))
        lines.append(
            "\t".join(
                [str(tok.index), tok.form, tok.lemma, tok.upos, "_", "_", str(tok.head), tok.deprel, "_", "_"]
            )
        )
    return "\n".join(lines) + "\n"


_NO_SPACE_BEFORE = set(".,;:!?%)]}»…")
_NO_SPACE_AFTER = set("([{«")


def detokenize(surfaces: list[str] | tuple[str, ...]) -> str:
    """Join surface tokens, attaching punctuation without surrounding spaces."""
    out: list[str] = []
    for surface in surfaces:
        if out and (surface and surface[0] in _NO_SPACE_BEFORE and len(surface) == 1):
            out[-1] = out[-1] + surface
        elif out and out[-1] and out[-1][-1] in _NO_SPACE_AFTER:
            out[-1] = out[-1] + surface
        else:
            out.append(surface)
    return " ".join(out)


def match_mwes(sentence: ParsedSentence, lexicon: Lexicon, language: str) -> list[LemmaSpan]:
    """Greedy longest-match of lexicon MWEs over the lemma sequence.

    Longer matches win over shorter ones, leftmost wins ties, and accepted
    spans never overlap.  Remaining content tokens (universal POS not in
    :data:`FUNCTION_UPOS`) become single-lemma spans.
    """
    lemmas = [tok.lemma for tok in sentence.tokens]
    folded = [l.casefold() for l in lemmas]
    mwe_seqs = {tuple(m.casefold().split(" ")): m for m in lexicon.mwe_lemmas(language)}

    candidates: list[tuple[int, int]] = []  # (start index 0-based, n tokens)
    for seq in mwe_seqs:
        n = len(seq)
        for start in range(0, len(folded) - n + 1):
            if tuple(folded[start : start + n]) == seq:
                candidates.append((start, n))

    taken: set[int] = set()
    spans: list[LemmaSpan] = []
    for start, n in sorted(candidates, key=lambda c: (-c[1], c[0])):
        covered = range(start, start + n)
        if any(i in taken for i in covered):
            continue
        taken.update(covered)
        spans.append(
            LemmaSpan(
                token_indices=tuple(i + 1 for i in covered),
                surface_lemma=" ".join(lemmas[i] for i in covered),
                is_mwe=True,
            )
        )

    for i, tok in enumerate(sentence.tokens):
        if i in taken or tok.upos in FUNCTION_UPOS:
            continue
        spans.append(LemmaSpan(token_indices=(tok.index,), surface_lemma=tok.lemma, is_mwe=False))

    spans.sort(key=lambda s: s.start)
    return spans


def _span_head(sentence: ParsedSentence, span: LemmaSpan) -> ParsedToken:
    inside = set(span.token_indices)
    for idx in span.token_indices:
        tok = sentence.token(idx)
        if tok.head == 0 or tok.head not in inside:
            return tok
    return sentence.token(span.token_indices[0])


def build_clusters(sentence: ParsedSentence, spans: list[LemmaSpan]) -> list[Cluster]:
    """Partition spans into clusters of directly associated lemmas.

    Two spans share a cluster iff one's head token lies inside the other,
    or both attach to the same verbal span.  Clusters are the connected
    components of that relation; ids are derived from the leftmost token.
    """
    if not spans:
        return []
    index_of = {span: i for i, span in enumerate(spans)}
    token_to_span: dict[int, int] = {}
    for i, span in enumerate(spans):
        for idx in span.token_indices:
            token_to_span[idx] = i

    attaches_to: list[int | None] = []
    for span in spans:
        head_tok = _span_head(sentence, span)
        target = token_to_span.get(head_tok.head)
        attaches_to.append(target if target is not None and target != index_of[span] else None)

    is_verbal = [any(sentence.token(i).upos == "VERB" for i in span.token_indices) for span in spans]

    parent = list(range(len(spans)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for i, target in enumerate(attaches_to):
        if target is not None:
            union(i, target)
    # co-dependents of the same verbal span
    by_target: dict[int, list[int]] = {}
    for i, target in enumerate(attaches_to):
        if target is not None and is_verbal[target]:
            by_target.setdefault(target, []).append(i)
    for members in by_target.values():
        for other in members[1:]:
            union(members[0], other)

    groups: dict[int, list[LemmaSpan]] = {}
    for i, span in enumerate(spans):
        groups.setdefault(find(i), []).append(span)

    clusters = [
        Cluster(id=f"c{min(s.start for s in members)}", members=tuple(sorted(members, key=lambda s: s.start)))
        for members in groups.values()
    ]
    clusters.sort(key=lambda c: c.members[0].start)
    return clusters
