"""Translation evaluation: BLEU, TER (shift-aware) and HTER.

Tokenisation policy for all metrics: lowercase, terminal sentence
punctuation stripped, remaining punctuation split off as separate tokens,
whitespace split.  Word-internal hyphens and apostrophes are kept.

TER counts the minimum insertions, deletions and substitutions needed to
turn the hypothesis into the reference, plus block shifts found by the
standard greedy search (repeatedly apply the shift that most reduces the
remaining edit distance; each shift costs one edit), normalised by the
reference length.  HTER is TER against human post-edited references,
averaged over editors.  BLEU is corpus-level 4-gram with uniform weights
and brevity penalty; sentence-level reporting uses add-one smoothing.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

MAX_SHIFT_SIZE = 10
NGRAM_ORDER = 4


class MetricsError(Exception):
    pass


@dataclass(frozen=True)
class EditBreakdown:
    insertions: int
    deletions: int
    substitutions: int
    shifts: int
    reference_length: int

    @property
    def total_edits(self) -> int:
        return self.insertions + self.deletions + self.substitutions + self.shifts


@dataclass(frozen=True)
class SentenceScore:
    id: str
    bleu_smoothed: float
    ter: float
    breakdown: EditBreakdown


@dataclass(frozen=True)
class EvalReport:
    per_sentence: tuple[SentenceScore, ...]
    corpus_bleu: float
    mean_ter: float


_TOKEN_RE = re.compile(r"\w+(?:[-']\w+)*|[^\w\s]", re.UNICODE)


def tokenize_for_eval(text: str) -> list[str]:
    t = text.strip().lower()
    while t and t[-1] in ".!?":
        t = t[:-1].rstrip()
    return _TOKEN_RE.findall(t)


def _edit_distance(hyp: list[str], ref: list[str]) -> int:
    if not hyp:
        return len(ref)
    prev = list(range(len(ref) + 1))
    for i, h in enumerate(hyp, start=1):
        cur = [i]
        for j, r in enumerate(ref, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (h != r)))
        prev = cur
    return prev[-1]


def _edit_breakdown(hyp: list[str], ref: list[str]) -> tuple[int, int, int]:
    """(insertions, deletions, substitutions) from a full DP backtrace.

    Edits transform the hypothesis into the reference; ties resolve
    match > substitution > deletion > insertion for a stable breakdown.
    """
    n, m = len(hyp), len(ref)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dp[i][0] = i
    for j in range(1, m + 1):
        dp[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            dp[i][j] = min(dp[i - 1][j] + 1, dp[i][j - 1] + 1, dp[i - 1][j - 1] + (hyp[i - 1] != ref[j - 1]))
    ins = dels = subs = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] and hyp[i - 1] == ref[j - 1]:
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + 1:
            subs += 1
            i, j = i - 1, j - 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + 1:
            dels += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return ins, dels, subs


def _ref_block_positions(ref: list[str]) -> set[tuple[str, ...]]:
    blocks = set()
    for start in range(len(ref)):
        for length in range(1, min(MAX_SHIFT_SIZE, len(ref) - start) + 1):
            blocks.add(tuple(ref[start : start + length]))
    return blocks


def _best_shift(hyp: list[str], ref: list[str], current: int, ref_blocks: set) -> tuple[int, list[str]] | None:
    """Most distance-reducing single block move, or None if no move pays for itself."""
    best: tuple[int, list[str]] | None = None
    n = len(hyp)
    for start in range(n):
        for length in range(1, min(MAX_SHIFT_SIZE, n - start) + 1):
            block = tuple(hyp[start : start + length])
            if block not in ref_blocks:
                continue
            rest = hyp[:start] + hyp[start + length :]
            for pos in range(len(rest) + 1):
                if pos == start:
                    continue
                cand = rest[:pos] + list(block) + rest[pos:]
                d = _edit_distance(cand, ref)
                if d + 1 < current and (best is None or d < best[0]):
                    best = (d, cand)
    return best


def ter(hypothesis: str, reference: str) -> tuple[float, EditBreakdown]:
    """Translation edit rate of a hypothesis against one reference.

    Returns the rate as a fraction (may exceed 1) and the edit breakdown.
    """
    hyp = tokenize_for_eval(hypothesis)
    ref = tokenize_for_eval(reference)
    if not ref:
        raise MetricsError("reference is empty after tokenization")

    ref_blocks = _ref_block_positions(ref)
    current = _edit_distance(hyp, ref)
    shifts = 0
    working = hyp
    while True:
        move = _best_shift(working, ref, current, ref_blocks)
        if move is None:
            break
        current, working = move
        shifts += 1

    ins, dels, subs = _edit_breakdown(working, ref)
    breakdown = EditBreakdown(
        insertions=ins, deletions=dels, substitutions=subs, shifts=shifts, reference_length=len(ref)
    )
    return breakdown.total_edits / len(ref), breakdown


def hter(hypothesis: str, post_edits: list[str]) -> float:
    """Mean TER of the hypothesis against each human post-edited version."""
    if not post_edits:
        raise MetricsError("hter needs at least one post-edited reference")
    scores = [ter(hypothesis, edit)[0] for edit in post_edits]
    return sum(scores) / len(scores)


def _ngram_counts(tokens: list[str], order: int) -> Counter:
    return Counter(tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1))


def _pair_stats(hyp: list[str], refs: list[list[str]]) -> tuple[list[int], list[int], int, int]:
    correct = [0] * NGRAM_ORDER
    total = [0] * NGRAM_ORDER
    for n in range(1, NGRAM_ORDER + 1):
        hyp_counts = _ngram_counts(hyp, n)
        max_ref: Counter = Counter()
        for ref in refs:
            for gram, count in _ngram_counts(ref, n).items():
                if count > max_ref[gram]:
                    max_ref[gram] = count
        total[n - 1] = sum(hyp_counts.values())
        correct[n - 1] = sum(min(count, max_ref[gram]) for gram, count in hyp_counts.items())
    # closest reference length; ties prefer the shorter reference
    ref_len = min((abs(len(r) - len(hyp)), len(r)) for r in refs)[1]
    return correct, total, len(hyp), ref_len


def bleu(corpus: list[tuple[str, list[str]]]) -> float:
    """Corpus-level BLEU-4 (0-100) with uniform weights and brevity penalty."""
    if not corpus:
        raise MetricsError("bleu needs a non-empty corpus")
    correct = [0] * NGRAM_ORDER
    total = [0] * NGRAM_ORDER
    sys_len = 0
    ref_len = 0
    for hypothesis, references in corpus:
        if not references:
            raise MetricsError("every hypothesis needs at least one reference")
        hyp_tokens = tokenize_for_eval(hypothesis)
        ref_tokens = [tokenize_for_eval(r) for r in references]
        c, t, s, r = _pair_stats(hyp_tokens, ref_tokens)
        for n in range(NGRAM_ORDER):
            correct[n] += c[n]
            total[n] += t[n]
        sys_len += s
        ref_len += r
    return _bleu_from_stats(correct, total, sys_len, ref_len, smooth=False)


def sentence_bleu(hypothesis: str, references: list[str]) -> float:
    """Sentence-level BLEU with add-one smoothing for orders above 1."""
    hyp = tokenize_for_eval(hypothesis)
    refs = [tokenize_for_eval(r) for r in references]
    correct, total, sys_len, ref_len = _pair_stats(hyp, refs)
    return _bleu_from_stats(correct, total, sys_len, ref_len, smooth=True)


def _bleu_from_stats(
    correct: list[int], total: list[int], sys_len: int, ref_len: int, smooth: bool
) -> float:
    if sys_len == 0:
        return 0.0
    log_sum = 0.0
    effective = 0
    for n in range(NGRAM_ORDER):
        num, den = correct[n], total[n]
        if smooth and n > 0:
            num, den = num + 1, den + 1
        if den == 0:
            break
        if num == 0:
            return 0.0
        log_sum += math.log(num / den)
        effective += 1
    if effective == 0:
        return 0.0
    brevity = 1.0 if sys_len >= ref_len else math.exp(1.0 - ref_len / sys_len)
    return 100.0 * brevity * math.exp(log_sum / effective)


def display_percent(value: float) -> str:
    """Render a fraction as a percentage truncated to two decimals.

    Truncation (not rounding) makes per-sentence rates like 4/15 print as
    26.66, matching the conventional reporting of these metrics.
    """
    scaled = math.floor(value * 10000) / 100
    return f"{scaled:.2f}"


def evaluate_corpus(
    hypotheses: list[str], references: list[str], ids: list[str] | None = None
) -> EvalReport:
    """Line-aligned corpus evaluation with per-sentence TER and smoothed BLEU."""
    if len(hypotheses) != len(references):
        raise MetricsError(
            f"hypothesis/reference line counts differ ({len(hypotheses)} vs {len(references)})"
        )
    if not hypotheses:
        raise MetricsError("empty corpus")
    if ids is None:
        ids = [str(i + 1) for i in range(len(hypotheses))]
    per_sentence = []
    for sid, hyp, ref in zip(ids, hypotheses, references):
        rate, breakdown = ter(hyp, ref)
        per_sentence.append(
            SentenceScore(id=sid, bleu_smoothed=sentence_bleu(hyp, [ref]), ter=rate, breakdown=breakdown)
        )
    corpus_score = bleu([(h, [r]) for h, r in zip(hypotheses, references)])
    mean_ter = sum(s.ter for s in per_sentence) / len(per_sentence)
    return EvalReport(per_sentence=tuple(per_sentence), corpus_bleu=corpus_score, mean_ter=mean_ter)
