"""Scoring predicted complex spans against gold, plus token-level Cohen's kappa."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import ComplexSpan
from .taxonomy import Granularity, collapse

MATCH_MODES = ("token", "partial", "exact")


@dataclass(frozen=True)
class PRF:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: "PRF") -> "PRF":
        return PRF(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


def _check(spans: Sequence[ComplexSpan], n_tokens: int | None = None) -> None:
    prev_end = 0
    for s in spans:
        if not s.start < s.end or s.start < prev_end or s.start < 0:
            raise ValueError(f"invalid span layout at ({s.start}, {s.end})")
        if n_tokens is not None and s.end > n_tokens:
            raise ValueError(f"span ({s.start}, {s.end}) exceeds {n_tokens} tokens")
        prev_end = s.end


def _token_labels(spans: Sequence[ComplexSpan], n: int, g: Granularity) -> list[str | None]:
    labels: list[str | None] = [None] * n
    for s in spans:
        label = collapse(s.category, g)
        for i in range(s.start, s.end):
            labels[i] = label
    return labels


def token_counts(
    gold: Sequence[ComplexSpan], pred: Sequence[ComplexSpan], n_tokens: int, g: Granularity
) -> PRF:
    _check(gold, n_tokens)
    _check(pred, n_tokens)
    tp = fp = fn = 0
    for gl, pl in zip(_token_labels(gold, n_tokens, g), _token_labels(pred, n_tokens, g)):
        if pl is not None and pl == gl:
            tp += 1
            continue
        if pl is not None:
            fp += 1
        if gl is not None:
            fn += 1
    return PRF(tp, fp, fn)


def partial_counts(gold: Sequence[ComplexSpan], pred: Sequence[ComplexSpan], g: Granularity) -> PRF:
    """One-to-one matching by gold start: same collapsed type and >=1 shared token."""
    _check(gold)
    _check(pred)
    used = [False] * len(pred)
    tp = 0
    for gs in sorted(gold):
        glabel = collapse(gs.category, g)
        for j, ps in enumerate(pred):
            if used[j] or ps.end <= gs.start or ps.start >= gs.end:
                continue
            if collapse(ps.category, g) == glabel:
                used[j] = True
                tp += 1
                break
    return PRF(tp, len(pred) - tp, len(gold) - tp)


def exact_counts(gold: Sequence[ComplexSpan], pred: Sequence[ComplexSpan], g: Granularity) -> PRF:
    _check(gold)
    _check(pred)
    gold_keys = Counter((s.start, s.end, collapse(s.category, g)) for s in gold)
    pred_keys = Counter((s.start, s.end, collapse(s.category, g)) for s in pred)
    tp = sum((gold_keys & pred_keys).values())
    return PRF(tp, len(pred) - tp, len(gold) - tp)


# Corpus-level entries are (gold spans, predicted spans, token count) per sentence.
SentencePair = tuple[Sequence[ComplexSpan], Sequence[ComplexSpan], int]


def token_f1(pairs: Iterable[SentencePair], g: Granularity) -> PRF:
    return sum((token_counts(gold, pred, n, g) for gold, pred, n in pairs), PRF())


def entity_partial_f1(pairs: Iterable[SentencePair], g: Granularity) -> PRF:
    return sum((partial_counts(gold, pred, g) for gold, pred, _ in pairs), PRF())


def entity_exact_f1(pairs: Iterable[SentencePair], g: Granularity) -> PRF:
    return sum((exact_counts(gold, pred, g) for gold, pred, _ in pairs), PRF())


_EVALUATORS = {"token": token_f1, "partial": entity_partial_f1, "exact": entity_exact_f1}


def evaluate(pairs: Sequence[SentencePair], g: Granularity, mode: str) -> PRF:
    return _EVALUATORS[mode](pairs, Granularity(g))


def result_rows(
    pairs: Sequence[SentencePair],
    granularities: Sequence[Granularity] = tuple(Granularity),
    modes: Sequence[str] = MATCH_MODES,
) -> list[dict]:
    rows = []
    for g in granularities:
        for mode in modes:
            prf = evaluate(pairs, g, mode)
            rows.append(
                {
                    "granularity": Granularity(g).value,
                    "match-mode": mode,
                    "tp": prf.tp,
                    "fp": prf.fp,
                    "fn": prf.fn,
                    "p": prf.precision,
                    "r": prf.recall,
                    "f1": prf.f1,
                }
            )
    return rows


def cohen_kappa_tokens(labels_a: Sequence[Sequence[str]], labels_b: Sequence[Sequence[str]]) -> float:
    if len(labels_a) != len(labels_b):
        raise ValueError(f"{len(labels_a)} vs {len(labels_b)} sentences")
    flat_a: list[str] = []
    flat_b: list[str] = []
    for i, (a, b) in enumerate(zip(labels_a, labels_b)):
        if len(a) != len(b):
            raise ValueError(f"sentence {i}: {len(a)} vs {len(b)} labels")
        flat_a.extend(a)
        flat_b.extend(b)
    n = len(flat_a)
    if n == 0:
        raise ValueError("no tokens")
    p_o = sum(x == y for x, y in zip(flat_a, flat_b)) / n
    ca, cb = Counter(flat_a), Counter(flat_b)
    p_e = sum(ca[k] * cb[k] for k in ca) / (n * n)
    if p_e == 1.0:
        raise ValueError("chance agreement is 1; kappa undefined")
    return (p_o - p_e) / (1.0 - p_e)
