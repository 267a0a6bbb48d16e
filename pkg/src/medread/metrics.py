"""Sentence-level readability formulas and their jargon-augmented variants."""

from __future__ import annotations

import csv
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Protocol, Sequence

import numpy as np

from .analyzers import NoWordsError, SentenceStats, sentence_stats, words_of

BASE_METRICS = ("length", "fkgl", "ari", "smog", "rsrs")
JAR_BASES = ("fkgl", "ari", "smog", "rsrs")
JAR_METRICS = tuple(f"{m}-jar" for m in JAR_BASES)
ALL_METRICS = BASE_METRICS + JAR_METRICS

# RSRS values sit below ~10, so they are put on a comparable scale to the
# jargon count before adding it.
JAR_SCALE = {"fkgl": 1.0, "ari": 1.0, "smog": 1.0, "rsrs": 100.0}

DEFAULT_GRID = (0.0, 20.0, 0.05)


@dataclass(frozen=True)
class MetricScore:
    metric: str
    value: float
    components: dict[str, float] = field(default_factory=dict)


def _require_words(stats: SentenceStats) -> None:
    if stats.n_words < 1:
        raise NoWordsError("no words")


def fkgl(stats: SentenceStats) -> float:
    _require_words(stats)
    return 0.39 * stats.n_words + 11.8 * (stats.n_syllables / stats.n_words) - 15.59


def ari(stats: SentenceStats) -> float:
    _require_words(stats)
    return 4.71 * (stats.n_chars / stats.n_words) + 0.5 * stats.n_words - 21.43


def smog(stats: SentenceStats) -> float:
    _require_words(stats)
    return 1.0430 * math.sqrt(stats.n_polysyllables * 30.0) + 3.1291


def length_baseline(stats: SentenceStats) -> float:
    return float(stats.n_words)


class SurprisalProvider(Protocol):
    def surprisal(self, word: str) -> tuple[float, bool]:
        """Return (negative log-likelihood of ``word``, whether it is out of vocabulary)."""
        ...


class UnigramProvider:
    """Add-one smoothed unigram surprisal from a word-count table.

    ``wnll(w) = -log((count(w) + 1) / (N + V))`` with ``N`` the total count
    and ``V`` the number of types; words absent from the table are OOV.
    """

    def __init__(self, counts: Mapping[str, int]):
        self.counts = {w.casefold(): int(c) for w, c in counts.items()}
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("negative word count")
        self.total = sum(self.counts.values())
        self._log_denominator = math.log(self.total + len(self.counts))

    @classmethod
    def from_tsv(cls, path: str | os.PathLike) -> "UnigramProvider":
        counts: Counter[str] = Counter()
        with open(path, encoding="utf-8", newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE), 1):
                if not row or not row[0].strip():
                    continue
                if len(row) != 2:
                    raise ValueError(f"{path}:{lineno}: expected word<TAB>count")
                counts[row[0].strip().casefold()] += int(row[1])
        return cls(counts)

    def surprisal(self, word: str) -> tuple[float, bool]:
        count = self.counts.get(word.casefold())
        oov = count is None
        return self._log_denominator - math.log((count or 0) + 1), oov


def rsrs(tokens: Sequence[str], provider: SurprisalProvider) -> float:
    """Ranked sentence readability score.

    Word losses are sorted ascending; the loss at rank ``i`` (1-based) is
    weighted by ``sqrt(i)`` for in-vocabulary words and ``i`` for OOV words,
    and the weighted sum is divided by the word count.
    """
    words = words_of(tokens)
    if not words:
        raise NoWordsError("no words")
    losses = []
    for w in words:
        wnll, oov = provider.surprisal(w)
        if not math.isfinite(wnll) or wnll < 0:
            raise ValueError(f"provider returned invalid loss {wnll!r} for {w!r}")
        losses.append((wnll, bool(oov)))
    # ties on loss put in-vocabulary words first, keeping the score order-free
    losses.sort()
    total = 0.0
    for rank, (wnll, oov) in enumerate(losses, start=1):
        total += (float(rank) if oov else math.sqrt(rank)) * wnll
    return total / len(words)


def score(metric: str, tokens: Sequence[str], provider: SurprisalProvider | None = None) -> MetricScore:
    """Score one sentence with a base metric, recording the formula inputs."""
    stats = sentence_stats(tokens)
    components: dict[str, float] = {"n_words": stats.n_words}
    if metric == "length":
        value = length_baseline(stats)
    elif metric == "fkgl":
        value = fkgl(stats)
        components["n_syllables"] = stats.n_syllables
    elif metric == "ari":
        value = ari(stats)
        components["n_chars"] = stats.n_chars
    elif metric == "smog":
        value = smog(stats)
        components["n_polysyllables"] = stats.n_polysyllables
    elif metric == "rsrs":
        if provider is None:
            raise ValueError("rsrs needs a surprisal provider")
        value = rsrs(tokens, provider)
    else:
        raise ValueError(f"unknown base metric {metric!r}")
    return MetricScore(metric, value, components)


def jar_variant(base: MetricScore, jargon_span_count: int, alpha: float) -> MetricScore:
    if base.metric not in JAR_SCALE:
        raise ValueError(f"no jargon variant for metric {base.metric!r}")
    if alpha < 0 or jargon_span_count < 0:
        raise ValueError("alpha and jargon span count must be non-negative")
    scale = JAR_SCALE[base.metric]
    components = dict(base.components)
    components.update(jargon_spans=jargon_span_count, alpha=alpha, scale=scale)
    return MetricScore(f"{base.metric}-jar", scale * base.value + alpha * jargon_span_count, components)


def alpha_grid(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0 or hi < lo:
        raise ValueError(f"degenerate grid {lo}:{hi}:{step}")
    n = int(math.floor((hi - lo) / step + 1e-9))
    if n < 1:
        raise ValueError(f"degenerate grid {lo}:{hi}:{step}")
    return np.round(lo + step * np.arange(n + 1), 10)


def _pearson_or_none(x: np.ndarray, y: np.ndarray) -> float | None:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        return None
    return float(xc @ yc) / denom


@dataclass(frozen=True)
class AlphaSearch:
    alpha: float
    pearson: float
    curve: tuple[tuple[float, float | None], ...]


def search_alpha(
    dev: Iterable[tuple[float, int, float]],
    metric: str = "fkgl",
    grid: tuple[float, float, float] = DEFAULT_GRID,
) -> AlphaSearch:
    """Grid-search the jargon weight maximizing dev Pearson with gold ratings.

    ``dev`` holds ``(base score, jargon span count, gold rating)`` triples;
    base scores are unscaled. Ties go to the smallest alpha.
    """
    rows = np.asarray(list(dev), dtype=float)
    if rows.ndim != 2 or len(rows) < 3:
        raise ValueError("need at least 3 dev points")
    base, counts, gold = JAR_SCALE[metric] * rows[:, 0], rows[:, 1], rows[:, 2]
    if np.ptp(gold) == 0:
        raise ValueError("gold ratings are constant; correlation undefined")
    best_alpha, best_r = None, -math.inf
    curve = []
    for alpha in alpha_grid(*grid):
        r = _pearson_or_none(base + alpha * counts, gold)
        curve.append((float(alpha), r))
        if r is not None and r > best_r + 1e-12:
            best_alpha, best_r = float(alpha), r
    if best_alpha is None:
        raise ValueError("correlation undefined at every grid point")
    return AlphaSearch(best_alpha, best_r, tuple(curve))


def tune_alpha(
    dev: Iterable[tuple[float, int, float]],
    metric: str = "fkgl",
    grid: tuple[float, float, float] = DEFAULT_GRID,
) -> float:
    return search_alpha(dev, metric, grid).alpha


def read_alpha_file(path: str | os.PathLike) -> dict[str, float]:
    alphas = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), 1):
            if not row or not row[0].strip():
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected metric<TAB>alpha")
            metric = row[0].strip().removesuffix("-jar")
            if metric not in JAR_SCALE:
                raise ValueError(f"{path}:{lineno}: unknown metric {row[0]!r}")
            alphas[metric] = float(row[1])
    return alphas


def format_alpha_file(alphas: Mapping[str, float]) -> str:
    return "".join(f"{m}\t{alphas[m]:g}\n" for m in JAR_BASES if m in alphas)
