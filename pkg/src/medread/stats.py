"""Correlation and agreement statistics, bootstrap intervals and grouped reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .analyzers import words_of
from .corpus import AnnotatedSentence

DEFAULT_SEED = 2024

# Display names per source group; NIHR and PLOS journals are pooled into series.
GROUP_ORDER = ("Cochrane", "PNAS", "NIHR Series", "eLife", "PLOS Series", "Wiki", "MSD", "Other")
_GROUP_NAMES = {
    "cochrane": "Cochrane",
    "pnas": "PNAS",
    "elife": "eLife",
    "wiki": "Wiki",
    "msd": "MSD",
    "other": "Other",
}


class UndefinedStatistic(ValueError):
    """The statistic has no value on this input (constant vector, no usable pairs, ...)."""


def _vectors(x: Sequence[float], y: Sequence[float], min_n: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if len(x) < min_n:
        raise UndefinedStatistic(f"need at least {min_n} points, got {len(x)}")
    return x, y


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x, y = _vectors(x, y, 3)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx, syy = float(xc @ xc), float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedStatistic("constant vector")
    r = float(xc @ yc) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def kendall_tau_like(gold: Sequence[float], pred: Sequence[float]) -> float:
    """Pairwise concordance over gold-distinct pairs; prediction ties are discordant."""
    g, p = _vectors(gold, pred, 2)
    iu = np.triu_indices(len(g), k=1)
    dg = np.sign(g[iu[0]] - g[iu[1]])
    dp = np.sign(p[iu[0]] - p[iu[1]])
    usable = dg != 0
    n_pairs = int(usable.sum())
    if n_pairs == 0:
        raise UndefinedStatistic("all gold values tied")
    concordant = int(((dg * dp) > 0)[usable].sum())
    return (2 * concordant - n_pairs) / n_pairs


STATISTICS: dict[str, Callable[[Sequence[float], Sequence[float]], float]] = {
    "pearson": pearson,
    "kendall-tau-like": kendall_tau_like,
}


@dataclass(frozen=True)
class BootstrapConfig:
    iters: int = 1000
    level: float = 0.95
    seed: int = DEFAULT_SEED


def bootstrap_ci(
    gold: Sequence[float],
    pred: Sequence[float],
    statistic: Callable[[Sequence[float], Sequence[float]], float] = pearson,
    iters: int = 1000,
    level: float = 0.95,
    seed: int = DEFAULT_SEED,
) -> tuple[float, float]:
    """Percentile bootstrap interval over resampled (gold, pred) pairs.

    Resamples where the statistic is undefined are redrawn, up to
    ``10 * iters`` redraws in total.
    """
    g, p = _vectors(gold, pred, 3)
    if iters < 100:
        raise ValueError("iters must be >= 100")
    if not 0 < level < 1:
        raise ValueError("level must be in (0, 1)")
    rng = np.random.default_rng(seed)
    n = len(g)
    values = np.empty(iters)
    redraws = 0
    k = 0
    while k < iters:
        idx = rng.integers(0, n, size=n)
        try:
            values[k] = statistic(g[idx], p[idx])
        except UndefinedStatistic:
            redraws += 1
            if redraws > 10 * iters:
                raise UndefinedStatistic("bootstrap redraw cap exceeded") from None
            continue
        k += 1
    tail = (1 - level) / 2
    low, high = np.quantile(values, [tail, 1 - tail])
    return float(low), float(high)


def krippendorff_alpha_interval(ratings: Sequence[Sequence[float | None]]) -> float:
    """Krippendorff's alpha with squared-difference distance.

    ``ratings`` is units x annotators; ``None``/NaN entries are missing.
    Units with fewer than two ratings are not pairable and are dropped.
    """
    units = []
    for row in ratings:
        vals = [float(v) for v in row if v is not None and not math.isnan(float(v))]
        if len(vals) >= 2:
            units.append(np.asarray(vals))
    if len(units) < 2:
        raise ValueError("need at least 2 units with 2 or more ratings")

    def pair_sum(v: np.ndarray) -> float:
        # sum over ordered pairs i != j of (v_i - v_j)^2
        return 2.0 * len(v) * float(v @ v) - 2.0 * float(v.sum()) ** 2

    n = sum(len(u) for u in units)
    d_obs = sum(pair_sum(u) / (len(u) - 1) for u in units) / n
    d_exp = pair_sum(np.concatenate(units)) / (n * (n - 1))
    if d_exp == 0.0:
        raise ValueError("all pairable values identical; alpha undefined")
    return 1.0 - d_obs / d_exp


@dataclass(frozen=True)
class CorrelationResult:
    statistic: str
    r: float
    n: int
    ci: tuple[float, float] | None = None
    group: str | None = None
    metric: str | None = None

    def as_row(self) -> dict:
        return {
            "group": self.group if self.group is not None else "all",
            "metric": self.metric or "",
            "r": self.r,
            "ci_low": self.ci[0] if self.ci else None,
            "ci_high": self.ci[1] if self.ci else None,
            "n": self.n,
        }


def correlate(
    gold: Sequence[float],
    pred: Sequence[float],
    statistic: str = "pearson",
    bootstrap: BootstrapConfig | None = None,
    group: str | None = None,
    metric: str | None = None,
) -> CorrelationResult:
    fn = STATISTICS[statistic]
    r = fn(gold, pred)
    ci = None
    if bootstrap is not None:
        ci = bootstrap_ci(gold, pred, fn, bootstrap.iters, bootstrap.level, bootstrap.seed)
    return CorrelationResult(statistic, r, len(gold), ci, group, metric)


def source_group(source: str) -> str:
    if source.startswith("nihr"):
        return "NIHR Series"
    if source.startswith("plos"):
        return "PLOS Series"
    return _GROUP_NAMES.get(source, source)


def gold_ratings(corpus: Iterable[AnnotatedSentence]) -> dict[str, float]:
    return {s.id: s.rating for s in corpus if s.rating is not None}


@dataclass
class GroupedCorrelation:
    results: list[CorrelationResult]
    mean: float
    std: float
    skipped: list[str] = field(default_factory=list)

    def rows(self) -> list[dict]:
        out = [r.as_row() for r in self.results]
        metric = self.results[0].metric if self.results else ""
        out.append(
            {"group": "Mean", "metric": metric or "", "r": self.mean, "ci_low": None, "ci_high": None,
             "n": sum(r.n for r in self.results)}
        )
        out.append({"group": "Std", "metric": metric or "", "r": self.std, "ci_low": None, "ci_high": None,
                    "n": len(self.results)})
        return out


def _group_key(name: str) -> tuple[int, str]:
    return (GROUP_ORDER.index(name) if name in GROUP_ORDER else len(GROUP_ORDER), name)


def grouped_correlation(
    scores: Mapping[str, float],
    gold: Mapping[str, float],
    corpus: Iterable[AnnotatedSentence],
    group_by: str = "source",
    statistic: str = "pearson",
    bootstrap: BootstrapConfig | None = None,
    metric: str | None = None,
    min_size: int = 3,
) -> GroupedCorrelation:
    """Per-group correlation plus the unweighted mean and population std over groups.

    Only sentences present in both ``scores`` and ``gold`` are evaluated.
    Groups with fewer than ``min_size`` sentences, or on which the statistic
    is undefined, are listed in ``skipped``.
    """
    members: dict[str, list[str]] = {}
    for s in corpus:
        if s.id in scores and s.id in gold:
            key = source_group(s.source) if group_by == "source" else "all"
            members.setdefault(key, []).append(s.id)
    results, skipped = [], []
    for name in sorted(members, key=_group_key):
        ids = members[name]
        if len(ids) < min_size:
            skipped.append(name)
            continue
        try:
            results.append(
                correlate([gold[i] for i in ids], [scores[i] for i in ids], statistic, bootstrap, name, metric)
            )
        except UndefinedStatistic:
            skipped.append(name)
    if not results:
        return GroupedCorrelation([], math.nan, math.nan, skipped)
    rs = np.array([r.r for r in results])
    return GroupedCorrelation(results, float(rs.mean()), float(rs.std()), skipped)


def word_count(sentence: AnnotatedSentence) -> int:
    return len(words_of(sentence.tokens))


def quartile_boundaries(corpus: Iterable[AnnotatedSentence]) -> list[float]:
    counts = [word_count(s) for s in corpus]
    if not counts:
        raise ValueError("empty corpus")
    qs = np.percentile(counts, [25, 50, 75])
    return sorted({float(q) for q in qs})


def bucket_labels(boundaries: Sequence[float]) -> list[str]:
    labels = []
    edges = [-math.inf, *boundaries, math.inf]
    for lo, hi in zip(edges, edges[1:]):
        if lo == -math.inf:
            labels.append(f"<={hi:g}")
        elif hi == math.inf:
            labels.append(f">{lo:g}")
        else:
            labels.append(f"({lo:g},{hi:g}]")
    return labels


@dataclass
class BucketedCorrelation:
    results: list[CorrelationResult]
    skipped: list[str] = field(default_factory=list)


def length_bucketed_correlation(
    scores: Mapping[str, float],
    gold: Mapping[str, float],
    corpus: Iterable[AnnotatedSentence],
    boundaries: Sequence[float],
    statistic: str = "kendall-tau-like",
    bootstrap: BootstrapConfig | None = BootstrapConfig(),
    metric: str | None = None,
) -> BucketedCorrelation:
    """Correlation within word-count buckets ``(b[i-1], b[i]]`` (open-ended at both ends)."""
    if any(b >= c for b, c in zip(boundaries, boundaries[1:])):
        raise ValueError("bucket boundaries must be strictly increasing")
    labels = bucket_labels(boundaries)
    members: list[list[str]] = [[] for _ in labels]
    for s in corpus:
        if s.id in scores and s.id in gold:
            members[int(np.searchsorted(boundaries, word_count(s), side="left"))].append(s.id)
    results, skipped = [], []
    for label, ids in zip(labels, members):
        try:
            if len(ids) < 3:
                raise UndefinedStatistic("bucket too small")
            results.append(
                correlate([gold[i] for i in ids], [scores[i] for i in ids], statistic, bootstrap, label, metric)
            )
        except UndefinedStatistic:
            skipped.append(label)
    return BucketedCorrelation(results, skipped)


@dataclass(frozen=True)
class FeatureCorrelation:
    feature: str
    r: float | None
    n: int


def feature_correlations(
    features: Mapping[str, Mapping[str, float]], gold: Mapping[str, float]
) -> list[FeatureCorrelation]:
    """Pearson of every feature with gold, best first; undefined ones trail with ``r=None``."""
    ids = [i for i in features if i in gold]
    names: list[str] = []
    for i in ids:
        for name in features[i]:
            if name not in names:
                names.append(name)
    ranked, undefined = [], []
    for name in names:
        xs = [(features[i][name], gold[i]) for i in ids if name in features[i]]
        try:
            r = pearson([a for a, _ in xs], [b for _, b in xs])
        except UndefinedStatistic:
            undefined.append(FeatureCorrelation(name, None, len(xs)))
            continue
        ranked.append(FeatureCorrelation(name, r, len(xs)))
    ranked.sort(key=lambda fc: -fc.r)
    return ranked + undefined
