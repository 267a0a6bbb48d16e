import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.stats import pearsonr

from medread.corpus import AnnotatedSentence
from medread.stats import (
    BootstrapConfig,
    UndefinedStatistic,
    bootstrap_ci,
    correlate,
    feature_correlations,
    grouped_correlation,
    kendall_tau_like,
    krippendorff_alpha_interval,
    length_bucketed_correlation,
    pearson,
    quartile_boundaries,
    source_group,
)


def test_pearson_examples():
    assert pearson([1, 2, 3, 5], [1, 2, 3, 5]) == 1.0
    assert pearson([1, 2, 3], [-1, -2, -3]) == -1.0
    assert pearson([1, 2, 3], [2, 1, 4]) == pytest.approx(6 / math.sqrt(84), abs=1e-4)
    assert pearson([1, 2, 3], [2, 1, 4]) == pytest.approx(0.6547, abs=1e-4)
    with pytest.raises(UndefinedStatistic):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(UndefinedStatistic):
        pearson([1, 2], [1, 2])
    with pytest.raises(ValueError):
        pearson([1, 2, 3], [1, 2])


finite = st.floats(-1e3, 1e3, allow_nan=False)


@given(st.lists(st.tuples(finite, finite), min_size=3, max_size=40))
def test_pearson_matches_scipy(pairs):
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    assume(np.std(x) > 1e-6 and np.std(y) > 1e-6)
    assert pearson(x, y) == pytest.approx(pearsonr(x, y).statistic, abs=1e-9)


def test_kendall_examples():
    assert kendall_tau_like([1, 2, 3], [1, 2, 3]) == 1.0
    assert kendall_tau_like([1, 2, 3], [1, 3, 2]) == pytest.approx(1 / 3, abs=1e-4)
    assert kendall_tau_like([1, 2], [5, 5]) == -1.0
    with pytest.raises(UndefinedStatistic):
        kendall_tau_like([2, 2, 2], [1, 2, 3])


def _kendall_bruteforce(g, p):
    conc = disc = 0
    for i, j in itertools.combinations(range(len(g)), 2):
        if g[i] == g[j]:
            continue
        if (g[i] - g[j]) * (p[i] - p[j]) > 0:
            conc += 1
        else:
            disc += 1
    return (conc - disc) / (conc + disc)


small = st.integers(0, 5)


@given(st.lists(st.tuples(small, small), min_size=2, max_size=25))
def test_kendall_matches_bruteforce(pairs):
    g = [a for a, _ in pairs]
    p = [b for _, b in pairs]
    assume(len(set(g)) > 1)
    assert kendall_tau_like(g, p) == pytest.approx(_kendall_bruteforce(g, p), abs=1e-12)


def _alpha_coincidence(units):
    """Krippendorff interval alpha from an explicit coincidence matrix."""
    units = [[v for v in u if v is not None] for u in units]
    units = [u for u in units if len(u) >= 2]
    values = sorted({v for u in units for v in u})
    index = {v: i for i, v in enumerate(values)}
    o = np.zeros((len(values), len(values)))
    for u in units:
        for a, b in itertools.permutations(range(len(u)), 2):
            o[index[u[a]], index[u[b]]] += 1 / (len(u) - 1)
    n_c = o.sum(axis=1)
    n = n_c.sum()
    delta = np.array([[(a - b) ** 2 for b in values] for a in values])
    d_o = (o * delta).sum() / n
    d_e = (np.outer(n_c, n_c) * delta).sum() / (n * (n - 1))
    return 1 - d_o / d_e


def test_krippendorff_examples():
    assert krippendorff_alpha_interval([[1, 1], [2, 2], [3, 3]]) == 1.0
    assert krippendorff_alpha_interval([[1, 2], [2, 1]]) == pytest.approx(-0.5, abs=1e-4)
    with pytest.raises(ValueError):
        krippendorff_alpha_interval([[1, 2]])
    with pytest.raises(ValueError):
        krippendorff_alpha_interval([[2, 2], [2, 2]])


@given(st.lists(st.lists(st.one_of(st.none(), st.integers(1, 6)), min_size=2, max_size=4), min_size=2, max_size=12))
def test_krippendorff_matches_coincidence_matrix(units):
    pairable = [[v for v in u if v is not None] for u in units]
    pairable = [u for u in pairable if len(u) >= 2]
    assume(len(pairable) >= 2 and len({v for u in pairable for v in u}) > 1)
    assert krippendorff_alpha_interval(units) == pytest.approx(_alpha_coincidence(units), abs=1e-9)


def test_bootstrap_perfect_and_deterministic():
    x = list(range(20))
    assert bootstrap_ci(x, x, iters=200) == (1.0, 1.0)
    rng = np.random.default_rng(0)
    g = rng.normal(size=50)
    p = g + rng.normal(size=50)
    assert bootstrap_ci(g, p, seed=5) == bootstrap_ci(g, p, seed=5)
    assert bootstrap_ci(g, p, seed=5) != bootstrap_ci(g, p, seed=6)
    with pytest.raises(ValueError):
        bootstrap_ci(g, p, iters=10)


def test_correlate_with_ci():
    rng = np.random.default_rng(3)
    g = rng.normal(size=200)
    p = 0.8 * g + rng.normal(scale=0.5, size=200)
    res = correlate(g, p, "pearson", BootstrapConfig(iters=500, seed=1))
    assert res.ci[0] <= res.r <= res.ci[1]
    assert res.as_row()["n"] == 200


def _sent(sid, source, rating, n_words=5, side="complex"):
    return AnnotatedSentence(sid, source, side, "test", tuple(["w"] * n_words), rating, ())


def test_source_groups():
    assert source_group("nihr-hta") == "NIHR Series"
    assert source_group("plos-ntd") == "PLOS Series"
    assert source_group("cochrane") == "Cochrane"


def test_grouped_single_group_identity():
    corpus = [_sent(f"s{i}", "cochrane", float(i % 5 + 1)) for i in range(10)]
    gold = {s.id: s.rating for s in corpus}
    out = grouped_correlation(gold, gold, corpus)
    assert [r.r for r in out.results] == [1.0]
    assert (out.mean, out.std) == (1.0, 0.0)
    assert [row["group"] for row in out.rows()] == ["Cochrane", "Mean", "Std"]


def _group_with_r(prefix, source, target):
    # y = target * x + sqrt(1 - target^2) * z with x, z orthonormal gives r == target
    x = np.array([-1.0, 0.0, 1.0, 0.0])
    z = np.array([0.0, -1.0, 0.0, 1.0])
    y = target * x + math.sqrt(1 - target**2) * z
    corpus = [_sent(f"{prefix}{i}", source, float(y[i])) for i in range(4)]
    return corpus, {s.id: float(x[i]) for i, s in enumerate(corpus)}


def test_grouped_mean_std():
    c1, s1 = _group_with_r("a", "cochrane", 0.4)
    c2, s2 = _group_with_r("b", "msd", 0.6)
    c3 = [_sent("tiny", "wiki", 3.0)]
    corpus = c1 + c2 + c3
    gold = {s.id: s.rating for s in corpus}
    out = grouped_correlation({**s1, **s2, "tiny": 1.0}, gold, corpus)
    assert [r.r for r in out.results] == pytest.approx([0.4, 0.6])
    assert out.mean == pytest.approx(0.5)
    assert out.std == pytest.approx(0.1)
    assert out.skipped == ["Wiki"]


def test_length_buckets():
    corpus = [_sent(f"s{i}", "msd", float(i % 7), n_words=1 + i % 12) for i in range(80)]
    gold = {s.id: s.rating for s in corpus}
    scores = {s.id: s.rating + (i % 3) for i, s in enumerate(corpus)}
    whole = length_bucketed_correlation(scores, gold, corpus, [], bootstrap=None)
    assert len(whole.results) == 1
    assert whole.results[0].r == pytest.approx(kendall_tau_like(list(gold.values()), list(scores.values())))
    bounds = quartile_boundaries(corpus)
    assert len(bounds) == 3
    parts = length_bucketed_correlation(scores, gold, corpus, bounds, bootstrap=None)
    assert len(parts.results) + len(parts.skipped) == 4
    assert sum(r.n for r in parts.results) == 80
    with pytest.raises(ValueError):
        length_bucketed_correlation(scores, gold, corpus, [3, 3])


def test_feature_correlations_ranked():
    gold = {f"s{i}": float(i) for i in range(6)}
    feats = {sid: {"same": g, "neg": -g, "flat": 1.0, "noisy": g + (i % 2) * 3}
             for i, (sid, g) in enumerate(gold.items())}
    ranked = feature_correlations(feats, gold)
    assert [fc.feature for fc in ranked] == ["same", "noisy", "neg", "flat"]
    assert ranked[0].r == 1.0
    assert ranked[-1].r is None
