"""Seeded synthetic corpora with the same shape as the real annotated release.

Ratings are driven by sentence length and the number of inserted jargon
spans, so every pipeline stage has signal to find. Nothing
here is meant to reproduce published numbers.
"""

from __future__ import annotations

import random

from .corpus import SOURCES, AnnotatedSentence, ComplexSpan
from .taxonomy import SpanCategory

COMMON = (
    "the of and to in a is that for it as was with be by on not he this are or his from at which "
    "but have an they you were her she there been one all we their has would when if so no will "
    "people may can more also some these other time after first most many over such into only new "
    "help patients study care people health found use could some level risk group years treatment "
    "two small large good better weeks made said show need less both each"
).split()

JARGON = {
    SpanCategory.GOOGLE_EASY: [
        "plasmodium", "tiotropium bromide", "schistosoma mansoni", "hypertension", "insulin",
        "antibiotics", "chemotherapy", "placebo", "ultrasound", "vaccination", "myocardial infarction",
    ],
    SpanCategory.GOOGLE_HARD: [
        "distributive binding mechanism", "processive nucleases", "anti-tumour necrosis factor failure",
        "oro-antral communication", "allosteric modulation",
    ],
    SpanCategory.MEDICAL_NAME_ENTITY: ["BioNTech", "Moderna", "Cochrane Library"],
    SpanCategory.GENERAL_COMPLEX: ["ameliorate", "heterogeneity", "notwithstanding", "commensurate"],
    SpanCategory.MULTI_SENSE: ["vector", "culture", "positive"],
    SpanCategory.MEDICAL_ABBREVIATION: ["LTFU", "RCT", "MRI", "HIV"],
    SpanCategory.GENERAL_ABBREVIATION: ["CI", "UK", "USA"],
}
_CATEGORIES = list(JARGON)
_CATEGORY_WEIGHTS = [57, 8, 4, 10, 1, 17, 4]

SPLIT_SIZES = {"train": 2587, "dev": 784, "test": 1140}


def make_sentence(rng: random.Random, sid: str, source: str, side: str, split: str,
                  difficulty: float) -> AnnotatedSentence:
    n_filler = max(4, int(rng.gauss(14 + 10 * difficulty, 5)))
    n_jargon = max(0, int(round(rng.gauss(3.5 * difficulty, 0.8))))
    pieces: list[tuple[list[str], SpanCategory | None]] = [([rng.choice(COMMON)], None) for _ in range(n_filler)]
    for _ in range(n_jargon):
        cat = rng.choices(_CATEGORIES, _CATEGORY_WEIGHTS)[0]
        term = rng.choice(JARGON[cat]).split()
        pieces.insert(rng.randrange(1, len(pieces) + 1), (term, cat))
    tokens: list[str] = []
    spans = []
    for words, cat in pieces:
        if cat is not None:
            spans.append(ComplexSpan(len(tokens), len(tokens) + len(words), cat))
        tokens.extend(words)
    tokens[0] = tokens[0].capitalize() if tokens[0].islower() else tokens[0]
    tokens.append(".")
    rating = 1.4 + 0.045 * n_filler + 0.55 * n_jargon + rng.gauss(0, 0.45)
    rating = round(min(6.0, max(1.0, rating)), 2)
    return AnnotatedSentence(sid, source, side, split, tuple(tokens), rating, tuple(spans))


def make_corpus(n: int = 4520, seed: int = 0) -> list[AnnotatedSentence]:
    """``n`` sentences spread over the 15 sources, both sides and the three splits."""
    rng = random.Random(seed)
    sources = [s for s in SOURCES if s != "other"]
    total = sum(SPLIT_SIZES.values())
    splits = [sp for sp, k in SPLIT_SIZES.items() for _ in range(k)]
    corpus = []
    for i in range(n):
        source = sources[i % len(sources)]
        side = "complex" if (i // len(sources)) % 2 == 0 else "simple"
        split = splits[(i * 7919) % total]
        base = 0.25 + 0.6 * (sources.index(source) / len(sources))
        difficulty = max(0.0, rng.gauss(base + (0.35 if side == "complex" else 0.0), 0.3))
        corpus.append(make_sentence(rng, f"s{i:05d}", source, side, split, difficulty))
    return corpus


def frequency_table() -> dict[str, int]:
    """Word counts over common words only, so jargon surfaces come out OOV."""
    counts: dict[str, int] = {}
    for rank, w in enumerate(COMMON):
        counts.setdefault(w, 10_000 // (rank + 1) + 1)
    return counts
