"""Lexical counts shared by the readability formulas and feature extraction."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_VOWELS = frozenset("aeiouy")


class NoWordsError(ValueError):
    pass


def is_word(token: str) -> bool:
    return any(ch.isalnum() for ch in token)


def count_syllables(word: str) -> int:
    """Heuristic syllable count: vowel groups minus a silent final "e".

    Letterless tokens (numbers, symbols) count as one syllable.
    """
    folded = word.casefold()
    if not any(ch.isalpha() for ch in folded):
        return 1
    count = len(_VOWEL_GROUP.findall(folded))
    letters = "".join(ch for ch in folded if ch.isalpha())
    if letters.endswith("e") and count > 1:
        consonant_le = len(letters) >= 3 and letters.endswith("le") and letters[-3] not in _VOWELS
        if not consonant_le:
            count -= 1
    return max(count, 1)


def word_chars(word: str) -> int:
    return sum(1 for ch in word if ch.isalnum())


@dataclass(frozen=True)
class SentenceStats:
    n_words: int
    n_unique_words: int
    n_chars: int
    n_syllables: int
    n_polysyllables: int
    per_word_syllables: tuple[int, ...]

    @property
    def n_syll2(self) -> int:
        """Words with more than two syllables (same as ``n_polysyllables``)."""
        return self.n_polysyllables


def words_of(tokens: Sequence[str]) -> list[str]:
    return [t for t in tokens if is_word(t)]


def sentence_stats(tokens: Sequence[str]) -> SentenceStats:
    words = words_of(tokens)
    if not words:
        raise NoWordsError("no words")
    syllables = tuple(count_syllables(w) for w in words)
    return SentenceStats(
        n_words=len(words),
        n_unique_words=len({w.casefold() for w in words}),
        n_chars=sum(word_chars(w) for w in words),
        n_syllables=sum(syllables),
        n_polysyllables=sum(1 for s in syllables if s >= 3),
        per_word_syllables=syllables,
    )
