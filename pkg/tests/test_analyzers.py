import pytest
from hypothesis import given
from hypothesis import strategies as st

from medread.analyzers import NoWordsError, count_syllables, is_word, sentence_stats, word_chars

from strategies import token


@pytest.mark.parametrize(
    "word,n",
    [("a", 1), ("table", 2), ("readability", 5), ("the", 1), ("make", 1), ("be", 1),
     ("little", 2), ("apple", 2), ("rhythm", 1), ("95", 1), ("%", 1), ("Plasmodium", 3), ("medical", 3)],
)
def test_count_syllables(word, n):
    assert count_syllables(word) == n


@pytest.mark.parametrize("word,n", [("Go", 2), ("anti-tumour", 10), ("95%", 2), (".", 0)])
def test_word_chars(word, n):
    assert word_chars(word) == n


def test_is_word():
    assert is_word("95%")
    assert not is_word(".")
    assert not is_word("--")


def test_stats_examples():
    s = sentence_stats(["Go", "."])
    assert (s.n_words, s.n_chars, s.n_syllables, s.n_polysyllables) == (1, 2, 1, 0)
    s = sentence_stats(["The", "cat", "sat"])
    assert (s.n_words, s.n_unique_words, s.n_syllables) == (3, 3, 3)
    s = sentence_stats(["the", "The"])
    assert (s.n_words, s.n_unique_words) == (2, 1)


def test_polysyllables():
    s = sentence_stats(["readability", "of", "medical", "text"])
    assert s.per_word_syllables == (5, 1, 3, 1)
    assert s.n_polysyllables == s.n_syll2 == 2


def test_no_words():
    with pytest.raises(NoWordsError, match="no words"):
        sentence_stats([".", ","])
    with pytest.raises(NoWordsError):
        sentence_stats([])


@given(st.text(min_size=1, max_size=20))
def test_syllables_at_least_one(word):
    assert count_syllables(word) >= 1


@given(st.lists(token, min_size=1, max_size=30))
def test_stats_invariants(tokens):
    try:
        s = sentence_stats(tokens)
    except NoWordsError:
        assert not any(is_word(t) for t in tokens)
        return
    assert 1 <= s.n_unique_words <= s.n_words
    assert s.n_syllables >= s.n_words
    assert 0 <= s.n_polysyllables <= s.n_words
    assert s.n_chars >= s.n_words
    assert sentence_stats(list(reversed(tokens))) == s.__class__(
        s.n_words, s.n_unique_words, s.n_chars, s.n_syllables, s.n_polysyllables,
        tuple(reversed(s.per_word_syllables)),
    )
