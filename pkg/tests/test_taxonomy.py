import pytest
from hypothesis import given

from medread.taxonomy import (
    COMPLEX,
    Granularity,
    SpanCategory,
    TIE_BREAK_ORDER,
    collapse,
    labels_for,
)

from strategies import categories

G = Granularity


def test_three_class_examples():
    assert collapse(SpanCategory.GOOGLE_HARD, G.THREE_CLASS) == "medical"
    assert collapse(SpanCategory.MULTI_SENSE, G.THREE_CLASS) == "general+multisense"
    assert collapse(SpanCategory.GENERAL_ABBREVIATION, G.THREE_CLASS) == "abbreviation"


@given(categories)
def test_binary_and_identity(cat):
    assert collapse(cat, G.BINARY) == COMPLEX
    assert collapse(cat, G.SEVEN_CATEGORY) == cat.value


@given(categories)
def test_collapse_composes(cat):
    assert collapse(collapse(cat, G.THREE_CLASS), G.BINARY) == collapse(cat, G.BINARY)


@pytest.mark.parametrize("g", list(G))
def test_collapse_is_surjective(g):
    assert {collapse(c, g) for c in SpanCategory} == set(labels_for(g))


def test_collapse_rejects_refinement():
    with pytest.raises(ValueError):
        collapse("medical", G.SEVEN_CATEGORY)
    with pytest.raises(ValueError):
        collapse(COMPLEX, G.THREE_CLASS)


def test_parse_aliases():
    assert G.parse("2") is G.BINARY
    assert G.parse("3") is G.THREE_CLASS
    assert G.parse("seven-category") is G.SEVEN_CATEGORY


def test_tie_order_covers_all():
    assert sorted(TIE_BREAK_ORDER) == sorted(SpanCategory)
