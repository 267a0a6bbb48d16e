"""Complex-span categories and the fixed coarse-graining between them."""

from __future__ import annotations

import enum


class SpanCategory(str, enum.Enum):
    GOOGLE_EASY = "google-easy"
    GOOGLE_HARD = "google-hard"
    MEDICAL_NAME_ENTITY = "medical-name-entity"
    GENERAL_COMPLEX = "general-complex"
    MULTI_SENSE = "multi-sense"
    MEDICAL_ABBREVIATION = "medical-abbreviation"
    GENERAL_ABBREVIATION = "general-abbreviation"

    def __str__(self) -> str:
        return self.value


class Granularity(str, enum.Enum):
    BINARY = "binary"
    THREE_CLASS = "three-class"
    SEVEN_CATEGORY = "seven-category"

    @classmethod
    def parse(cls, text: str) -> "Granularity":
        aliases = {"2": cls.BINARY, "3": cls.THREE_CLASS, "7": cls.SEVEN_CATEGORY}
        if text in aliases:
            return aliases[text]
        return cls(text)


MEDICAL = "medical"
GENERAL_MULTISENSE = "general+multisense"
ABBREVIATION = "abbreviation"
COMPLEX = "complex"

THREE_CLASS_LABELS = (MEDICAL, GENERAL_MULTISENSE, ABBREVIATION)

_TO_THREE = {
    SpanCategory.GOOGLE_EASY: MEDICAL,
    SpanCategory.GOOGLE_HARD: MEDICAL,
    SpanCategory.MEDICAL_NAME_ENTITY: MEDICAL,
    SpanCategory.GENERAL_COMPLEX: GENERAL_MULTISENSE,
    SpanCategory.MULTI_SENSE: GENERAL_MULTISENSE,
    SpanCategory.MEDICAL_ABBREVIATION: ABBREVIATION,
    SpanCategory.GENERAL_ABBREVIATION: ABBREVIATION,
}

# Lexicon majority ties resolve to the earliest category in this order.
TIE_BREAK_ORDER = (
    SpanCategory.GOOGLE_HARD,
    SpanCategory.GOOGLE_EASY,
    SpanCategory.MEDICAL_NAME_ENTITY,
    SpanCategory.MEDICAL_ABBREVIATION,
    SpanCategory.GENERAL_ABBREVIATION,
    SpanCategory.GENERAL_COMPLEX,
    SpanCategory.MULTI_SENSE,
)


def labels_for(granularity: Granularity) -> tuple[str, ...]:
    if granularity is Granularity.SEVEN_CATEGORY:
        return tuple(c.value for c in SpanCategory)
    if granularity is Granularity.THREE_CLASS:
        return THREE_CLASS_LABELS
    return (COMPLEX,)


def collapse(label: SpanCategory | str, granularity: Granularity) -> str:
    """Map a category (or an already-collapsed label) to ``granularity``.

    Accepts the 7 category strings, the 3-class labels and ``"complex"``, so
    that collapsing can be composed (7 -> 3 -> binary). Asking for a finer
    granularity than the label carries raises ``ValueError``.
    """
    granularity = Granularity(granularity)
    if granularity is Granularity.BINARY:
        if label != COMPLEX and label not in THREE_CLASS_LABELS:
            _category(label)
        return COMPLEX
    if granularity is Granularity.THREE_CLASS:
        if label in THREE_CLASS_LABELS:
            return str(label)
        return _TO_THREE[_category(label)]
    return _category(label).value


def _category(label: SpanCategory | str) -> SpanCategory:
    try:
        return SpanCategory(label)
    except ValueError:
        raise ValueError(f"cannot collapse label {label!r} to a finer granularity") from None
