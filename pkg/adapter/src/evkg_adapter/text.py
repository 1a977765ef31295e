"""Token-level helpers: canonical forms, verb tests, and lemmatization."""

from __future__ import annotations

from .lexicon import IRREGULAR_VERBS, RESTORES_E, VERB_LEXICON

_PUNCT = ".,;:!?\"'()[]"
_APOSTROPHES = ("'s", "’s")
_VOWELS = set("aeiou")
_UNDOUBLED = set("bdgklmnprt")


def strip_punct(token: str) -> str:
    """Surrounding punctuation removed; interior characters untouched."""
    return token.strip(_PUNCT)


def canonical(token: str) -> str:
    """Lowercased, punctuation-stripped form used for lexicon lookups."""
    return strip_punct(token).lower()


def strip_possessive(word: str) -> tuple[str, bool]:
    for suffix in _APOSTROPHES:
        if word.endswith(suffix) and len(word) > len(suffix):
            return word[: -len(suffix)], True
    return word, False


def lemmatize_verb(token: str) -> str:
    """Best-effort lemma: irregular table, then suffix rules.

    The engine treats event text as opaque tokens, so an imperfect
    lemma harms nothing downstream; it only has to be deterministic.
    """
    word = canonical(token)
    if word in IRREGULAR_VERBS:
        return IRREGULAR_VERBS[word]
    if word in VERB_LEXICON:
        return word
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("ied") and len(word) > 4:
        return word[:-3] + "y"
    for suffix in ("ing", "ed"):
        if word.endswith(suffix) and len(word) > len(suffix) + 1:
            stem = word[: -len(suffix)]
            if (
                len(stem) >= 3
                and stem[-1] == stem[-2]
                and stem[-1] in _UNDOUBLED
                and stem[-3] in _VOWELS
            ):
                stem = stem[:-1]  # jogg -> jog
            elif stem in RESTORES_E:
                stem = stem + "e"  # hik -> hike
            return stem
    if word.endswith("es") and len(word) > 3 and word[:-2] in VERB_LEXICON:
        return word[:-2]
    if word.endswith("s") and len(word) > 2 and word[:-1] in VERB_LEXICON:
        return word[:-1]
    return word


def looks_like_verb(token: str) -> bool:
    """Conservative candidate test for the frame extractor."""
    word = canonical(token)
    if not word.isalpha():
        return False
    if word in IRREGULAR_VERBS or word in VERB_LEXICON:
        return True
    if word.endswith("ed") and len(word) > 3:
        return True
    stem = lemmatize_verb(word)
    return stem != word and stem in VERB_LEXICON
