"""Normalize raw graph node texts and densify node ids.

Person words in node texts collapse to ``[Pk]`` tokens (numbered by
first appearance within each text), so "he felt sleepy" and
"Joe felt sleepy" become the same node.  Duplicates after
normalization merge with frequencies summed; surviving nodes are
renumbered 0..N-1 in first-appearance order, and the old-to-new id
mapping is returned so callers can rewrite their edge files.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormatError
from .lexicon import NAME_LEXICON, PRONOUN_CLASS, POSSESSIVE_PRONOUNS
from .text import canonical, strip_possessive


@dataclass(frozen=True)
class NormalizedNodes:
    nodes: tuple[tuple[int, str, int], ...]  # (new_id, text, freq)
    mapping: tuple[tuple[int, int], ...]  # (old_id, new_id)


def _mention(token: str, next_token: str | None) -> tuple[str, bool] | None:
    """(referent key, possessive) when the token is a person word."""
    word = canonical(token)
    stripped, possessive = strip_possessive(word)
    if stripped in NAME_LEXICON:
        return stripped, possessive
    if word in PRONOUN_CLASS:
        # "her" is possessive only before another word ("her house"),
        # not as an object ("thank her")
        her_determiner = word == "her" and next_token is not None and bool(canonical(next_token))
        return PRONOUN_CLASS[word], word in POSSESSIVE_PRONOUNS or her_determiner
    return None


def _detached_possessive(token: str) -> bool:
    return token.rstrip(".,;:!?\"')") in ("'s", "’s")


def normalize_node_text(text: str) -> str:
    """Replace person words with ``[Pk]`` tokens, numbering per text.

    A detached possessive marker ("Tom 's boat") folds into the person
    token, matching the attached form ("Tom's boat").
    """
    tokens = text.split()
    referents: dict[str, int] = {}
    out: list[str] = []
    pos = 0
    while pos < len(tokens):
        token = tokens[pos]
        hit = _mention(token, tokens[pos + 1] if pos + 1 < len(tokens) else None)
        if hit is None:
            out.append(token)
            pos += 1
            continue
        key, possessive = hit
        if not possessive and pos + 1 < len(tokens) and _detached_possessive(tokens[pos + 1]):
            possessive = True
            pos += 1  # the marker folds into the replacement
            token = tokens[pos]  # its trailing punctuation survives
        if key not in referents:
            referents[key] = len(referents)
        ordinal = referents[key]
        replacement = f"[P{ordinal}'s]" if possessive else f"[P{ordinal}]"
        bare = token.rstrip(".,;:!?\"')")
        out.append(replacement + token[len(bare):])
        pos += 1
    return " ".join(out)


def normalize_kg_nodes(rows: list[tuple[int, str, int]]) -> NormalizedNodes:
    """Normalize, merge duplicates, and densify ids in input order."""
    seen_ids: set[int] = set()
    by_text: dict[str, int] = {}
    nodes: list[list] = []  # [new_id, text, freq]
    mapping: list[tuple[int, int]] = []
    for old_id, text, freq in rows:
        if not isinstance(old_id, int) or old_id < 0:
            raise FormatError(f"node id {old_id!r} must be a non-negative integer")
        if old_id in seen_ids:
            raise FormatError(f"duplicate node id {old_id}")
        if not isinstance(text, str) or not text.strip():
            raise FormatError(f"node {old_id} has empty text")
        if not isinstance(freq, int) or freq < 0:
            raise FormatError(f"node {old_id} has invalid freq {freq!r}")
        seen_ids.add(old_id)
        normalized = normalize_node_text(text)
        if normalized in by_text:
            new_id = by_text[normalized]
            nodes[new_id][2] += freq
        else:
            new_id = len(nodes)
            by_text[normalized] = new_id
            nodes.append([new_id, normalized, freq])
        mapping.append((old_id, new_id))
    return NormalizedNodes(
        nodes=tuple((i, t, f) for i, t, f in nodes),
        mapping=tuple(mapping),
    )
