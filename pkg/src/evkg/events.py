"""Event model: role-labeled frames, person-token normalization, and
argument-dropping abstraction ladders.

A frame is one verb-centric event: a trigger verb plus role-labeled
arguments, with token spans into the source sentence.  Person mentions
inside arguments carry document-scoped coreference cluster ids; here
they are rewritten to ``[Pk]`` / ``[Pk's]`` tokens, numbered by first
appearance within the document.

Abstraction ladders drop one argument per step in fixed tier order —
general ARGM adjuncts first, then ARG2/3/4/5, then ARG1, then ARG0 —
with negation and modal arguments never dropped and the verb always
kept.  A cap limits how deep the ladder goes.

All functions here are pure; per-document work can run in parallel.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, replace
from enum import IntEnum
from functools import cached_property
from typing import Iterable, Sequence

from .errors import FormatError, InvariantError

NEGATION_ROLE = "ARGM-NEG"
MODAL_ROLE = "ARGM-MOD"
#: ARGM arguments that abstraction never removes.
PROTECTED_ROLES = frozenset({NEGATION_ROLE, MODAL_ROLE})

_ROLE_RE = re.compile(r"^(ARG[0-5]|ARGM(-[A-Z]+)?)$")
_PUNCT = frozenset(string.punctuation)


class AbstractionCap(IntEnum):
    """Deepest argument tier the ladder may drop, in increasing abstraction."""

    NONE = 0
    ARGM = 1
    ARG234 = 2
    ARG1 = 3
    ARG0 = 4

    @classmethod
    def parse(cls, name: str) -> "AbstractionCap":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            valid = ", ".join(c.name for c in cls)
            raise FormatError(f"unknown abstraction cap {name!r} (expected one of {valid})") from None


@dataclass(frozen=True)
class PersonSpan:
    """Token span (within the sentence) referring to a person."""

    start: int
    end: int
    cluster: int
    possessive: bool = False


@dataclass(frozen=True)
class Argument:
    role: str
    text: str
    start: int
    end: int
    person_spans: tuple[PersonSpan, ...] = ()


@dataclass(frozen=True)
class Verb:
    text: str
    lemma: str
    start: int
    end: int


@dataclass(frozen=True)
class SrlFrame:
    doc_id: str
    sent_idx: int
    frame_idx: int
    verb: Verb
    args: tuple[Argument, ...]
    negated: bool = False
    modal: str | None = None
    sentence: str | None = None

    @classmethod
    def from_record(cls, obj: dict) -> "SrlFrame":
        """Parse and validate one wire-format record (no location prefix)."""
        if not isinstance(obj, dict):
            raise FormatError("frame record must be an object")
        doc_id = _req(obj, "doc_id", str)
        if not doc_id:
            raise FormatError("doc_id must be non-empty")
        sent_idx = _req(obj, "sent_idx", int)
        frame_idx = _req(obj, "frame_idx", int)
        if sent_idx < 0 or frame_idx < 0:
            raise FormatError("sent_idx and frame_idx must be non-negative")
        vo = _req(obj, "verb", dict)
        verb = Verb(
            text=_req(vo, "text", str, ctx="verb"),
            lemma=_req(vo, "lemma", str, ctx="verb"),
            start=_req(vo, "start", int, ctx="verb"),
            end=_req(vo, "end", int, ctx="verb"),
        )
        if not verb.text or not verb.lemma:
            raise FormatError("verb text and lemma must be non-empty")
        _check_span(verb.text, verb.start, verb.end, what="verb")
        raw_args = obj.get("args", [])
        if not isinstance(raw_args, list):
            raise FormatError("args must be a list")
        args = tuple(_parse_argument(a) for a in raw_args)
        negated = obj.get("negated", False)
        modal = obj.get("modal")
        sentence = obj.get("sentence")
        if not isinstance(negated, bool):
            raise FormatError("negated must be a boolean")
        if modal is not None and not isinstance(modal, str):
            raise FormatError("modal must be a string or null")
        if sentence is not None and not isinstance(sentence, str):
            raise FormatError("sentence must be a string or null")
        frame = cls(doc_id, sent_idx, frame_idx, verb, args, negated, modal, sentence)
        _check_disjoint(frame)
        return frame

    def to_record(self) -> dict:
        rec: dict = {
            "doc_id": self.doc_id,
            "sent_idx": self.sent_idx,
            "frame_idx": self.frame_idx,
            "verb": {"text": self.verb.text, "lemma": self.verb.lemma, "start": self.verb.start, "end": self.verb.end},
            "args": [
                {
                    "role": a.role,
                    "text": a.text,
                    "start": a.start,
                    "end": a.end,
                    "person_spans": [
                        {"start": p.start, "end": p.end, "cluster": p.cluster, "possessive": p.possessive}
                        for p in a.person_spans
                    ],
                }
                for a in self.args
            ],
            "negated": self.negated,
            "modal": self.modal,
        }
        if self.sentence is not None:
            rec["sentence"] = self.sentence
        return rec


def _req(obj: dict, key: str, typ: type, ctx: str = ""):
    where = f"{ctx}.{key}" if ctx else key
    if key not in obj:
        raise FormatError(f"missing field {where!r}")
    val = obj[key]
    if typ is int and isinstance(val, bool) or not isinstance(val, typ):
        raise FormatError(f"field {where!r} must be {typ.__name__}")
    return val


def _check_span(text: str, start: int, end: int, what: str) -> None:
    if start < 0 or end < start:
        raise FormatError(f"{what} span [{start}, {end}) is invalid")
    n_tokens = len(text.split())
    if n_tokens != end - start:
        raise FormatError(f"{what} text has {n_tokens} tokens but its span [{start}, {end}) covers {end - start}")


def _parse_argument(obj: dict) -> Argument:
    if not isinstance(obj, dict):
        raise FormatError("argument must be an object")
    role = _req(obj, "role", str, ctx="arg")
    if not _ROLE_RE.match(role):
        raise FormatError(f"invalid argument role {role!r}")
    text = _req(obj, "text", str, ctx="arg")
    start = _req(obj, "start", int, ctx="arg")
    end = _req(obj, "end", int, ctx="arg")
    _check_span(text, start, end, what=f"argument {role}")
    raw_spans = obj.get("person_spans", [])
    if not isinstance(raw_spans, list):
        raise FormatError("person_spans must be a list")
    spans = []
    for so in raw_spans:
        if not isinstance(so, dict):
            raise FormatError("person span must be an object")
        ps = PersonSpan(
            start=_req(so, "start", int, ctx="person_span"),
            end=_req(so, "end", int, ctx="person_span"),
            cluster=_req(so, "cluster", int, ctx="person_span"),
            possessive=so.get("possessive", False),
        )
        if not isinstance(ps.possessive, bool):
            raise FormatError("possessive must be a boolean")
        if not (start <= ps.start < ps.end <= end):
            raise FormatError(f"person span [{ps.start}, {ps.end}) outside argument span [{start}, {end})")
        spans.append(ps)
    spans.sort(key=lambda p: p.start)
    for a, b in zip(spans, spans[1:]):
        if b.start < a.end:
            raise FormatError(f"person spans [{a.start}, {a.end}) and [{b.start}, {b.end}) overlap")
    return Argument(role, text, start, end, tuple(spans))


def _check_disjoint(frame: SrlFrame) -> None:
    spans = [(a.start, a.end, a.role) for a in frame.args if a.end > a.start]
    spans.append((frame.verb.start, frame.verb.end, "V"))
    spans.sort()
    for (s1, e1, r1), (s2, e2, r2) in zip(spans, spans[1:]):
        if s2 < e1:
            raise FormatError(f"spans of {r1} and {r2} overlap in frame {frame.frame_idx}")


class PersonIndex:
    """Document-scoped mapping from coreference cluster id to person ordinal."""

    def __init__(self, ordinals: dict[int, int]) -> None:
        self._ordinals = dict(ordinals)

    def ordinal(self, cluster: int) -> int:
        try:
            return self._ordinals[cluster]
        except KeyError:
            raise FormatError(f"person cluster {cluster} not present in this document's index") from None

    def token(self, cluster: int, possessive: bool = False) -> str:
        k = self.ordinal(cluster)
        return f"[P{k}'s]" if possessive else f"[P{k}]"

    def __contains__(self, cluster: int) -> bool:
        return cluster in self._ordinals

    def __len__(self) -> int:
        return len(self._ordinals)

    def as_dict(self) -> dict[int, int]:
        return dict(self._ordinals)


def build_person_index(frames: Sequence[SrlFrame]) -> PersonIndex:
    """Number clusters 0, 1, … by first appearance across the document.

    Appearance order is (sent_idx, frame_idx, argument position, span
    start), so ordinals do not depend on the order frames are supplied.
    """
    doc_ids = {f.doc_id for f in frames}
    if len(doc_ids) > 1:
        raise InvariantError(f"person index spans multiple documents: {sorted(doc_ids)}")
    mentions = []
    for frame in frames:
        for arg_pos, arg in enumerate(frame.args):
            for ps in arg.person_spans:
                mentions.append((frame.sent_idx, frame.frame_idx, arg_pos, ps.start, ps.cluster))
    mentions.sort()
    ordinals: dict[int, int] = {}
    for *_, cluster in mentions:
        if cluster not in ordinals:
            ordinals[cluster] = len(ordinals)
    return PersonIndex(ordinals)


def _person_affixes(tokens: list[str]) -> tuple[str, str]:
    """Punctuation stuck to a replaced mention ("them." → suffix ".")."""
    first = tokens[0]
    i = 0
    while i < len(first) and first[i] in _PUNCT:
        i += 1
    prefix = first[:i]
    last = tokens[-1] if len(tokens) > 1 else first[i:]
    j = len(last)
    while j > 0 and last[j - 1] in _PUNCT:
        j -= 1
    return prefix, last[j:]


def _rewrite_argument(arg: Argument, index: PersonIndex) -> Argument:
    if not arg.person_spans:
        return arg
    tokens = arg.text.split()
    for ps in sorted(arg.person_spans, key=lambda p: p.start, reverse=True):
        rel_start, rel_end = ps.start - arg.start, ps.end - arg.start
        span_tokens = tokens[rel_start:rel_end]
        if not span_tokens:
            raise FormatError(f"person span [{ps.start}, {ps.end}) selects no tokens of {arg.role}")
        prefix, suffix = _person_affixes(span_tokens)
        tokens[rel_start:rel_end] = [prefix + index.token(ps.cluster, ps.possessive) + suffix]
    return replace(arg, text=" ".join(tokens), person_spans=())


@dataclass(frozen=True)
class NormalizedEvent:
    """A frame with person mentions rewritten to ``[Pk]`` tokens."""

    frame: SrlFrame
    verb: Verb
    args: tuple[Argument, ...]

    @property
    def doc_id(self) -> str:
        return self.frame.doc_id

    @property
    def sent_idx(self) -> int:
        return self.frame.sent_idx

    @property
    def frame_idx(self) -> int:
        return self.frame.frame_idx

    @cached_property
    def plain(self) -> str:
        return _render_plain(self.verb, self.args)

    @cached_property
    def tagged(self) -> str:
        return _render_tagged(self.verb, self.args)


@dataclass(frozen=True)
class PartialEvent:
    """One rung of an abstraction ladder: the event with a subset of its args."""

    event: NormalizedEvent
    level: int
    args: tuple[Argument, ...]

    @cached_property
    def plain(self) -> str:
        return _render_plain(self.event.verb, self.args)

    @cached_property
    def tagged(self) -> str:
        return _render_tagged(self.event.verb, self.args)


def normalize_event(frame: SrlFrame, index: PersonIndex) -> NormalizedEvent:
    """Rewrite every person span to its ``[Pk]`` / ``[Pk's]`` token.

    Punctuation glued to a mention's edge tokens survives the rewrite,
    so "said goodbye to them." becomes "said goodbye to [P1]." rather
    than losing the period.  Idempotent: the output carries no person
    spans, so normalizing again is the identity.
    """
    return NormalizedEvent(
        frame=frame,
        verb=frame.verb,
        args=tuple(_rewrite_argument(a, index) for a in frame.args),
    )


def raw_event(frame: SrlFrame) -> NormalizedEvent:
    """Skip person rewriting (normalization-bypass mode); spans are discarded."""
    return NormalizedEvent(
        frame=frame,
        verb=frame.verb,
        args=tuple(replace(a, person_spans=()) for a in frame.args),
    )


def normalize_document(frames: Sequence[SrlFrame], enabled: bool = True) -> list[NormalizedEvent]:
    """Normalize all frames of one document against a shared person index."""
    if not enabled:
        return [raw_event(f) for f in frames]
    index = build_person_index(frames)
    return [normalize_event(f, index) for f in frames]


def _drop_tier(role: str) -> int:
    """Which abstraction step removes this role; 0 = never removed."""
    if role.startswith("ARGM"):
        return 0 if role in PROTECTED_ROLES else 1
    if role in ("ARG2", "ARG3", "ARG4", "ARG5"):
        return 2
    if role == "ARG1":
        return 3
    if role == "ARG0":
        return 4
    return 0


def extract_partial_events(event: NormalizedEvent, cap: AbstractionCap = AbstractionCap.ARG1) -> list[PartialEvent]:
    """Build the abstraction ladder, one argument dropped per step.

    Tier order: general ARGM adjuncts, then ARG2/3/4/5, then ARG1, then
    ARG0; within a tier the rightmost argument (by source position) goes
    first.  Negation/modal arguments and the verb always stay.  Rungs
    whose plain text duplicates an earlier rung are skipped (keeping the
    earlier, lower level); levels count drop steps, so the ladder under
    a low cap is a prefix of the ladder under any higher cap.
    """
    ladder = [PartialEvent(event, 0, event.args)]
    seen = {ladder[0].plain}
    remaining = list(event.args)
    level = 0
    for tier in (1, 2, 3, 4):
        if tier > int(cap):
            break
        while True:
            candidates = [(a.start, pos) for pos, a in enumerate(remaining) if _drop_tier(a.role) == tier]
            if not candidates:
                break
            _, drop_pos = max(candidates)
            remaining.pop(drop_pos)
            level += 1
            rung = PartialEvent(event, level, tuple(remaining))
            if rung.plain not in seen:
                seen.add(rung.plain)
                ladder.append(rung)
    return ladder


def _segments(verb: Verb, args: Sequence[Argument]) -> list[tuple[str, str]]:
    pieces = [(verb.start, 1, "V", verb.text)]
    for pos, arg in enumerate(args):
        if arg.text:
            tag = "ARGM" if arg.role.startswith("ARGM") else arg.role
            pieces.append((arg.start, 2 + pos, tag, arg.text))
    pieces.sort()
    return [(tag, text) for _, _, tag, text in pieces]


def _render_plain(verb: Verb, args: Sequence[Argument]) -> str:
    return " ".join(text for _, text in _segments(verb, args))


def _render_tagged(verb: Verb, args: Sequence[Argument]) -> str:
    return " ".join(f"{tag}: {text}" for tag, text in _segments(verb, args))


def render_text(event: NormalizedEvent | PartialEvent, style: str = "plain") -> str:
    """Deterministic text of an event: ``plain`` or ``tagged`` style."""
    if style == "plain":
        return event.plain
    if style in ("tagged", "role-tagged"):
        return event.tagged
    raise ValueError(f"style must be 'plain' or 'tagged', got {style!r}")
