"""Tests for frame parsing, person normalization, and abstraction ladders."""

from __future__ import annotations

import random

import pytest

from evkg.errors import FormatError, InvariantError
from evkg.events import (
    AbstractionCap,
    Argument,
    PersonSpan,
    SrlFrame,
    Verb,
    build_person_index,
    extract_partial_events,
    normalize_document,
    normalize_event,
    raw_event,
    render_text,
)


def frame(doc_id, sent_idx, frame_idx, verb, args, **kw):
    return SrlFrame(doc_id, sent_idx, frame_idx, verb, tuple(args), **kw)


def wine_party_frames():
    """Three-sentence story: a general drinks, feels sleepy, says goodbye."""
    f0 = frame(
        "story", 0, 0,
        Verb("had", "have", 2, 3),
        [
            Argument("ARG0", "The general", 0, 2, (PersonSpan(0, 2, cluster=7),)),
            Argument("ARG1", "some wine", 3, 5),
            Argument("ARGM-LOC", "at a party.", 5, 8),
        ],
    )
    f1 = frame(
        "story", 1, 0,
        Verb("felt", "feel", 1, 2),
        [
            Argument("ARG0", "He", 0, 1, (PersonSpan(0, 1, cluster=7),)),
            Argument("ARG1", "sleepy.", 2, 3),
        ],
    )
    f2 = frame(
        "story", 2, 0,
        Verb("said", "say", 1, 2),
        [
            Argument("ARG0", "He", 0, 1, (PersonSpan(0, 1, cluster=7),)),
            Argument("ARG1", "goodbye", 2, 3),
            Argument("ARG2", "to them.", 3, 5, (PersonSpan(4, 5, cluster=3),)),
        ],
    )
    return [f0, f1, f2]


def evacuation_event():
    f = frame(
        "news", 0, 0,
        Verb("evacuated", "evacuate", 1, 2),
        [
            Argument("ARG0", "She", 0, 1, (PersonSpan(0, 1, cluster=0),)),
            Argument("ARG2", "to a relative 's house", 2, 7),
            Argument("ARGM-TMP", "last night", 7, 9),
        ],
    )
    return normalize_event(f, build_person_index([f]))


def test_person_index_orders_by_first_appearance():
    frames = wine_party_frames()
    index = build_person_index(frames)
    assert index.ordinal(7) == 0
    assert index.ordinal(3) == 1
    assert index.token(7) == "[P0]"
    assert index.token(3, possessive=True) == "[P1's]"


def test_wine_party_normalization():
    frames = wine_party_frames()
    events = normalize_document(frames)
    assert [e.plain for e in events] == [
        "[P0] had some wine at a party.",
        "[P0] felt sleepy.",
        "[P0] said goodbye to [P1].",
    ]


def test_normalization_is_idempotent():
    frames = wine_party_frames()
    index = build_person_index(frames)
    for f in frames:
        once = normalize_event(f, index)
        renormalized_input = SrlFrame(
            f.doc_id, f.sent_idx, f.frame_idx, once.verb, once.args, f.negated, f.modal, f.sentence
        )
        again = normalize_event(renormalized_input, index)
        assert again.plain == once.plain
        assert again.tagged == once.tagged


def test_possessive_token():
    f = frame(
        "d", 0, 0,
        Verb("painted", "paint", 1, 2),
        [
            Argument("ARG0", "They", 0, 1, (PersonSpan(0, 1, cluster=4),)),
            Argument("ARG1", "their house", 2, 4, (PersonSpan(2, 3, cluster=9, possessive=True),)),
        ],
    )
    event = normalize_event(f, build_person_index([f]))
    assert event.plain == "[P0] painted [P1's] house"


def test_no_person_spans_is_identity():
    f = frame("d", 0, 0, Verb("rained", "rain", 1, 2), [Argument("ARGM-TMP", "all day", 2, 4)])
    event = normalize_event(f, build_person_index([f]))
    assert event.plain == "rained all day"
    assert event.args == f.args


def test_punctuation_survives_replacement():
    f = frame(
        "d", 0, 0,
        Verb("waved", "wave", 1, 2),
        [
            Argument("ARG0", "She", 0, 1, (PersonSpan(0, 1, cluster=1),)),
            Argument("ARG2", "at Mom!", 2, 4, (PersonSpan(3, 4, cluster=2),)),
        ],
    )
    event = normalize_event(f, build_person_index([f]))
    assert event.plain == "[P0] waved at [P1]!"


def test_unknown_cluster_raises():
    frames = wine_party_frames()
    index = build_person_index(frames[:2])  # cluster 3 unseen
    with pytest.raises(FormatError, match="cluster 3"):
        normalize_event(frames[2], index)


def test_index_is_document_scoped():
    doc_a = wine_party_frames()
    doc_b = [SrlFrame("other", f.sent_idx, f.frame_idx, f.verb, f.args) for f in reversed(doc_a)]
    with pytest.raises(InvariantError):
        build_person_index(doc_a + doc_b)
    # same clusters, numbered independently per document
    index_b = build_person_index(doc_b)
    assert index_b.ordinal(7) == 0
    assert index_b.ordinal(3) == 1


def test_ordinals_stable_under_frame_permutation():
    frames = wine_party_frames()
    extra = frame(
        "story", 2, 1,
        Verb("nodded", "nod", 1, 2),
        [Argument("ARG0", "The host", 0, 2, (PersonSpan(0, 2, cluster=11),))],
    )
    base = build_person_index(frames + [extra])
    shuffled = build_person_index([extra] + frames[::-1])
    assert base.as_dict() == shuffled.as_dict()


def test_raw_event_skips_rewriting():
    f = wine_party_frames()[0]
    event = raw_event(f)
    assert event.plain == "The general had some wine at a party."
    assert all(not a.person_spans for a in event.args)


def test_evacuation_ladder_full_cap():
    ladder = extract_partial_events(evacuation_event(), AbstractionCap.ARG0)
    assert [p.tagged for p in ladder] == [
        "ARG0: [P0] V: evacuated ARG2: to a relative 's house ARGM: last night",
        "ARG0: [P0] V: evacuated ARG2: to a relative 's house",
        "ARG0: [P0] V: evacuated",
        "V: evacuated",
    ]
    assert [p.level for p in ladder] == [0, 1, 2, 3]
    assert render_text(ladder[2], "plain") == "[P0] evacuated"


def test_verb_only_ladder_has_one_rung():
    f = frame("d", 0, 0, Verb("sneezed", "sneeze", 0, 1), [])
    ladder = extract_partial_events(raw_event(f), AbstractionCap.ARG0)
    assert len(ladder) == 1
    assert ladder[0].tagged == "V: sneezed"


def test_negation_and_modal_never_dropped():
    f = frame(
        "d", 0, 0,
        Verb("leave", "leave", 3, 4),
        [
            Argument("ARG0", "[P0]", 0, 1),
            Argument("ARGM-MOD", "will", 1, 2),
            Argument("ARGM-NEG", "not", 2, 3),
            Argument("ARG1", "the city", 4, 6),
        ],
    )
    ladder = extract_partial_events(raw_event(f), AbstractionCap.ARG1)
    assert len(ladder) == 2  # only ARG1 is droppable under this cap
    for rung in ladder:
        roles = {a.role for a in rung.args}
        assert "ARGM-NEG" in roles
        assert "ARGM-MOD" in roles
    assert ladder[1].plain == "[P0] will not leave"


def test_cap_sequences_are_prefixes():
    event = evacuation_event()
    caps = [AbstractionCap.NONE, AbstractionCap.ARGM, AbstractionCap.ARG234, AbstractionCap.ARG1, AbstractionCap.ARG0]
    ladders = [[(p.level, p.tagged) for p in extract_partial_events(event, c)] for c in caps]
    for shallow, deep in zip(ladders, ladders[1:]):
        assert deep[: len(shallow)] == shallow
    assert len(ladders[0]) == 1


def test_rightmost_argument_drops_first():
    f = frame(
        "d", 0, 0,
        Verb("drove", "drive", 1, 2),
        [
            Argument("ARG0", "[P0]", 0, 1),
            Argument("ARGM-MNR", "carefully", 2, 3),
            Argument("ARGM-TMP", "at dawn", 3, 5),
        ],
    )
    ladder = extract_partial_events(raw_event(f), AbstractionCap.ARGM)
    assert [p.plain for p in ladder] == [
        "[P0] drove carefully at dawn",
        "[P0] drove carefully",
        "[P0] drove",
    ]


def test_arg5_drops_with_arg234_tier():
    f = frame(
        "d", 0, 0,
        Verb("bet", "bet", 1, 2),
        [
            Argument("ARG0", "[P0]", 0, 1),
            Argument("ARG1", "ten dollars", 2, 4),
            Argument("ARG5", "against the odds", 4, 7),
        ],
    )
    ladder = extract_partial_events(raw_event(f), AbstractionCap.ARG234)
    assert [p.plain for p in ladder] == ["[P0] bet ten dollars against the odds", "[P0] bet ten dollars"]


def test_duplicate_rungs_deduplicated_keeping_lowest_level():
    # an empty-text argument renders to nothing, so dropping it changes no text
    f = frame(
        "d", 0, 0,
        Verb("slept", "sleep", 1, 2),
        [
            Argument("ARG0", "[P0]", 0, 1),
            Argument("ARGM-TMP", "", 3, 3),
            Argument("ARGM-LOC", "at home", 4, 6),
        ],
    )
    ladder = extract_partial_events(raw_event(f), AbstractionCap.ARG0)
    texts = [p.plain for p in ladder]
    assert texts == ["[P0] slept at home", "[P0] slept", "slept"]
    assert [p.level for p in ladder] == [0, 1, 3]  # level 2 collapsed into level 1


def test_monotone_shrinkage_random_frames():
    rng = random.Random(31337)
    roles = ["ARG0", "ARG1", "ARG2", "ARG3", "ARG4", "ARGM-TMP", "ARGM-LOC", "ARGM-MNR", "ARGM-NEG", "ARGM-MOD"]
    words = "red blue fast slow home away night morning river stone".split()
    for _ in range(50):
        k = rng.randrange(0, 7)
        chosen = rng.sample(roles, k)
        cursor = 0
        args = []
        verb_slot = rng.randrange(0, k + 1)
        verb = None
        for pos in range(k + 1):
            width = rng.randrange(1, 4)
            text = " ".join(rng.choice(words) for _ in range(width))
            if pos == verb_slot:
                verb = Verb(text.split()[0], text.split()[0], cursor, cursor + 1)
                cursor += 1
            else:
                args.append(Argument(chosen[pos if pos < verb_slot else pos - 1], text, cursor, cursor + width))
                cursor += width
        event = raw_event(frame("d", 0, 0, verb, args))
        ladder = extract_partial_events(event, AbstractionCap.ARG0)
        for a, b in zip(ladder, ladder[1:]):
            assert len(b.args) < len(a.args)
            assert set(b.args) < set(a.args)
            assert b.level > a.level
        protected = {a.role for a in args if a.role in ("ARGM-NEG", "ARGM-MOD")}
        final_roles = {a.role for a in ladder[-1].args}
        assert protected <= final_roles


def test_render_is_stable():
    event = evacuation_event()
    assert render_text(event, "tagged") == render_text(event, "tagged")
    with pytest.raises(ValueError):
        render_text(event, "fancy")


def test_record_round_trip():
    for f in wine_party_frames():
        rec = f.to_record()
        assert SrlFrame.from_record(rec) == f


def test_record_round_trip_with_optional_fields():
    f = frame(
        "d", 1, 2,
        Verb("go", "go", 2, 3),
        [Argument("ARGM-MOD", "will", 1, 2)],
        negated=True,
        modal="will",
        sentence="He will not go.",
    )
    assert SrlFrame.from_record(f.to_record()) == f


@pytest.mark.parametrize(
    "mutate,message_part",
    [
        (lambda r: r.pop("doc_id"), "doc_id"),
        (lambda r: r.update(sent_idx=-1), "non-negative"),
        (lambda r: r["verb"].update(text=""), "non-empty"),
        (lambda r: r["verb"].update(end=5), "tokens"),
        (lambda r: r["args"][0].update(role="VERB"), "role"),
        (lambda r: r["args"][0].update(text="one token only"), "tokens"),
        (lambda r: r["args"][0]["person_spans"][0].update(end=9), "outside"),
        (lambda r: r.update(negated="yes"), "boolean"),
        (lambda r: r["args"][1].update(start=4, end=6), "overlap"),
    ],
)
def test_malformed_records_raise(mutate, message_part):
    rec = wine_party_frames()[0].to_record()
    mutate(rec)
    with pytest.raises(FormatError, match=message_part):
        SrlFrame.from_record(rec)


def test_overlapping_person_spans_raise():
    rec = wine_party_frames()[0].to_record()
    rec["args"][0]["person_spans"] = [
        {"start": 0, "end": 2, "cluster": 1, "possessive": False},
        {"start": 1, "end": 2, "cluster": 2, "possessive": False},
    ]
    with pytest.raises(FormatError, match="overlap"):
        SrlFrame.from_record(rec)


def test_abstraction_cap_parse():
    assert AbstractionCap.parse("arg234") is AbstractionCap.ARG234
    assert AbstractionCap.parse(" NONE ") is AbstractionCap.NONE
    with pytest.raises(FormatError, match="cap"):
        AbstractionCap.parse("ARG9")
    assert AbstractionCap.NONE < AbstractionCap.ARGM < AbstractionCap.ARG234 < AbstractionCap.ARG1 < AbstractionCap.ARG0
