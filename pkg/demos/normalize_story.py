"""Normalize a story's semantic-role frames and peel an abstraction ladder.

Coreferent person mentions collapse to shared ``[Pk]`` tokens so that
"The general", "He", and "him" all read as the same participant.  The
ladder then drops arguments one at a time, least important first, so a
very specific event can still find a close neighbor in the graph at
some more abstract level.
"""

from __future__ import annotations

from evkg import (
    AbstractionCap,
    Argument,
    PersonSpan,
    SrlFrame,
    Verb,
    build_person_index,
    extract_partial_events,
    normalize_document,
    normalize_event,
)


def story_frames() -> list[SrlFrame]:
    return [
        SrlFrame(
            "story", 0, 0,
            Verb("had", "have", 2, 3),
            (
                Argument("ARG0", "The general", 0, 2, (PersonSpan(0, 2, cluster=7),)),
                Argument("ARG1", "some wine", 3, 5),
                Argument("ARGM-LOC", "at a party.", 5, 8),
            ),
        ),
        SrlFrame(
            "story", 1, 0,
            Verb("felt", "feel", 1, 2),
            (
                Argument("ARG0", "He", 0, 1, (PersonSpan(0, 1, cluster=7),)),
                Argument("ARG1", "sleepy.", 2, 3),
            ),
        ),
        SrlFrame(
            "story", 2, 0,
            Verb("said", "say", 1, 2),
            (
                Argument("ARG0", "He", 0, 1, (PersonSpan(0, 1, cluster=7),)),
                Argument("ARG1", "goodbye", 2, 3),
                Argument("ARG2", "to them.", 3, 5, (PersonSpan(4, 5, cluster=3),)),
            ),
        ),
    ]


def main() -> None:
    frames = story_frames()
    print("person normalization:")
    for event in normalize_document(frames):
        print(f"  sentence {event.sent_idx}: {event.plain}")

    evacuation = SrlFrame(
        "news", 0, 0,
        Verb("evacuated", "evacuate", 1, 2),
        (
            Argument("ARG0", "She", 0, 1, (PersonSpan(0, 1, cluster=0),)),
            Argument("ARG2", "to a relative 's house", 2, 7),
            Argument("ARGM-TMP", "last night", 7, 9),
        ),
    )
    event = normalize_event(evacuation, build_person_index([evacuation]))
    print("\nabstraction ladder (cap ARG0, most permissive):")
    for rung in extract_partial_events(event, AbstractionCap.ARG0):
        print(f"  level {rung.level}: {rung.tagged}")

    print("\nsame event, default cap ARG1 (the subject always stays):")
    for rung in extract_partial_events(event, AbstractionCap.ARG1):
        print(f"  level {rung.level}: {rung.plain}")


if __name__ == "__main__":
    main()
