"""Rule-based frame extraction: raw sentences to semantic-role records.

One frame per sentence with a recognizable predicate.  The subject
span precedes the verb group; the trailing span splits off one
temporal or locative adjunct (or a directional "to" phrase) when a cue
word appears; person mentions get document-scoped coreference cluster
ids, resolved by exact name match or pronoun recency.

Output records follow the engine's frame schema exactly — roles, token
offsets in sentence coordinates, verb lemma, person spans with
possessive flags, negation and modality — and are built as plain
dictionaries; the engine validates them on read.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import FormatError
from .lexicon import (
    AUXILIARIES,
    BE_FORMS,
    IRREGULAR_VERBS,
    LOCATIVE_PREPOSITIONS,
    MODALS,
    NAME_LEXICON,
    NEGATION_WORDS,
    PRONOUN_CLASS,
    POSSESSIVE_PRONOUNS,
    RECENCY_CLASSES,
    TEMPORAL_STARTERS,
)
from .text import canonical, lemmatize_verb, looks_like_verb, strip_possessive


@dataclass(frozen=True)
class RawDocument:
    """One input text: an id and its (non-empty) sentences in order."""

    doc_id: str
    sentences: tuple[str, ...]

    @classmethod
    def from_record(cls, obj: dict) -> "RawDocument":
        if not isinstance(obj, dict):
            raise FormatError("document record must be an object")
        doc_id = obj.get("doc_id")
        if not isinstance(doc_id, str) or not doc_id:
            raise FormatError("doc_id must be a non-empty string")
        sentences = obj.get("sentences")
        if not isinstance(sentences, list) or not sentences:
            raise FormatError(f"document {doc_id!r} needs a non-empty sentences list")
        for s in sentences:
            if not isinstance(s, str) or not s.strip():
                raise FormatError(f"document {doc_id!r} has an empty or non-string sentence")
        return cls(doc_id, tuple(sentences))


class ExtractionError(Exception):
    """A document yielded no frames at all."""


@dataclass
class _Coref:
    """Document-scoped cluster assignment with pronoun recency.

    ``recent`` orders person clusters most-recently-mentioned first.  A
    third-person pronoun takes the most recent cluster not already used
    in its own sentence, so "Tom met Joe. He thanked him." reads as two
    people rather than one thanking themselves.
    """

    clusters: dict[tuple[str, str], int] = field(default_factory=dict)
    recent: list[int] = field(default_factory=list)

    def _get(self, key: tuple[str, str]) -> int:
        if key not in self.clusters:
            self.clusters[key] = len(self.clusters)
        return self.clusters[key]

    def _touch(self, cluster: int) -> int:
        if cluster in self.recent:
            self.recent.remove(cluster)
        self.recent.insert(0, cluster)
        return cluster

    def name(self, lowered: str) -> int:
        return self._touch(self._get(("name", lowered)))

    def pronoun(self, ref_class: str, used: set[int]) -> int:
        if ref_class in RECENCY_CLASSES and self.recent:
            for cluster in self.recent:
                if cluster not in used:
                    return self._touch(cluster)
            return self._touch(self.recent[0])
        return self._touch(self._get(("class", ref_class)))


def _collect_names(doc: RawDocument) -> set[str]:
    """Lowercased words treated as person names in this document.

    A capitalized word mid-sentence is a name; a sentence-initial
    capitalized word only counts when the lexicon knows it or the same
    word also appears capitalized mid-sentence somewhere in the document.
    """
    names: set[str] = set()
    for sentence in doc.sentences:
        for pos, token in enumerate(sentence.split()):
            word, _ = strip_possessive(canonical(token).strip("'"))
            bare = token.strip(".,;:!?\"'()[]")
            if not bare or not bare[0].isupper() or not word.isalpha():
                continue
            if word in PRONOUN_CLASS or bare.lower() == "i":
                continue
            if word in NAME_LEXICON or pos > 0:
                names.add(word)
    return names


def _person_spans(
    tokens: list[str], start: int, end: int, names: set[str], coref: _Coref, used: set[int]
) -> list[dict]:
    spans = []
    for pos in range(start, end):
        word = canonical(tokens[pos])
        stripped, possessive = strip_possessive(word)
        if stripped in names:
            cluster = coref.name(stripped)
            if pos + 1 < end and tokens[pos + 1].rstrip(".,;:!?\"')") in ("'s", "’s"):
                possessive = True  # pre-tokenized possessive: "Tom 's boat"
        elif word in PRONOUN_CLASS:
            if word in POSSESSIVE_PRONOUNS:
                possessive = True
            elif word == "her" and pos + 1 < end and canonical(tokens[pos + 1]):
                possessive = True  # "her book" vs. object "saw her" / "saw her ."
            # possessives may corefer with the subject ("Tom painted his fence"),
            # so only plain pronouns avoid clusters already used in the sentence
            cluster = coref.pronoun(PRONOUN_CLASS[word], set() if possessive else used)
        else:
            continue
        used.add(cluster)
        spans.append({"start": pos, "end": pos + 1, "cluster": cluster, "possessive": possessive})
    return spans


def _find_verb_group(tokens: list[str]) -> tuple[int, int] | None:
    """(group_start, group_end) of the auxiliary+verb run, or None."""
    n = len(tokens)
    for i in range(1, n):
        word = canonical(tokens[i])
        if word in AUXILIARIES or word in MODALS or looks_like_verb(tokens[i]):
            end = i + 1
            while end < n:
                w = canonical(tokens[end])
                if w in AUXILIARIES or w in MODALS or w in NEGATION_WORDS or looks_like_verb(tokens[end]):
                    end += 1
                else:
                    break
            start = i
            while start - 1 >= 1:
                prev = canonical(tokens[start - 1])
                if prev in NEGATION_WORDS or prev.endswith("n't"):
                    start -= 1
                elif prev == "longer" and start - 2 >= 1 and canonical(tokens[start - 2]) == "no":
                    start -= 2
                else:
                    break
            return start, end
    return None


def _main_verb(tokens: list[str], start: int, end: int) -> int:
    """Token index of the main predicate inside the verb group."""
    candidates = [
        i for i in range(start, end)
        if canonical(tokens[i]) not in NEGATION_WORDS and not canonical(tokens[i]).endswith("n't")
        and canonical(tokens[i]) not in MODALS
    ]
    non_aux = [i for i in candidates if canonical(tokens[i]) not in AUXILIARIES]
    if not non_aux:
        return candidates[-1]  # bare copula/auxiliary predicate
    main = non_aux[-1]
    word = canonical(tokens[main])
    prev = canonical(tokens[main - 1]) if main - 1 >= start else ""
    # "was tired": adjectival -ed after a be-form reads as a copula frame
    if prev in BE_FORMS and word.endswith("ed") and word not in IRREGULAR_VERBS:
        return main - 1
    return main


def _split_tail(tokens: list[str], start: int, end: int) -> tuple[int | None, str]:
    """First adjunct-cue position in the tail, with its role.

    A temporal or locative cue at tail offset 0 claims the whole tail
    ("slept last night", "sat in the park" take no object), so the cut
    lands at ``start`` itself; otherwise the core argument keeps the
    tokens before the cue.  "to" never opens the tail cut: at offset 0
    it reads as the verb's own complement.
    """
    if start < end and canonical(tokens[start]) in TEMPORAL_STARTERS:
        return start, "ARGM-TMP"
    if start < end and canonical(tokens[start]) in LOCATIVE_PREPOSITIONS:
        return start, "ARGM-LOC"
    for pos in range(start + 1, end):
        word = canonical(tokens[pos])
        if word in TEMPORAL_STARTERS:
            return pos, "ARGM-TMP"
    for pos in range(start + 1, end):
        word = canonical(tokens[pos])
        if word in LOCATIVE_PREPOSITIONS:
            return pos, "ARGM-LOC"
    for pos in range(start + 1, end):
        if canonical(tokens[pos]) == "to":
            return pos, "ARG2"
    return None, ""


def extract_sentence(tokens: list[str], names: set[str], coref: _Coref) -> dict | None:
    """One frame dict for a sentence, or None when no predicate is found."""
    group = _find_verb_group(tokens)
    if group is None:
        return None
    group_start, group_end = group
    main = _main_verb(tokens, group_start, group_end)
    lemma = lemmatize_verb(tokens[main])
    copula = lemma == "be"

    group_words = [canonical(t) for t in tokens[group_start:group_end]]
    negated = any(w in NEGATION_WORDS or w.endswith("n't") for w in group_words) or (
        "no" in group_words and "longer" in group_words
    )
    modal = next((w for w in group_words if w in MODALS), None)

    args: list[dict] = []
    used_clusters: set[int] = set()

    def add_arg(role: str, start: int, end: int) -> None:
        if end <= start:
            return
        args.append({
            "role": role,
            "text": " ".join(tokens[start:end]),
            "start": start,
            "end": end,
            "person_spans": _person_spans(tokens, start, end, names, coref, used_clusters),
        })

    subject_role = "ARG1" if copula else "ARG0"
    add_arg(subject_role, 0, group_start)

    tail_start, tail_end = group_end, len(tokens)
    # adjectival complement swallowed into the group sits after the main verb
    if main + 1 < group_end:
        tail_start = main + 1
    cut, cut_role = _split_tail(tokens, tail_start, tail_end)
    core_role = "ARG2" if copula else "ARG1"
    if cut is None:
        add_arg(core_role, tail_start, tail_end)
    else:
        add_arg(core_role, tail_start, cut)
        adjunct_role = cut_role
        if cut_role == "ARG2" and copula:
            adjunct_role = "ARG3"  # the copula complement already holds ARG2
        add_arg(adjunct_role, cut, tail_end)

    return {
        "verb": {"text": tokens[main], "lemma": lemma, "start": main, "end": main + 1},
        "args": args,
        "negated": negated,
        "modal": modal,
    }


def extract_document(doc: RawDocument) -> list[dict]:
    """All frame records for one document, in sentence order.

    Raises ExtractionError when no sentence yields a predicate.
    """
    names = _collect_names(doc)
    coref = _Coref()
    records: list[dict] = []
    for sent_idx, sentence in enumerate(doc.sentences):
        tokens = sentence.split()
        extracted = extract_sentence(tokens, names, coref)
        if extracted is None:
            continue
        record = {
            "doc_id": doc.doc_id,
            "sent_idx": sent_idx,
            "frame_idx": 0,
            **extracted,
            "sentence": sentence,
        }
        records.append(record)
    if not records:
        raise ExtractionError(f"document {doc.doc_id!r}: no predicate found in any sentence")
    return records


def extract_frames(docs: list[RawDocument]) -> tuple[list[dict], list[str]]:
    """Frames for every document; failed documents are reported, not fatal.

    Returns (records, failures) where failures holds one message per
    skipped document.  Callers decide what a fully failed batch means.
    """
    records: list[dict] = []
    failures: list[str] = []
    for doc in docs:
        try:
            records.extend(extract_document(doc))
        except ExtractionError as exc:
            failures.append(str(exc))
    return records, failures
