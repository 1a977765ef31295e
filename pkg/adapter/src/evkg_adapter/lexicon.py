"""Word lists driving the rule-based extractors.

Everything here is a closed set chosen for predictable behavior on
simple narrative prose; the wire format, not linguistic coverage, is
the contract.  Unknown words degrade to "not a verb" / "not a person"
rather than failing.
"""

from __future__ import annotations

# irregular verb forms -> lemma (includes be/have/do used as main verbs)
IRREGULAR_VERBS: dict[str, str] = {
    "am": "be", "is": "be", "are": "be", "was": "be", "were": "be", "been": "be", "being": "be",
    "has": "have", "had": "have", "having": "have",
    "does": "do", "did": "do", "done": "do", "doing": "do",
    "ate": "eat", "eaten": "eat",
    "began": "begin", "begun": "begin",
    "bought": "buy", "brought": "bring", "built": "build",
    "broke": "break", "broken": "break",
    "came": "come", "caught": "catch", "chose": "choose", "chosen": "choose",
    "drank": "drink", "drunk": "drink", "drove": "drive", "driven": "drive",
    "fell": "fall", "fallen": "fall", "felt": "feel", "flew": "fly", "flown": "fly",
    "forgot": "forget", "forgotten": "forget", "fought": "fight", "found": "find",
    "gave": "give", "given": "give", "got": "get", "gotten": "get",
    "gone": "go", "went": "go", "grew": "grow", "grown": "grow",
    "heard": "hear", "held": "hold", "hid": "hide", "hidden": "hide",
    "kept": "keep", "knew": "know", "known": "know",
    "left": "leave", "let": "let", "lost": "lose",
    "made": "make", "met": "meet", "paid": "pay", "put": "put",
    "ran": "run", "rode": "ride", "ridden": "ride", "rose": "rise", "risen": "rise",
    "said": "say", "sang": "sing", "sat": "sit", "saw": "see", "seen": "see",
    "sent": "send", "slept": "sleep", "sold": "sell", "sought": "seek",
    "spoke": "speak", "spoken": "speak", "spent": "spend", "stood": "stand",
    "swam": "swim", "swum": "swim",
    "taught": "teach", "told": "tell", "thought": "think", "threw": "throw", "thrown": "throw",
    "took": "take", "taken": "take", "understood": "understand",
    "woke": "wake", "woken": "wake", "wore": "wear", "worn": "wear",
    "won": "win", "wrote": "write", "written": "write",
}

# base forms recognized as verbs even without inflection
VERB_LEXICON: set[str] = {
    "agree", "answer", "arrive", "ask", "bake", "be", "begin", "brew", "bring", "build",
    "buy", "call", "carve", "catch", "celebrate", "chat", "choose", "clean", "climb",
    "close", "come", "cook", "cry", "dance", "decide", "do", "draw", "dream", "drink",
    "drive", "eat", "enjoy", "evacuate", "fail", "fall", "feel", "find", "finish", "fish",
    "fold", "forget", "get", "give", "go", "greet", "grow", "have", "hear", "help",
    "hike", "hold", "hope", "hurry", "jog", "join", "jump", "keep", "knead", "know",
    "laugh", "learn", "leave", "like", "listen", "live", "look", "lose", "love", "make",
    "meet", "move", "need", "open", "pack", "paint", "pass", "pause", "pay", "phone",
    "plan", "play", "practice", "prepare", "promise", "rain", "read", "relax", "remember",
    "rest", "return", "ride", "row", "run", "sail", "say", "see", "sell", "send", "share",
    "shout", "sing", "sip", "sit", "sleep", "smile", "sort", "speak", "spend", "stack",
    "stand", "start", "stay", "stop", "study", "swim", "take", "talk", "teach", "thank",
    "think", "throw", "train", "travel", "try", "turn", "visit", "wait", "wake", "walk",
    "want", "wash", "watch", "wave", "wear", "win", "wish", "work", "wrap", "write",
}

# -ed stems whose lemma restores a final "e" (hik -> hike)
RESTORES_E: set[str] = {
    "arriv", "bak", "celebrat", "choos", "clos", "danc", "decid", "evacuat", "hik",
    "hop", "lik", "liv", "lov", "mov", "paus", "phon", "practic", "prepar", "promis",
    "rais", "shar", "smil", "wav",
}

AUXILIARIES: set[str] = {"am", "is", "are", "was", "were", "be", "been", "being", "do", "does", "did", "have", "has", "had"}
BE_FORMS: set[str] = {"am", "is", "are", "was", "were", "be", "been", "being"}
MODALS: set[str] = {"will", "would", "can", "could", "may", "might", "shall", "should", "must"}
NEGATION_WORDS: set[str] = {"not", "never"}  # plus n't suffixes and the "no longer" pair

# pronoun -> referent class; gendered/plural classes resolve by recency
PRONOUN_CLASS: dict[str, str] = {
    "i": "first", "me": "first", "my": "first", "mine": "first", "myself": "first",
    "we": "first-plural", "us": "first-plural", "our": "first-plural", "ours": "first-plural",
    "you": "second", "your": "second", "yours": "second", "yourself": "second",
    "he": "masculine", "him": "masculine", "his": "masculine", "himself": "masculine",
    "she": "feminine", "her": "feminine", "hers": "feminine", "herself": "feminine",
    "they": "plural", "them": "plural", "their": "plural", "theirs": "plural", "themselves": "plural",
}
RECENCY_CLASSES: set[str] = {"masculine", "feminine", "plural"}
POSSESSIVE_PRONOUNS: set[str] = {"my", "mine", "our", "ours", "your", "yours", "his", "their", "theirs", "hers"}
# "her" is possessive only before a following word; handled in context

NAME_LEXICON: set[str] = {
    "alex", "anna", "ava", "ben", "carla", "david", "emma", "ethan", "joe", "john",
    "lily", "liam", "lucas", "maria", "mary", "max", "mia", "nina", "noah", "olivia",
    "omar", "priya", "rosa", "sam", "sara", "tom", "wei", "yuki",
}

TEMPORAL_STARTERS: set[str] = {
    "yesterday", "today", "tomorrow", "tonight", "last", "next", "every",
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday",
    "morning", "afternoon", "evening", "night", "noon", "midnight",
    "earlier", "later", "soon", "recently", "already", "afterwards",
}

LOCATIVE_PREPOSITIONS: set[str] = {
    "in", "at", "on", "near", "inside", "outside", "under", "behind",
    "above", "below", "beside", "around", "across",
}
