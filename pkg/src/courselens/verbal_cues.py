"""Per-course linguistic features: the six verbal cues plus course length.

All ratio features share the same denominator, the number of word tokens
in the course. Phrase matching is greedy longest-first and never reuses a
consumed token.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

from .corpus import Course, tokenize
from .lexicons import EMOTION_DIMENSIONS, EmotionLexicon, Lexicon, LexiconSet

# Table-2 row order; structure_quality is computed by the structure module.
FEATURE_NAMES = (
    "concreteness",
    "questions",
    "emotion_entropy",
    "hedging",
    "strong_modal",
    "weak_modal",
    "course_length",
    "structure_quality",
)

MAX_EMOTION_ENTROPY = math.log(len(EMOTION_DIMENSIONS))

WH_WORDS = frozenset(
    {"what", "which", "who", "whom", "whose", "where", "when", "why", "how"}
)
AUXILIARIES = frozenset(
    {
        "is", "are", "was", "were", "do", "does", "did", "can", "could",
        "will", "would", "should", "shall", "may", "might", "must",
        "have", "has", "had",
    }
)

_NUMERIC = re.compile(r"\d[\d.,:%\-]*")


@dataclass(frozen=True)
class FeatureVector:
    concreteness: float
    questions: float
    emotion_entropy: float
    hedging: float
    strong_modal: float
    weak_modal: float
    course_length: float
    structure_quality: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FEATURE_NAMES}

    def as_list(self) -> list[float]:
        return [getattr(self, name) for name in FEATURE_NAMES]


def _course_tokens(course: Course) -> list[str]:
    tokens: list[str] = []
    for lec in course.lectures():
        tokens.extend(lec.tokens)
    return tokens


def match_spans(tokens: list[str], lexicon: Lexicon) -> list[tuple[int, int]]:
    """Greedy longest-first lexicon matches as (start, end) token spans.

    A token consumed by a phrase is not re-counted as a unigram; each
    phrase match counts once.
    """
    spans = []
    by_len = sorted({len(p) for p in lexicon.phrases}, reverse=True)
    i = 0
    n = len(tokens)
    while i < n:
        matched = False
        for plen in by_len:
            if i + plen <= n and tuple(tokens[i:i + plen]) in lexicon.phrases:
                spans.append((i, i + plen))
                i += plen
                matched = True
                break
        if matched:
            continue
        if tokens[i] in lexicon.unigrams:
            spans.append((i, i + 1))
        i += 1
    return spans


def lexicon_ratio(course: Course, lexicon: Lexicon) -> float:
    """Lexicon matches per word token (hedging, strong/weak modal)."""
    tokens = _course_tokens(course)
    if not tokens:
        return 0.0
    return len(match_spans(tokens, lexicon)) / len(tokens)


def is_numeric_token(token: str) -> bool:
    return _NUMERIC.fullmatch(token) is not None


def concreteness_ratio(course: Course, gazetteer: Lexicon) -> float:
    """Entity mentions (gazetteer hits plus numeric tokens) per word token.

    A multiword entity counts as one match; tokens inside an entity match
    are not double-counted by the numeric rule.
    """
    tokens = _course_tokens(course)
    if not tokens:
        return 0.0
    spans = match_spans(tokens, gazetteer)
    consumed = set()
    for start, end in spans:
        consumed.update(range(start, end))
    numeric = sum(
        1 for i, tok in enumerate(tokens)
        if i not in consumed and is_numeric_token(tok)
    )
    return (len(spans) + numeric) / len(tokens)


def is_question(sentence: str) -> bool:
    """Rule-based stand-in for direct (wh-) and inverted yes/no questions.

    True iff the sentence ends with '?', or starts with a wh-word followed
    by an auxiliary within the next three tokens, or starts with an
    auxiliary.
    """
    if sentence.rstrip().endswith("?"):
        return True
    tokens = tokenize(sentence)
    if not tokens:
        return False
    first = tokens[0]
    if first in AUXILIARIES:
        return True
    if first in WH_WORDS:
        return any(tok in AUXILIARIES for tok in tokens[1:4])
    return False


def question_ratio(course: Course) -> float:
    sentences = [s for lec in course.lectures() for s in lec.sentences]
    if not sentences:
        warnings.warn(f"course {course.id}: no sentences, question ratio set to 0")
        return 0.0
    return sum(1 for s in sentences if is_question(s)) / len(sentences)


def emotion_entropy(course: Course, lexicon: EmotionLexicon) -> float:
    """Shannon entropy (natural log) of per-dimension emotion token ratios.

    r_i = tagged-with-emotion-i tokens / total word tokens; 0*log(0) = 0.
    """
    tokens = _course_tokens(course)
    if not tokens:
        return 0.0
    counts = dict.fromkeys(EMOTION_DIMENSIONS, 0)
    for tok in tokens:
        for dim in lexicon.emotions.get(tok, ()):
            counts[dim] += 1
    total = len(tokens)
    entropy = 0.0
    for dim in EMOTION_DIMENSIONS:
        r = counts[dim] / total
        if r > 0.0:
            entropy -= r * math.log(r)
    return entropy


def course_length(course: Course) -> int:
    """Total word tokens in the course."""
    return sum(len(lec.tokens) for lec in course.lectures())


def extract_features(course: Course, lexicons: LexiconSet) -> FeatureVector:
    """All eight per-course features (structure module fills the eighth)."""
    from .structure import structure_quality

    return FeatureVector(
        concreteness=concreteness_ratio(course, lexicons.gazetteer),
        questions=question_ratio(course),
        emotion_entropy=emotion_entropy(course, lexicons.emotions),
        hedging=lexicon_ratio(course, lexicons.hedges),
        strong_modal=lexicon_ratio(course, lexicons.strong_modal),
        weak_modal=lexicon_ratio(course, lexicons.weak_modal),
        course_length=float(course_length(course)),
        structure_quality=structure_quality(course),
    )
