"""Hierarchical course corpus: loading, validation, tokenization, splitting.

A corpus is a JSONL file with one course per line:

    {"id": ..., "title": ..., "instructor_rating"?: ..., "course_rating"?: ...,
     "sections": [{"title": ..., "lectures": [{"id": ..., "text": ...}]}]}

Courses are treated as immutable after load; token and sentence lists are
computed lazily and cached.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path


class ValidationError(ValueError):
    """Raised for malformed or out-of-contract corpus input."""


RATING_MIN = 0.0
RATING_MAX = 5.0

# Characters stripped from token boundaries. Internal apostrophes and
# hyphens survive because only the outer rim is stripped.
_PUNCT = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~‘’“”…"

# Trailing "words" after which a '.' does not end a sentence.
ABBREVIATIONS = frozenset(
    {
        "e.g.", "i.e.", "etc.", "cf.", "vs.", "dr.", "mr.", "mrs.", "ms.",
        "prof.", "fig.", "eq.", "no.", "st.", "al.",
    }
)

_SENT_BOUNDARY = re.compile(r"[.!?]+(?=\s|$)")


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens: whitespace split, outer punctuation stripped.

    Pure-punctuation tokens are dropped; internal apostrophes/hyphens
    (e.g. "it's", "state-of-the-art") are kept.
    """
    tokens = []
    for raw in text.lower().split():
        word = raw.strip(_PUNCT)
        if word:
            tokens.append(word)
    return tokens


def split_sentences(text: str) -> list[str]:
    """Split on '.', '?', '!' followed by whitespace or end of text.

    The delimiter stays with its sentence. A small abbreviation stop-list
    ("e.g.", "i.e.", ...) suppresses false boundaries. Never returns empty
    sentences.
    """
    sentences = []
    start = 0
    for match in _SENT_BOUNDARY.finditer(text):
        end = match.end()
        candidate = text[start:end].strip()
        if not candidate:
            start = end
            continue
        last_word = candidate.rsplit(None, 1)[-1].lower()
        if last_word in ABBREVIATIONS:
            continue
        sentences.append(candidate)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


@dataclass(frozen=True)
class Lecture:
    id: str
    section_index: int  # 1-based index of the owning section
    position_in_section: int  # 1-based position within the section
    text: str

    @cached_property
    def tokens(self) -> list[str]:
        return tokenize(self.text)

    @cached_property
    def sentences(self) -> list[str]:
        return split_sentences(self.text)


@dataclass(frozen=True)
class Section:
    title: str
    lectures: tuple[Lecture, ...]


@dataclass(frozen=True)
class Course:
    id: str
    title: str
    sections: tuple[Section, ...]
    instructor_rating: float | None = None
    course_rating: float | None = None

    def lectures(self) -> list[Lecture]:
        """All lectures in document order."""
        return [lec for sec in self.sections for lec in sec.lectures]

    @property
    def num_lectures(self) -> int:
        return sum(len(sec.lectures) for sec in self.sections)

    def rating(self, target: str) -> float | None:
        if target == "instructor":
            return self.instructor_rating
        if target == "course":
            return self.course_rating
        raise ValueError(f"unknown rating target: {target!r}")


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[str, ...]
    validation: tuple[str, ...]
    test: tuple[str, ...]
    seed: int

    def all_ids(self) -> set[str]:
        return set(self.train) | set(self.validation) | set(self.test)


def _check_rating(value, line_no: int, key: str) -> float | None:
    if value is None:
        return None
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"line {line_no}: {key} must be a number")
    value = float(value)
    if not RATING_MIN <= value <= RATING_MAX:
        raise ValidationError(
            f"line {line_no}: {key} {value} outside [{RATING_MIN}, {RATING_MAX}]"
        )
    return value


def _course_from_record(record: dict, line_no: int) -> Course:
    if not isinstance(record, dict):
        raise ValidationError(f"line {line_no}: course record must be an object")
    try:
        course_id = str(record["id"])
        raw_sections = record["sections"]
    except KeyError as exc:
        raise ValidationError(f"line {line_no}: missing field {exc}") from None
    if not isinstance(raw_sections, list) or not raw_sections:
        raise ValidationError(f"line {line_no}: course needs at least one section")

    sections = []
    for s_idx, raw_sec in enumerate(raw_sections, start=1):
        raw_lectures = raw_sec.get("lectures") if isinstance(raw_sec, dict) else None
        if not isinstance(raw_lectures, list) or not raw_lectures:
            raise ValidationError(
                f"line {line_no}: section {s_idx} needs at least one lecture"
            )
        lectures = []
        for p_idx, raw_lec in enumerate(raw_lectures, start=1):
            if not isinstance(raw_lec, dict) or "text" not in raw_lec:
                raise ValidationError(
                    f"line {line_no}: lecture {s_idx}.{p_idx} missing text"
                )
            text = raw_lec["text"]
            if not isinstance(text, str) or not text.strip():
                raise ValidationError(
                    f"line {line_no}: lecture {s_idx}.{p_idx} has empty text"
                )
            # Explicit indices, when present, must agree with document order.
            for key, derived in (
                ("section_index", s_idx),
                ("position_in_section", p_idx),
            ):
                if key in raw_lec and raw_lec[key] != derived:
                    raise ValidationError(
                        f"line {line_no}: lecture {s_idx}.{p_idx} declares "
                        f"{key}={raw_lec[key]}, document order implies {derived}"
                    )
            lectures.append(
                Lecture(
                    id=str(raw_lec.get("id", f"{course_id}-{s_idx}-{p_idx}")),
                    section_index=s_idx,
                    position_in_section=p_idx,
                    text=text,
                )
            )
        sections.append(
            Section(title=str(raw_sec.get("title", f"section {s_idx}")),
                    lectures=tuple(lectures))
        )

    return Course(
        id=course_id,
        title=str(record.get("title", course_id)),
        sections=tuple(sections),
        instructor_rating=_check_rating(
            record.get("instructor_rating"), line_no, "instructor_rating"
        ),
        course_rating=_check_rating(
            record.get("course_rating"), line_no, "course_rating"
        ),
    )


def load_corpus(path: str | Path) -> list[Course]:
    """Load and validate a JSONL corpus file."""
    courses = []
    seen_ids = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"line {line_no}: malformed JSON ({exc.msg})") from None
            course = _course_from_record(record, line_no)
            if course.id in seen_ids:
                raise ValidationError(f"line {line_no}: duplicate course id {course.id!r}")
            seen_ids.add(course.id)
            courses.append(course)
    return courses


def course_to_record(course: Course) -> dict:
    """Inverse of the loader's record parsing (used by the generator)."""
    record: dict = {"id": course.id, "title": course.title}
    if course.instructor_rating is not None:
        record["instructor_rating"] = course.instructor_rating
    if course.course_rating is not None:
        record["course_rating"] = course.course_rating
    record["sections"] = [
        {
            "title": sec.title,
            "lectures": [{"id": lec.id, "text": lec.text} for lec in sec.lectures],
        }
        for sec in course.sections
    ]
    return record


def save_corpus(courses: list[Course], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for course in courses:
            fh.write(json.dumps(course_to_record(course), ensure_ascii=False))
            fh.write("\n")


def split_dataset(courses: list[Course], seed: int) -> DatasetSplit:
    """Deterministic 70/10/20 split by course count.

    Validation and test sizes are floored; train absorbs the rounding
    remainder. Requires at least 10 courses.
    """
    import numpy as np

    n = len(courses)
    if n < 10:
        raise ValidationError(f"need at least 10 courses to split, got {n}")
    ids = [c.id for c in courses]
    order = np.random.default_rng(seed).permutation(n)
    shuffled = [ids[i] for i in order]
    # round-half-even keeps every size within 1 of the exact proportion;
    # train takes the remainder (1085 -> 760/108/217)
    n_val = round(n * 0.1)
    n_test = round(n * 0.2)
    n_train = n - n_val - n_test
    return DatasetSplit(
        train=tuple(shuffled[:n_train]),
        validation=tuple(shuffled[n_train:n_train + n_val]),
        test=tuple(shuffled[n_train + n_val:]),
        seed=seed,
    )
