import numpy as np
import pytest

from courselens.corpus import Course, Lecture, Section
from courselens.lexicons import load_lexicon_set


@pytest.fixture(scope="session")
def lexicons():
    return load_lexicon_set()


def build_course(section_texts, course_id="c1", instructor=None, course=None):
    """Course from a list of sections, each a list of lecture texts."""
    sections = []
    for s_idx, texts in enumerate(section_texts, start=1):
        lectures = tuple(
            Lecture(id=f"{course_id}-s{s_idx}-l{p_idx}", section_index=s_idx,
                    position_in_section=p_idx, text=text)
            for p_idx, text in enumerate(texts, start=1)
        )
        sections.append(Section(title=f"section {s_idx}", lectures=lectures))
    return Course(id=course_id, title=course_id, sections=tuple(sections),
                  instructor_rating=instructor, course_rating=course)


@pytest.fixture
def small_course():
    return build_course(
        [
            ["we study python and numpy. what is regression?",
             "basically the method is kind of simple. we proceed carefully."],
            ["the data was collected in 1995. do you see the pattern?",
             "this lecture covers happy and reliable examples. always check results."],
        ],
        instructor=4.2,
        course=4.0,
    )


def shuffle_lectures(course: Course, rng: np.random.Generator) -> Course:
    """Same lectures, randomly reassigned to the same section sizes."""
    lecs = course.lectures()
    order = rng.permutation(len(lecs))
    shuffled = [lecs[i] for i in order]
    sections = []
    k = 0
    for s_idx, sec in enumerate(course.sections, start=1):
        lectures = []
        for p_idx in range(1, len(sec.lectures) + 1):
            src = shuffled[k]
            k += 1
            lectures.append(
                Lecture(id=src.id, section_index=s_idx,
                        position_in_section=p_idx, text=src.text)
            )
        sections.append(Section(title=sec.title, lectures=tuple(lectures)))
    return Course(id=course.id, title=course.title, sections=tuple(sections),
                  instructor_rating=course.instructor_rating,
                  course_rating=course.course_rating)
