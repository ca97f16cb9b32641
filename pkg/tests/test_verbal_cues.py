import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from courselens.lexicons import EMOTION_DIMENSIONS, EmotionLexicon, Lexicon
from courselens.verbal_cues import (
    MAX_EMOTION_ENTROPY,
    concreteness_ratio,
    course_length,
    emotion_entropy,
    extract_features,
    is_question,
    lexicon_ratio,
    question_ratio,
)

from conftest import build_course


def lex(*unigrams, phrases=(), name="test"):
    return Lexicon(name, frozenset(unigrams),
                   frozenset(tuple(p.split()) for p in phrases))


class TestConcreteness:
    def test_no_hits(self):
        course = build_course([["plain words only here."]])
        assert concreteness_ratio(course, lex()) == 0.0

    def test_gazetteer_hits(self):
        course = build_course([["we use python and numpy"]])
        assert concreteness_ratio(course, lex("python", "numpy")) == 2 / 5

    def test_numeric_tokens_count(self):
        course = build_course([["founded in 1995"]])
        assert concreteness_ratio(course, lex()) == 1 / 3

    def test_multiword_entity_counts_once(self):
        course = build_course([["we visited new york yesterday"]])
        ratio = concreteness_ratio(course, lex(phrases=["new york"]))
        assert ratio == 1 / 5

    def test_empty_course(self):
        assert concreteness_ratio(build_course([[""]]), lex("python")) == 0.0


class TestIsQuestion:
    def test_question_mark(self):
        assert is_question("What is regression?")

    def test_declarative(self):
        assert not is_question("This is a decision tree.")

    def test_inverted_yes_no(self):
        assert is_question("Do you see the pattern")

    def test_wh_with_auxiliary(self):
        assert is_question("Which model should we pick")

    def test_wh_without_auxiliary_nearby(self):
        assert not is_question("What a lovely morning everyone enjoyed")

    @given(st.text(alphabet="abc def", max_size=30))
    def test_question_mark_always_wins(self, body):
        assert is_question(body + "?")


class TestQuestionRatio:
    def test_all_questions(self):
        course = build_course([["What is x? Why not y?"]])
        assert question_ratio(course) == 1.0

    def test_one_of_three(self):
        course = build_course([["Alpha beta. Gamma delta? Epsilon zeta!"]])
        assert question_ratio(course) == pytest.approx(1 / 3)

    def test_zero_sentences_warns(self):
        course = build_course([[" "]])
        with pytest.warns(UserWarning, match="no sentences"):
            assert question_ratio(course) == 0.0


class TestEmotionEntropy:
    def emo(self, mapping):
        return EmotionLexicon(
            {t: frozenset(dims) for t, dims in mapping.items()}
        )

    def test_no_emotion_tokens(self):
        course = build_course([["plain text here."]])
        assert emotion_entropy(course, self.emo({})) == 0.0

    def test_two_dimensions(self):
        # 100 tokens, 4 joy-only, 4 trust-only: -2 * 0.04 * ln(0.04)
        words = ["w"] * 92 + ["happy"] * 4 + ["reliable"] * 4
        course = build_course([[" ".join(words)]])
        value = emotion_entropy(
            course, self.emo({"happy": {"joy"}, "reliable": {"trust"}})
        )
        expected = -2 * 0.04 * math.log(0.04)
        assert value == pytest.approx(expected, abs=1e-12)

    def test_single_emotion_everywhere(self):
        course = build_course([["happy happy happy"]])
        assert emotion_entropy(course, self.emo({"happy": {"joy"}})) == 0.0

    def test_uniform_attains_maximum(self):
        words = [f"e{i}" for i in range(8)]
        course = build_course([[" ".join(words)]])
        mapping = {w: {dim} for w, dim in zip(words, EMOTION_DIMENSIONS)}
        value = emotion_entropy(course, self.emo(mapping))
        assert value == pytest.approx(MAX_EMOTION_ENTROPY, abs=1e-12)

    @given(st.lists(st.sampled_from(["happy", "reliable", "afraid", "w", "x"]),
                    min_size=1, max_size=60))
    @settings(max_examples=50)
    def test_entropy_bounds_with_disjoint_tags(self, words):
        course = build_course([[" ".join(words)]])
        value = emotion_entropy(
            course,
            self.emo({"happy": {"joy"}, "reliable": {"trust"},
                      "afraid": {"fear"}}),
        )
        assert 0.0 <= value <= MAX_EMOTION_ENTROPY + 1e-12


class TestLexiconRatio:
    def test_no_matches(self):
        course = build_course([["nothing to see here."]])
        assert lexicon_ratio(course, lex("basically")) == 0.0

    def test_phrase_and_unigram(self):
        course = build_course([["it is kind of basically simple"]])
        hedges = lex("basically", phrases=["kind of"])
        assert lexicon_ratio(course, hedges) == pytest.approx(2 / 6)

    def test_single_hedge_token(self):
        course = build_course([["basically"]])
        assert lexicon_ratio(course, lex("basically")) == 1.0

    def test_phrase_consumes_tokens(self):
        # "kind" alone is also a unigram here; the phrase wins and the
        # consumed tokens are not re-counted
        course = build_course([["kind of thing"]])
        hedges = lex("kind", "of", phrases=["kind of"])
        assert lexicon_ratio(course, hedges) == pytest.approx(1 / 3)

    def test_longest_phrase_first(self):
        course = build_course([["more or less true"]])
        hedges = lex(phrases=["more or", "more or less"])
        assert lexicon_ratio(course, hedges) == pytest.approx(1 / 4)

    def test_appending_match_increases_count(self):
        hedges = lex("basically")
        base = build_course([["a b c"]])
        more = build_course([["a b c basically"]])
        assert lexicon_ratio(more, hedges) > lexicon_ratio(base, hedges)


class TestCourseLength:
    def test_empty(self):
        assert course_length(build_course([[""]])) == 0

    def test_sums_lectures(self):
        course = build_course([["one two three", "four five six"]])
        assert course_length(course) == 6


class TestExtractFeatures:
    def test_empty_course_all_zero(self, lexicons):
        course = build_course([["", ""]])
        with pytest.warns(UserWarning):
            vec = extract_features(course, lexicons)
        assert vec.as_list() == [0.0] * 8

    def test_deterministic(self, lexicons, small_course):
        assert extract_features(small_course, lexicons) == extract_features(
            small_course, lexicons
        )

    def test_duplicating_lectures_keeps_ratios(self, lexicons, small_course):
        doubled = build_course(
            [[lec.text for lec in sec.lectures] * 2
             for sec in small_course.sections],
            instructor=small_course.instructor_rating,
        )
        base = extract_features(small_course, lexicons)
        dup = extract_features(doubled, lexicons)
        for name in ("concreteness", "questions", "emotion_entropy",
                     "hedging", "strong_modal", "weak_modal"):
            assert getattr(dup, name) == pytest.approx(getattr(base, name))
        assert dup.course_length == 2 * base.course_length

    def test_golden_vector(self, lexicons, small_course):
        # hand counts: 39 tokens; entities python, numpy, 1995; hedges
        # "basically" + "kind of"; strong "always"; 2 of 8 sentences are
        # questions; emotions joy + trust once each -> 2/39 * ln(39).
        # structure_quality frozen from the modularity oracle at build time.
        vec = extract_features(small_course, lexicons)
        golden = {
            "concreteness": 3 / 39,
            "questions": 2 / 8,
            "emotion_entropy": 2 * math.log(39) / 39,
            "hedging": 2 / 39,
            "strong_modal": 1 / 39,
            "weak_modal": 0.0,
            "course_length": 39.0,
            "structure_quality": -0.15055081893603897,
        }
        for name, expected in golden.items():
            assert getattr(vec, name) == pytest.approx(expected, abs=1e-12), name
