import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from courselens.analysis import (
    correlation_report,
    p_value,
    pearson,
    regularized_incomplete_beta,
    report_to_csv,
    report_to_table,
)
from courselens.verbal_cues import FEATURE_NAMES, FeatureVector

from conftest import build_course


def t_sf_quadrature(t: float, df: int) -> float:
    """Two-sided tail of Student's t via Simpson integration of the pdf.

    Independent of the incomplete-beta path. The infinite tail is folded
    onto s in [0, 1) with x = |t| + s/(1-s); the transformed integrand
    decays like (1-s)^(df-1), so plain Simpson handles it for df >= 2.
    """
    log_const = (
        math.lgamma((df + 1) / 2) - math.lgamma(df / 2)
        - 0.5 * math.log(df * math.pi)
    )

    def pdf(x):
        return math.exp(log_const - (df + 1) / 2 * math.log1p(x * x / df))

    lo = abs(t)
    n_points = 200_001
    s = np.linspace(0.0, 1.0, n_points)[:-1]
    xs = lo + s / (1.0 - s)
    ys = np.array([pdf(x) for x in xs]) / (1.0 - s) ** 2
    ys = np.append(ys, 0.0)  # integrand vanishes at s = 1 for df >= 2
    h = 1.0 / (n_points - 1)
    simpson = h / 3 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-2:2].sum())
    return 2.0 * simpson


class TestPearson:
    def test_identity(self):
        x = [1.0, 2.0, 5.0, 7.0]
        assert pearson(x, x) == pytest.approx(1.0, abs=1e-14)

    def test_negative_affine(self):
        x = np.array([0.5, 1.5, 2.0, 9.0])
        assert pearson(x, -2 * x + 7) == pytest.approx(-1.0, abs=1e-14)

    def test_hand_computed_case(self):
        # Sxy = 4, Sxx = Syy = 5 -> r = 0.8
        assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-14)

    def test_constant_rejected(self):
        with pytest.raises(ValueError, match="constant"):
            pearson([1, 1, 1], [1, 2, 3])

    def test_too_short(self):
        with pytest.raises(ValueError):
            pearson([1, 2], [3, 4])

    @given(st.integers(0, 2**31 - 1), st.floats(0.1, 50), st.floats(-10, 10))
    @settings(max_examples=40)
    def test_affine_invariance(self, seed, scale, shift):
        rng = np.random.default_rng(seed)
        x = rng.random(12)
        y = rng.random(12)
        base = pearson(x, y)
        assert pearson(scale * x + shift, y) == pytest.approx(base, abs=1e-9)
        assert pearson(-scale * x + shift, y) == pytest.approx(-base, abs=1e-9)


class TestPValue:
    def test_zero_r(self):
        assert p_value(0.0, 50) == pytest.approx(1.0, abs=1e-12)

    def test_perfect_r(self):
        assert p_value(1.0, 50) == 0.0
        assert p_value(-1.0, 50) == 0.0

    def test_too_small_n(self):
        with pytest.raises(ValueError):
            p_value(0.5, 2)

    def test_documented_case_against_quadrature(self):
        # r = 0.5, n = 100 -> p around 1.2e-7
        r, n = 0.5, 100
        p = p_value(r, n)
        t = r * math.sqrt((n - 2) / (1 - r * r))
        oracle = t_sf_quadrature(t, n - 2)
        assert p == pytest.approx(oracle, rel=0.05)
        assert p == pytest.approx(1.2e-7, rel=0.2)

    @pytest.mark.parametrize("r,n", [(0.1, 10), (0.3, 25), (0.7, 8),
                                     (-0.45, 60), (0.05, 500), (0.9, 5)])
    def test_matches_quadrature(self, r, n):
        t = abs(r) * math.sqrt((n - 2) / (1 - r * r))
        assert p_value(r, n) == pytest.approx(t_sf_quadrature(t, n - 2),
                                              abs=1e-8, rel=1e-6)

    def test_monotone_in_abs_r(self):
        values = [p_value(r, 40) for r in np.linspace(0.0, 0.95, 30)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_monotone_in_n(self):
        values = [p_value(0.4, n) for n in (5, 10, 30, 100, 300)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_incomplete_beta_edges(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
        # I_x(1, 1) = x
        assert regularized_incomplete_beta(1.0, 1.0, 0.42) == pytest.approx(
            0.42, abs=1e-12
        )


def _features_for(courses, values_by_course):
    out = {}
    for course in courses:
        vals = values_by_course[course.id]
        out[course.id] = FeatureVector(**dict(zip(FEATURE_NAMES, vals)))
    return out


class TestCorrelationReport:
    def make_courses(self, n, rng):
        courses = []
        for i in range(n):
            courses.append(
                build_course([["text."]], course_id=f"c{i}",
                             instructor=float(rng.uniform(1, 5)))
            )
        return courses

    def test_rows_cover_all_features_in_order(self):
        rng = np.random.default_rng(0)
        courses = self.make_courses(30, rng)
        feats = _features_for(
            courses, {c.id: rng.random(8).tolist() for c in courses}
        )
        rows = correlation_report(courses, feats, "instructor")
        assert [row.feature for row in rows] == list(FEATURE_NAMES)
        assert all(row.n == 30 for row in rows)

    def test_planted_positive_correlation(self):
        rng = np.random.default_rng(1)
        courses, values = [], {}
        for i in range(60):
            q = float(rng.uniform(0, 1))
            rating = 2.0 + 2.5 * q + float(rng.normal(0, 0.05))
            courses.append(build_course([["text."]], course_id=f"c{i}",
                                        instructor=min(5.0, max(0.0, rating))))
            vals = rng.random(8)
            vals[FEATURE_NAMES.index("questions")] = q
            values[f"c{i}"] = vals.tolist()
        rows = correlation_report(courses, _features_for(courses, values),
                                  "instructor")
        questions = rows[FEATURE_NAMES.index("questions")]
        assert questions.r > 0.5 and questions.significant

    def test_missing_rating_errors_with_ids(self):
        courses = [build_course([["x."]], course_id="good", instructor=4.0),
                   build_course([["x."]], course_id="bad")]
        feats = _features_for(
            courses, {c.id: np.zeros(8).tolist() for c in courses}
        )
        with pytest.raises(ValueError, match="bad"):
            correlation_report(courses, feats, "instructor")

    def test_constant_feature_flagged_undefined(self):
        rng = np.random.default_rng(2)
        courses = self.make_courses(20, rng)
        values = {}
        for c in courses:
            vals = rng.random(8)
            vals[FEATURE_NAMES.index("hedging")] = 0.5
            values[c.id] = vals.tolist()
        rows = correlation_report(courses, _features_for(courses, values),
                                  "instructor")
        hedging = rows[FEATURE_NAMES.index("hedging")]
        assert not hedging.defined
        others = [r for r in rows if r.feature != "hedging"]
        assert all(r.defined for r in others)
        csv_text = report_to_csv(rows)
        assert "hedging,instructor,undefined,undefined" in csv_text
        table = report_to_table(rows)
        assert "undefined" in table
