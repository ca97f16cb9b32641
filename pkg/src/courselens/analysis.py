"""Pearson correlation of course features against ratings, with p-values.

The two-sided p-value comes from the exact Student-t identity
p = I_x(df/2, 1/2) with x = df / (df + t^2), evaluated with a
Lentz-style continued fraction for the regularized incomplete beta
function (tolerance 1e-12, at most 200 iterations).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import Course
from .verbal_cues import FEATURE_NAMES, FeatureVector

_CF_TOL = 1e-12
_CF_MAX_ITER = 200
_TINY = 1e-300


@dataclass(frozen=True)
class CorrelationRow:
    feature: str
    target: str
    r: float
    p: float
    n: int
    significant: bool
    defined: bool = True


def pearson(x, y) -> float:
    """Sample Pearson correlation; rejects constant inputs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two equal-length 1-D samples")
    n = x.size
    if n < 3:
        raise ValueError("pearson needs at least 3 samples")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("undefined correlation: constant input")
    return float(dx @ dy) / math.sqrt(sxx * syy)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def p_value(r: float, n: int) -> float:
    """Two-sided p for a Pearson r under the t distribution with n-2 df."""
    if n < 3:
        raise ValueError("p_value needs n >= 3")
    if abs(r) > 1.0 + 1e-12:
        raise ValueError(f"|r| must not exceed 1, got {r}")
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return 0.0
    df = n - 2
    t2 = df * r * r / (1.0 - r * r)
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t2))


def correlation_report(
    courses: list[Course],
    features: dict[str, FeatureVector],
    target: str,
    alpha: float = 0.05,
) -> list[CorrelationRow]:
    """One row per feature, in the canonical feature order.

    Every course must carry the target rating; constant feature columns
    produce rows flagged as undefined rather than failing the whole report.
    """
    missing = [c.id for c in courses if c.rating(target) is None]
    if missing:
        raise ValueError(
            f"courses missing {target} rating: {', '.join(missing[:10])}"
            + ("..." if len(missing) > 10 else "")
        )
    ratings = [float(c.rating(target)) for c in courses]
    n = len(courses)
    rows = []
    for name in FEATURE_NAMES:
        column = [getattr(features[c.id], name) for c in courses]
        try:
            r = pearson(column, ratings)
            p = p_value(r, n)
        except ValueError:
            rows.append(CorrelationRow(name, target, math.nan, math.nan, n,
                                       significant=False, defined=False))
            continue
        rows.append(CorrelationRow(name, target, r, p, n,
                                   significant=p < alpha))
    return rows


def report_to_csv(rows: list[CorrelationRow]) -> str:
    lines = ["feature,target,r,p,significant"]
    for row in rows:
        if row.defined:
            lines.append(
                f"{row.feature},{row.target},{row.r!r},{row.p!r},{str(row.significant).lower()}"
            )
        else:
            lines.append(f"{row.feature},{row.target},undefined,undefined,")
    return "\n".join(lines) + "\n"


def report_to_table(rows: list[CorrelationRow]) -> str:
    """Aligned text table, significance starred at p < 0.05."""
    width = max(len(r.feature) for r in rows)
    lines = [f"{'feature':<{width}}  {'r':>8}  {'p':>10}"]
    for row in rows:
        if row.defined:
            star = "*" if row.significant else " "
            lines.append(f"{row.feature:<{width}}  {row.r:>7.3f}{star}  {row.p:>10.3g}")
        else:
            lines.append(f"{row.feature:<{width}}  {'undefined':>8}  {'':>10}")
    return "\n".join(lines) + "\n"
