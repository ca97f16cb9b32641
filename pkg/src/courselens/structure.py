"""Lecture-similarity graph and modularity of the default section partition.

Each course becomes a complete weighted graph over its lectures; edge
weights are cosine similarities of per-lecture embeddings (TF-IDF over the
course's own lectures by default, or externally supplied vectors). The
section assignment is scored with weighted modularity:

    Q = (1/2m) * sum_ij (A_ij - k_i*k_j/(2m)) * delta(c_i, c_j)

with A the weight matrix, k the weighted degrees and 2m the total weight.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Course


@dataclass(frozen=True)
class LectureGraph:
    weights: np.ndarray  # symmetric, nonnegative, zero diagonal
    partition: np.ndarray  # community id per node

    def __post_init__(self):
        w = self.weights
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be a square matrix")
        if self.partition.shape != (w.shape[0],):
            raise ValueError("partition must assign every node")
        if not np.allclose(w, w.T):
            raise ValueError("weights must be symmetric")
        if np.any(np.diag(w) != 0.0):
            raise ValueError("weights must have a zero diagonal")
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def total_weight(self) -> float:
        """2m: the sum over the full (ordered-pair) weight matrix."""
        return float(self.weights.sum(axis=1).sum())


def embed_lectures(course: Course) -> list[np.ndarray]:
    """Per-lecture TF-IDF vectors, L2-normalized, over the course vocabulary.

    idf = ln(J / df) with J the lecture count; a term present in every
    lecture therefore contributes nothing, and a lecture whose terms all
    have df = J embeds as the zero vector.
    """
    lectures = course.lectures()
    counts = []
    df: dict[str, int] = {}
    for lec in lectures:
        c: dict[str, int] = {}
        for tok in lec.tokens:
            c[tok] = c.get(tok, 0) + 1
        counts.append(c)
        for term in c:
            df[term] = df.get(term, 0) + 1

    vocab = sorted(df)
    index = {term: i for i, term in enumerate(vocab)}
    j_total = len(lectures)
    idf = np.array([math.log(j_total / df[t]) for t in vocab])

    vectors = []
    for c in counts:
        vec = np.zeros(len(vocab))
        for term, tf in c.items():
            vec[index[term]] = tf * idf[index[term]]
        norm = np.linalg.norm(vec)
        if norm > 0.0:
            vec /= norm
        vectors.append(vec)
    return vectors


def load_lecture_embeddings(path: str | Path) -> dict[str, np.ndarray]:
    """External embeddings: JSONL {"lecture_id": ..., "vector": [...]}."""
    out: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            out[str(rec["lecture_id"])] = np.asarray(rec["vector"], dtype=float)
    return out


def build_graph(embeddings: list[np.ndarray], sections: list[int]) -> LectureGraph:
    """Complete weighted graph from pairwise cosine, partitioned by section."""
    n = len(embeddings)
    if n < 2:
        raise ValueError("structure undefined: need at least 2 lectures")
    if len(sections) != n:
        raise ValueError("one section index per embedding required")
    mat = np.stack(embeddings)
    norms = np.linalg.norm(mat, axis=1)
    safe = np.where(norms > 0.0, norms, 1.0)
    unit = mat / safe[:, None]
    sim = unit @ unit.T
    sim = (sim + sim.T) * 0.5  # force exact symmetry against BLAS rounding
    weights = np.clip(sim, 0.0, 1.0)
    np.fill_diagonal(weights, 0.0)
    return LectureGraph(weights=weights, partition=np.asarray(sections))


def modularity(graph: LectureGraph) -> float:
    """Weighted modularity Q of the graph's partition.

    Uses the per-community form Q = sum_c [S_in_c - S_tot_c^2 / 2m] / 2m,
    where S_in_c sums ordered within-community weights and S_tot_c the
    community's degrees; identical to the pairwise definition but O(n^2)
    only once.
    """
    degrees = graph.weights.sum(axis=1)
    two_m = float(degrees.sum())
    if two_m <= 0.0:
        raise ValueError("modularity undefined: total edge weight is zero")
    q = 0.0
    for community in np.unique(graph.partition):
        idx = np.flatnonzero(graph.partition == community)
        s_in = float(graph.weights[np.ix_(idx, idx)].sum(axis=1).sum())
        s_tot = float(degrees[idx].sum())
        q += (s_in - s_tot * (s_tot / two_m)) / two_m
    return q


def structure_quality(
    course: Course, embeddings: dict[str, np.ndarray] | None = None
) -> float:
    """Modularity of the default section partition.

    Courses that cannot support the computation (a single lecture, or all
    pairwise similarities zero) score 0.0 with a warning rather than
    failing, so feature extraction stays total.
    """
    lectures = course.lectures()
    if len(lectures) < 2:
        warnings.warn(
            f"course {course.id}: structure quality needs >=2 lectures, using 0"
        )
        return 0.0
    if embeddings is None:
        vectors = embed_lectures(course)
    else:
        vectors = [embeddings[lec.id] for lec in lectures]
    graph = build_graph(vectors, [lec.section_index for lec in lectures])
    if graph.total_weight <= 0.0:
        warnings.warn(
            f"course {course.id}: no nonzero lecture similarity, structure quality 0"
        )
        return 0.0
    return modularity(graph)
