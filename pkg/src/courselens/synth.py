"""Synthetic corpora with planted feature-rating relationships.

Each course draws a latent level for every extractable feature (a question
rate, per-token lexicon injection rates, an emotion profile, a token
budget, and a section-vocabulary coherence level). Text is sampled to
realize those levels; ratings are a linear function of the standardized
latent levels plus Gaussian noise, clipped to [0, 5]:

    y = clip(mu + sum_f beta_f * z_f + eps, 0, 5)

Realism of the token streams is a non-goal; the point is that extraction
recovers the planted levels well enough to verify the correlation and
training pipelines end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import Course, Lecture, Section
from .lexicons import EMOTION_DIMENSIONS, LexiconSet
from .verbal_cues import AUXILIARIES, FEATURE_NAMES, WH_WORDS

_GLUE = ("the", "a", "we", "of", "to", "and", "in", "this", "with", "for",
         "on", "that", "it", "as", "from", "by", "at", "its")
_STARTERS = ("the", "we", "this", "these", "those", "our", "all", "every")
_QUESTION_PREFIXES = (
    ("what", "is"), ("what", "are"), ("how", "do"), ("how", "can"),
    ("why", "is"), ("when", "do"), ("where", "is"), ("which", "are"),
)
_N_TOPIC_POOLS = 12
_TOPIC_WORDS_PER_POOL = 30
_N_FILLER = 150


@dataclass(frozen=True)
class GeneratorSpec:
    """Corpus shape (Table-1-style defaults) plus planted-signal controls."""

    n_courses: int
    seed: int = 0
    sections_mean: float = 4.95
    sections_sd: float = 1.81
    lectures_per_section_mean: float = 8.13
    lectures_per_section_sd: float = 5.24
    tokens_per_lecture_mean: float = 1158.87
    tokens_per_lecture_sd: float = 855.50
    min_tokens_per_lecture: int = 20
    rating_mean: float = 4.0
    noise_sd: float = 0.3
    betas: dict[str, float] = field(default_factory=dict)
    question_rate: tuple[float, float] = (0.02, 0.30)
    hedge_rate: tuple[float, float] = (0.0, 0.05)
    emotion_rate: tuple[float, float] = (0.0, 0.05)
    strong_rate: tuple[float, float] = (0.0, 0.04)
    weak_rate: tuple[float, float] = (0.0, 0.04)
    entity_rate: tuple[float, float] = (0.0, 0.06)
    structure_level: tuple[float, float] = (0.05, 0.95)

    def __post_init__(self):
        if self.n_courses < 1:
            raise ValueError("n_courses must be >= 1")
        if self.min_tokens_per_lecture < 1:
            raise ValueError("min_tokens_per_lecture must be >= 1")
        for name in ("sections_sd", "lectures_per_section_sd",
                     "tokens_per_lecture_sd", "noise_sd"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        unknown = set(self.betas) - set(FEATURE_NAMES)
        if unknown:
            raise ValueError(f"betas for unknown features: {sorted(unknown)}")
        for name in ("question_rate", "hedge_rate", "emotion_rate",
                     "strong_rate", "weak_rate", "entity_rate",
                     "structure_level"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo <= hi <= 1.0):
                raise ValueError(f"{name} must satisfy 0 <= lo <= hi <= 1")
        total_hi = (self.hedge_rate[1] + self.emotion_rate[1]
                    + self.strong_rate[1] + self.weak_rate[1]
                    + self.entity_rate[1])
        if total_hi > 0.9:
            raise ValueError("combined injection rates leave no room for text")

    def to_dict(self) -> dict:
        from dataclasses import fields as dc_fields

        out = {}
        for f in dc_fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        from dataclasses import fields as dc_fields

        known = {f.name for f in dc_fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown generator spec keys: {sorted(unknown)}")
        fixed = {
            k: tuple(v) if isinstance(v, list) else v for k, v in data.items()
        }
        return cls(**fixed)


def sample_course_shape(spec: GeneratorSpec, rng: np.random.Generator):
    """Per-section lecture token budgets for one course."""
    n_sections = max(1, round(rng.normal(spec.sections_mean, spec.sections_sd)))
    shape = []
    for _ in range(n_sections):
        n_lectures = max(1, round(rng.normal(spec.lectures_per_section_mean,
                                             spec.lectures_per_section_sd)))
        budgets = np.maximum(
            spec.min_tokens_per_lecture,
            np.round(rng.normal(spec.tokens_per_lecture_mean,
                                spec.tokens_per_lecture_sd,
                                size=n_lectures)),
        ).astype(int)
        shape.append(budgets.tolist())
    return shape


class _Pools:
    """Injection vocabularies, kept mutually exclusive so that planted
    rates do not bleed between features."""

    def __init__(self, lexicons: LexiconSet):
        reserved = set(AUXILIARIES) | set(WH_WORDS) | set(_GLUE)
        hedge = set(lexicons.hedges.unigrams)
        strong = set(lexicons.strong_modal.unigrams)
        weak = set(lexicons.weak_modal.unigrams)
        emotion_tokens = set(lexicons.emotions.emotions)
        gaz = set(lexicons.gazetteer.unigrams)

        self.hedge = sorted(hedge - strong - weak - emotion_tokens - gaz - reserved)
        self.strong = sorted(strong - hedge - weak - emotion_tokens - gaz - reserved)
        self.weak = sorted(weak - hedge - strong - emotion_tokens - gaz - reserved)
        self.entity = sorted(gaz - hedge - strong - weak - emotion_tokens - reserved)
        taken = hedge | strong | weak | gaz | reserved
        self.emotion = {}
        for dim in EMOTION_DIMENSIONS:
            exact = {
                tok for tok, dims in lexicons.emotions.emotions.items()
                if dims == frozenset({dim}) and tok not in taken
            }
            self.emotion[dim] = sorted(exact)
        for name in ("hedge", "strong", "weak", "entity"):
            if not getattr(self, name):
                raise ValueError(f"lexicons leave no usable {name} injection pool")
        if any(not words for words in self.emotion.values()):
            raise ValueError("every emotion dimension needs an injection token")

        self.filler = [f"term{i:03d}" for i in range(_N_FILLER)]
        self.topics = [
            [f"topic{s}w{j:02d}" for j in range(_TOPIC_WORDS_PER_POOL)]
            for s in range(1, _N_TOPIC_POOLS + 1)
        ]
        self._check_phrases(lexicons)

    def _check_phrases(self, lexicons: LexiconSet):
        generated = (set(self.hedge) | set(self.strong) | set(self.weak)
                     | set(self.entity) | set(self.filler) | set(_GLUE)
                     | set(_STARTERS) | set(AUXILIARIES) | set(WH_WORDS)
                     | {w for ws in self.emotion.values() for w in ws}
                     | {w for pool in self.topics for w in pool})
        phrases = (lexicons.hedges.phrases | lexicons.strong_modal.phrases
                   | lexicons.weak_modal.phrases | lexicons.gazetteer.phrases)
        for phrase in phrases:
            if all(tok in generated for tok in phrase):
                raise ValueError(
                    f"phrase {' '.join(phrase)!r} could appear by accident; "
                    "adjust the lexicons or the generator pools"
                )


@dataclass
class _CourseLatents:
    values: np.ndarray  # aligned with FEATURE_NAMES
    emotion_profile: np.ndarray
    emotion_mass: float


def _draw_latents(spec: GeneratorSpec, shape, rng) -> _CourseLatents:
    def draw(bounds):
        lo, hi = bounds
        return float(rng.uniform(lo, hi))

    emotion_mass = draw(spec.emotion_rate)
    profile = rng.dirichlet(np.ones(len(EMOTION_DIMENSIONS)))
    rates = emotion_mass * profile
    intended_entropy = float(-np.sum(rates[rates > 0] * np.log(rates[rates > 0])))

    values = np.empty(len(FEATURE_NAMES))
    latents = {
        "concreteness": draw(spec.entity_rate),
        "questions": draw(spec.question_rate),
        "emotion_entropy": intended_entropy,
        "hedging": draw(spec.hedge_rate),
        "strong_modal": draw(spec.strong_rate),
        "weak_modal": draw(spec.weak_rate),
        "course_length": float(sum(sum(sec) for sec in shape)),
        "structure_quality": draw(spec.structure_level),
    }
    for i, name in enumerate(FEATURE_NAMES):
        values[i] = latents[name]
    return _CourseLatents(values=values, emotion_profile=profile,
                          emotion_mass=emotion_mass)


def _sentence(rng, pools: _Pools, latents: _CourseLatents, spec_probs,
              lam: float, section: int, is_question: bool) -> list[str]:
    length = int(rng.integers(8, 15))
    if is_question:
        tokens = list(_QUESTION_PREFIXES[rng.integers(len(_QUESTION_PREFIXES))])
    else:
        tokens = [_STARTERS[rng.integers(len(_STARTERS))]]
    body = length - len(tokens)
    cuts = np.cumsum(spec_probs)
    cats = np.digitize(rng.random(body), cuts)
    topic_pool = pools.topics[(section - 1) % len(pools.topics)]
    use_topic = rng.random(body) < lam
    glue_draw = rng.random(body) < 0.35
    for pos in range(body):
        cat = cats[pos]
        if cat == 0:
            word = pools.hedge[rng.integers(len(pools.hedge))]
        elif cat == 1:
            dim = EMOTION_DIMENSIONS[
                rng.choice(len(EMOTION_DIMENSIONS), p=latents.emotion_profile)
            ]
            pool = pools.emotion[dim]
            word = pool[rng.integers(len(pool))]
        elif cat == 2:
            word = pools.strong[rng.integers(len(pools.strong))]
        elif cat == 3:
            word = pools.weak[rng.integers(len(pools.weak))]
        elif cat == 4:
            word = pools.entity[rng.integers(len(pools.entity))]
        elif cat == 5:
            word = str(rng.integers(1900, 2030))
        elif use_topic[pos]:
            word = topic_pool[rng.integers(len(topic_pool))]
        elif glue_draw[pos]:
            word = _GLUE[rng.integers(len(_GLUE))]
        else:
            word = pools.filler[rng.integers(len(pools.filler))]
        tokens.append(word)
    return tokens


def _lecture_text(rng, pools, latents: _CourseLatents, budget: int,
                  lam: float, section: int, question_rate: float) -> str:
    idx = {name: i for i, name in enumerate(FEATURE_NAMES)}
    v = latents.values
    # per-token category probabilities: hedge, emotion, strong, weak,
    # entity words, numbers; the rest is background vocabulary
    probs = np.array([
        v[idx["hedging"]],
        latents.emotion_mass,
        v[idx["strong_modal"]],
        v[idx["weak_modal"]],
        v[idx["concreteness"]] * 0.7,
        v[idx["concreteness"]] * 0.3,
    ])
    sentences = []
    produced = 0
    while produced < budget:
        ask = rng.random() < question_rate
        tokens = _sentence(rng, pools, latents, probs, lam, section, ask)
        sentences.append(" ".join(tokens) + ("?" if ask else "."))
        produced += len(tokens)
    return " ".join(sentences)


def generate(spec: GeneratorSpec, lexicons: LexiconSet) -> list[Course]:
    """Deterministic corpus with planted signals; see the module docstring."""
    pools = _Pools(lexicons)
    root = np.random.SeedSequence(spec.seed)
    latent_seed, text_seed = root.spawn(2)
    latent_rng = np.random.default_rng(latent_seed)

    shapes = [sample_course_shape(spec, latent_rng) for _ in range(spec.n_courses)]
    latents = [_draw_latents(spec, shape, latent_rng) for shape in shapes]

    matrix = np.stack([lat.values for lat in latents])
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)
    std = np.where(std > 0.0, std, 1.0)
    z = (matrix - mean) / std
    beta = np.array([spec.betas.get(name, 0.0) for name in FEATURE_NAMES])
    signal = spec.rating_mean + z @ beta
    eps = latent_rng.normal(0.0, spec.noise_sd, size=(spec.n_courses, 2))
    instructor = np.clip(signal + eps[:, 0], 0.0, 5.0)
    course_rating = np.clip(signal + eps[:, 1], 0.0, 5.0)

    q_idx = FEATURE_NAMES.index("questions")
    s_idx = FEATURE_NAMES.index("structure_quality")
    courses = []
    for c, child in enumerate(text_seed.spawn(spec.n_courses)):
        rng = np.random.default_rng(child)
        course_id = f"c{c:05d}"
        sections = []
        for s, budgets in enumerate(shapes[c], start=1):
            lecture_objs = []
            for p, budget in enumerate(budgets, start=1):
                text = _lecture_text(
                    rng, pools, latents[c], budget,
                    lam=float(latents[c].values[s_idx]), section=s,
                    question_rate=float(latents[c].values[q_idx]),
                )
                lecture_objs.append(
                    Lecture(id=f"{course_id}-s{s}-l{p}", section_index=s,
                            position_in_section=p, text=text)
                )
            sections.append(Section(title=f"section {s}",
                                    lectures=tuple(lecture_objs)))
        courses.append(
            Course(
                id=course_id,
                title=f"synthetic course {c}",
                sections=tuple(sections),
                instructor_rating=float(instructor[c]),
                course_rating=float(course_rating[c]),
            )
        )
    return courses
