"""Lexicon containers and file loaders.

File formats:
  * plain lexicon: UTF-8 text, one entry per line, '#' starts a comment,
    spaces delimit the tokens of a multi-word phrase;
  * emotion lexicon: TSV lines ``token<TAB>emotion`` with emotion one of
    the eight recognised dimensions;
  * gazetteer: one entity surface form per line (same syntax as a plain
    lexicon).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

EMOTION_DIMENSIONS = (
    "anticipation",
    "joy",
    "surprise",
    "trust",
    "anger",
    "disgust",
    "fear",
    "sadness",
)


@dataclass(frozen=True)
class Lexicon:
    """Unigram set plus multi-word phrases (token tuples of length >= 2)."""

    name: str
    unigrams: frozenset[str]
    phrases: frozenset[tuple[str, ...]]

    def __post_init__(self):
        for entry in self.unigrams:
            if not entry or entry != entry.lower():
                raise ValueError(f"{self.name}: bad unigram {entry!r}")
        for phrase in self.phrases:
            if len(phrase) < 2 or any(not t or t != t.lower() for t in phrase):
                raise ValueError(f"{self.name}: bad phrase {phrase!r}")

    @property
    def max_phrase_len(self) -> int:
        return max((len(p) for p in self.phrases), default=1)


@dataclass(frozen=True)
class EmotionLexicon:
    """token -> subset of the eight emotion dimensions."""

    emotions: dict[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        for token, dims in self.emotions.items():
            unknown = dims - set(EMOTION_DIMENSIONS)
            if unknown:
                raise ValueError(f"unknown emotion(s) {unknown} for {token!r}")

    def tokens_for(self, dimension: str) -> set[str]:
        return {t for t, dims in self.emotions.items() if dimension in dims}


@dataclass(frozen=True)
class LexiconSet:
    """Everything feature extraction needs, loaded once."""

    hedges: Lexicon
    strong_modal: Lexicon
    weak_modal: Lexicon
    emotions: EmotionLexicon
    gazetteer: Lexicon


def _iter_entries(path: Path):
    for raw in path.read_text(encoding="utf-8").splitlines():
        entry = raw.split("#", 1)[0].strip().lower()
        if entry:
            yield entry


def load_lexicon(path: str | Path, name: str | None = None) -> Lexicon:
    path = Path(path)
    unigrams, phrases = set(), set()
    for entry in _iter_entries(path):
        parts = tuple(entry.split())
        if len(parts) == 1:
            unigrams.add(parts[0])
        else:
            phrases.add(parts)
    return Lexicon(name or path.stem, frozenset(unigrams), frozenset(phrases))


def load_emotion_lexicon(path: str | Path) -> EmotionLexicon:
    path = Path(path)
    emotions: dict[str, set[str]] = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.lower().split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{line_no}: expected 'token<TAB>emotion'")
        token, dim = parts[0].strip(), parts[1].strip()
        if dim not in EMOTION_DIMENSIONS:
            raise ValueError(f"{path}:{line_no}: unknown emotion {dim!r}")
        emotions.setdefault(token, set()).add(dim)
    return EmotionLexicon({t: frozenset(d) for t, d in emotions.items()})


LEXICON_FILES = {
    "hedges": "hedges.txt",
    "strong_modal": "strong_modal.txt",
    "weak_modal": "weak_modal.txt",
    "emotions": "emotions.tsv",
    "gazetteer": "gazetteer.txt",
}


def default_lexicon_dir() -> Path:
    """Directory of the small lexicons bundled with the package."""
    return Path(__file__).parent / "data"


def load_lexicon_set(directory: str | Path | None = None) -> LexiconSet:
    """Load all five lexicon files from a directory (bundled set by default)."""
    directory = Path(directory) if directory is not None else default_lexicon_dir()
    for filename in LEXICON_FILES.values():
        if not (directory / filename).is_file():
            raise FileNotFoundError(f"missing lexicon file: {directory / filename}")
    return LexiconSet(
        hedges=load_lexicon(directory / LEXICON_FILES["hedges"], "hedges"),
        strong_modal=load_lexicon(directory / LEXICON_FILES["strong_modal"], "strong_modal"),
        weak_modal=load_lexicon(directory / LEXICON_FILES["weak_modal"], "weak_modal"),
        emotions=load_emotion_lexicon(directory / LEXICON_FILES["emotions"]),
        gazetteer=load_lexicon(directory / LEXICON_FILES["gazetteer"], "gazetteer"),
    )
