"""Token vocabulary with reserved PAD/CLS/UNK ids."""

from __future__ import annotations

from collections import Counter

import numpy as np

from ..corpus import Course

PAD_ID = 0
CLS_ID = 1
UNK_ID = 2
_RESERVED = ("[PAD]", "[CLS]", "[UNK]")


class Vocabulary:
    def __init__(self, tokens: list[str]):
        if list(tokens[: len(_RESERVED)]) != list(_RESERVED):
            raise ValueError("vocabulary must start with the reserved tokens")
        self.tokens = list(tokens)
        self.index = {tok: i for i, tok in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def encode(self, words: list[str], max_tokens: int) -> np.ndarray:
        """[CLS] + word ids, truncated to max_tokens words."""
        ids = [CLS_ID]
        for word in words[:max_tokens]:
            ids.append(self.index.get(word, UNK_ID))
        return np.asarray(ids, dtype=np.int64)


def build_vocabulary(courses: list[Course], vocab_size: int) -> Vocabulary:
    """Most frequent tokens across the courses; ties broken lexicographically."""
    counts = Counter()
    for course in courses:
        for lec in course.lectures():
            counts.update(lec.tokens)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    keep = [tok for tok, _ in ranked[: max(0, vocab_size - len(_RESERVED))]]
    return Vocabulary(list(_RESERVED) + keep)
