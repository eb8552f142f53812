"""Text ingestion: tokenising, sentence extraction and optional reordering.

Everything here is a pure function except the tick source passed to
:func:`extract_sequences`, which callers must confine to one thread.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

# word characters, hyphen allowed only between word characters
_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*")
_SENTENCE_RE = re.compile(r"[.!?]")


@dataclass(frozen=True)
class SequenceEvent:
    """One ingestion unit: ordered concept labels seen together at one tick."""

    concepts: tuple[str, ...]
    timestamp: int = 0
    entity: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "concepts", tuple(self.concepts))


@dataclass
class OrderingLexicon:
    weights: dict[str, int] = field(default_factory=dict)

    def weight(self, label: str) -> int:
        return self.weights.get(label, 0)


def _read_lines(lines: Iterable[str]) -> Iterator[str]:
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a stop-word file; ``None`` loads the bundled English list."""
    if path is None:
        text = resources.files("conceptbase").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return frozenset(w.lower() for w in _read_lines(text.splitlines()))


def load_lexicon(path: str | Path) -> OrderingLexicon:
    weights = {}
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        try:
            word, value = line.split("\t")
            weights[word.strip().lower()] = int(value)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: expected 'word<TAB>integer'") from None
    return OrderingLexicon(weights)


def tokenize(text: str, stopwords: Iterable[str] = ()) -> list[str]:
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return [tok for tok in _TOKEN_RE.findall(text.lower()) if tok not in stop]


def extract_sequences(
    document: str,
    stopwords: Iterable[str] = (),
    clock: Callable[[], int] | None = None,
    entity: str | None = None,
) -> list[SequenceEvent]:
    """Split ``document`` into sentences and turn each into a SequenceEvent.

    Sentences that tokenize to nothing are dropped without consuming a tick.
    """
    if clock is None:
        clock = itertools.count().__next__
    stop = frozenset(stopwords)
    events = []
    for sentence in _SENTENCE_RE.split(document):
        concepts = tokenize(sentence, stop)
        if concepts:
            events.append(SequenceEvent(tuple(concepts), clock(), entity))
    return events


def reorder(event: SequenceEvent, lexicon: OrderingLexicon) -> SequenceEvent:
    # sorted() is stable, so equal weights keep their input order
    ordered = sorted(event.concepts, key=lambda c: -lexicon.weight(c))
    return replace(event, concepts=tuple(ordered))


def bag_of_words(events: Sequence[SequenceEvent]) -> Counter:
    counts: Counter = Counter()
    for event in events:
        counts.update(event.concepts)
    return counts
