"""Concept trees: counted, base-first trees built from concept sequences,
factored into a linked forest and queried through entity keysets."""

from .base import BaseConfig, ConceptBase, RestructureReport, Route, Segment
from .errors import (
    BaseMismatch,
    CannotDetachBase,
    ConceptBaseError,
    CorruptSnapshot,
    DanglingEndpoint,
    EmptyList,
    EmptyQuery,
    InvalidEvent,
    LinkConflict,
    NotLinked,
    PathNotFound,
    UnknownTree,
    VersionMismatch,
)
from .links import EntityKeyset, Link, create_link, grant, resolve, revoke
from .metrics import ForestStats, energy, stats, tree_energy
from .query import QueryResult, concept_confidence, query_all, traverse
from .snapshot import dumps, load, loads, save, to_dot
from .text import (
    OrderingLexicon,
    SequenceEvent,
    bag_of_words,
    extract_sequences,
    load_lexicon,
    load_stopwords,
    reorder,
    tokenize,
)
from .tree import (
    AddOutcome,
    ConceptNode,
    ConceptTree,
    Violation,
    add_from_base,
    attach_branch,
    detach_branch,
    match_prefix,
    validate,
)

__version__ = "0.1.0"
