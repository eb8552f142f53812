"""Command line front end over a snapshot file.

    conceptbase ingest --file doc.txt --db base.cb [--entity cat]
    conceptbase query --db base.cb --entity elephant --all milk,grass
    conceptbase query --db base.cb --entity cat --confidence black,cat:sat
    conceptbase stats --db base.cb
    conceptbase dump --dot --db base.cb
    conceptbase rejoin --t1 T1 --t2 T3 --db base.cb
    conceptbase decay --ticks 4 --db base.cb
    conceptbase validate --db base.cb

Exit codes: 0 success, 1 user error, 2 corrupt or invalid stored state.
"""

from __future__ import annotations

import argparse
import contextlib
import fcntl
import os
import sys
import tempfile
from pathlib import Path

from . import metrics, query, snapshot
from .base import BaseConfig, ConceptBase
from .errors import ConceptBaseError, CorruptSnapshot, VersionMismatch
from .links import parse_key
from .text import extract_sequences, load_lexicon, load_stopwords, reorder


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@contextlib.contextmanager
def _locked(db: Path, exclusive: bool):
    lock_path = db.with_name(db.name + ".lock")
    with open(lock_path, "a") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX if exclusive else fcntl.LOCK_SH)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def _open(db: Path, config: str | None) -> ConceptBase:
    if db.exists():
        base = snapshot.load(db)
        if config:
            base.config = BaseConfig.from_file(config)
        return base
    return ConceptBase(BaseConfig.from_file(config) if config else None)


def _write(base: ConceptBase, db: Path, ledger: bool = True) -> None:
    text = snapshot.dumps(base, ledger=ledger)
    fd, tmp = tempfile.mkstemp(dir=db.parent or ".", prefix=db.name + ".")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, db)


def cmd_ingest(args, base, out):
    text = sys.stdin.read() if args.stdin else Path(args.file).read_text("utf-8")
    stop = load_stopwords(args.stopwords)
    events = extract_sequences(text, stop, base.next_tick, entity=args.entity)
    if args.reorder_lexicon:
        lexicon = load_lexicon(args.reorder_lexicon)
        events = [reorder(e, lexicon) for e in events]
    eager = base.config.eager_scans
    if args.batch:
        base.config.eager_scans = False
    try:
        report = base.ingest_many(events, rejoin=args.rejoin)
    finally:
        base.config.eager_scans = eager
    print(f"events = {len(events)}", file=out)
    for line in report.summary():
        print(line, file=out)
    return True


def _parse_confidence(text: str):
    path, sep, candidate = text.rpartition(":")
    if not sep or not path or not candidate:
        raise UsageError("--confidence expects PATH:CANDIDATE, e.g. black,cat:sat")
    return [p for p in path.replace(",", " ").split() if p], candidate


def cmd_query(args, base, out):
    if args.confidence:
        path, candidate = _parse_confidence(args.confidence)
        value = query.concept_confidence(base, path, candidate)
        print(f"confidence = {value!r}", file=out)
        return False
    if args.entity is None:
        raise UsageError("query needs --entity (or --confidence)")
    if args.all:
        labels = [l.strip().lower() for l in args.all.split(",") if l.strip()]
        result = query.query_all(base, args.entity, labels, refresh=args.refresh)
    else:
        result = query.traverse(base, args.entity, refresh=args.refresh)
    for tid in result.matched_trees:
        print(f"grouping = T{tid}", file=out)
    for path in result.paths:
        print(f"path = {' '.join(path)}", file=out)
    return args.refresh


def cmd_stats(args, base, out):
    for line in metrics.stats(base).lines():
        print(line, file=out)
    return False


def cmd_dump(args, base, out):
    out.write(snapshot.to_dot(base) if args.dot else snapshot.dumps(base))
    return False


def cmd_rejoin(args, base, out):
    report = base.try_rejoin(parse_key(args.t1, "T"), parse_key(args.t2, "T"))
    for line in report.summary():
        print(line, file=out)
    return bool(report.rejoins or report.refused)


def cmd_decay(args, base, out):
    if args.ticks < 0:
        raise UsageError("--ticks must be non-negative")
    removed = []
    for _ in range(args.ticks):
        removed += base.decay_tick().links_removed
    print(f"links_removed = {', '.join(f'L{k}' for k in removed)}", file=out)
    print(f"total_links = {len(base.links)}", file=out)
    return True


def cmd_validate(args, base, out):
    problems = base.check()
    for p in problems:
        print(p, file=out)
    print(f"violations = {len(problems)}", file=out)
    if problems:
        raise CorruptSnapshot(f"{len(problems)} invariant violation(s)")
    return False


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--db", default="base.cb", help="snapshot file (created on first write)")
    common.add_argument("--config", help="'key = value' config file")

    parser = _Parser(prog="conceptbase", description="Build and query concept trees.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", parents=[common], help="add text to the base")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--file")
    src.add_argument("--stdin", action="store_true")
    p.add_argument("--entity")
    p.add_argument("--reorder-lexicon", help="word<TAB>weight file applied before ingestion")
    p.add_argument("--stopwords", help="stop-word file (default: bundled English list)")
    p.add_argument("--batch", action="store_true", help="run restructuring once at the end")
    p.add_argument("--rejoin", action="store_true", help="attempt rejoins at end of batch")
    p.add_argument("--no-ledger", action="store_true", help="do not persist the event ledger")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("query", parents=[common], help="traverse or query for an entity")
    p.add_argument("--entity")
    p.add_argument("--all", help="comma separated labels that must all be reachable")
    p.add_argument("--confidence", help="PATH:CANDIDATE, path labels comma separated")
    p.add_argument("--refresh", action="store_true", help="record link use (writes the db)")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("stats", parents=[common], help="forest statistics")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("dump", parents=[common], help="print the snapshot or DOT")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_dump)

    p = sub.add_parser("rejoin", parents=[common], help="try to rejoin two trees")
    p.add_argument("--t1", required=True)
    p.add_argument("--t2", required=True)
    p.set_defaults(func=cmd_rejoin)

    p = sub.add_parser("decay", parents=[common], help="age link strengths")
    p.add_argument("--ticks", type=int, default=1)
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("validate", parents=[common], help="check every invariant")
    p.set_defaults(func=cmd_validate)
    return parser


WRITERS = {"ingest", "rejoin", "decay"}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        db = Path(args.db)
        writes = args.command in WRITERS or (args.command == "query" and args.refresh)
        with _locked(db, exclusive=writes):
            base = _open(db, args.config)
            changed = args.func(args, base, out)
            if writes and changed:
                _write(base, db, ledger=not getattr(args, "no_ledger", False))
        return 0
    except (CorruptSnapshot, VersionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ConceptBaseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
