"""Line-delimited trace records: ``<seq> <kind> <action-text>``.

Kinds: ``input`` (commands, emergency commands, spontaneous sensors, skip),
``read`` (inline traffic-light sensor reads), ``output`` (actuator commands).
A burst is one input record plus the read/output records that follow it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO

from .domain import Action, DomainError, parse_action

KINDS = ("input", "read", "output")


@dataclass(frozen=True)
class TraceRecord:
    seq: int
    kind: str
    action: Action

    def line(self) -> str:
        return "%d %s %s" % (self.seq, self.kind, self.action.text())


def parse_record(line: str) -> TraceRecord:
    parts = line.strip().split(" ", 2)
    if len(parts) != 3:
        raise DomainError("malformed trace record: %r" % line)
    seq_text, kind, action_text = parts
    if kind not in KINDS:
        raise DomainError("unknown record kind %r in %r" % (kind, line))
    try:
        seq = int(seq_text)
    except ValueError:
        raise DomainError("bad sequence number in %r" % line)
    return TraceRecord(seq, kind, parse_action(action_text))


def read_trace(fp: TextIO) -> Iterator[TraceRecord]:
    for line in fp:
        line = line.strip()
        if line and not line.startswith("#"):
            yield parse_record(line)


def write_trace(fp: TextIO, records: Iterable[TraceRecord]) -> None:
    for rec in records:
        fp.write(rec.line() + "\n")


def load_trace(path) -> list[TraceRecord]:
    with open(path, "r", encoding="utf-8") as fp:
        return list(read_trace(fp))


def validate(records: list[TraceRecord]) -> None:
    """Sequence numbers must be 0..n-1 with no gaps."""
    for i, rec in enumerate(records):
        if rec.seq != i:
            raise DomainError("trace sequence gap at record %d (seq %d)" % (i, rec.seq))
