"""Cantor diagonal operator over 1-indexed sequences of digit streams."""

from __future__ import annotations

import threading
from typing import Callable

from .streams import DigitStream, ProvedDifferent, reals_differ


class StreamSequence:
    """A total, 1-indexed sequence of digit streams.

    Resolved elements are memoized so every caller shares one stream object
    (and therefore one digit cache) per index.
    """

    def __init__(self) -> None:
        self._memo: dict[int, DigitStream] = {}
        self._memo_lock = threading.Lock()

    def __getitem__(self, index: int) -> DigitStream:
        if index < 1:
            raise IndexError("sequences are indexed from 1")
        stream = self._memo.get(index)
        if stream is None:
            with self._memo_lock:
                stream = self._memo.get(index)
                if stream is None:
                    stream = self._resolve(index)
                    self._memo[index] = stream
        return stream

    def _resolve(self, index: int) -> DigitStream:
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError


class FunctionSequence(StreamSequence):
    def __init__(self, fn: Callable[[int], DigitStream], descriptor: dict):
        super().__init__()
        self._fn = fn
        self._descriptor = descriptor

    def _resolve(self, index: int) -> DigitStream:
        return self._fn(index)

    def descriptor(self) -> dict:
        return self._descriptor


class ListSequence(StreamSequence):
    """Explicit leading elements, then ``fill(index)`` for the rest."""

    def __init__(self, streams: list[DigitStream], fill: Callable[[int], DigitStream], label: str = "list"):
        super().__init__()
        self._streams = list(streams)
        self._fill = fill
        self.label = label

    def _resolve(self, index: int) -> DigitStream:
        if index <= len(self._streams):
            return self._streams[index - 1]
        return self._fill(index)

    def descriptor(self) -> dict:
        return {"kind": "list", "label": self.label, "length": len(self._streams)}


class PrependedSequence(StreamSequence):
    """``head`` at index 1, the old element at index v moved to v + 1."""

    def __init__(self, head: DigitStream, tail: StreamSequence):
        super().__init__()
        self.head, self.tail = head, tail

    def _resolve(self, index: int) -> DigitStream:
        return self.head if index == 1 else self.tail[index - 1]

    def descriptor(self) -> dict:
        return {"kind": "prepend", "head": self.head.descriptor(), "tail": self.tail.descriptor()}


class DiagonalStream(DigitStream):
    """Digit v is ``1 - source[v].digit_at(v + offset)``."""

    def __init__(self, source: StreamSequence, offset: int = 0):
        super().__init__()
        if offset < 0:
            raise ValueError("offset must be non-negative")
        self.source, self.offset = source, offset

    def _extend(self, n: int) -> None:
        start = len(self._digits) + 1
        k = self.offset
        self._append("".join("0" if self.source[v].digit_at(v + k) else "1" for v in range(start, n + 1)))

    def descriptor(self) -> dict:
        return {"kind": "diagonal", "offset": self.offset, "source": self.source.descriptor()}


def diagonalize(source: StreamSequence, offset: int = 0) -> DiagonalStream:
    return DiagonalStream(source, offset)


def prepend_and_shift(sequence: StreamSequence, head: DigitStream) -> PrependedSequence:
    return PrependedSequence(head, sequence)


class DifferenceUnresolved(Exception):
    def __init__(self, i: str, j: int, budget: int):
        super().__init__(f"T{j} vs {i}: no separation within {budget} digits")
        self.i, self.j, self.budget = i, j, budget


def recursive_t_sequence(source: StreamSequence, count: int, budget: int = 64) -> list[DigitStream]:
    """T1..T_count, each the diagonal of the sequence with all earlier T's prepended.

    Every T_j is checked to differ as a real from the first ``count``
    source elements and from T_1..T_{j-1}.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    seq: StreamSequence = source
    out: list[DigitStream] = []
    for j in range(1, count + 1):
        t = diagonalize(seq, 0)
        others = [(f"S{v}", source[v]) for v in range(1, count + 1)]
        others += [(f"T{i}", out[i - 1]) for i in range(1, j)]
        for label, other in others:
            if not isinstance(reals_differ(t, other, budget), ProvedDifferent):
                raise DifferenceUnresolved(label, j, budget)
        out.append(t)
        seq = prepend_and_shift(seq, t)
    return out
