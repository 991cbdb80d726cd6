"""Cumulative layers: Sigma_0 is the algebraic enumeration, Sigma_{n+1} interleaves
Sigma_n with the family of offset diagonals taken over Sigma_n."""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .algebraic import enumerate_algebraics
from .diagonal import DiagonalStream, StreamSequence
from .streams import AlgebraicStream, DigitStream

CHECKPOINT_SCHEMA = "transdiag.checkpoint"
CHECKPOINT_VERSION = 1

UNIT_WINDOW = (Fraction(0), Fraction(1))


@dataclass(frozen=True)
class Provenance:
    """Where a Sigma element came from.

    Layer 0 elements carry their (0-based) enumeration index; layer n >= 1
    elements are the diagonal with ``offset`` taken over Sigma_{applied_at}.
    """

    layer: int
    algebraic_index: Optional[int] = None
    offset: Optional[int] = None
    applied_at: Optional[int] = None

    @property
    def element(self) -> int:
        """1-based position of this element inside its own layer."""
        if self.layer == 0:
            return self.algebraic_index + 1
        return self.offset + 1

    def to_json(self) -> dict:
        if self.layer == 0:
            gen = {"algebraic_index": self.algebraic_index}
        else:
            gen = {"offset": self.offset, "level": self.applied_at}
        return {"layer": self.layer, "generator": gen}


class LayerFamily:
    """family[k] = diagonal of ``base`` with column offset k - 1, built lazily."""

    def __init__(self, base: "SigmaEnumeration"):
        self.base = base
        self.layer = base.level + 1
        self._memo: dict[int, DiagonalStream] = {}
        self._lock = threading.Lock()

    def __getitem__(self, k: int) -> DiagonalStream:
        if k < 1:
            raise IndexError("family members are indexed from 1")
        d = self._memo.get(k)
        if d is None:
            with self._lock:
                d = self._memo.get(k)
                if d is None:
                    d = self._memo[k] = DiagonalStream(self.base, k - 1)
        return d

    def provenance(self, k: int) -> Provenance:
        return Provenance(layer=self.layer, offset=k - 1, applied_at=self.base.level)


class SigmaEnumeration(StreamSequence):
    """Sigma_level as a total, memoized, 1-indexed sequence with provenance."""

    def __init__(self, level: int, window=UNIT_WINDOW, base: "SigmaEnumeration | None" = None,
                 family: LayerFamily | None = None):
        super().__init__()
        self.level = level
        self.window = (Fraction(window[0]), Fraction(window[1]))
        self.base = base
        self.family = family
        if level > 0 and (base is None or family is None):
            raise ValueError("levels above 0 need a base and a layer family")

    def _resolve(self, index: int) -> DigitStream:
        if self.level == 0:
            return AlgebraicStream(enumerate_algebraics(index - 1, self.window), self.window)
        if index % 2:
            return self.base[(index + 1) // 2]
        return self.family[index // 2]

    def provenance(self, index: int) -> Provenance:
        if index < 1:
            raise IndexError("sequences are indexed from 1")
        if self.level == 0:
            return Provenance(layer=0, algebraic_index=index - 1)
        if index % 2:
            return self.base.provenance((index + 1) // 2)
        return self.family.provenance(index // 2)

    def descriptor(self) -> dict:
        return {"kind": "sigma", "level": self.level, "window": [str(w) for w in self.window]}

    def seed(self, ledger: dict[int, str]) -> None:
        for index, digits in ledger.items():
            self[index].seed(digits)


def layer_family(base: SigmaEnumeration) -> LayerFamily:
    return LayerFamily(base)


def merge_interleave(base: SigmaEnumeration, layer: LayerFamily) -> SigmaEnumeration:
    """Odd indices 2j - 1 take base[j], even indices 2j take layer[j]."""
    return SigmaEnumeration(base.level + 1, base.window, base=base, family=layer)


def build_sigma(depth: int, window=UNIT_WINDOW) -> SigmaEnumeration:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    sigma = SigmaEnumeration(0, window)
    for _ in range(depth):
        sigma = merge_interleave(sigma, layer_family(sigma))
    return sigma


class LayerAboveLevel(ValueError):
    pass


def index_of(layer: int, element: int, at_level: int) -> int:
    """Sigma_at_level index holding element ``element`` (1-based) of ``layer``.

    A layer first appears at even indices 2j of its own level (layer 0 at
    index j of level 0); every later merge sends index x to 2x - 1, and m
    such merges compose to 2**m * (x - 1) + 1.
    """
    if layer > at_level:
        raise LayerAboveLevel(f"layer {layer} does not exist at level {at_level}")
    if layer < 0 or element < 1:
        raise ValueError("layer must be >= 0 and element >= 1")
    first = element if layer == 0 else 2 * element
    return ((first - 1) << (at_level - layer)) + 1


def layer_element(layer: int, element: int, window=UNIT_WINDOW) -> DigitStream:
    """The element built directly from its definition, outside any Sigma cache."""
    if layer == 0:
        return AlgebraicStream(enumerate_algebraics(element - 1, window), window)
    return DiagonalStream(build_sigma(layer - 1, window), element - 1)


# -- checkpoints ----------------------------------------------------------------------


def checkpoint_payload(depth: int, window, ledger: dict[int, str]) -> dict:
    return {
        "schema": CHECKPOINT_SCHEMA,
        "version": CHECKPOINT_VERSION,
        "depth": depth,
        "window": [str(Fraction(w)) for w in window],
        "digits": {str(k): v for k, v in sorted(ledger.items())},
    }


def save_checkpoint(path: str, depth: int, window, ledger: dict[int, str]) -> None:
    payload = checkpoint_payload(depth, window, ledger)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ckpt-")
    with os.fdopen(fd, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
    os.replace(tmp, path)


def load_checkpoint(path: str, depth: int, window) -> dict[int, str]:
    """Digit ledger from ``path``; an absent file means an empty ledger."""
    if not os.path.exists(path):
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if data.get("schema") != CHECKPOINT_SCHEMA or data.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: not a version-{CHECKPOINT_VERSION} checkpoint")
    if data["depth"] != depth or data["window"] != [str(Fraction(w)) for w in window]:
        raise ValueError(f"{path}: checkpoint was written for a different depth/window")
    ledger = {int(k): v for k, v in data["digits"].items()}
    for v in ledger.values():
        if set(v) - {"0", "1"}:
            raise ValueError(f"{path}: corrupt digit ledger")
    return ledger
