"""Sequential placement of algebraic numbers, segment filling and target hunts.

Points live in window coordinates (exact algebraic reals); fillers and
targets are digit streams in the normalized [0, 1) geometry.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .algebraic import AlgebraicReal, Order, compare, compare_rational, enumerate_algebraics, refine
from .streams import (
    ConcatStream,
    DigitStream,
    EnclosureStream,
    OracleStream,
    PrecisionExhausted,
    ProvedDifferent,
    Unresolved,
    reals_differ,
    to_interval,
)
from .sigma import SigmaEnumeration
from .diagonal import DiagonalStream

POLICIES = ("liouville-affine", "diagonal-local")


class Mode(str, enum.Enum):
    ADJACENT = "adjacent"
    ALL_PAIRS = "allpairs"


class DegenerateSegment(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    left: AlgebraicReal
    right: AlgebraicReal
    filler: DigitStream = field(compare=False)
    step: int  # placement step (1-based) that created the segment
    serial: int  # 1-based creation order over all segments
    retired_at: Optional[int] = None  # adjacent mode: step at which a new point split it

    @property
    def active(self) -> bool:
        return self.retired_at is None


@dataclass(frozen=True)
class PlacementState:
    window: tuple[Fraction, Fraction]
    mode: Mode
    policy: str
    placed: tuple[AlgebraicReal, ...] = ()
    order: tuple[int, ...] = ()  # indices into ``placed``, ascending by value
    segments: tuple[Segment, ...] = ()

    @property
    def steps(self) -> int:
        return len(self.placed)

    def active_segments(self) -> list[Segment]:
        return [s for s in self.segments if s.active]

    def sorted_points(self) -> list[AlgebraicReal]:
        return [self.placed[i] for i in self.order]


def new_state(window=(Fraction(0), Fraction(1)), mode: Mode | str = Mode.ADJACENT,
              policy: str = "liouville-affine") -> PlacementState:
    if policy not in POLICIES:
        raise ValueError(f"unknown filler policy {policy!r}")
    lo, hi = (Fraction(w) for w in window)
    if lo >= hi:
        raise ValueError("window must satisfy M < W")
    return PlacementState((lo, hi), Mode(mode), policy)


def _insertion_point(points: list[AlgebraicReal], x: AlgebraicReal) -> int:
    lo, hi = 0, len(points)
    while lo < hi:
        mid = (lo + hi) // 2
        if compare(points[mid], x) is Order.LESS:
            lo = mid + 1
        else:
            hi = mid
    return lo


def place_next(state: PlacementState) -> PlacementState:
    """Place the next enumerated algebraic number and fill every new segment."""
    step = state.steps + 1
    x = enumerate_algebraics(state.steps, state.window)
    new_index = len(state.placed)
    points = state.sorted_points()
    pos = _insertion_point(points, x)
    segments = list(state.segments)
    serial = len(segments)

    def add(a: AlgebraicReal, b: AlgebraicReal) -> None:
        nonlocal serial
        serial += 1
        if compare(a, b) is Order.GREATER:
            a, b = b, a
        segments.append(Segment(a, b, fill_segment(a, b, state.policy, state.window), step, serial))

    if state.mode is Mode.ALL_PAIRS:
        for p in state.placed:
            add(p, x)
    else:
        left = points[pos - 1] if pos > 0 else None
        right = points[pos] if pos < len(points) else None
        if left is not None and right is not None:
            for i, s in enumerate(segments):
                if s.active and s.left is left and s.right is right:
                    segments[i] = replace(s, retired_at=step)
        if left is not None:
            add(left, x)
        if right is not None:
            add(x, right)

    order = list(state.order)
    order.insert(pos, new_index)
    return replace(state, placed=state.placed + (x,), order=tuple(order), segments=tuple(segments))


def run_placements(n: int, window=(Fraction(0), Fraction(1)), mode: Mode | str = Mode.ADJACENT,
                   policy: str = "liouville-affine") -> PlacementState:
    state = new_state(window, mode, policy)
    for _ in range(n):
        state = place_next(state)
    return state


# -- fillers ---------------------------------------------------------------------------


def _normalized_bounds(a: AlgebraicReal, window, bits: int) -> tuple[Fraction, Fraction]:
    lo_w, hi_w = window
    a = refine(a, -bits)
    span = hi_w - lo_w
    return (a.lo - lo_w) / span, (a.hi - lo_w) / span


def _segment_descriptor(a: AlgebraicReal, b: AlgebraicReal, policy: str, window) -> dict:
    return {
        "kind": "filler",
        "policy": policy,
        "segment": [a.to_json(), b.to_json()],
        "window": [str(window[0]), str(window[1])],
    }


class _FillerStream(ConcatStream):
    def __init__(self, head: str, tail: DigitStream, descriptor: dict):
        super().__init__(head, tail)
        self._descriptor = descriptor

    def descriptor(self) -> dict:
        return self._descriptor


def fill_segment(a: AlgebraicReal, b: AlgebraicReal, policy: str = "liouville-affine",
                 window=(Fraction(0), Fraction(1))) -> DigitStream:
    """A stream whose value lies strictly inside the open segment (a, b).

    ``liouville-affine`` maps the binary Liouville constant affinely onto the
    segment.  ``diagonal-local`` picks an aligned dyadic block strictly inside
    the segment and fills it with an offset diagonal of the working-window
    algebraic enumeration.
    """
    window = (Fraction(window[0]), Fraction(window[1]))
    order = compare(a, b)
    if order is Order.EQUAL:
        raise DegenerateSegment(f"segment endpoints coincide: {a}")
    if order is Order.GREATER:
        a, b = b, a
    desc = _segment_descriptor(a, b, policy, window)
    if policy == "liouville-affine":
        return _liouville_affine(a, b, window, desc)
    if policy == "diagonal-local":
        return _diagonal_local(a, b, window, desc)
    raise ValueError(f"unknown filler policy {policy!r}")


def _liouville_affine(a: AlgebraicReal, b: AlgebraicReal, window, desc: dict) -> EnclosureStream:
    liouville = OracleStream("liouville")

    def enclose(k: int) -> tuple[Fraction, Fraction]:
        alo, ahi = _normalized_bounds(a, window, k + 2)
        blo, bhi = _normalized_bounds(b, window, k + 2)
        t = to_interval(liouville, k)
        corners = [x + (y - x) * s for x in (alo, ahi) for y in (blo, bhi) for s in (t.lo, t.hi)]
        return min(corners), max(corners)

    return EnclosureStream(enclose, desc)


_SHARED: dict[tuple, DigitStream] = {}
_SHARED_LOCK = threading.Lock()


def _shared_diagonal(window, offset: int) -> DigitStream:
    # one Sigma_0 per window so every local filler reuses the same digit caches
    with _SHARED_LOCK:
        sigma = _SHARED.get((window, None))
        if sigma is None:
            sigma = _SHARED[(window, None)] = SigmaEnumeration(0, window)
        d = _SHARED.get((window, offset))
        if d is None:
            d = _SHARED[(window, offset)] = DiagonalStream(sigma, offset)
        return d


def _diagonal_local(a: AlgebraicReal, b: AlgebraicReal, window, desc: dict) -> DigitStream:
    j = 1
    while True:
        _, ya_hi = _normalized_bounds(a, window, j + 2)
        yb_lo, _ = _normalized_bounds(b, window, j + 2)
        m = -((-ya_hi * (1 << j)).__floor__())  # ceil
        if Fraction(m + 1, 1 << j) <= yb_lo:
            break
        j += 1
    # block [m, m+1] / 2**j; its heap index doubles as the diagonal's column offset
    offset = (1 << j) + m - 1
    desc = dict(desc, block=[m, j], offset=offset)
    return _FillerStream(format(m, f"0{j}b"), _shared_diagonal(window, offset), desc)


# -- hunting a target through nested segments --------------------------------------------


def _to_window(window, y: Fraction) -> Fraction:
    return window[0] + (window[1] - window[0]) * y


def containment(seg: Segment, target: DigitStream, window, budget: int) -> tuple[Optional[bool], int]:
    """(True/False, precision) once decided; (None, budget reached) otherwise."""
    p = 8
    checked = 0
    while True:
        p = min(p, budget)
        try:
            t = to_interval(target, p)
        except PrecisionExhausted:
            return None, checked
        x_lo, x_hi = _to_window(window, t.lo), _to_window(window, t.hi)
        if compare_rational(seg.left, x_hi) is not Order.LESS or compare_rational(seg.right, x_lo) is not Order.GREATER:
            return False, p
        if compare_rational(seg.left, x_lo) is Order.LESS and compare_rational(seg.right, x_hi) is Order.GREATER:
            return True, p
        checked = p
        if p >= budget:
            return None, checked
        p *= 2


def _nested_in(inner: Segment, outer: Segment) -> bool:
    lo = compare(outer.left, inner.left)
    hi = compare(inner.right, outer.right)
    if lo is Order.GREATER or hi is Order.GREATER:
        return False
    return not (lo is Order.EQUAL and hi is Order.EQUAL)


def _width_bounds(seg: Segment, bits: int = 64) -> tuple[Fraction, Fraction]:
    a, b = refine(seg.left, -bits), refine(seg.right, -bits)
    return b.lo - a.hi, b.hi - a.lo


@dataclass(frozen=True)
class ChainLink:
    segment: Segment
    precision: int  # digits of the target used for the containment proof
    relation: dict  # filler vs target

    def to_json(self) -> dict:
        lo, hi = _width_bounds(self.segment)
        return {
            "serial": self.segment.serial,
            "step": self.segment.step,
            "endpoints": [self.segment.left.to_json(), self.segment.right.to_json()],
            "width_log2": math.floor(math.log2((lo + hi) / 2)),
            "width_bounds": [str(lo), str(hi)],
            "containment_precision": self.precision,
            "filler": self.segment.filler.descriptor(),
            "filler_target_relation": self.relation,
        }


@dataclass(frozen=True)
class HuntReport:
    steps: int
    mode: str
    policy: str
    window: tuple[Fraction, Fraction]
    chain: tuple[ChainLink, ...]
    verdict: str  # TargetIsSomeFiller | TargetDistinctFromAllFillersSoFar | Unresolved
    verdict_serial: Optional[int]
    undecided: int  # segments whose containment stayed open within the budget
    budget: int
    target: dict

    @property
    def widths(self) -> list[tuple[Fraction, Fraction]]:
        return [_width_bounds(link.segment) for link in self.chain]

    def to_json(self) -> dict:
        verdict = {"kind": self.verdict}
        if self.verdict_serial is not None:
            verdict["segment"] = self.verdict_serial
        return {
            "steps": self.steps,
            "mode": self.mode,
            "policy": self.policy,
            "window": [str(w) for w in self.window],
            "budget": self.budget,
            "target": self.target,
            "chain": [link.to_json() for link in self.chain],
            "undecided_containments": self.undecided,
            "verdict": verdict,
        }


def _relation(filler: DigitStream, target: DigitStream, window, budget: int) -> dict:
    if filler.descriptor() == target.descriptor():
        return {"kind": "identical"}
    result = reals_differ(filler, target, budget)
    if isinstance(result, Unresolved):
        return {"kind": "unresolved", "budget": result.budget}
    p = result.position
    gap = abs(filler.prefix_int(p) - target.prefix_int(p))
    scale = (window[1] - window[0]) / (1 << p)
    return {
        "kind": "proved-different",
        "precision": p,
        "distance_lower": str((gap - 1) * scale),
        "distance_upper": str((gap + 1) * scale),
    }


def hunt_target(target: DigitStream, steps: int, mode: Mode | str = Mode.ADJACENT,
                policy: str = "liouville-affine", window=(Fraction(0), Fraction(1)),
                budget: int = 512) -> HuntReport:
    """Place ``steps`` numbers and greedily follow the nested segments holding ``target``.

    Only reports what finite evidence shows; it makes no claim about the
    target being reachable in the limit.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    state = new_state(window, mode, policy)
    window = state.window
    chain: list[ChainLink] = []
    undecided = 0
    seen = 0
    for _ in range(steps):
        state = place_next(state)
        fresh = state.segments[seen:]
        seen = len(state.segments)
        holders = []
        for seg in fresh:
            inside, p = containment(seg, target, window, budget)
            if inside is None:
                undecided += 1
            elif inside and (not chain or _nested_in(seg, chain[-1].segment)):
                holders.append((seg, p))
        best = _narrowest(holders)
        if best is not None:
            seg, p = best
            chain.append(ChainLink(seg, p, _relation(seg.filler, target, window, budget)))

    verdict, serial = "TargetDistinctFromAllFillersSoFar", None
    target_desc = target.descriptor()
    for seg in state.segments:
        if seg.filler.descriptor() == target_desc:
            verdict, serial = "TargetIsSomeFiller", seg.serial
            break
    else:
        for seg in state.segments:
            if not isinstance(reals_differ(seg.filler, target, budget), ProvedDifferent):
                verdict = "Unresolved"
                break
    return HuntReport(steps, state.mode.value, policy, window, tuple(chain), verdict, serial,
                      undecided, budget, target_desc)


def _narrowest(holders: list[tuple[Segment, int]]) -> Optional[tuple[Segment, int]]:
    if not holders:
        return None
    for cand in holders:
        if all(other is cand or _nested_in(cand[0], other[0]) for other in holders):
            return cand
    return min(holders, key=lambda h: sum(_width_bounds(h[0])))
