"""Certificates that can be re-checked from their witness data alone.

A certificate is a JSON object with a kind, a subject description, witness
data, the budgets used and an outcome.  A SHA-256 digest over those fields
binds them together; the checker recomputes it before re-validating the
witness semantically, so no check ever re-runs a generator.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .algebraic import AlgebraicReal, Order, compare, dyadic_from_parts, dyadic_parts
from .diagonal import StreamSequence
from .polynomial import IntPolynomial, count_roots_closed, count_roots_open, polynomials_up_to, squarefree_part
from .segments import HuntReport
from .streams import DigitStream, ProvedDifferent, intervals_disjoint, reals_differ

SCHEMA = "transdiag.certificate"
VERSION = 1
KINDS = ("DigitDifference", "RealDifference", "NonAlgebraicUpTo", "NestedChain", "CollisionScan")


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class Certificate:
    kind: str
    subject: dict
    witness: dict
    budget: dict
    outcome: dict

    def body(self) -> dict:
        return {
            "schema": SCHEMA,
            "version": VERSION,
            "kind": self.kind,
            "subject": self.subject,
            "witness": self.witness,
            "budget": self.budget,
            "outcome": self.outcome,
        }

    def to_json(self) -> dict:
        body = self.body()
        body["digest"] = digest(body)
        return body

    @property
    def succeeded(self) -> bool:
        return self.outcome.get("status") in ("valid", "succeeded")


def digest(body: dict) -> str:
    payload = {k: v for k, v in body.items() if k != "digest"}
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


class _Invalid(Exception):
    pass


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise _Invalid(msg)


def _binary(s) -> str:
    _require(isinstance(s, str) and not set(s) - {"0", "1"}, "digit strings must be binary")
    return s


def _prefix_interval(digits: str, p: int) -> tuple[Fraction, Fraction]:
    m = int(digits[:p], 2)
    return Fraction(m, 1 << p), Fraction(m + 1, 1 << p)


# -- diagonal difference ---------------------------------------------------------------


def certify_diagonal(output: DigitStream, source: StreamSequence, offset: int, count: int,
                     budget: int = 512) -> Certificate:
    """Digit witnesses ``output[v] != source[v][v + offset]`` plus real-difference outcomes."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rows = []
    out_len = count
    proved = 0
    for v in range(1, count + 1):
        pos = v + offset
        src = source[v]
        result = reals_differ(output, src, budget)
        if isinstance(result, ProvedDifferent):
            real = {"status": "proved", "precision": result.position}
            need = max(pos, result.position)
            out_len = max(out_len, result.position)
            proved += 1
        else:
            real = {"status": "unresolved", "budget": result.budget}
            need = pos
        rows.append({
            "index": v,
            "position": pos,
            "output_bit": output.digit_at(v),
            "source_bit": src.digit_at(pos),
            "source_prefix": src.prefix(need),
            "real": real,
        })
    witness = {"offset": offset, "output_prefix": output.prefix(out_len), "rows": rows}
    outcome = {"status": "valid", "digit_witnesses": count, "real_proved": proved, "real_unresolved": count - proved}
    subject = {"output": output.descriptor(), "source": source.descriptor()}
    return Certificate("DigitDifference", subject, witness, {"real_difference": budget}, outcome)


def _check_digit_difference(c: dict) -> None:
    w = c["witness"]
    offset = w["offset"]
    _require(isinstance(offset, int) and offset >= 0, "offset must be a non-negative integer")
    out = _binary(w["output_prefix"])
    budget = c["budget"]["real_difference"]
    proved = 0
    rows = w["rows"]
    _require(len(rows) >= 1, "no witnesses")
    for v, row in enumerate(rows, start=1):
        _require(row["index"] == v, f"row {v}: index out of sequence")
        pos = row["position"]
        _require(pos == v + offset, f"row {v}: position {pos} is not index + offset")
        src = _binary(row["source_prefix"])
        _require(len(out) >= v and len(src) >= pos, f"row {v}: prefix too short")
        ob, sb = row["output_bit"], row["source_bit"]
        _require(ob in (0, 1) and sb in (0, 1), f"row {v}: bits must be 0/1")
        _require(int(out[v - 1]) == ob, f"row {v}: output bit disagrees with output prefix")
        _require(int(src[pos - 1]) == sb, f"row {v}: source bit disagrees with source prefix")
        _require(ob != sb, f"row {v}: digits do not differ")
        real = row["real"]
        if real["status"] == "proved":
            p = real["precision"]
            _require(isinstance(p, int) and 1 <= p <= budget, f"row {v}: precision outside budget")
            _require(len(out) >= p and len(src) >= p, f"row {v}: prefix too short for precision")
            _require(intervals_disjoint(int(out[:p], 2), int(src[:p], 2)), f"row {v}: intervals overlap")
            proved += 1
        else:
            _require(real["status"] == "unresolved", f"row {v}: unknown real status")
    o = c["outcome"]
    _require(o["status"] == "valid", "unexpected outcome status")
    _require(o["digit_witnesses"] == len(rows), "witness count mismatch")
    _require(o["real_proved"] == proved and o["real_unresolved"] == len(rows) - proved, "real outcome counts mismatch")


# -- pairwise real difference --------------------------------------------------------------


def certify_real_difference(s: DigitStream, t: DigitStream, budget: int = 512) -> Certificate:
    result = reals_differ(s, t, budget)
    subject = {"left": s.descriptor(), "right": t.descriptor()}
    if isinstance(result, ProvedDifferent):
        p = result.position
        witness = {"precision": p, "left_prefix": s.prefix(p), "right_prefix": t.prefix(p)}
        outcome = {"status": "valid", "result": "proved-different"}
    else:
        witness = {"precision": result.budget}
        outcome = {"status": "valid", "result": "unresolved"}
    return Certificate("RealDifference", subject, witness, {"real_difference": budget}, outcome)


def _check_real_difference(c: dict) -> None:
    w, o = c["witness"], c["outcome"]
    p = w["precision"]
    _require(isinstance(p, int) and 0 <= p <= c["budget"]["real_difference"], "precision outside budget")
    if o["result"] == "proved-different":
        left, right = _binary(w["left_prefix"]), _binary(w["right_prefix"])
        _require(p >= 1 and len(left) == p and len(right) == p, "prefix lengths must equal precision")
        _require(intervals_disjoint(int(left, 2), int(right, 2)), "intervals overlap")
    else:
        _require(o["result"] == "unresolved", "unknown result")


# -- non-algebraicity up to height/degree ----------------------------------------------------


def _taylor_excludes_zero(coeffs: tuple[int, ...], lo: Fraction, hi: Fraction) -> bool:
    """True when the centred Taylor enclosure of the polynomial over [lo, hi] misses 0."""
    c = (lo + hi) / 2
    r = (hi - lo) / 2
    n = len(coeffs)
    powers = [Fraction(1)]
    for _ in range(n):
        powers.append(powers[-1] * c)
    taylor = []
    for i in range(n):
        taylor.append(sum(comb(k, i) * coeffs[k] * powers[k - i] for k in range(i, n)))
    spread = Fraction(0)
    rp = Fraction(1)
    for q in taylor[1:]:
        rp *= r
        spread += abs(q) * rp
    return abs(taylor[0]) > spread


def _clearing_splits(coeffs: tuple[int, ...], lo: Fraction, hi: Fraction) -> list[Fraction]:
    # P has no root on [lo, hi]; bisect until every piece's enclosure misses 0
    points: list[Fraction] = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        if _taylor_excludes_zero(coeffs, a, b):
            continue
        mid = (a + b) / 2
        points.append(mid)
        stack.append((mid, b))
        stack.append((a, mid))
    return sorted(points)


def certify_nonalgebraic(s: DigitStream, height: int, degree: int, precision: int) -> Certificate:
    """Prove (or refute) that no root of a primitive integer polynomial with
    degree <= ``degree`` and coefficient sum <= ``height`` lies in the digit
    interval of ``s`` at ``precision``."""
    if height < 1 or degree < 1 or precision < 8:
        raise ValueError("need height >= 1, degree >= 1, precision >= 8")
    digits = s.prefix(precision)
    lo, hi = _prefix_interval(digits, precision)
    violations = []
    splits = []
    for p in polynomials_up_to(height, degree):
        if _taylor_excludes_zero(p.coefficients, lo, hi):
            continue
        if count_roots_closed(squarefree_part(p), lo, hi) > 0:
            violations.append(list(p.coefficients))
            continue
        points = _clearing_splits(p.coefficients, lo, hi)
        splits.append({"poly": list(p.coefficients), "points": [list(dyadic_parts(x)) for x in points]})
    witness = {"digits": digits, "violations": violations, "splits": splits}
    outcome = {"status": "failed" if violations else "succeeded", "violations": len(violations)}
    budget = {"height": height, "degree": degree, "precision": precision}
    return Certificate("NonAlgebraicUpTo", {"stream": s.descriptor()}, witness, budget, outcome)


def _check_nonalgebraic(c: dict) -> None:
    b, w, o = c["budget"], c["witness"], c["outcome"]
    height, degree, precision = b["height"], b["degree"], b["precision"]
    _require(height >= 1 and degree >= 1 and precision >= 8, "budget out of range")
    digits = _binary(w["digits"])
    _require(len(digits) == precision, "digit prefix length differs from precision")
    lo, hi = _prefix_interval(digits, precision)
    violations = w["violations"]
    _require(o["violations"] == len(violations), "violation count mismatch")
    if o["status"] == "failed":
        _require(len(violations) > 0, "failure without a cited polynomial")
        for coeffs in violations:
            p = IntPolynomial(tuple(coeffs))
            _require(list(p.coefficients) == coeffs, f"{coeffs}: not primitive / sign-normalized")
            _require(1 <= p.degree <= degree and p.height <= height, f"{p}: outside the (height, degree) class")
            _require(count_roots_closed(squarefree_part(p), lo, hi) > 0, f"{p}: no root in the digit interval")
        return
    _require(o["status"] == "succeeded" and not violations, "unknown outcome")
    split_map = {}
    for entry in w["splits"]:
        pts = [dyadic_from_parts(*x) for x in entry["points"]]
        split_map[tuple(entry["poly"])] = pts
    for p in polynomials_up_to(height, degree):
        pts = split_map.get(p.coefficients, [])
        bounds = [lo] + pts + [hi]
        for a, z in zip(bounds, bounds[1:]):
            _require(a < z, f"{p}: split points not strictly increasing inside the interval")
            _require(_taylor_excludes_zero(p.coefficients, a, z), f"{p}: enclosure contains 0 on [{a}, {z}]")


# -- nested chains from hunts -------------------------------------------------------------------


def certify_chain(report: HuntReport, target: DigitStream) -> Certificate:
    """Containment of the target in each chain segment, and strict nesting."""
    window = report.window
    span = window[1] - window[0]
    p_max = max((link.precision for link in report.chain), default=1)
    digits = target.prefix(p_max)
    links = []
    for link in report.chain:
        p = link.precision
        t_lo, t_hi = _prefix_interval(digits, p)
        x_lo, x_hi = window[0] + span * t_lo, window[0] + span * t_hi
        a, b = link.segment.left, link.segment.right
        while a.hi > x_lo:
            a = a.bisect()
        while b.lo < x_hi:
            b = b.bisect()
        links.append({"left": a.to_json(), "right": b.to_json(), "precision": p})
    witness = {"window": [str(w) for w in window], "target_prefix": digits, "links": links}
    subject = {"target": target.descriptor(), "mode": report.mode, "policy": report.policy, "steps": report.steps}
    outcome = {"status": "valid", "length": len(links)}
    return Certificate("NestedChain", subject, witness, {"containment": report.budget}, outcome)


def _valid_isolator(a: AlgebraicReal) -> bool:
    return (squarefree_part(a.poly) == a.poly and count_roots_open(a.poly, a.lo, a.hi) == 1
            and a.poly.sign_at(a.lo) != 0 and a.poly.sign_at(a.hi) != 0)


def _check_chain(c: dict) -> None:
    w = c["witness"]
    lo_w, hi_w = (Fraction(x) for x in w["window"])
    _require(lo_w < hi_w, "bad window")
    digits = _binary(w["target_prefix"])
    prev = None
    links = w["links"]
    _require(c["outcome"]["length"] == len(links), "chain length mismatch")
    for i, link in enumerate(links, start=1):
        p = link["precision"]
        _require(isinstance(p, int) and 1 <= p <= min(len(digits), c["budget"]["containment"]), f"link {i}: bad precision")
        a, b = AlgebraicReal.from_json(link["left"]), AlgebraicReal.from_json(link["right"])
        _require(_valid_isolator(a) and _valid_isolator(b), f"link {i}: isolator does not isolate one root")
        t_lo, t_hi = _prefix_interval(digits, p)
        x_lo, x_hi = lo_w + (hi_w - lo_w) * t_lo, lo_w + (hi_w - lo_w) * t_hi
        _require(a.hi <= x_lo and x_hi <= b.lo, f"link {i}: target interval not inside the segment")
        if prev is not None:
            pa, pb = prev
            lo_order, hi_order = compare(pa, a), compare(b, pb)
            _require(lo_order is not Order.GREATER and hi_order is not Order.GREATER, f"link {i}: not nested")
            _require(not (lo_order is Order.EQUAL and hi_order is Order.EQUAL), f"link {i}: not strictly nested")
        prev = (a, b)


# -- collision scans ------------------------------------------------------------------------------


def scan_collisions(sigma: StreamSequence, bound: int, budget: int = 512) -> Certificate:
    """Pairwise real-difference proofs over indices 1..bound."""
    if bound < 2:
        raise ValueError("bound must be >= 2")
    need = {i: 1 for i in range(1, bound + 1)}
    proved, unresolved = [], []
    for i in range(1, bound + 1):
        for j in range(i + 1, bound + 1):
            r = reals_differ(sigma[i], sigma[j], budget)
            if isinstance(r, ProvedDifferent):
                proved.append([i, j, r.position])
                need[i] = max(need[i], r.position)
                need[j] = max(need[j], r.position)
            else:
                unresolved.append([i, j])
    prefixes = {str(i): sigma[i].prefix(n) for i, n in need.items()}
    witness = {"bound": bound, "prefixes": prefixes, "proved": proved, "unresolved": unresolved}
    outcome = {"status": "valid", "proved": len(proved), "unresolved": len(unresolved)}
    return Certificate("CollisionScan", {"sequence": sigma.descriptor()}, witness, {"real_difference": budget}, outcome)


def _check_collisions(c: dict) -> None:
    w, o = c["witness"], c["outcome"]
    bound = w["bound"]
    _require(isinstance(bound, int) and bound >= 2, "bound must be >= 2")
    budget = c["budget"]["real_difference"]
    prefixes = {int(k): _binary(v) for k, v in w["prefixes"].items()}
    seen = set()
    for i, j, p in w["proved"]:
        _require(1 <= i < j <= bound and (i, j) not in seen, f"pair ({i}, {j}) invalid or repeated")
        seen.add((i, j))
        _require(isinstance(p, int) and 1 <= p <= budget, f"pair ({i}, {j}): precision outside budget")
        a, b = prefixes[i], prefixes[j]
        _require(len(a) >= p and len(b) >= p, f"pair ({i}, {j}): prefix too short")
        _require(intervals_disjoint(int(a[:p], 2), int(b[:p], 2)), f"pair ({i}, {j}): intervals overlap")
    for i, j in w["unresolved"]:
        _require(1 <= i < j <= bound and (i, j) not in seen, f"pair ({i}, {j}) invalid or repeated")
        seen.add((i, j))
    _require(len(seen) == bound * (bound - 1) // 2, "scan does not cover every pair")
    _require(o["proved"] == len(w["proved"]) and o["unresolved"] == len(w["unresolved"]), "outcome counts mismatch")


_CHECKERS = {
    "DigitDifference": _check_digit_difference,
    "RealDifference": _check_real_difference,
    "NonAlgebraicUpTo": _check_nonalgebraic,
    "NestedChain": _check_chain,
    "CollisionScan": _check_collisions,
}


def check_certificate(data: dict, verify_digest: bool = True) -> list[str]:
    """Problems found while re-validating ``data``; an empty list means valid."""
    try:
        _require(isinstance(data, dict), "certificate must be a JSON object")
        _require(data.get("schema") == SCHEMA and data.get("version") == VERSION, "unknown schema/version")
        _require(data.get("kind") in KINDS, f"unknown kind {data.get('kind')!r}")
        if verify_digest:
            _require(data.get("digest") == digest(data), "digest mismatch")
        _CHECKERS[data["kind"]](data)
    except _Invalid as exc:
        return [str(exc)]
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        return [f"malformed certificate: {type(exc).__name__}: {exc}"]
    return []


def load_certificates(path: str) -> list[dict]:
    """A file holds one certificate object or a JSON list of them."""
    with open(path) as fh:
        data = json.load(fh)
    return data if isinstance(data, list) else [data]


def write_certificates(path: str, certificates: list[Certificate]) -> None:
    payload = [c.to_json() for c in certificates]
    with open(path, "w") as fh:
        json.dump(payload if len(payload) != 1 else payload[0], fh, sort_keys=True, indent=1)
        fh.write("\n")
