"""Command-line front end.

Every command writes JSON lines: a header record describing the run, then
one record per result.  ``--output digits`` prints bare digit strings for the
commands that produce them.  Exit codes: 0 ok, 1 invalid certificate,
2 usage, config or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Iterable, Optional

from .algebraic import enumerate_algebraics, enumeration_source
from .diagonal import diagonalize
from .segments import POLICIES, Mode, hunt_target, run_placements
from .sigma import build_sigma, load_checkpoint, save_checkpoint
from .streams import (
    ORACLE_RULES,
    AlgebraicStream,
    ConstantStream,
    DigitStream,
    OracleStream,
    PrefixStream,
)
from .verifier import (
    certify_chain,
    certify_diagonal,
    certify_nonalgebraic,
    check_certificate,
    load_certificates,
    write_certificates,
)

RUN_SCHEMA = "transdiag.run"
RUN_VERSION = 1
COMMANDS = ("enumerate", "diag", "layers", "segments", "hunt", "verify")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    window: tuple[Fraction, Fraction] = (Fraction(0), Fraction(1))
    precision: int = 64
    depth: int = 2
    mode: str = "adjacent"
    policy: str = "liouville-affine"
    count: int = 8
    offset: int = 0
    height: int = 6
    degree: int = 4
    budget: int = 512
    steps: int = 16
    output: str = "jsonl"
    checkpoint: Optional[str] = None

    def validate(self) -> "RunConfig":
        lo, hi = self.window
        if lo >= hi:
            raise UsageError("window must satisfy M < W")
        for name in ("precision", "count", "height", "degree", "budget", "steps"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name} must be >= 1")
        if self.depth < 0 or self.offset < 0:
            raise UsageError("--depth and --offset must be >= 0")
        if self.mode not in {m.value for m in Mode}:
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.policy not in POLICIES:
            raise UsageError(f"unknown policy {self.policy!r}; known: {', '.join(POLICIES)}")
        if self.output not in ("digits", "jsonl"):
            raise UsageError("--output must be digits or jsonl")
        return self

    def to_json(self) -> dict:
        data = asdict(self)
        data["window"] = [str(w) for w in self.window]
        data.pop("checkpoint")  # where state is cached never changes the output
        return data


def parse_window(text) -> tuple[Fraction, Fraction]:
    try:
        if isinstance(text, (list, tuple)):
            lo, hi = text
        else:
            lo, hi = str(text).split(":")
        return Fraction(str(lo)), Fraction(str(hi))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad window {text!r}; expected M:W") from exc


def parse_indices(text: str) -> list[int]:
    """``"1-4,9"`` -> [1, 2, 3, 4, 9]."""
    out: list[int] = []
    try:
        for part in text.split(","):
            if "-" in part:
                a, b = (int(x) for x in part.split("-"))
                if a > b:
                    raise ValueError(part)
                out.extend(range(a, b + 1))
            else:
                out.append(int(part))
    except ValueError as exc:
        raise UsageError(f"malformed index list {text!r}") from exc
    if not out or min(out) < 1:
        raise UsageError(f"malformed index list {text!r}; indices start at 1")
    return out


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", help="M:W (use --window=-4:4 for negative M)")
    for name in ("precision", "depth", "count", "offset", "height", "degree", "budget", "steps"):
        common.add_argument(f"--{name}", type=int)
    common.add_argument("--mode", choices=[m.value for m in Mode])
    common.add_argument("--policy", choices=POLICIES)
    common.add_argument("--output", choices=("digits", "jsonl"))
    common.add_argument("--checkpoint")
    common.add_argument("--config", help="JSON file with any of the flags above")

    parser = argparse.ArgumentParser(prog="transdiag", description="Diagonal constructions over the algebraic numbers.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("enumerate", parents=[common], help="list algebraic numbers in canonical order")
    p = sub.add_parser("diag", parents=[common], help="offset diagonal over a Sigma layer")
    p.add_argument("--cert", help="write difference and non-algebraicity certificates here")
    p = sub.add_parser("layers", parents=[common], help="Sigma elements with provenance")
    p.add_argument("indices", nargs="?", default="1-8")
    sub.add_parser("segments", parents=[common], help="sequential placement and segment fillers")
    p = sub.add_parser("hunt", parents=[common], help="follow nested segments around a target")
    p.add_argument("target", nargs="?", default="liouville",
                   help="oracle name, digit-prefix file, or a rational in window coordinates")
    p.add_argument("--cert", help="write a nested-chain certificate here")
    p = sub.add_parser("verify", parents=[common], help="re-check a certificate file")
    p.add_argument("file")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(values, dict):
            raise UsageError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    if "window" in values:
        values["window"] = parse_window(values["window"])
    for name in ("precision", "depth", "count", "offset", "height", "degree", "budget", "steps"):
        if name in values and (isinstance(values[name], bool) or not isinstance(values[name], int)):
            raise UsageError(f"{name} must be an integer")
    return RunConfig(**values).validate()


class Emitter:
    """Buffers a run's lines so that a failed run prints no partial output."""

    def __init__(self, config: RunConfig, command: str):
        self.lines: list[str] = []
        self.digits = config.output == "digits"
        if not self.digits:
            self._line({"schema": RUN_SCHEMA, "version": RUN_VERSION, "command": command,
                        "config": config.to_json()})

    def _line(self, record: dict) -> None:
        self.lines.append(json.dumps(record, sort_keys=True))

    def record(self, record: dict, digits: Optional[str] = None) -> None:
        if self.digits and digits is not None:
            self.lines.append(digits)
        elif not self.digits:
            self._line(record)

    def structured(self, record: dict) -> None:
        # records with no digit form are emitted as JSON in either mode
        self._line(record)

    def flush(self, out) -> None:
        out.write("".join(line + "\n" for line in self.lines))
        out.flush()


# -- commands --------------------------------------------------------------------------


def cmd_enumerate(cfg: RunConfig, emit: Emitter, args) -> int:
    for i in range(cfg.count):
        a = enumerate_algebraics(i, cfg.window)
        poly = enumeration_source(i, cfg.window)
        digits = AlgebraicStream(a, cfg.window).prefix(cfg.precision)
        emit.record({
            "index": i,
            "polynomial": list(poly.coefficients),
            "polynomial_text": str(poly),
            "isolator": a.isolator.to_json(),
            "digits": digits,
        }, digits)
    return 0


def cmd_diag(cfg: RunConfig, emit: Emitter, args) -> int:
    sigma = build_sigma(cfg.depth, cfg.window)
    d = diagonalize(sigma, cfg.offset)
    digits = d.prefix(cfg.precision)
    emit.record({"depth": cfg.depth, "offset": cfg.offset, "descriptor": d.descriptor(), "digits": digits}, digits)
    if args.cert:
        certs = [certify_diagonal(d, sigma, cfg.offset, cfg.count, cfg.budget),
                 certify_nonalgebraic(d, cfg.height, cfg.degree, cfg.precision)]
        write_certificates(args.cert, certs)
    return 0


def cmd_layers(cfg: RunConfig, emit: Emitter, args) -> int:
    indices = parse_indices(args.indices)
    sigma = build_sigma(cfg.depth, cfg.window)
    ledger: dict[int, str] = {}
    if cfg.checkpoint:
        try:
            ledger = load_checkpoint(cfg.checkpoint, cfg.depth, cfg.window)
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
            raise UsageError(f"bad checkpoint: {exc}") from exc
        sigma.seed(ledger)
    for index in indices:
        digits = sigma[index].prefix(cfg.precision)
        emit.record({"index": index, "provenance": sigma.provenance(index).to_json(), "digits": digits}, digits)
        if cfg.checkpoint and len(ledger.get(index, "")) < len(digits):
            ledger[index] = sigma[index].prefix(max(cfg.precision, len(ledger.get(index, ""))))
            save_checkpoint(cfg.checkpoint, cfg.depth, cfg.window, ledger)
    return 0


def cmd_segments(cfg: RunConfig, emit: Emitter, args) -> int:
    state = run_placements(cfg.count, cfg.window, cfg.mode, cfg.policy)
    for seg in state.segments:
        digits = seg.filler.prefix(cfg.precision)
        emit.record({
            "serial": seg.serial,
            "step": seg.step,
            "left": seg.left.to_json(),
            "right": seg.right.to_json(),
            "active": seg.active,
            "retired_at": seg.retired_at,
            "filler": seg.filler.descriptor(),
            "digits": digits,
        }, digits)
    return 0


def resolve_target(name: str, window: tuple[Fraction, Fraction]) -> DigitStream:
    """Oracle name, digit-prefix file (normalized coordinates) or rational (window coordinates)."""
    if name in ORACLE_RULES:
        return OracleStream(name)
    if os.path.exists(name):
        try:
            with open(name) as fh:
                text = fh.read().strip()
        except OSError as exc:
            raise UsageError(f"cannot read target file {name}: {exc}") from exc
        if text.startswith("{"):
            try:
                text = json.loads(text)["digits"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise UsageError(f"{name}: expected a JSON record with a 'digits' field") from exc
        try:
            return PrefixStream("".join(text.split()), label=os.path.basename(name))
        except ValueError as exc:
            raise UsageError(f"{name}: {exc}") from exc
    try:
        x = Fraction(name)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"unknown target {name!r}: not an oracle ({', '.join(sorted(ORACLE_RULES))}), file or number") from exc
    lo, hi = window
    if not lo <= x < hi:
        raise UsageError(f"target {x} lies outside the window [{lo}, {hi})")
    return ConstantStream((x - lo) / (hi - lo))


def cmd_hunt(cfg: RunConfig, emit: Emitter, args) -> int:
    target = resolve_target(args.target, cfg.window)
    report = hunt_target(target, cfg.steps, cfg.mode, cfg.policy, cfg.window, cfg.budget)
    emit.structured(report.to_json())
    if args.cert:
        write_certificates(args.cert, [certify_chain(report, target)])
    return 0


def cmd_verify(cfg: RunConfig, emit: Emitter, args) -> int:
    try:
        certs = load_certificates(args.file)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read certificate file {args.file}: {exc}") from exc
    status = 0
    for i, cert in enumerate(certs):
        problems = check_certificate(cert)
        kind = cert.get("kind") if isinstance(cert, dict) else None
        emit.structured({"certificate": i, "kind": kind, "valid": not problems, "problems": problems})
        if problems:
            status = 1
    return status


_COMMANDS = {
    "enumerate": cmd_enumerate,
    "diag": cmd_diag,
    "layers": cmd_layers,
    "segments": cmd_segments,
    "hunt": cmd_hunt,
    "verify": cmd_verify,
}


def main(argv: Optional[Iterable[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(None if argv is None else list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args)
        emit = Emitter(cfg, args.command)
        status = _COMMANDS[args.command](cfg, emit, args)
    except (UsageError, ValueError) as exc:
        print(f"transdiag: error: {exc}", file=sys.stderr)
        return 2
    emit.flush(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
