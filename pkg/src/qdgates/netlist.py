"""Netlist representation and the line-oriented netlist text format.

Grammar (one statement per line, ``#`` starts a comment)::

    spins <n>
    input <mode> <R|L|R+L|R-L>
    PBS <in> <transmit_to> <reflect_to> [@name]
    PMPBS <in> <plus_to> <minus_to> [@name]
    HWP <mode> [@name]
    WPM <mode> [@name]
    BS <in_a> <in_b> <out_a> <out_b> [@name]
    SH <spin_index> [@name]
    SZ <spin_index> <+|-> [@name]
    CAV <spin_index> <mode> [@name]
    SW <from> <to> [@name]
    detector <label> <mode> <+|->
    feedforward <label> (<spin_index> <I|Z|-Z>)*
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DanglingMode,
    DuplicateOutcomeLabel,
    NetlistError,
    NetlistSyntaxError,
    UncoveredOutcome,
    UnknownKeyword,
)
from .elements import ELEMENT_TYPES, Cavity, Element, SpinH, SpinZ, check_routing, element_args

INPUT_POLARIZATIONS = {
    "R": (1.0, 0.0),
    "L": (0.0, 1.0),
    "R+L": (2 ** -0.5, 2 ** -0.5),
    "R-L": (2 ** -0.5, -(2 ** -0.5)),
}
FEEDFORWARD_OPS = ("I", "Z", "-Z")
_LABEL = re.compile(r"^[^\s@#]+$")


@dataclass(frozen=True)
class Step:
    element: Element
    checkpoint: str | None = None


@dataclass(frozen=True)
class Detector:
    mode: str
    sign: str  # "+" or "-"


@dataclass
class Netlist:
    spin_count: int
    input_mode: str
    input_pol: str
    steps: list[Step] = field(default_factory=list)
    detectors: dict[str, Detector] = field(default_factory=dict)
    feedforward: dict[str, tuple[tuple[int, str], ...]] = field(default_factory=dict)

    @property
    def input_vector(self) -> np.ndarray:
        return np.array(INPUT_POLARIZATIONS[self.input_pol], dtype=complex)

    @property
    def elements(self) -> list[Element]:
        return [s.element for s in self.steps]

    @property
    def checkpoints(self) -> list[str]:
        return [s.checkpoint for s in self.steps if s.checkpoint]

    def detector_map(self) -> dict[str, tuple[str, str]]:
        return {label: (d.mode, d.sign) for label, d in self.detectors.items()}


# ---------------------------------------------------------------- parsing


def _column(raw: str, tokens_before: int) -> int:
    """1-based column of the token with index ``tokens_before`` on ``raw``."""
    pos = 0
    for k, m in enumerate(re.finditer(r"\S+", raw)):
        pos = m.start()
        if k == tokens_before:
            return pos + 1
    return len(raw.rstrip()) + 1


def _int(tok: str, raw: str, lineno: int, k: int, what: str) -> int:
    try:
        value = int(tok)
    except ValueError:
        raise NetlistSyntaxError(lineno, _column(raw, k), f"{what} must be an integer, got {tok!r}") from None
    if value < 0:
        raise NetlistSyntaxError(lineno, _column(raw, k), f"{what} must be non-negative, got {value}")
    return value


def _label(tok: str, raw: str, lineno: int, k: int) -> str:
    if not _LABEL.match(tok):
        raise NetlistSyntaxError(lineno, _column(raw, k), f"invalid label {tok!r}")
    return tok


def _parse_element(keyword: str, args: list[str], raw: str, lineno: int) -> Element:
    cls = ELEMENT_TYPES[keyword]
    arity = {"PBS": 3, "PMPBS": 3, "HWP": 1, "WPM": 1, "BS": 4, "SH": 1, "SZ": 2, "CAV": 2, "SW": 2}[keyword]
    if len(args) != arity:
        raise NetlistSyntaxError(lineno, _column(raw, 0), f"{keyword} takes {arity} argument(s), got {len(args)}")
    if cls is SpinH:
        return SpinH(_int(args[0], raw, lineno, 1, "spin index"))
    if cls is SpinZ:
        if args[1] not in ("+", "-"):
            raise NetlistSyntaxError(lineno, _column(raw, 2), f"SZ sign must be + or -, got {args[1]!r}")
        return SpinZ(_int(args[0], raw, lineno, 1, "spin index"), 1 if args[1] == "+" else -1)
    if cls is Cavity:
        return Cavity(_int(args[0], raw, lineno, 1, "spin index"), _label(args[1], raw, lineno, 2))
    modes = [_label(a, raw, lineno, k + 1) for k, a in enumerate(args)]
    e = cls(*modes)
    try:
        check_routing(e)
    except ValueError as exc:
        raise NetlistSyntaxError(lineno, _column(raw, 1), str(exc)) from None
    return e


def parse_netlist(text: str, *, validate: bool = True) -> Netlist:
    spins = None
    input_spec = None
    steps: list[Step] = []
    detectors: dict[str, Detector] = {}
    feedforward: dict[str, tuple[tuple[int, str], ...]] = {}
    checkpoint_names: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        keyword, args = tokens[0], tokens[1:]

        if keyword == "spins":
            if spins is not None:
                raise NetlistSyntaxError(lineno, 1, "duplicate 'spins' statement")
            if len(args) != 1:
                raise NetlistSyntaxError(lineno, 1, "'spins' takes exactly one argument")
            spins = _int(args[0], raw, lineno, 1, "spin count")
        elif keyword == "input":
            if input_spec is not None:
                raise NetlistSyntaxError(lineno, 1, "duplicate 'input' statement")
            if len(args) != 2:
                raise NetlistSyntaxError(lineno, 1, "'input' takes a mode and a polarization")
            if args[1] not in INPUT_POLARIZATIONS:
                raise NetlistSyntaxError(
                    lineno, _column(raw, 2),
                    f"input polarization must be one of {sorted(INPUT_POLARIZATIONS)}, got {args[1]!r}",
                )
            input_spec = (_label(args[0], raw, lineno, 1), args[1])
        elif keyword == "detector":
            if len(args) != 3:
                raise NetlistSyntaxError(lineno, 1, "'detector' takes a label, a mode and a sign")
            label = _label(args[0], raw, lineno, 1)
            if args[2] not in ("+", "-"):
                raise NetlistSyntaxError(lineno, _column(raw, 3), f"detector sign must be + or -, got {args[2]!r}")
            if label in detectors:
                raise DuplicateOutcomeLabel(f"line {lineno}: detector label {label!r} already used")
            detectors[label] = Detector(_label(args[1], raw, lineno, 2), args[2])
        elif keyword == "feedforward":
            if not args:
                raise NetlistSyntaxError(lineno, 1, "'feedforward' needs an outcome label")
            label = _label(args[0], raw, lineno, 1)
            pairs = args[1:]
            if len(pairs) % 2:
                raise NetlistSyntaxError(lineno, _column(raw, len(args)), "feedforward operations come in <spin> <op> pairs")
            ops = []
            for k in range(0, len(pairs), 2):
                idx = _int(pairs[k], raw, lineno, k + 2, "spin index")
                op = pairs[k + 1]
                if op not in FEEDFORWARD_OPS:
                    raise NetlistSyntaxError(lineno, _column(raw, k + 3), f"feedforward op must be I, Z or -Z, got {op!r}")
                ops.append((idx, op))
            if label in feedforward:
                raise DuplicateOutcomeLabel(f"line {lineno}: feedforward for {label!r} given twice")
            feedforward[label] = tuple(ops)
        elif keyword in ELEMENT_TYPES:
            name = None
            if args and args[-1].startswith("@"):
                name = args[-1][1:]
                if not name:
                    raise NetlistSyntaxError(lineno, _column(raw, len(args)), "empty checkpoint name")
                if name in checkpoint_names:
                    raise NetlistSyntaxError(lineno, _column(raw, len(args)), f"duplicate checkpoint {name!r}")
                checkpoint_names.add(name)
                args = args[:-1]
            steps.append(Step(_parse_element(keyword, args, raw, lineno), name))
        else:
            raise UnknownKeyword(lineno, _column(raw, 0), f"unknown keyword {keyword!r}")

    if spins is None:
        raise NetlistSyntaxError(1, 1, "missing 'spins' statement")
    if input_spec is None:
        raise NetlistSyntaxError(1, 1, "missing 'input' statement")
    netlist = Netlist(spins, input_spec[0], input_spec[1], steps, detectors, feedforward)
    if validate:
        validate_netlist(netlist)
    return netlist


# --------------------------------------------------------------- validation


def _spin_indices(e: Element) -> tuple[int, ...]:
    return (e.spin_index,) if isinstance(e, (SpinH, SpinZ, Cavity)) else ()


def validate_netlist(netlist: Netlist) -> None:
    """Static checks: spin indices, mode flow, detector and feed-forward coverage."""
    n = netlist.spin_count
    produced = {netlist.input_mode}
    for k, step in enumerate(netlist.steps, start=1):
        e = step.element
        for idx in _spin_indices(e):
            if idx >= n:
                raise NetlistError(f"element {k} ({e.keyword}) uses spin {idx} but the netlist has {n} spins")
        for mode in e.inputs:
            if mode not in produced:
                raise DanglingMode(f"element {k} ({e.keyword}) reads mode {mode!r} that no earlier element produces")
        produced.update(e.outputs)

    if not netlist.detectors:
        raise NetlistError("netlist declares no detectors")
    for label, det in netlist.detectors.items():
        if det.mode not in produced:
            raise DanglingMode(f"detector {label!r} watches mode {det.mode!r} that is never produced")
    for label in netlist.detectors:
        if label not in netlist.feedforward:
            raise UncoveredOutcome(f"no feedforward entry for detector {label!r}")
    for label, ops in netlist.feedforward.items():
        if label not in netlist.detectors:
            raise UncoveredOutcome(f"feedforward entry {label!r} names no detector")
        for idx, _ in ops:
            if idx >= n:
                raise NetlistError(f"feedforward {label!r} uses spin {idx} but the netlist has {n} spins")

    _check_terminal_modes(netlist)


def _check_terminal_modes(netlist: Netlist) -> None:
    """Detectors must sit exactly on the modes that end up carrying the photon.

    Terminal modes are found by propagating a random spin input with a
    generic complex reflection pair, so no amplitude cancels by accident.
    """
    from .cavity import FULL_COMPLEX, ReflectionPair
    from .engine import propagate

    rng = np.random.default_rng(12345)
    spin_in = rng.normal(size=2 ** netlist.spin_count) + 1j * rng.normal(size=2 ** netlist.spin_count)
    spin_in /= np.linalg.norm(spin_in)
    pair = ReflectionPair(0.61 * np.exp(2.3j), 0.83 * np.exp(-0.4j))
    final = propagate(netlist, pair, spin_in, convention=FULL_COMPLEX)
    terminal = set(final.terminal_modes(1e-20))
    watched = {d.mode for d in netlist.detectors.values()}
    for mode in sorted(terminal - watched):
        raise DanglingMode(f"mode {mode!r} carries the photon at the end but has no detector")
    for mode in sorted(watched - terminal):
        raise DanglingMode(f"detector mode {mode!r} never carries the photon")


# ------------------------------------------------------------ serialization


def _element_tokens(e: Element) -> list[str]:
    args = element_args(e)
    if isinstance(e, SpinZ):
        return [e.keyword, str(e.spin_index), "+" if e.sign == 1 else "-"]
    return [e.keyword, *(str(a) for a in args)]


def serialize_netlist(netlist: Netlist) -> str:
    lines = [f"spins {netlist.spin_count}", f"input {netlist.input_mode} {netlist.input_pol}"]
    for step in netlist.steps:
        tokens = _element_tokens(step.element)
        if step.checkpoint:
            tokens.append("@" + step.checkpoint)
        lines.append(" ".join(tokens))
    for label, det in netlist.detectors.items():
        lines.append(f"detector {label} {det.mode} {det.sign}")
    for label, ops in netlist.feedforward.items():
        lines.append(" ".join(["feedforward", label, *(f"{i} {op}" for i, op in ops)]))
    return "\n".join(lines) + "\n"

