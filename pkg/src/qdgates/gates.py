"""Built-in CNOT, Toffoli and Fredkin circuits and truth-table checks.

Qubit order is fixed: spin 0 is the most significant bit, up=0, down=1,
and every gate triggers on a control in the down state.

Mode labels follow the spatial-mode subscripts used in the derivations
where those pin them down (5, 6, 7, 9, 18-29). Ports of a recombining
polarizing beam splitter that never receive light are named ``x<k>``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .cavity import SIGNED_MODULI, ReflectionPair, ideal_reflection_pair
from .elements import BS, HWP, PBS, PMPBS, Cavity, SpinH, Switch, WPMirror
from .engine import execute
from .netlist import Detector, Netlist, Step, parse_netlist
from .state import index_to_spins


class GateKind(enum.Enum):
    CNOT = "cnot"
    TOFFOLI = "toffoli"
    FREDKIN = "fredkin"

    @property
    def spin_count(self) -> int:
        return 2 if self is GateKind.CNOT else 3

    @classmethod
    def parse(cls, name: "str | GateKind") -> "GateKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown gate {name!r}; expected cnot, toffoli or fredkin") from None


def _pbs_block(inp, via, hit, out, dumps, cavities):
    """Split ``inp`` on a PBS, send the L port past the cavities, recombine onto ``out``.

    ``via``/``hit`` are the R and L output ports of the splitting PBS.
    """
    steps = [Step(PBS(inp, via, hit))]
    steps += [Step(Cavity(spin, hit)) for spin in cavities]
    steps += [Step(PBS(via, out, dumps[0])), Step(PBS(hit, dumps[1], out))]
    return steps


def cnot_netlist() -> Netlist:
    """Control is spin 0 (cavity 1), target is spin 1 (cavity 2)."""
    steps = [
        *_pbs_block("in", "1", "2", "3", ("x1", "x2"), [0]),
        Step(HWP("3")),
        Step(SpinH(1)),
        *_pbs_block("3", "4", "5", "9", ("x3", "x4"), [1]),
        Step(SpinH(1), "pre-measurement"),
        Step(PMPBS("9", "10", "11")),
    ]
    return Netlist(
        spin_count=2,
        input_mode="in",
        input_pol="R+L",
        steps=steps,
        detectors={"D+": Detector("10", "+"), "D-": Detector("11", "-")},
        feedforward={"D+": (), "D-": ((0, "Z"),)},
    )


def toffoli_netlist() -> Netlist:
    """Controls are spins 0 and 1 (cavities 1, 2), target is spin 2 (cavity 3)."""
    steps = [
        *_pbs_block("in", "1", "2", "5", ("x1", "x2"), [0]),
        Step(HWP("5"), "Xi1"),
        Step(PBS("5", "6", "7")),
        # c1 = down branch
        Step(HWP("6")),
        *_pbs_block("6", "8", "9", "19", ("x3", "x4"), [1]),
        Step(HWP("19")),
        # c1 = up branch
        Step(HWP("7")),
        *_pbs_block("7", "10", "11", "18", ("x5", "x6"), [1]),
        Step(HWP("18"), "Xi2"),
        Step(SpinH(2)),
        *_pbs_block("19", "20", "21", "23", ("x7", "x8"), [2]),
        Step(SpinH(2), "Xi3"),
        Step(BS("18", "23", "24", "25")),
        Step(PMPBS("24", "26", "27")),
        Step(PMPBS("25", "28", "29"), "Xi4"),
    ]
    return Netlist(
        spin_count=3,
        input_mode="in",
        input_pol="R-L",
        steps=steps,
        detectors={
            "D1+": Detector("26", "+"),
            "D1-": Detector("27", "-"),
            "D2+": Detector("28", "+"),
            "D2-": Detector("29", "-"),
        },
        feedforward={
            "D1+": (),
            "D1-": ((0, "-Z"), (1, "Z")),
            "D2+": ((0, "Z"),),
            "D2-": ((1, "-Z"),),
        },
    )


def fredkin_netlist() -> Netlist:
    """Control is spin 0 (cavity 1), targets are spins 1 and 2 (cavities 2, 3)."""
    steps = [
        *_pbs_block("in", "1", "2", "5", ("x1", "x2"), [0]),
        Step(HWP("5"), "Pi1"),
        Step(PBS("5", "6", "7")),
        # c = up branch: one pass through the target block
        Step(HWP("7")),
        *_pbs_block("7", "8", "9", "22", ("x3", "x4"), [1, 2]),
        Step(HWP("22")),
        # c = down branch: the switch steers it into the block twice
        Step(HWP("6")),
        Step(Switch("6", "10")),
        *_pbs_block("10", "11", "12", "20", ("x5", "x6"), [1, 2]),
        Step(WPMirror("20"), "Xi2"),
        Step(SpinH(1)),
        Step(SpinH(2)),
        *_pbs_block("20", "13", "14", "15", ("x7", "x8"), [2, 1]),
        Step(SpinH(1)),
        Step(SpinH(2)),
        Step(Switch("15", "21"), "Xi3"),
        Step(BS("22", "21", "23", "24")),
        Step(PMPBS("23", "25", "26")),
        Step(PMPBS("24", "27", "28"), "Xi4"),
    ]
    return Netlist(
        spin_count=3,
        input_mode="in",
        input_pol="R-L",
        steps=steps,
        detectors={
            "D1+": Detector("25", "+"),
            "D1-": Detector("26", "-"),
            "D2+": Detector("27", "+"),
            "D2-": Detector("28", "-"),
        },
        feedforward={
            "D1+": (),
            "D1-": ((0, "-Z"), (1, "Z"), (2, "Z")),
            "D2+": ((0, "Z"),),
            "D2-": ((1, "Z"), (2, "Z")),
        },
    )


_BUILDERS = {
    GateKind.CNOT: cnot_netlist,
    GateKind.TOFFOLI: toffoli_netlist,
    GateKind.FREDKIN: fredkin_netlist,
}


def builtin_netlist(kind: "GateKind | str") -> Netlist:
    return _BUILDERS[GateKind.parse(kind)]()


def fixture_text(kind: "GateKind | str") -> str:
    """Netlist text shipped with the package for ``kind``."""
    name = GateKind.parse(kind).value
    return resources.files("qdgates").joinpath("netlists").joinpath(f"{name}.net").read_text(encoding="utf-8")


def load_fixture(kind: "GateKind | str") -> Netlist:
    return parse_netlist(fixture_text(kind))


def ideal_gate_matrix(kind: "GateKind | str") -> np.ndarray:
    kind = GateKind.parse(kind)
    n = kind.spin_count
    dim = 2 ** n
    m = np.zeros((dim, dim))
    for i in range(dim):
        bits = list(index_to_spins(i, n))
        if kind is GateKind.CNOT and bits[0] == 1:
            bits[1] ^= 1
        elif kind is GateKind.TOFFOLI and bits[0] == 1 and bits[1] == 1:
            bits[2] ^= 1
        elif kind is GateKind.FREDKIN and bits[0] == 1:
            bits[1], bits[2] = bits[2], bits[1]
        j = int("".join(map(str, bits)), 2)
        m[j, i] = 1.0
    return m


def uniform_input(n: int) -> np.ndarray:
    return np.full(2 ** n, 2 ** (-n / 2), dtype=complex)


def random_spin_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return v / np.linalg.norm(v)


def worst_overlap(kind: "GateKind | str", pair: ReflectionPair, spin_in, netlist: Netlist | None = None,
                  convention: str = SIGNED_MODULI) -> float:
    """Smallest |<ideal|outcome>|^2 over all detector outcomes."""
    kind = GateKind.parse(kind)
    netlist = netlist or builtin_netlist(kind)
    expected = ideal_gate_matrix(kind) @ np.asarray(spin_in, dtype=complex)
    dist = execute(netlist, pair, spin_in, convention)
    return min(abs(np.vdot(expected, o.state)) ** 2 for o in dist)


@dataclass
class TruthTableRow:
    input_bits: str
    expected: np.ndarray
    worst_overlap: float
    passed: bool


@dataclass
class TruthTableReport:
    kind: GateKind
    pair: ReflectionPair
    tolerance: float
    rows: list[TruthTableRow] = field(default_factory=list)
    random_inputs: int = 0
    worst_random_overlap: float | None = None

    @property
    def passed(self) -> bool:
        ok = all(r.passed for r in self.rows)
        if self.worst_random_overlap is not None:
            ok = ok and self.worst_random_overlap >= 1 - self.tolerance
        return ok

    def format(self) -> str:
        lines = [
            f"gate {self.kind.value}: r0 = {self.pair.r0:.9g}, rh = {self.pair.rh:.9g}, tolerance {self.tolerance:g}"
        ]
        for r in self.rows:
            exp = "".join(map(str, index_to_spins(int(np.argmax(abs(r.expected))), len(r.input_bits))))
            lines.append(
                f"  {r.input_bits} -> {exp}  worst overlap {r.worst_overlap:.12f}  {'PASS' if r.passed else 'FAIL'}"
            )
        if self.worst_random_overlap is not None:
            lines.append(
                f"  {self.random_inputs} random inputs: worst overlap {self.worst_random_overlap:.12f}"
            )
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def verify_truth_table(
    kind: "GateKind | str",
    pair: ReflectionPair | None = None,
    tolerance: float = 1e-10,
    *,
    random_inputs: int = 0,
    seed: int = 0,
    netlist: Netlist | None = None,
    convention: str = SIGNED_MODULI,
) -> TruthTableReport:
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    kind = GateKind.parse(kind)
    pair = pair or ideal_reflection_pair()
    netlist = netlist or builtin_netlist(kind)
    n = kind.spin_count
    gate = ideal_gate_matrix(kind)
    report = TruthTableReport(kind, pair, tolerance)
    for i in range(2 ** n):
        spin_in = np.zeros(2 ** n, dtype=complex)
        spin_in[i] = 1
        worst = worst_overlap(kind, pair, spin_in, netlist, convention)
        bits = "".join(map(str, index_to_spins(i, n)))
        report.rows.append(TruthTableRow(bits, gate @ spin_in, worst, worst >= 1 - tolerance))
    if random_inputs:
        rng = np.random.default_rng(seed)
        report.random_inputs = random_inputs
        report.worst_random_overlap = min(
            worst_overlap(kind, pair, random_spin_state(n, rng), netlist, convention)
            for _ in range(random_inputs)
        )
    return report
