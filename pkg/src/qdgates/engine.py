"""Run a netlist: propagate the photon, detect it, apply feed-forward."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cavity import SIGNED_MODULI, ReflectionPair
from .elements import apply_element
from .errors import NonUnitInput, SpinIndexOutOfRange
from .netlist import Netlist
from .state import SIGMA_Z, HybridState, measure_photon, product_state

FEEDFORWARD_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "Z": SIGMA_Z,
    "-Z": -SIGMA_Z,
}


@dataclass(frozen=True)
class Outcome:
    label: str
    probability: float
    state: np.ndarray  # after feed-forward, unit norm
    raw_state: np.ndarray  # before feed-forward, unit norm
    feedforward_applied: bool


@dataclass
class OutcomeDistribution:
    outcomes: list[Outcome]

    @property
    def efficiency(self) -> float:
        return float(sum(o.probability for o in self.outcomes))

    def __iter__(self):
        return iter(self.outcomes)

    def __len__(self):
        return len(self.outcomes)

    def by_label(self) -> dict[str, Outcome]:
        return {o.label: o for o in self.outcomes}


@dataclass
class ExecutionTrace:
    checkpoints: list[tuple[str, HybridState]] = field(default_factory=list)
    final: HybridState | None = None

    def __getitem__(self, name: str) -> HybridState:
        for key, state in self.checkpoints:
            if key == name:
                return state
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [k for k, _ in self.checkpoints]


def apply_feedforward(spin_state: np.ndarray, ops: Sequence[tuple[int, str]]) -> np.ndarray:
    spin_state = np.asarray(spin_state, dtype=complex)
    n = int(np.log2(spin_state.size))
    out = spin_state.reshape((2,) * n) if n else spin_state
    for idx, name in ops:
        if not 0 <= idx < n:
            raise SpinIndexOutOfRange(f"feedforward spin {idx} out of range for {n} spins")
        out = np.moveaxis(np.tensordot(FEEDFORWARD_MATRICES[name], out, axes=([1], [idx])), 0, idx)
    return out.reshape(-1)


def _check_input(netlist: Netlist, spin_in) -> np.ndarray:
    spin_in = np.asarray(spin_in, dtype=complex).reshape(-1)
    if spin_in.size != 2 ** netlist.spin_count:
        raise NonUnitInput(
            f"spin input has {spin_in.size} amplitudes, netlist needs {2 ** netlist.spin_count}"
        )
    norm = np.linalg.norm(spin_in)
    if abs(norm - 1) > 1e-9:
        raise NonUnitInput(f"spin input norm is {norm:.12g}, expected 1")
    return spin_in


def propagate(
    netlist: Netlist,
    pair: ReflectionPair,
    spin_in,
    convention: str = SIGNED_MODULI,
    trace: ExecutionTrace | None = None,
) -> HybridState:
    """Hybrid state after the last element, before any detection."""
    state = product_state(netlist.input_mode, netlist.input_vector, spin_in)
    for step in netlist.steps:
        state = apply_element(state, step.element, pair, convention)
        if trace is not None and step.checkpoint:
            trace.checkpoints.append((step.checkpoint, state))
    if trace is not None:
        trace.final = state
    return state


def detect(netlist: Netlist, final: HybridState) -> OutcomeDistribution:
    """Measure the photon on the netlist's detectors and apply feed-forward."""
    outcomes = []
    for res in measure_photon(final, netlist.detector_map()):
        ops = netlist.feedforward.get(res.label, ())
        corrected = apply_feedforward(res.spin_state, ops)
        applied = any(op != "I" for _, op in ops)
        outcomes.append(Outcome(res.label, res.probability, corrected, res.spin_state, applied))
    return OutcomeDistribution(outcomes)


def execute(netlist: Netlist, pair: ReflectionPair, spin_in, convention: str = SIGNED_MODULI) -> OutcomeDistribution:
    spin_in = _check_input(netlist, spin_in)
    return detect(netlist, propagate(netlist, pair, spin_in, convention))


def execute_traced(
    netlist: Netlist,
    pair: ReflectionPair,
    spin_in,
    convention: str = SIGNED_MODULI,
) -> tuple[OutcomeDistribution, ExecutionTrace]:
    spin_in = _check_input(netlist, spin_in)
    trace = ExecutionTrace()
    final = propagate(netlist, pair, spin_in, convention, trace)
    return detect(netlist, final), trace

