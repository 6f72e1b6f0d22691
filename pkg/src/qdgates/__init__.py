"""Simulator for photon-mediated CNOT, Toffoli and Fredkin gates on QD spins in single-side cavities."""
from .cavity import (
    CavityParams,
    DephasingParams,
    ReflectionPair,
    dephasing_factor,
    ideal_reflection_pair,
    reflection_coefficient,
    reflection_pair,
    scattering_operator,
)
from .engine import apply_feedforward, execute, execute_traced
from .gates import GateKind, builtin_netlist, ideal_gate_matrix, verify_truth_table
from .netlist import Netlist, parse_netlist, serialize_netlist
from .state import BasisKet, HybridState, make_state

__version__ = "0.1.0"
