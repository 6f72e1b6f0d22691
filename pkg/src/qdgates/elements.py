"""Circuit elements and their action on a HybridState."""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import ClassVar, Union

import numpy as np

from . import state as st
from .cavity import SIGNED_MODULI, ReflectionPair, ideal_reflection_pair, scattering_operator
from .errors import IncompatibleShapes

UNITARY = "unitary"
SUB_UNITARY = "sub-unitary"


@dataclass(frozen=True)
class PBS:
    """Polarizing beam splitter: R transmits, L reflects."""

    keyword: ClassVar[str] = "PBS"
    inp: str
    transmit_to: str
    reflect_to: str

    @property
    def inputs(self):
        return (self.inp,)

    @property
    def outputs(self):
        return (self.transmit_to, self.reflect_to)


@dataclass(frozen=True)
class PMPBS:
    """Polarizing beam splitter in the diagonal basis: |+> transmits, |-> reflects."""

    keyword: ClassVar[str] = "PMPBS"
    inp: str
    plus_to: str
    minus_to: str

    @property
    def inputs(self):
        return (self.inp,)

    @property
    def outputs(self):
        return (self.plus_to, self.minus_to)


@dataclass(frozen=True)
class HWP:
    """Half-wave plate at 22.5 degrees (polarization Hadamard)."""

    keyword: ClassVar[str] = "HWP"
    mode: str

    @property
    def inputs(self):
        return (self.mode,)

    outputs = inputs


@dataclass(frozen=True)
class WPMirror:
    """Wave plate, mirror, wave plate: a net polarization Hadamard."""

    keyword: ClassVar[str] = "WPM"
    mode: str

    @property
    def inputs(self):
        return (self.mode,)

    outputs = inputs


@dataclass(frozen=True)
class BS:
    """Balanced beam splitter; the second input picks up the minus sign."""

    keyword: ClassVar[str] = "BS"
    in_a: str
    in_b: str
    out_a: str
    out_b: str

    @property
    def inputs(self):
        return (self.in_a, self.in_b)

    @property
    def outputs(self):
        return (self.out_a, self.out_b)


@dataclass(frozen=True)
class SpinH:
    keyword: ClassVar[str] = "SH"
    spin_index: int
    inputs: ClassVar[tuple] = ()
    outputs: ClassVar[tuple] = ()


@dataclass(frozen=True)
class SpinZ:
    """sign=+1 applies sigma_z, sign=-1 applies -sigma_z."""

    keyword: ClassVar[str] = "SZ"
    spin_index: int
    sign: int = 1
    inputs: ClassVar[tuple] = ()
    outputs: ClassVar[tuple] = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"SpinZ sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True)
class Cavity:
    """Photon on ``mode`` reflects off the QD holding spin ``spin_index``."""

    keyword: ClassVar[str] = "CAV"
    spin_index: int
    mode: str

    @property
    def inputs(self):
        return (self.mode,)

    outputs = inputs


@dataclass(frozen=True)
class Switch:
    """Lossless reroute of both polarizations from one mode to another."""

    keyword: ClassVar[str] = "SW"
    src: str
    to: str

    @property
    def inputs(self):
        return (self.src,)

    @property
    def outputs(self):
        return (self.to,)


Element = Union[PBS, PMPBS, HWP, WPMirror, BS, SpinH, SpinZ, Cavity, Switch]
ELEMENT_TYPES: dict[str, type] = {
    cls.keyword: cls for cls in (PBS, PMPBS, HWP, WPMirror, BS, SpinH, SpinZ, Cavity, Switch)
}


def element_args(e: Element) -> tuple:
    """Constructor arguments in declaration order (also the DSL token order)."""
    return tuple(getattr(e, f.name) for f in fields(e))


def check_routing(e: Element) -> None:
    """Routing elements need distinct mode labels."""
    modes = e.inputs + e.outputs if isinstance(e, (PBS, PMPBS, BS, Switch)) else ()
    if len(set(modes)) != len(modes):
        raise ValueError(f"{e.keyword} requires distinct modes, got {modes}")


# |+>/|-> basis change: rows are <+| and <-|
_TO_PM = np.array([st.PLUS.conj(), st.MINUS.conj()])


def _pm_route(state: st.HybridState, e: PMPBS) -> st.HybridState:
    s = st.apply_pol_op(state, e.inp, _TO_PM)
    # in the rotated frame "R" holds the |+> amplitude and "L" the |-> amplitude
    s = st.reroute_mode(s, (st.R, e.inp), e.plus_to)
    s = st.reroute_mode(s, (st.L, e.inp), e.minus_to)
    back = _TO_PM.conj().T
    s = st.apply_pol_op(s, e.plus_to, back)
    return st.apply_pol_op(s, e.minus_to, back)


def _beam_split(state: st.HybridState, e: BS) -> st.HybridState:
    zero = np.zeros((2, state.dim), dtype=complex)
    blocks = {m: b.copy() for m, b in state.blocks().items()}
    a = blocks.get(e.in_a, zero)
    b = blocks.get(e.in_b, zero)
    for m in (e.in_a, e.in_b):
        if m in blocks:
            blocks[m] = zero.copy()
    out_a = blocks.get(e.out_a, zero)
    out_b = blocks.get(e.out_b, zero)
    blocks[e.out_a] = out_a + (a + b) * st.SQRT1_2
    blocks[e.out_b] = out_b + (a - b) * st.SQRT1_2
    return st.HybridState(state.spin_count, blocks)


def _ensure_mode(state: st.HybridState, mode: str) -> st.HybridState:
    # missing input amplitude passes through as zero
    if mode in state.modes:
        return state
    blocks = state.blocks()
    blocks[mode] = np.zeros((2, state.dim), dtype=complex)
    return st.HybridState(state.spin_count, blocks)


def apply_element(
    state: st.HybridState,
    e: Element,
    pair: ReflectionPair | None = None,
    convention: str = SIGNED_MODULI,
) -> st.HybridState:
    if isinstance(e, PBS):
        s = _ensure_mode(state, e.inp)
        s = st.reroute_mode(s, (st.R, e.inp), e.transmit_to)
        return st.reroute_mode(s, (st.L, e.inp), e.reflect_to)
    if isinstance(e, PMPBS):
        return _pm_route(_ensure_mode(state, e.inp), e)
    if isinstance(e, (HWP, WPMirror)):
        return st.apply_pol_op(_ensure_mode(state, e.mode), e.mode, st.HADAMARD)
    if isinstance(e, BS):
        return _beam_split(state, e)
    if isinstance(e, SpinH):
        return st.apply_spin_op(state, e.spin_index, st.HADAMARD)
    if isinstance(e, SpinZ):
        return st.apply_spin_op(state, e.spin_index, e.sign * st.SIGMA_Z)
    if isinstance(e, Cavity):
        op = scattering_operator(pair if pair is not None else ideal_reflection_pair(), convention)
        return st.apply_joint_pol_spin_op(_ensure_mode(state, e.mode), e.mode, e.spin_index, op)
    if isinstance(e, Switch):
        s = _ensure_mode(state, e.src)
        s = st.reroute_mode(s, (st.R, e.src), e.to)
        return st.reroute_mode(s, (st.L, e.src), e.to)
    raise IncompatibleShapes(f"not a circuit element: {e!r}")


def element_norm_class(e: Element, pair: ReflectionPair | None = None) -> str:
    if isinstance(e, Cavity):
        m0, mh = (pair or ideal_reflection_pair()).moduli
        if m0 < 1 - 1e-12 or mh < 1 - 1e-12:
            return SUB_UNITARY
    return UNITARY
