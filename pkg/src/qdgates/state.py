"""Single photon (polarization x spatial mode) tensored with n electron spins.

Amplitudes are kept per spatial mode: each registered mode owns a dense
``(2, 2**n)`` block indexed by polarization (R=0, L=1) and spin
configuration. Spin configurations use spin 0 as the most significant bit,
with up=0 and down=1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyState,
    IncompatibleShapes,
    InconsistentSpinCount,
    ModeCollision,
    NormExceedsOne,
    SpinIndexOutOfRange,
    UncoveredMode,
    UnknownMode,
)

R, L = "R", "L"
POLARIZATIONS = (R, L)
UP, DOWN = 0, 1

NORM_SLACK = 1e-12
# outcomes and modes below this squared norm are treated as empty
PROB_EPS = 1e-15

SQRT1_2 = 1 / np.sqrt(2)
PLUS = np.array([SQRT1_2, SQRT1_2], dtype=complex)
MINUS = np.array([SQRT1_2, -SQRT1_2], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)

_SPIN_NAMES = {"up": UP, "down": DOWN, "u": UP, "d": DOWN, 0: UP, 1: DOWN}


def _pol_index(pol: str) -> int:
    try:
        return POLARIZATIONS.index(pol)
    except ValueError:
        raise ValueError(f"polarization must be 'R' or 'L', got {pol!r}") from None


@dataclass(frozen=True)
class BasisKet:
    pol: str
    mode: str
    spins: tuple[int, ...]

    def __post_init__(self):
        _pol_index(self.pol)
        if not isinstance(self.mode, str) or not self.mode:
            raise ValueError("mode label must be a nonempty string")
        spins = tuple(_SPIN_NAMES[s] if not isinstance(s, bool) else int(s) for s in self.spins)
        object.__setattr__(self, "spins", spins)

    @property
    def spin_index(self) -> int:
        return spins_to_index(self.spins)

    def __str__(self):
        arrows = "".join("↑" if s == UP else "↓" for s in self.spins)
        return f"|{self.pol}>_{self.mode}|{arrows}>"


def spins_to_index(spins: Sequence[int]) -> int:
    idx = 0
    for s in spins:
        idx = (idx << 1) | int(s)
    return idx


def index_to_spins(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def basis_vector(bits: Sequence[int]) -> np.ndarray:
    """Spin-only computational basis vector, e.g. ``basis_vector([1, 0])`` is |↓↑>."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[spins_to_index(bits)] = 1.0
    return v


class HybridState:
    """Immutable amplitude vector of one photon and ``spin_count`` spins.

    The squared norm may be below one; the deficit is photon amplitude lost
    to imperfect cavity reflection.
    """

    __slots__ = ("_spin_count", "_blocks")

    def __init__(self, spin_count: int, blocks: Mapping[str, np.ndarray]):
        dim = 2 ** spin_count
        frozen = {}
        for mode, block in blocks.items():
            arr = np.array(block, dtype=complex)
            if arr.shape != (2, dim):
                raise IncompatibleShapes(
                    f"block for mode {mode!r} has shape {arr.shape}, expected {(2, dim)}"
                )
            arr.flags.writeable = False
            frozen[mode] = arr
        self._spin_count = spin_count
        self._blocks = frozen

    @property
    def spin_count(self) -> int:
        return self._spin_count

    @property
    def modes(self) -> tuple[str, ...]:
        return tuple(self._blocks)

    @property
    def dim(self) -> int:
        return 2 ** self._spin_count

    def block(self, mode: str) -> np.ndarray:
        """Read-only ``(2, 2**n)`` amplitude block of ``mode``."""
        try:
            return self._blocks[mode]
        except KeyError:
            raise UnknownMode(f"mode {mode!r} is not registered") from None

    def blocks(self) -> dict[str, np.ndarray]:
        return dict(self._blocks)

    @property
    def amplitudes(self) -> dict[BasisKet, complex]:
        """Nonzero amplitudes keyed by basis ket."""
        n = self._spin_count
        out = {}
        for mode, block in self._blocks.items():
            for p, s in zip(*np.nonzero(block)):
                out[BasisKet(POLARIZATIONS[p], mode, index_to_spins(int(s), n))] = complex(block[p, s])
        return out

    def amplitude(self, pol: str, mode: str, spins: Sequence[int]) -> complex:
        if mode not in self._blocks:
            return 0j
        return complex(self._blocks[mode][_pol_index(pol), spins_to_index(spins)])

    def norm2(self) -> float:
        return float(sum(np.vdot(b, b).real for b in self._blocks.values()))

    def mode_norm2(self, mode: str) -> float:
        b = self.block(mode)
        return float(np.vdot(b, b).real)

    def terminal_modes(self, eps: float = PROB_EPS) -> tuple[str, ...]:
        """Modes that currently carry photon amplitude."""
        return tuple(m for m in self._blocks if self.mode_norm2(m) > eps)

    def _combine(self, other: "HybridState", sign: float) -> "HybridState":
        if other.spin_count != self.spin_count:
            raise IncompatibleShapes("spin counts differ")
        blocks = {m: b.copy() for m, b in self._blocks.items()}
        for m, b in other._blocks.items():
            blocks[m] = blocks[m] + sign * b if m in blocks else sign * b
        return HybridState(self._spin_count, blocks)

    def __add__(self, other: "HybridState") -> "HybridState":
        return self._combine(other, 1.0)

    def __sub__(self, other: "HybridState") -> "HybridState":
        return self._combine(other, -1.0)

    def __mul__(self, scalar: complex) -> "HybridState":
        return HybridState(self._spin_count, {m: scalar * b for m, b in self._blocks.items()})

    __rmul__ = __mul__

    def allclose(self, other: "HybridState", atol: float = 1e-12) -> bool:
        """Amplitude-wise comparison; unregistered modes count as zero."""
        if other.spin_count != self.spin_count:
            return False
        zero = np.zeros((2, self.dim), dtype=complex)
        for m in set(self._blocks) | set(other._blocks):
            a = self._blocks.get(m, zero)
            b = other._blocks.get(m, zero)
            if not np.allclose(a, b, rtol=0, atol=atol):
                return False
        return True

    def __repr__(self):
        terms = " + ".join(
            f"({a.real:+.6g}{a.imag:+.6g}j){k}" for k, a in self.amplitudes.items()
        )
        return f"HybridState(n={self._spin_count}, {terms or '0'})"


def make_state(spin_count: int, terms: Iterable[tuple[BasisKet, complex]]) -> HybridState:
    terms = list(terms)
    if not terms:
        raise ValueError("at least one term is required")
    dim = 2 ** spin_count
    blocks: dict[str, np.ndarray] = {}
    for ket, amp in terms:
        if len(ket.spins) != spin_count:
            raise InconsistentSpinCount(
                f"ket {ket} has {len(ket.spins)} spins, state declares {spin_count}"
            )
        block = blocks.setdefault(ket.mode, np.zeros((2, dim), dtype=complex))
        block[_pol_index(ket.pol), ket.spin_index] += amp
    state = HybridState(spin_count, blocks)
    if state.norm2() > 1 + NORM_SLACK:
        raise NormExceedsOne(f"squared norm {state.norm2():.15g} exceeds 1")
    return state


def product_state(mode: str, pol_vector: Sequence[complex], spin_vector: Sequence[complex]) -> HybridState:
    """Photon ``pol_vector`` on ``mode`` times a spin-only state vector."""
    spin_vector = np.asarray(spin_vector, dtype=complex)
    n = int(np.log2(spin_vector.size))
    if 2 ** n != spin_vector.size:
        raise IncompatibleShapes(f"spin vector length {spin_vector.size} is not a power of two")
    block = np.outer(np.asarray(pol_vector, dtype=complex), spin_vector)
    state = HybridState(n, {mode: block})
    if state.norm2() > 1 + NORM_SLACK:
        raise NormExceedsOne(f"squared norm {state.norm2():.15g} exceeds 1")
    return state


def _check_spin(state: HybridState, spin_index: int) -> None:
    if not 0 <= spin_index < state.spin_count:
        raise SpinIndexOutOfRange(
            f"spin index {spin_index} out of range for {state.spin_count} spins"
        )


def apply_pol_op(state: HybridState, mode: str, op) -> HybridState:
    block = state.block(mode)
    blocks = state.blocks()
    blocks[mode] = np.asarray(op, dtype=complex) @ block
    return HybridState(state.spin_count, blocks)


def apply_spin_op(state: HybridState, spin_index: int, op) -> HybridState:
    _check_spin(state, spin_index)
    n = state.spin_count
    op = np.asarray(op, dtype=complex)
    left, right = 2 ** spin_index, 2 ** (n - spin_index - 1)
    blocks = {}
    for mode, block in state.blocks().items():
        arr = block.reshape(2, left, 2, right)
        blocks[mode] = np.einsum("ts,pasb->patb", op, arr).reshape(2, -1)
    return HybridState(n, blocks)


def apply_joint_pol_spin_op(state: HybridState, mode: str, spin_index: int, op) -> HybridState:
    """Apply a 4x4 operator in the ordered basis (R↑, L↑, R↓, L↓) on ``mode``."""
    block = state.block(mode)
    _check_spin(state, spin_index)
    n = state.spin_count
    op = np.asarray(op, dtype=complex)
    if op.shape != (4, 4):
        raise IncompatibleShapes(f"joint operator must be 4x4, got {op.shape}")
    # combined index k = pol + 2*spin, so op[k', k] -> t[pol', spin', pol, spin]
    t = op.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2)
    left, right = 2 ** spin_index, 2 ** (n - spin_index - 1)
    arr = block.reshape(2, left, 2, right)
    blocks = state.blocks()
    blocks[mode] = np.einsum("PSps,pasb->PaSb", t, arr).reshape(2, -1)
    return HybridState(n, blocks)


def reroute_mode(
    state: HybridState,
    source: tuple[str, str],
    to: str,
    *,
    strict: bool = False,
) -> HybridState:
    """Move the ``pol`` component of ``mode`` onto mode ``to``.

    If ``to`` already holds amplitude in that polarization the two are
    summed, unless ``strict`` is set, in which case ModeCollision is raised.
    """
    pol, mode = source
    p = _pol_index(pol)
    src = state.block(mode)
    if to == mode:
        return state
    blocks = {m: b.copy() for m, b in state.blocks().items()}
    dst = blocks.setdefault(to, np.zeros((2, state.dim), dtype=complex))
    if strict and np.any(dst[p]) and np.any(src[p]):
        raise ModeCollision(f"mode {to!r} already holds {pol}-polarized amplitude")
    dst[p] += src[p]
    blocks[mode][p] = 0
    return HybridState(state.spin_count, blocks)


def inner_product(a: HybridState, b: HybridState) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.spin_count != b.spin_count:
        raise IncompatibleShapes(f"spin counts differ: {a.spin_count} vs {b.spin_count}")
    total = 0j
    for mode in a.modes:
        if mode in b.modes:
            total += np.vdot(a.block(mode), b.block(mode))
    return complex(total)


def _detector_vector(basis) -> np.ndarray:
    if isinstance(basis, str):
        if basis == "+":
            return PLUS
        if basis == "-":
            return MINUS
        raise ValueError(f"detector basis must be '+' or '-', got {basis!r}")
    return np.asarray(basis, dtype=complex)


@dataclass(frozen=True)
class PhotonOutcome:
    label: str
    probability: float
    spin_state: np.ndarray


def measure_photon(state: HybridState, detectors: Mapping[str, tuple[str, object]]) -> list[PhotonOutcome]:
    """Project the photon onto each detector's (mode, polarization) vector.

    Every mode carrying amplitude must be fully captured by the detectors
    placed on it, otherwise UncoveredMode is raised. Zero-probability
    outcomes are dropped; spin states are renormalized.
    """
    total = state.norm2()
    if total <= PROB_EPS:
        raise EmptyState("state carries no photon amplitude")
    projected: dict[str, np.ndarray] = {}
    captured: dict[str, float] = {}
    for label, (mode, basis) in detectors.items():
        vec = _detector_vector(basis)
        comp = vec.conj() @ state.block(mode) if mode in state.modes else np.zeros(state.dim, complex)
        projected[label] = comp
        captured[mode] = captured.get(mode, 0.0) + float(np.vdot(comp, comp).real)
    for mode in state.terminal_modes():
        missing = state.mode_norm2(mode) - captured.get(mode, 0.0)
        if missing > 1e-12:
            raise UncoveredMode(f"mode {mode!r} carries {missing:.3g} of amplitude no detector captures")
    outcomes = []
    for label, comp in projected.items():
        p = float(np.vdot(comp, comp).real)
        if p > PROB_EPS:
            outcomes.append(PhotonOutcome(label, p, comp / np.sqrt(p)))
    return outcomes
