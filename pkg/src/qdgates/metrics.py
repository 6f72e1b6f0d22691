"""Fidelity and efficiency of the gates, simulated and in closed form, plus grid sweeps."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence, TextIO

import numpy as np

from .cavity import (
    SIGNED_MODULI,
    CavityParams,
    DephasingParams,
    ReflectionPair,
    dephasing_factor,
    ideal_reflection_pair,
    reflection_pair,
)
from .engine import detect, execute, propagate
from .errors import NonUnitInput, ZeroDetectionProbability
from .gates import GateKind, builtin_netlist, ideal_gate_matrix, uniform_input
from .state import PROB_EPS, HybridState, inner_product

CSV_HEADER = (
    "gate",
    "g_over_kappa_plus_kappas",
    "kappas_over_kappa",
    "gamma_over_kappa",
    "abs_r0",
    "abs_rh",
    "F_sim",
    "F_closed",
    "eta_sim",
    "eta_closed",
    "F_dephased",
)

PRINTED = "printed"
SQUARED = "squared"


@lru_cache(maxsize=None)
def _netlist(kind: GateKind):
    return builtin_netlist(kind)


def _spin_input(kind: GateKind, spin_in) -> np.ndarray:
    if spin_in is None:
        return uniform_input(kind.spin_count)
    return np.asarray(spin_in, dtype=complex)


def _fidelity_from(dist, expected) -> float:
    total = dist.efficiency
    if total <= PROB_EPS:
        raise ZeroDetectionProbability("no detector outcome has nonzero probability")
    return float(sum(o.probability * abs(np.vdot(expected, o.state)) ** 2 for o in dist) / total)


def simulated_fidelity(kind, pair: ReflectionPair, spin_in=None, convention: str = SIGNED_MODULI) -> float:
    """Detection-conditioned fidelity averaged over detector outcomes.

    sum_k p_k |<ideal|psi_k>|^2 / sum_k p_k, with psi_k the renormalized
    spin state after feed-forward. Defaults to the uniform superposition input.
    """
    kind = GateKind.parse(kind)
    spin_in = _spin_input(kind, spin_in)
    expected = ideal_gate_matrix(kind) @ spin_in
    return _fidelity_from(execute(_netlist(kind), pair, spin_in, convention), expected)


def simulated_efficiency(kind, pair: ReflectionPair, spin_in=None, convention: str = SIGNED_MODULI) -> float:
    """Photon survival probability (sum of all outcome probabilities)."""
    kind = GateKind.parse(kind)
    spin_in = _spin_input(kind, spin_in)
    return execute(_netlist(kind), pair, spin_in, convention).efficiency


def _overlap_fidelity(ideal, real, normalize: bool) -> float:
    ov = abs(inner_product(ideal, real)) ** 2
    if not normalize:
        return float(ov)
    n2 = real.norm2()
    if n2 <= PROB_EPS:
        raise ZeroDetectionProbability("photon is lost with certainty")
    return float(ov / n2)


def hybrid_fidelity(kind, pair: ReflectionPair, spin_in=None, convention: str = SIGNED_MODULI,
                    normalize: bool = True) -> float:
    """|<Psi_ideal|Psi_real>|^2 on the whole photon-plus-spins state before detection.

    With ``normalize`` the lossy state is renormalized first; without it the
    photon-loss deficit enters the value directly.
    """
    kind = GateKind.parse(kind)
    spin_in = _spin_input(kind, spin_in)
    netlist = _netlist(kind)
    real = propagate(netlist, pair, spin_in, convention)
    ideal = propagate(netlist, ideal_reflection_pair(), spin_in)
    return _overlap_fidelity(ideal, real, normalize)


# -------------------------------------------------------------- closed forms


def _cnot_fidelity_terms(m0, mh):
    num = 1 + 2 * mh + m0 * mh
    den = (1 + mh) ** 2 + (1 - m0) ** 2 + mh ** 2 * (1 - mh) ** 2 + mh ** 2 * (1 + m0) ** 2
    return 2.0, num, den


def _toffoli_fidelity_terms(m0, mh):
    num = 3 + 2 * m0 + mh * (5 + mh + m0 * (4 + m0))
    den = (
        (1 + mh) ** 4
        + 2 * (mh ** 2 - 1) ** 2
        + 2 * (mh - 1) ** 2 * (m0 - 1) ** 2
        + (m0 - 1) ** 4
        + 2 * (m0 ** 2 - 1) ** 2
        + 4 * (1 + mh) ** 2 * (1 + m0 ** 2)
        + mh ** 2 * ((mh - 1) ** 2 + (1 + m0) ** 2) ** 2
    )
    return 4.0, num, den


def _fredkin_fidelity_terms(m0, mh):
    s = mh ** 2 + m0 ** 2
    num = (
        4 * (1 + mh) * (1 + m0 * mh)
        + 2 * (2 + m0 + mh) * (2 + m0 ** 2 + mh ** 2)
        + (1 + m0) * (4 * mh ** 2 - mh ** 4 + 2 * mh ** 3 * m0 + 2 * mh * m0 ** 3 + m0 ** 4)
    )
    poly = (
        mh ** 8
        - 4 * mh ** 7 * m0
        + 4 * mh ** 3 * m0 ** 5
        + 8 * mh ** 2 * m0 ** 6
        + 4 * mh * m0 ** 7
        + m0 ** 8
        - 4 * mh ** 5 * m0 * (m0 ** 2 - 4)
        + 8 * mh ** 6 * (m0 ** 2 - 1)
        - 2 * mh ** 4 * (4 * m0 ** 2 + m0 ** 4 - 8)
    )
    den = (
        ((mh - 1) ** 2 + (1 + m0) ** 2) * (4 + 2 * (mh - m0) ** 2 + s ** 2)
        + 4 * ((1 + mh) ** 2 + (m0 - 1) ** 2) * (8 + 2 * s ** 2)
        + (2 + mh * (mh - 2) + m0 * (2 + m0)) * poly
    )
    return 8.0, num, den


_FIDELITY_TERMS = {
    GateKind.CNOT: _cnot_fidelity_terms,
    GateKind.TOFFOLI: _toffoli_fidelity_terms,
    GateKind.FREDKIN: _fredkin_fidelity_terms,
}


def closed_form_fidelity(kind, m0: float, mh: float, variant: str = PRINTED) -> float:
    """Published fidelity formula in |r0|, |rh|.

    ``printed`` evaluates the formula literally. ``squared`` squares the
    numerator, which is the form that equals the normalized hybrid overlap
    for CNOT and Toffoli and gives 1 in the lossless limit.
    """
    prefactor, num, den = _FIDELITY_TERMS[GateKind.parse(kind)](m0, mh)
    if variant == PRINTED:
        return num / (prefactor * den)
    if variant == SQUARED:
        return num ** 2 / (prefactor * den)
    raise ValueError(f"variant must be {PRINTED!r} or {SQUARED!r}")


def closed_form_efficiency(kind, m0: float, mh: float) -> float:
    kind = GateKind.parse(kind)
    s = mh ** 2 + m0 ** 2
    if kind is GateKind.CNOT:
        return (2 + s) ** 2 / 16
    if kind is GateKind.TOFFOLI:
        return (2 + s) ** 2 * (6 + s) / 128
    return (2 + s) * (4 + s ** 2) * (12 + s ** 2) / 512


# ------------------------------------------------------------------ records


@dataclass(frozen=True)
class GateMetrics:
    kind: GateKind
    pair: ReflectionPair
    F_sim: float
    eta_sim: float
    F_closed: float
    eta_closed: float
    F_hybrid: float
    F_closed_squared: float
    g_ratio: float | None = None
    ks_ratio: float | None = None
    gamma_ratio: float | None = None
    detuning: float = 0.0
    dephasing_applied: float | None = None

    @property
    def F_dephased(self) -> float | None:
        if self.dephasing_applied is None:
            return None
        return self.F_sim * self.dephasing_applied


def evaluate(
    kind,
    pair: ReflectionPair,
    spin_in=None,
    dephasing: DephasingParams | None = None,
    convention: str = SIGNED_MODULI,
    *,
    g_ratio: float | None = None,
    ks_ratio: float | None = None,
    gamma_ratio: float | None = None,
    detuning: float = 0.0,
    ideal_state: HybridState | None = None,
) -> GateMetrics:
    """All metrics at one pair. ``ideal_state`` may carry a precomputed ideal-pair propagation."""
    kind = GateKind.parse(kind)
    spin_in = _spin_input(kind, spin_in)
    netlist = _netlist(kind)
    if not np.isclose(np.linalg.norm(spin_in), 1.0, rtol=0, atol=1e-9):
        raise NonUnitInput(f"spin input norm is {np.linalg.norm(spin_in):.12g}, expected 1")
    real = propagate(netlist, pair, spin_in, convention)
    ideal = ideal_state if ideal_state is not None else propagate(netlist, ideal_reflection_pair(), spin_in)
    dist = detect(netlist, real)
    m0, mh = pair.moduli
    return GateMetrics(
        kind=kind,
        pair=pair,
        F_sim=_fidelity_from(dist, ideal_gate_matrix(kind) @ spin_in),
        eta_sim=dist.efficiency,
        F_closed=closed_form_fidelity(kind, m0, mh),
        eta_closed=closed_form_efficiency(kind, m0, mh),
        F_hybrid=_overlap_fidelity(ideal, real, True),
        F_closed_squared=closed_form_fidelity(kind, m0, mh, SQUARED),
        g_ratio=g_ratio,
        ks_ratio=ks_ratio,
        gamma_ratio=gamma_ratio,
        detuning=detuning,
        dephasing_applied=dephasing_factor(dephasing) if dephasing is not None else None,
    )


def pair_from_ratios(g_ratio: float, ks_ratio: float, gamma_ratio: float = 0.1, detuning: float = 0.0) -> ReflectionPair:
    """(r0, rh) for dimensionless g/(kappa+kappa_s), kappa_s/kappa, gamma/kappa.

    ``detuning`` is the photon frequency offset from the (common) cavity and
    exciton frequency, in units of kappa.
    """
    return reflection_pair(CavityParams.from_ratios(g_ratio, ks_ratio, gamma_ratio), omega=detuning)


# -------------------------------------------------------------------- sweep


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError("an axis needs at least 2 steps")
        if self.lo < 0 or self.hi < self.lo:
            raise ValueError(f"axis range must satisfy 0 <= min <= max, got {self.lo}:{self.hi}")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class SweepGrid:
    g_axis: Axis = Axis(0.0, 2.4, 31)
    ks_axis: Axis = Axis(0.0, 1.3, 27)
    gamma_ratio: float = 0.1
    detuning: float = 0.0
    kinds: tuple[GateKind, ...] = (GateKind.CNOT, GateKind.TOFFOLI, GateKind.FREDKIN)

    def __post_init__(self):
        if self.gamma_ratio < 0:
            raise ValueError("gamma/kappa must be non-negative")


def sweep(
    grid: SweepGrid,
    spin_in=None,
    dephasing: DephasingParams | None = None,
    convention: str = SIGNED_MODULI,
) -> list[GateMetrics]:
    """Evaluate every gate at every grid point; order is gate, then g, then kappa_s."""
    records = []
    for kind in grid.kinds:
        kind = GateKind.parse(kind)
        ideal = propagate(_netlist(kind), ideal_reflection_pair(), _spin_input(kind, spin_in))
        for g in grid.g_axis.values:
            for ks in grid.ks_axis.values:
                pair = pair_from_ratios(g, ks, grid.gamma_ratio, grid.detuning)
                records.append(
                    evaluate(
                        kind, pair, spin_in, dephasing, convention,
                        g_ratio=float(g), ks_ratio=float(ks),
                        gamma_ratio=grid.gamma_ratio, detuning=grid.detuning, ideal_state=ideal,
                    )
                )
    return records


def fmt(x: float | None) -> str:
    """Nine significant digits; empty for missing values."""
    if x is None:
        return ""
    if x == 0:
        return "0"
    return f"{x:.9g}"


def write_csv(records: Iterable[GateMetrics], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        m0, mh = r.pair.moduli
        w.writerow([
            r.kind.value,
            fmt(r.g_ratio), fmt(r.ks_ratio), fmt(r.gamma_ratio),
            fmt(m0), fmt(mh),
            fmt(r.F_sim), fmt(r.F_closed),
            fmt(r.eta_sim), fmt(r.eta_closed),
            fmt(r.F_dephased),
        ])


def csv_text(records: Iterable[GateMetrics]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


# ------------------------------------------------------------ comparisons


@dataclass
class ComparisonLine:
    kind: GateKind
    F_closed_ideal: float
    F_closed_squared_ideal: float
    F_sim_ideal: float
    max_dev_printed: float
    max_dev_squared: float
    flags: list[str] = field(default_factory=list)


def compare_fidelities(records: Sequence[GateMetrics], tol: float = 1e-9) -> list[ComparisonLine]:
    """Set the published fidelity formulas against the simulator, gate by gate.

    Deviations are measured against the hybrid-state overlap, the quantity
    the closed forms are built from.
    """
    lines = []
    kinds = sorted({r.kind for r in records}, key=lambda k: list(GateKind).index(k))
    for kind in kinds:
        rows = [r for r in records if r.kind is kind]
        ideal = ideal_reflection_pair()
        line = ComparisonLine(
            kind=kind,
            F_closed_ideal=closed_form_fidelity(kind, 1.0, 1.0),
            F_closed_squared_ideal=closed_form_fidelity(kind, 1.0, 1.0, SQUARED),
            F_sim_ideal=simulated_fidelity(kind, ideal),
            max_dev_printed=max(abs(r.F_closed - r.F_hybrid) for r in rows),
            max_dev_squared=max(abs(r.F_closed_squared - r.F_hybrid) for r in rows),
        )
        if abs(line.F_closed_ideal - 1) > tol:
            line.flags.append(
                f"printed closed form gives F({kind.value}) = {line.F_closed_ideal:.9g} at |r0| = |rh| = 1, not 1"
            )
        if abs(line.F_closed_squared_ideal - 1) > tol:
            line.flags.append(
                f"squared-numerator form gives {line.F_closed_squared_ideal:.9g} at |r0| = |rh| = 1, not 1"
            )
        if line.max_dev_squared <= tol:
            line.flags.append("squared-numerator form matches the simulated hybrid overlap on every point")
        else:
            line.flags.append(
                f"neither form reproduces the simulated hybrid overlap (max deviation {line.max_dev_squared:.3g})"
            )
        lines.append(line)
    return lines


def format_comparison(lines: Sequence[ComparisonLine]) -> str:
    out = ["fidelity cross-check (closed forms vs simulation):"]
    for c in lines:
        out.append(
            f"  {c.kind.value}: F_closed(1,1) = {fmt(c.F_closed_ideal)}, "
            f"squared form = {fmt(c.F_closed_squared_ideal)}, F_sim(ideal) = {fmt(c.F_sim_ideal)}, "
            f"max |F_closed - F_hybrid| = {c.max_dev_printed:.3g}, squared form {c.max_dev_squared:.3g}"
        )
        out.extend(f"    ! {f}" for f in c.flags)
    return "\n".join(out)


def efficiency_residuals(records: Sequence[GateMetrics]) -> dict[GateKind, float]:
    """Largest |eta_sim - eta_closed| per gate."""
    res: dict[GateKind, float] = {}
    for r in records:
        res[r.kind] = max(res.get(r.kind, 0.0), abs(r.eta_sim - r.eta_closed))
    return res


def is_monotone(values: Sequence[float], increasing: bool, tol: float = 0.0) -> bool:
    diffs = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(diffs >= -tol)) if increasing else bool(np.all(diffs <= tol))


def dephased(value: float, dp: DephasingParams | None) -> float:
    return value if dp is None else value * dephasing_factor(dp)

