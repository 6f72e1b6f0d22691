"""Command-line entry point: simulate, verify, sweep, parse."""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .cavity import CONVENTIONS, SIGNED_MODULI, DephasingParams, ReflectionPair, dephasing_factor, ideal_reflection_pair
from .engine import execute_traced
from .errors import BadInputSpec, QDGatesError, WrongLength
from .gates import GateKind, builtin_netlist, ideal_gate_matrix, verify_truth_table
from .metrics import (
    Axis,
    SweepGrid,
    closed_form_efficiency,
    closed_form_fidelity,
    compare_fidelities,
    fmt,
    format_comparison,
    pair_from_ratios,
    sweep,
    write_csv,
)
from .netlist import parse_netlist
from .state import HybridState, index_to_spins

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad command-line arguments discovered after argparse has run."""


# ------------------------------------------------------------------ parsing


def parse_input_spec(spec: str, spin_count: int) -> np.ndarray:
    """Bitstring (0 = up, 1 = down), ``uniform``, or 2^n comma-separated complex amplitudes."""
    dim = 2 ** spin_count
    text = spec.strip()
    if text.lower() == "uniform":
        return np.full(dim, dim ** -0.5, dtype=complex)
    if text and set(text) <= {"0", "1"} and "," not in text:
        if len(text) != spin_count:
            raise WrongLength(f"bitstring {text!r} has {len(text)} bits, expected {spin_count}")
        v = np.zeros(dim, dtype=complex)
        v[int(text, 2)] = 1
        return v
    parts = [p.strip() for p in text.split(",")]
    try:
        amps = np.array([complex(p.replace(" ", "").replace("i", "j")) for p in parts])
    except ValueError:
        raise BadInputSpec(f"cannot read input spec {spec!r}") from None
    if amps.size != dim:
        raise WrongLength(f"got {amps.size} amplitudes, expected {dim}")
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise BadInputSpec("input amplitudes are all zero")
    if abs(norm - 1) > 1e-6:
        warnings.warn(f"input norm {norm:.9g} renormalized to 1", stacklevel=2)
    return amps / norm


def parse_range(text: str) -> Axis:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"expected min:max:steps, got {text!r}")
    try:
        return Axis(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}: {exc}") from None


def _ratio(text: str | None, name: str, default: float | None = None) -> float | None:
    if text is None:
        return default
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"--{name} expects a number here, got {text!r}") from None
    if value < 0:
        raise UsageError(f"--{name} must be non-negative")
    return value


def resolve_pair(args) -> ReflectionPair:
    moduli = args.r0 is not None or args.rh is not None
    ratios = args.g is not None or args.ks is not None
    if sum([args.ideal, moduli, ratios]) > 1:
        raise UsageError("use only one of --ideal, --r0/--rh, --g/--ks")
    if args.ideal:
        return ideal_reflection_pair()
    if moduli:
        if args.r0 is None or args.rh is None:
            raise UsageError("--r0 and --rh must be given together")
        for name, m in (("r0", args.r0), ("rh", args.rh)):
            if not 0 <= m <= 1:
                raise UsageError(f"--{name} must lie in [0, 1]")
        return ReflectionPair.from_moduli(args.r0, args.rh)
    if args.g is None:
        raise UsageError("give --ideal, --r0/--rh, or --g (and optionally --ks)")
    return pair_from_ratios(_ratio(args.g, "g"), _ratio(args.ks, "ks", 0.0), args.gamma, args.detuning)


def resolve_dephasing(args) -> DephasingParams | None:
    if args.tau is None and args.t2 is None:
        return None
    if args.tau is None or args.t2 is None:
        raise UsageError("--tau and --t2 must be given together")
    try:
        return DephasingParams(args.tau, args.t2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def resolve_circuit(args):
    """(netlist, kind or None) from --gate / --netlist."""
    kind = GateKind.parse(args.gate) if args.gate else None
    if args.netlist:
        path = Path(args.netlist)
        if not path.is_file():
            raise UsageError(f"netlist file not found: {path}")
        netlist = parse_netlist(path.read_text(encoding="utf-8"))
        if kind is not None and netlist.spin_count != kind.spin_count:
            raise UsageError(f"netlist has {netlist.spin_count} spins, {kind.value} needs {kind.spin_count}")
        return netlist, kind
    if kind is None:
        raise UsageError("give --gate or --netlist")
    return builtin_netlist(kind), kind


# ----------------------------------------------------------------- printing


def fmt_complex(z: complex) -> str:
    re, im = z.real, z.imag
    if abs(im) < 1e-15:
        return fmt(re)
    if abs(re) < 1e-15:
        return f"{fmt(im)}j"
    return f"{fmt(re)}{'+' if im >= 0 else '-'}{fmt(abs(im))}j"


def format_spin_state(v: np.ndarray, n: int, eps: float = 1e-12) -> str:
    terms = []
    for i, a in enumerate(v):
        if abs(a) > eps:
            bits = "".join(map(str, index_to_spins(i, n)))
            terms.append(f"({fmt_complex(a)})|{bits}>")
    return " + ".join(terms) if terms else "0"


def format_hybrid(state: HybridState, eps: float = 1e-12) -> list[str]:
    lines = []
    n = state.spin_count
    for mode in state.modes:
        block = state.block(mode)
        for p, pol in enumerate("RL"):
            if np.any(np.abs(block[p]) > eps):
                lines.append(f"    {pol}{mode}: {format_spin_state(block[p], n, eps)}")
    return lines


def _out(args):
    if args.out in (None, "-"):
        return sys.stdout, False
    return open(args.out, "w", encoding="utf-8", newline=""), True


# ----------------------------------------------------------------- commands


def cmd_simulate(args) -> int:
    netlist, kind = resolve_circuit(args)
    pair = resolve_pair(args)
    dp = resolve_dephasing(args)
    spin_in = parse_input_spec(args.input, netlist.spin_count)
    dist, trace = execute_traced(netlist, pair, spin_in, args.convention)
    n = netlist.spin_count
    m0, mh = pair.moduli
    factor = dephasing_factor(dp) if dp else 1.0
    out, close = _out(args)
    try:
        print(f"r0 = {fmt_complex(pair.r0)}  rh = {fmt_complex(pair.rh)}  (|r0| = {fmt(m0)}, |rh| = {fmt(mh)})", file=out)
        print(f"input: {format_spin_state(spin_in, n)}", file=out)
        if args.trace:
            for name, st in trace.checkpoints:
                print(f"checkpoint {name}:", file=out)
                for line in format_hybrid(st):
                    print(line, file=out)
        expected = ideal_gate_matrix(kind) @ spin_in if kind else None
        for o in dist:
            tag = " (feed-forward applied)" if o.feedforward_applied else ""
            print(f"outcome {o.label}: p = {fmt(o.probability)}{tag}", file=out)
            print(f"  spins: {format_spin_state(o.state, n)}", file=out)
        print(f"eta_sim = {fmt(dist.efficiency)}", file=out)
        if kind is not None:
            if dist.efficiency > 0:
                f_sim = sum(o.probability * abs(np.vdot(expected, o.state)) ** 2 for o in dist) / dist.efficiency
                print(f"F_sim = {fmt(f_sim * factor)}", file=out)
            print(f"F_closed = {fmt(closed_form_fidelity(kind, m0, mh) * factor)}", file=out)
            print(f"eta_closed = {fmt(closed_form_efficiency(kind, m0, mh))}", file=out)
        if dp:
            print(f"fidelities include dephasing factor exp(-tau/T2) = {fmt(factor)}", file=out)
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    if not args.gate:
        raise UsageError("verify needs --gate (the ideal truth table to check against)")
    netlist, kind = resolve_circuit(args)
    if args.ideal or args.r0 is not None or args.rh is not None or args.g is not None or args.ks is not None:
        pair = resolve_pair(args)
    else:
        pair = ideal_reflection_pair()
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    report = verify_truth_table(
        kind, pair, args.tol, random_inputs=args.random, seed=args.seed,
        netlist=netlist, convention=args.convention,
    )
    print(report.format())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_sweep(args) -> int:
    try:
        kinds = tuple(GateKind.parse(k.strip()) for k in args.gates.split(",") if k.strip())
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not kinds:
        raise UsageError("--gates is empty")
    default = SweepGrid()
    grid = SweepGrid(
        g_axis=parse_range(args.g) if args.g else default.g_axis,
        ks_axis=parse_range(args.ks) if args.ks else default.ks_axis,
        gamma_ratio=args.gamma,
        detuning=args.detuning,
        kinds=kinds,
    )
    dp = resolve_dephasing(args)
    records_by_kind = []
    for kind in kinds:
        spin_in = parse_input_spec(args.input, kind.spin_count)
        records_by_kind += sweep(
            SweepGrid(grid.g_axis, grid.ks_axis, grid.gamma_ratio, grid.detuning, (kind,)),
            spin_in, dp, args.convention,
        )
    out, close = _out(args)
    try:
        write_csv(records_by_kind, out)
    finally:
        if close:
            out.close()
    if args.report:
        print(format_comparison(compare_fidelities(records_by_kind)), file=sys.stderr)
    return EXIT_OK


def cmd_parse(args) -> int:
    path = Path(args.path or args.netlist or "")
    if not path.is_file():
        raise UsageError(f"netlist file not found: {path}")
    netlist = parse_netlist(path.read_text(encoding="utf-8"))
    print(
        f"{path}: ok ({netlist.spin_count} spins, {len(netlist.steps)} elements, "
        f"{len(netlist.detectors)} detectors)"
    )
    return EXIT_OK


# ------------------------------------------------------------------- parser


def _add_circuit(p):
    p.add_argument("--gate", choices=[k.value for k in GateKind])
    p.add_argument("--netlist", help="path to a netlist file")


def _add_params(p, ranges: bool = False):
    what = "min:max:steps" if ranges else "ratio"
    p.add_argument("--g", help=f"g/(kappa+kappa_s) ({what})")
    p.add_argument("--ks", help=f"kappa_s/kappa ({what})")
    p.add_argument("--gamma", type=float, default=0.1, help="gamma/kappa (default 0.1)")
    p.add_argument("--detuning", type=float, default=0.0, help="(omega - omega_c)/kappa (default 0)")
    p.add_argument("--convention", choices=CONVENTIONS, default=SIGNED_MODULI)
    p.add_argument("--tau", type=float, help="gate time for the dephasing factor")
    p.add_argument("--t2", type=float, help="spin coherence time for the dephasing factor")
    p.add_argument("--out", help="output path (default stdout)")


def _add_pair(p):
    p.add_argument("--ideal", action="store_true", help="r0 = -1, rh = 1")
    p.add_argument("--r0", type=float, help="|r0| directly")
    p.add_argument("--rh", type=float, help="|rh| directly")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdgates", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one gate and print detector outcomes")
    _add_circuit(p)
    _add_params(p)
    _add_pair(p)
    p.add_argument("--input", default="uniform", help="bitstring, 'uniform' or comma-separated amplitudes")
    p.add_argument("--trace", action="store_true", help="print named intermediate states")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check the truth table")
    _add_circuit(p)
    _add_params(p)
    _add_pair(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--random", type=int, default=100, help="random superposition inputs (default 100)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="write fidelity/efficiency CSV over a parameter grid")
    p.add_argument("--gates", default="cnot,toffoli,fredkin")
    _add_params(p, ranges=True)
    p.add_argument("--input", default="uniform")
    p.add_argument("--report", action="store_true", help="print the closed-form cross-check to stderr")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("parse", help="parse and validate a netlist file")
    p.add_argument("path", nargs="?")
    p.add_argument("--netlist")
    p.set_defaults(func=cmd_parse)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, BadInputSpec) as exc:
        print(f"qdgates {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QDGatesError, ValueError, ArithmeticError) as exc:
        print(f"qdgates {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
