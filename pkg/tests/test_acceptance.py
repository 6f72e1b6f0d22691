"""Acceptance checks, one function per criterion.

Each check returns (passed, detail). Under pytest every criterion is a test
and a one-line PASS/FAIL summary is printed at the end of the session; run
this file directly to get the same lines without pytest.
"""
from __future__ import annotations

import csv
import io
import math
import sys
import time
from contextlib import redirect_stdout
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from goldens import FREDKIN_SIGNS, GOLDENS, TOFFOLI_SIGNS  # noqa: E402
from qdgates.cavity import (  # noqa: E402
    CavityParams,
    DephasingParams,
    ReflectionPair,
    dephasing_factor,
    ideal_reflection_pair,
    reflection_coefficient,
)
from qdgates.cli import main as cli_main  # noqa: E402
from qdgates.engine import apply_feedforward, execute, execute_traced  # noqa: E402
from qdgates.errors import (  # noqa: E402
    DanglingMode,
    DuplicateOutcomeLabel,
    NetlistSyntaxError,
    UncoveredOutcome,
    UnknownKeyword,
)
from qdgates.gates import (  # noqa: E402
    GateKind,
    builtin_netlist,
    ideal_gate_matrix,
    load_fixture,
    random_spin_state,
    uniform_input,
    verify_truth_table,
)
from qdgates.metrics import (  # noqa: E402
    SweepGrid,
    closed_form_efficiency,
    compare_fidelities,
    evaluate,
    fmt,
    pair_from_ratios,
    simulated_efficiency,
    simulated_fidelity,
)
from qdgates.netlist import parse_netlist, serialize_netlist  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
IDEAL = ideal_reflection_pair()
KINDS = list(GateKind)
RESULTS: dict[int, tuple[bool, str]] = {}


def _cli(*argv) -> tuple[int, str]:
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli_main(list(argv))
    return code, buf.getvalue()


@lru_cache(maxsize=1)
def default_sweep_csv() -> tuple[float, list[dict]]:
    """Full three-gate default grid through the CLI; (seconds, rows)."""
    start = time.perf_counter()
    code, text = _cli("sweep", "--gates", "cnot,toffoli,fredkin", "--g", "0:2.4:31", "--ks", "0:1.3:27",
                      "--gamma", "0.1")
    elapsed = time.perf_counter() - start
    assert code == 0
    return elapsed, list(csv.DictReader(io.StringIO(text)))


# ---------------------------------------------------------------- criteria


def criterion_1():
    worst = []
    for kind in KINDS:
        start = time.perf_counter()
        report = verify_truth_table(kind, IDEAL, 1e-10, random_inputs=100)
        dt = time.perf_counter() - start
        lowest = min([r.worst_overlap for r in report.rows] + [report.worst_random_overlap])
        worst.append((kind.value, report.passed and dt < 1.0, lowest, dt))
    ok = all(w[1] for w in worst)
    detail = "; ".join(f"{k}: min overlap {o:.12f} in {dt:.2f} s" for k, _, o, dt in worst)
    return ok, detail


def criterion_2():
    errs = []
    for (gate, cp), golden in GOLDENS.items():
        net = builtin_netlist(gate)
        a = uniform_input(net.spin_count)
        _, trace = execute_traced(net, IDEAL, a)
        diff = trace[cp] - golden(a)
        errs.append(max(np.abs(b).max() for b in diff.blocks().values()))
    worst = max(errs)
    return worst < 1e-12, f"{len(errs)} checkpoints, max amplitude error {worst:.2e} (Fredkin Xi2 vs corrected indices)"


def _apply_table(kind, signs, out_bits, per_amp):
    a = random_spin_state(3, np.random.default_rng(2024))
    target = ideal_gate_matrix(kind) @ a
    net = builtin_netlist(kind)
    port_labels = dict(zip(signs, ["D1+", "D1-", "D2+", "D2-"]))
    phases = {}
    for port, sgn in signs.items():
        v = np.zeros(8, dtype=complex)
        for i in range(8):
            v[int(out_bits(i), 2)] += (sgn[i] if per_amp else sgn[i // 2]) * a[i]
        got = apply_feedforward(v, net.feedforward[port_labels[port]])
        for phase in (1, -1):
            if np.max(np.abs(got - phase * target)) < 1e-15:
                phases[port_labels[port]] = phase
    return phases


def criterion_3():
    tof = _apply_table("toffoli", TOFFOLI_SIGNS, lambda i: format(i ^ 1 if i >= 6 else i, "03b"), False)
    fre = _apply_table(
        "fredkin", FREDKIN_SIGNS,
        lambda i: f"1{i & 1}{(i >> 1) & 1}" if i >= 4 else format(i, "03b"), True,
    )
    ok = len(tof) == 4 and len(fre) == 4
    signs = [f"fredkin {k} global phase {v:+d}" for k, v in fre.items() if v != 1]
    signs += [f"toffoli {k} global phase {v:+d}" for k, v in tof.items() if v != 1]
    detail = f"toffoli rows matched {len(tof)}/4, fredkin rows matched {len(fre)}/4"
    if signs:
        detail += " (" + ", ".join(signs) + ")"
    return ok, detail


def criterion_4():
    grid = np.linspace(0, 1, 5)
    worst = {}
    for kind in KINDS:
        w = 0.0
        for m0 in grid:
            for mh in grid:
                pair = ReflectionPair.from_moduli(m0, mh)
                w = max(w, abs(simulated_efficiency(kind, pair) - closed_form_efficiency(kind, m0, mh)))
        worst[kind.value] = w
    at_one = [abs(simulated_efficiency(k, IDEAL) - 1) < 1e-9 and abs(closed_form_efficiency(k, 1, 1) - 1) < 1e-15
              for k in KINDS]
    ok = all(w <= 1e-9 for w in worst.values()) and all(at_one)
    detail = "max |eta_sim - eta_closed|: " + ", ".join(f"{k} {w:.3g}" for k, w in worst.items())
    detail += f"; both 1 at (1,1): {all(at_one)}"
    return ok, detail


def criterion_5():
    checks = {
        "g=0,ks=0 -> -1": reflection_coefficient(CavityParams(g=0.0, kappa_s=0.0)) == -1,
        "g=0,ks=kappa -> 0": reflection_coefficient(CavityParams(g=0.0, kappa_s=1.0)) == 0,
        "g=100 -> |r-1|<0.01": abs(reflection_coefficient(CavityParams(g=100.0)) - 1) < 0.01,
    }
    biggest = 0.0
    for g in np.linspace(0, 2.4, 31):
        for ks in np.linspace(0, 1.3, 27):
            biggest = max(biggest, *pair_from_ratios(g, ks, 0.1).moduli)
    checks["|r| <= 1 on grid"] = biggest <= 1 + 1e-9
    ok = all(checks.values())
    return ok, ", ".join(f"{k}: {'ok' if v else 'no'}" for k, v in checks.items()) + f" (max |r| {biggest:.9g})"


def criterion_6():
    elapsed, rows = default_sweep_csv()
    g_vals = sorted({float(r["g_over_kappa_plus_kappas"]) for r in rows})
    k_vals = sorted({float(r["kappas_over_kappa"]) for r in rows})
    bad_g = bad_k = 0
    first_bad = None
    endpoint_ok = True
    for kind in KINDS:
        sub = [r for r in rows if r["gate"] == kind.value]
        for col in ("F_sim", "eta_sim"):
            a = np.array([float(r[col]) for r in sub]).reshape(len(g_vals), len(k_vals))
            dg = np.diff(a, axis=0) < -1e-12
            dk = np.diff(a, axis=1) > 1e-12
            bad_g += int(dg.sum())
            bad_k += int(dk.sum())
            if first_bad is None and dg.any():
                i, j = np.argwhere(dg)[0]
                first_bad = f"{kind.value} {col} drops from g={g_vals[i]:.2f} to {g_vals[i + 1]:.2f} at ks={k_vals[j]:.2f}"
        end = [r for r in sub if float(r["g_over_kappa_plus_kappas"]) == 2.4 and float(r["kappas_over_kappa"]) == 0]
        endpoint_ok &= float(end[0]["F_sim"]) > 0.98 and float(end[0]["eta_sim"]) > 0.98
    ok = bad_g == 0 and bad_k == 0 and endpoint_ok and elapsed < 30 and len(rows) == 3 * 31 * 27
    detail = (
        f"{len(rows)} rows in {elapsed:.1f} s; decreases along g: {bad_g}, increases along ks: {bad_k}; "
        f"endpoint F, eta > 0.98: {endpoint_ok}"
    )
    if first_bad:
        detail += f"; e.g. {first_bad}"
    return ok, detail


def criterion_7():
    _, rows = default_sweep_csv()
    has_columns = all(r["F_closed"] != "" and r["F_sim"] != "" for r in rows)
    ideal_rows = [evaluate(k, IDEAL) for k in KINDS]
    lines = {c.kind: c for c in compare_fidelities(ideal_rows)}
    c, t = lines[GateKind.CNOT], lines[GateKind.TOFFOLI]
    flagged = all(any("not 1" in f for f in lines[k].flags) for k in (GateKind.CNOT, GateKind.TOFFOLI))
    ok = (
        has_columns
        and abs(c.F_closed_ideal - 0.25) < 1e-12
        and abs(t.F_closed_ideal - 0.0625) < 1e-12
        and all(abs(x.F_sim_ideal - 1) < 1e-12 for x in lines.values())
        and flagged
    )
    return ok, (
        f"F_closed(1,1): cnot {c.F_closed_ideal:g}, toffoli {t.F_closed_ideal:g}, "
        f"fredkin {lines[GateKind.FREDKIN].F_closed_ideal:.9g}; F_sim(1,1) = 1; flagged: {flagged}"
    )


def criterion_8():
    factor = dephasing_factor(DephasingParams(1.0, 1.0))
    exact_err = abs(factor / math.exp(-1) - 1)
    # library values at full precision
    rel = []
    for kind in KINDS:
        rec = evaluate(kind, pair_from_ratios(0.7, 0.3), dephasing=DephasingParams(1.0, 1.0))
        rel.append(abs(rec.F_dephased / (rec.F_sim * math.exp(-1)) - 1))
    # CLI output must be the 9-digit rendering of the exactly scaled value
    code, text = _cli("sweep", "--gates", "cnot,toffoli,fredkin", "--g", "0:2.4:4", "--ks", "0:1.3:3",
                      "--tau", "1", "--t2", "1")
    rows = list(csv.DictReader(io.StringIO(text)))
    printed_ok = True
    for r in rows:
        pair = pair_from_ratios(float(r["g_over_kappa_plus_kappas"]), float(r["kappas_over_kappa"]), 0.1)
        f = simulated_fidelity(r["gate"], pair)
        printed_ok &= r["F_dephased"] == fmt(f * math.exp(-1))
    code2, plain = _cli("simulate", "--gate", "toffoli", "--g", "0.7", "--ks", "0.3")
    code3, deph = _cli("simulate", "--gate", "toffoli", "--g", "0.7", "--ks", "0.3", "--tau", "1", "--t2", "1")
    rec = evaluate("toffoli", pair_from_ratios(0.7, 0.3))
    sim_ok = f"F_sim = {fmt(rec.F_sim * math.exp(-1))}" in deph and f"F_sim = {fmt(rec.F_sim)}" in plain
    sim_ok &= f"F_closed = {fmt(rec.F_closed * math.exp(-1))}" in deph
    ok = code == code2 == code3 == 0 and exact_err < 1e-12 and max(rel) < 1e-12 and printed_ok and sim_ok
    return ok, (
        f"factor rel err {exact_err:.1e}, fidelity rel err {max(rel):.1e}; "
        f"CLI sweep ({len(rows)} rows) and simulate print the scaled values: {printed_ok and sim_ok}"
    )


MALFORMED = {
    "bad_syntax.net": NetlistSyntaxError,
    "bad_unknown_keyword.net": UnknownKeyword,
    "bad_duplicate_label.net": DuplicateOutcomeLabel,
    "bad_uncovered_outcome.net": UncoveredOutcome,
    "bad_dangling_mode.net": DanglingMode,
}


def criterion_9():
    roundtrip = all(parse_netlist(serialize_netlist(load_fixture(k))) == load_fixture(k) == builtin_netlist(k)
                    for k in KINDS)
    got = {}
    for name, err in MALFORMED.items():
        try:
            parse_netlist((FIXTURES / name).read_text())
            got[name] = None
        except Exception as exc:  # noqa: BLE001
            got[name] = type(exc)
    categories = all(got[n] is e for n, e in MALFORMED.items())
    ok = roundtrip and categories
    return ok, f"round-trip {roundtrip}; malformed: " + ", ".join(
        f"{n} -> {g.__name__ if g else 'no error'}" for n, g in got.items()
    )


def criterion_10():
    worst_sum = 0.0
    worst_phase = 0.0
    rng = np.random.default_rng(99)
    for kind in KINDS:
        net = builtin_netlist(kind)
        dim = 2 ** kind.spin_count
        inputs = [np.eye(dim)[i] for i in range(dim)] + [random_spin_state(kind.spin_count, rng) for _ in range(100)]
        for a in inputs:
            dist = execute(net, IDEAL, a)
            worst_sum = max(worst_sum, abs(dist.efficiency - 1))
            ref = dist.outcomes[0].state
            for o in dist.outcomes[1:]:
                worst_phase = max(worst_phase, abs(abs(np.vdot(ref, o.state)) - 1))
    ok = worst_sum < 1e-12 and worst_phase < 1e-10
    return ok, f"max |sum p - 1| {worst_sum:.1e}, max outcome mismatch {worst_phase:.1e}"


CRITERIA = {
    1: ("truth tables", criterion_1),
    2: ("intermediate-state goldens", criterion_2),
    3: ("feed-forward tables", criterion_3),
    4: ("efficiency closed forms", criterion_4),
    5: ("reflection coefficient", criterion_5),
    6: ("sweep shape", criterion_6),
    7: ("fidelity comparison report", criterion_7),
    8: ("dephasing factor", criterion_8),
    9: ("parser round-trip", criterion_9),
    10: ("determinism", criterion_10),
}


def summary_line(n: int) -> str:
    name, _ = CRITERIA[n]
    ok, detail = RESULTS[n]
    return f"criterion {n:2d} [{'PASS' if ok else 'FAIL'}] {name}: {detail}"


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(n):
    ok, detail = CRITERIA[n][1]()
    RESULTS[n] = (ok, detail)
    print(summary_line(n))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, (_, fn) in CRITERIA.items():
        RESULTS[n] = fn()
        failed += not RESULTS[n][0]
        print(summary_line(n), flush=True)
    sys.exit(1 if failed else 0)
