"""Set the published fidelity and efficiency formulas against the simulator.

Prints the fidelity cross-check (printed and squared-numerator forms against
the hybrid-state overlap) and the efficiency residual on a grid of moduli.

    python3 scripts/compare_closed_forms.py
"""
import numpy as np

from qdgates.cavity import ReflectionPair
from qdgates.gates import GateKind
from qdgates.metrics import (
    closed_form_efficiency,
    compare_fidelities,
    evaluate,
    format_comparison,
    simulated_efficiency,
)


def main():
    grid = np.linspace(0, 1, 11)
    records = [evaluate(k, ReflectionPair.from_moduli(m0, mh)) for k in GateKind for m0 in grid for mh in grid]
    print(format_comparison(compare_fidelities(records)))
    print()
    print("efficiency closed forms vs simulated photon survival:")
    for kind in GateKind:
        diag = max(abs(simulated_efficiency(kind, ReflectionPair.from_moduli(m, m)) - closed_form_efficiency(kind, m, m))
                   for m in grid)
        full = max(abs(r.eta_sim - r.eta_closed) for r in records if r.kind is kind)
        print(f"  {kind.value:8s} max residual on |r0| = |rh|: {diag:.2e}, over the full grid: {full:.3g}")
    print()
    print("  m0     mh     eta_sim(cnot)  eta_closed(cnot)")
    for m0, mh in [(1.0, 0.951220), (1.0, 0.5), (0.5, 1.0), (0.0, 1.0)]:
        pair = ReflectionPair.from_moduli(m0, mh)
        print(f"  {m0:<6.3f} {mh:<6.3f} {simulated_efficiency('cnot', pair):<14.9f} {closed_form_efficiency('cnot', m0, mh):.9f}")


if __name__ == "__main__":
    main()
