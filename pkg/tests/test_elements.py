import numpy as np
import pytest

from qdgates.cavity import ReflectionPair, ideal_reflection_pair
from qdgates.elements import (
    BS,
    HWP,
    PBS,
    PMPBS,
    SUB_UNITARY,
    UNITARY,
    Cavity,
    SpinH,
    SpinZ,
    Switch,
    WPMirror,
    apply_element,
    check_routing,
    element_norm_class,
)
from qdgates.state import BasisKet, make_state, product_state

S = 1 / np.sqrt(2)


def photon(pol, mode="a", spins=(0,)):
    return make_state(len(spins), [(BasisKet(pol, mode, spins), 1.0)])


def test_pbs_routes_by_polarization():
    e = PBS("a", "t", "r")
    assert apply_element(photon("R"), e).amplitude("R", "t", (0,)) == 1
    assert apply_element(photon("L"), e).amplitude("L", "r", (0,)) == 1


def test_pmpbs_routes_diagonal_basis():
    e = PMPBS("a", "p", "m")
    plus = make_state(1, [(BasisKet("R", "a", (0,)), S), (BasisKet("L", "a", (0,)), S)])
    out = apply_element(plus, e)
    assert out.mode_norm2("p") == pytest.approx(1)
    assert out.mode_norm2("m") == pytest.approx(0)
    # |+> keeps its polarization after routing
    assert out.amplitude("L", "p", (0,)) == pytest.approx(S)


@pytest.mark.parametrize("cls", [HWP, WPMirror])
def test_hadamard_plates(cls):
    out = apply_element(photon("L"), cls("a"))
    assert out.amplitude("R", "a", (0,)) == pytest.approx(S)
    assert out.amplitude("L", "a", (0,)) == pytest.approx(-S)


def test_beam_splitter_signs():
    e = BS("a", "b", "c", "d")
    out_a = apply_element(photon("R", "a"), e)
    out_b = apply_element(photon("R", "b"), e)
    assert out_a.amplitude("R", "c", (0,)) == pytest.approx(S)
    assert out_a.amplitude("R", "d", (0,)) == pytest.approx(S)
    assert out_b.amplitude("R", "c", (0,)) == pytest.approx(S)
    assert out_b.amplitude("R", "d", (0,)) == pytest.approx(-S)


def test_spin_elements():
    s = photon("R", spins=(1,))
    assert apply_element(s, SpinZ(0, -1)).amplitude("R", "a", (1,)) == 1
    assert apply_element(s, SpinH(0)).amplitude("R", "a", (1,)) == pytest.approx(-S)


def test_cavity_ideal_phases():
    # L↑ and R↓ couple (+1); R↑ and L↓ see the empty cavity (-1)
    cases = {("R", 0): -1, ("L", 0): 1, ("R", 1): 1, ("L", 1): -1}
    for (pol, spin), phase in cases.items():
        out = apply_element(photon(pol, spins=(spin,)), Cavity(0, "a"), ideal_reflection_pair())
        assert out.amplitude(pol, "a", (spin,)) == pytest.approx(phase)


def test_cavity_loss_and_norm_class():
    pair = ReflectionPair.from_moduli(0.5, 0.8)
    out = apply_element(photon("L", spins=(0,)), Cavity(0, "a"), pair)
    assert out.norm2() == pytest.approx(0.64)
    assert element_norm_class(Cavity(0, "a"), pair) == SUB_UNITARY
    assert element_norm_class(Cavity(0, "a")) == UNITARY
    assert element_norm_class(HWP("a"), pair) == UNITARY


def test_switch_moves_both_polarizations():
    s = product_state("a", [S, S], [1, 0])
    out = apply_element(s, Switch("a", "b"))
    assert out.mode_norm2("b") == pytest.approx(1)
    assert out.mode_norm2("a") == 0


def test_missing_mode_is_zero():
    out = apply_element(photon("R", "a"), PBS("zz", "t", "r"))
    assert out.norm2() == pytest.approx(1)
    assert out.mode_norm2("t") == 0


def test_routing_needs_distinct_modes():
    with pytest.raises(ValueError):
        check_routing(PBS("a", "a", "b"))
    with pytest.raises(ValueError):
        SpinZ(0, 2)
