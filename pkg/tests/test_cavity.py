import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import reflection_eq
from qdgates.cavity import (
    FULL_COMPLEX,
    SIGNED_MODULI,
    CavityParams,
    DephasingParams,
    ReflectionPair,
    dephasing_factor,
    ideal_reflection_pair,
    reflection_coefficient,
    reflection_pair,
    scattering_operator,
)
from qdgates.errors import DegenerateDenominator
from qdgates.metrics import pair_from_ratios


def test_empty_cavity_on_resonance_is_minus_one():
    assert reflection_coefficient(CavityParams(g=0.0, kappa_s=0.0), coupled=False) == -1


def test_critical_leakage_gives_zero():
    assert abs(reflection_coefficient(CavityParams(g=0.0, kappa_s=1.0))) < 1e-15


def test_strong_coupling_reflects_with_plus_one():
    r = reflection_coefficient(CavityParams(g=100.0))
    assert abs(r - 1) < 0.01


@settings(max_examples=100, deadline=None)
@given(
    g=st.floats(0, 5), ks=st.floats(0, 3), gamma=st.floats(0.01, 2),
    dw=st.floats(-3, 3), dc=st.floats(-1, 1), dx=st.floats(-1, 1),
)
def test_matches_input_output_formula(g, ks, gamma, dw, dc, dx):
    p = CavityParams(g=g, kappa_s=ks, gamma=gamma, omega_c=dc, omega_x=dx)
    r = reflection_coefficient(p, omega=dw)
    assert r == pytest.approx(reflection_eq(dw, dc, dx, g, 1.0, ks, gamma), abs=1e-12)
    assert abs(r) <= 1 + 1e-9


def test_from_ratios():
    p = CavityParams.from_ratios(2.0, 0.5, 0.1)
    assert p.g == pytest.approx(3.0)
    assert p.kappa_s == 0.5


def test_invalid_params():
    with pytest.raises(ValueError):
        CavityParams(g=-1)
    with pytest.raises(ValueError):
        CavityParams(g=1, kappa=0)
    with pytest.raises(ValueError):
        DephasingParams(tau=1, t2=0)


def test_ideal_pair():
    p = ideal_reflection_pair()
    assert p.r0 == -1 and p.rh == 1
    assert ReflectionPair.from_moduli(1, 1) == p


@pytest.mark.parametrize("convention", [SIGNED_MODULI, FULL_COMPLEX])
def test_scattering_operator_layout(convention):
    pair = ReflectionPair(-0.5 + 0.1j, 0.9 - 0.2j)
    op = scattering_operator(pair, convention)
    d = np.diag(op)
    assert np.count_nonzero(op - np.diag(d)) == 0
    assert d[0] == d[3] and d[1] == d[2]
    if convention == SIGNED_MODULI:
        assert d[0] == -abs(pair.r0) and d[1] == abs(pair.rh)
    else:
        assert d[0] == pair.r0 and d[1] == pair.rh


def test_unknown_convention():
    with pytest.raises(ValueError):
        scattering_operator(ideal_reflection_pair(), "nope")


def test_dephasing_factor():
    assert dephasing_factor(DephasingParams(1.0, 1.0)) == pytest.approx(np.exp(-1), rel=1e-15)
    assert dephasing_factor(DephasingParams(0.0, 5.0)) == 1.0


def test_default_grid_bounded():
    for g in np.linspace(0, 2.4, 31):
        for ks in np.linspace(0, 1.3, 27):
            m0, mh = pair_from_ratios(g, ks, 0.1).moduli
            assert m0 <= 1 + 1e-9 and mh <= 1 + 1e-9


def test_detuning_enters():
    a = reflection_pair(CavityParams(g=1.0), omega=0.0)
    b = reflection_pair(CavityParams(g=1.0), omega=0.5)
    assert a != b


def test_degenerate_denominator():
    with pytest.raises(DegenerateDenominator):
        reflection_coefficient(CavityParams(g=0.0, gamma=0.0))
