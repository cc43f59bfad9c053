import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from doublewell_trap import CONSTANTS, DomainError, dimensionless_barrier, energy_scale
from doublewell_trap.units import ev_to_joule, joule_to_ev, time_scale

lengths = st.floats(min_value=1e-9, max_value=1e-1)


def test_codata_2018_values():
    assert CONSTANTS.hbar == 1.054571817e-34
    assert CONSTANTS.electron_mass == 9.1093837015e-31
    assert CONSTANTS.elementary_charge == 1.602176634e-19
    assert CONSTANTS.ev_per_joule * CONSTANTS.elementary_charge == pytest.approx(1.0, rel=1e-15)


def test_energy_scale_at_10_um():
    # hbar**2 / (2 m L**2) evaluated by hand from the CODATA constants
    expected = 1.054571817e-34**2 / (2 * 9.1093837015e-31 * 1e-10)
    assert energy_scale(10e-6) == pytest.approx(expected, rel=1e-14)
    assert energy_scale(10e-6) == pytest.approx(6.105e-29, rel=2e-4)
    assert joule_to_ev(energy_scale(10e-6)) == pytest.approx(3.811e-10, rel=5e-4)


def test_energy_scale_scaling_examples():
    assert energy_scale(5e-6) == pytest.approx(4 * energy_scale(10e-6), rel=1e-14)
    assert energy_scale(1e-6) == pytest.approx(100 * energy_scale(10e-6), rel=1e-14)


@given(lengths, st.floats(min_value=1e-3, max_value=1e3))
def test_energy_scale_inverse_square(L, alpha):
    assert energy_scale(alpha * L) == pytest.approx(energy_scale(L) / alpha**2, rel=1e-12)
    assert energy_scale(L * 1.001) < energy_scale(L)


@given(lengths)
def test_unit_barrier_is_one(L):
    assert dimensionless_barrier(energy_scale(L), L) == pytest.approx(1.0, rel=4e-16)


def test_flagship_dimensionless_barrier():
    eb = dimensionless_barrier(ev_to_joule(6e-8), 10e-6)
    assert eb == pytest.approx(157.48105435749386, rel=1e-12)
    assert abs(eb - 157.4) < 0.1
    assert dimensionless_barrier(ev_to_joule(12e-8), 10e-6) == pytest.approx(2 * eb, rel=1e-15)


def test_ev_conversions():
    assert ev_to_joule(1.0) == 1.602176634e-19
    assert ev_to_joule(0.0) == 0.0
    for x in (1e-8, 3.7, -2.5e4):
        assert joule_to_ev(ev_to_joule(x)) == pytest.approx(x, rel=1e-15)


@pytest.mark.parametrize("bad", [0.0, -1e-6, np.nan, np.inf])
def test_non_positive_length_rejected(bad):
    with pytest.raises(DomainError):
        energy_scale(bad)
    with pytest.raises(DomainError):
        dimensionless_barrier(1e-27, bad)


def test_non_positive_barrier_rejected():
    with pytest.raises(DomainError):
        dimensionless_barrier(0.0, 1e-5)


def test_time_scale():
    assert time_scale(1e-5) * energy_scale(1e-5) == pytest.approx(CONSTANTS.hbar, rel=1e-15)
