import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nalab.errors import ConfigError, DomainError, PoleError
from nalab.fitting import fit_log_slope
from nalab.geometry import DEFAULT_SPACE, AnnularGrid
from nalab.weights import WeightSpec, materialize, weight_mass, weight_power

GRID = AnnularGrid(DEFAULT_SPACE, 80)
MIDS = GRID.midpoints
TWO_RHO = 2.0 * DEFAULT_SPACE.rho


def test_constant_is_one():
    w = materialize(WeightSpec.constant(), GRID)
    assert np.all(w.values == 1.0)


@given(gamma=st.floats(min_value=-1.0, max_value=1.0))
@settings(max_examples=40, deadline=None)
def test_exp_radial_closed_form(gamma):
    w = materialize(WeightSpec.exp_radial(gamma), GRID)
    exact = np.exp(TWO_RHO * gamma * MIDS)
    assert np.max(np.abs(w.values / exact - 1.0)) < 1e-14
    # profile and tabulated values agree where both are defined
    assert w.profile(MIDS[7]) == pytest.approx(w.values[7], rel=1e-13)


def test_exp_strong_is_exp_radial_at_p_minus_one():
    a = materialize(WeightSpec.exp_strong(2.0), GRID)
    b = materialize(WeightSpec.exp_radial(1.0), GRID)
    assert np.array_equal(a.values, b.values)


def test_spherical_u_growth():
    w_u = materialize(WeightSpec.spherical_u(2.0), GRID)
    fit = fit_log_slope(MIDS[39:], w_u.values[39:])
    assert fit.slope == pytest.approx(TWO_RHO, rel=1e-3)
    w_str = materialize(WeightSpec.exp_strong(2.0), GRID)
    band = w_u.values / w_str.values
    assert band.min() == pytest.approx(0.375000, abs=1e-5)
    assert band.max() == pytest.approx(0.517721, abs=1e-5)


def test_jacobi_v_decay_slopes():
    for g, target in ((-0.3, -0.6), (-0.45, -0.9)):
        w_v = materialize(WeightSpec.jacobi_v(g), GRID)
        fit = fit_log_slope(MIDS[39:], w_v.values[39:])
        assert fit.slope == pytest.approx(target, rel=3e-3)
        assert np.all(w_v.values > 0)


def test_jacobi_v_domain_gates():
    with pytest.raises(PoleError):
        materialize(WeightSpec.jacobi_v(-0.5), GRID)  # spectral pole at theta = -1
    for bad in (-0.6, 0.0, 0.2):
        with pytest.raises(DomainError):
            materialize(WeightSpec.jacobi_v(bad), GRID)


def test_decaying_annulus_masses():
    # w = e^(-1.5 d): annulus masses grow like e^(j/2) with a pinned band
    w = materialize(WeightSpec.exp_radial(-0.75), GRID)
    ratios = np.array(
        [weight_mass(w, [j]) / math.exp(0.5 * j) for j in range(1, 81)]
    )
    assert ratios.min() == pytest.approx(0.169001, abs=1e-5)
    assert ratios.max() == pytest.approx(0.915248, abs=1e-5)


def test_eta_product_bump():
    base = materialize(WeightSpec.constant(), GRID)
    w = materialize(WeightSpec.eta_product(WeightSpec.constant()), GRID)
    factor = w.values / base.values
    assert factor.min() > 1.0 and factor.max() < math.e
    assert np.max(np.abs(factor - np.exp(1.0 / (1.0 + MIDS)))) < 1e-15


def test_weight_power_round_trip():
    w = materialize(WeightSpec.exp_radial(1.0), GRID)
    half = weight_power(w, 0.5)
    assert np.max(np.abs(half.values**2 / w.values - 1.0)) < 1e-13
    with pytest.raises(DomainError):
        weight_power(w, -1.0)


def test_profile_matches_values_at_midpoints():
    specs = [
        WeightSpec.exp_radial(-0.75),
        WeightSpec.spherical_u(2.0),
        WeightSpec.jacobi_v(-0.3),
        WeightSpec.eta_product(WeightSpec.spherical_u(2.0)),
    ]
    for spec in specs:
        w = materialize(spec, GRID)
        for idx in list(range(0, 80, 7)) + [79]:
            rel = abs(w.profile(MIDS[idx]) - w.values[idx]) / abs(w.values[idx])
            assert rel < 1e-12, spec.variant


def test_json_round_trip():
    spec = WeightSpec.eta_product(WeightSpec.jacobi_v(-0.45))
    assert WeightSpec.from_json(spec.to_json()) == spec
    with pytest.raises(ConfigError):
        WeightSpec.from_json({"variant": "constant", "extra": 1})
    with pytest.raises(ConfigError):
        WeightSpec.custom(lambda t: 1.0).to_json()
