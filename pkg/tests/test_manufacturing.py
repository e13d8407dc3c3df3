import math

import numpy as np
import pytest

from config import ParameterRanges
from conftest import make_db, make_params
from data.manufacturing import (
    Chiplet,
    cfpa,
    cfpa_components,
    chiplet_mfg_cfp,
    die_area,
    die_yield,
    mfg_carbon,
    mfg_carbon_curve,
)
from data.techdb import FabProfile, lookup

COAL = FabProfile(c_mfg_src=700.0, c_pkg_src=700.0, c_des_src=700.0)


def test_die_area_divides_transistors_by_density() -> None:
    params = make_params(dt=100.0)

    assert die_area(Chiplet("cpu", "logic", 1000.0, "7nm"), params) == pytest.approx(10.0)
    assert die_area(Chiplet("cpu", "logic", 1000.0, "7nm", extra_area=0.5), params) == (
        pytest.approx(10.5)
    )
    assert die_area(Chiplet("cpu", "logic", 1000.0, "7nm"), make_params(dt=50.0)) == (
        pytest.approx(20.0)
    )


def test_die_yield_matches_negative_binomial_examples() -> None:
    assert die_yield(0.0, make_params(d0=0.1)) == 1.0
    assert math.isclose(die_yield(100.0, make_params(d0=0.1)), (1 + 0.1 / 3) ** -3, rel_tol=1e-12)
    assert die_yield(100.0, make_params(d0=0.1)) == pytest.approx(0.9063, abs=1e-4)
    assert die_yield(750.0, make_params(d0=0.2)) == pytest.approx(1.5**-3, rel=1e-12)


def test_die_yield_decreases_with_area() -> None:
    params = make_params(d0=0.2)
    yields = [die_yield(area, params) for area in (10.0, 100.0, 400.0, 800.0)]

    assert yields == sorted(yields, reverse=True)


def test_cfpa_examples() -> None:
    params = make_params(eta_eq=1.0, epa=2.0, c_gas=300.0, c_material=500.0)

    assert cfpa(0.9063, params, COAL) == pytest.approx(2427.5, abs=0.1)
    assert cfpa(1.0, params, COAL) == pytest.approx(2200.0)
    renewable = FabProfile(c_mfg_src=0.0, c_pkg_src=0.0, c_des_src=0.0)
    assert cfpa(0.9063, params, renewable) == pytest.approx(882.7, abs=0.1)


def test_cfpa_components_sum_to_cfpa() -> None:
    params = make_params()
    parts = cfpa_components(0.8, params, COAL)

    assert set(parts) == {"energy", "gas", "material"}
    assert sum(parts.values()) == pytest.approx(cfpa(0.8, params, COAL), rel=1e-12)
    assert parts["energy"] == pytest.approx(1400.0 / 0.8)


def test_chiplet_mfg_cfp_composes_area_yield_and_cfpa() -> None:
    params = make_params(d0=0.1, dt=100.0)
    db = make_db(params)

    result = chiplet_mfg_cfp(Chiplet("cpu", "logic", 10_000.0, "7nm"), db)

    assert result.area == pytest.approx(100.0)
    assert result.yield_ == pytest.approx(die_yield(100.0, params))
    assert result.cfpa == pytest.approx(2200.0 / result.yield_)
    assert result.carbon == pytest.approx(2427.5, abs=0.1)


def test_monolithic_ga102_die_is_tens_of_kilograms(default_db) -> None:
    result = mfg_carbon(628.0, lookup(default_db, "7nm"), default_db.fab)

    assert 3.0e4 < result.carbon < 8.0e4


def test_manufacturing_carbon_is_superlinear_in_area(default_db) -> None:
    params = lookup(default_db, "7nm")
    areas = np.linspace(100.0, 800.0, 15)

    carbon = mfg_carbon_curve(areas, params, default_db.fab)
    doubled = mfg_carbon_curve(2 * areas[areas <= 400.0], params, default_db.fab)

    assert np.all(doubled / carbon[areas <= 400.0] > 2.0)
    assert np.all(np.diff(carbon, n=2) > 0.0)


def test_carbon_curve_matches_scalar_model(default_db) -> None:
    params = lookup(default_db, "10nm")
    areas = [5.0, 50.0, 250.0, 600.0]

    curve = mfg_carbon_curve(areas, params, default_db.fab)

    for area, value in zip(areas, curve):
        assert value == pytest.approx(mfg_carbon(area, params, default_db.fab).carbon, rel=1e-12)


def test_older_node_gives_larger_die(default_db) -> None:
    chiplet = Chiplet("cpu", "logic", 1000.0, "7nm")

    older = die_area(chiplet, lookup(default_db, "14nm"))

    assert older > die_area(chiplet, lookup(default_db, "7nm"))


def _draw(rng, bounds) -> float:
    return float(rng.uniform(*bounds))


def _random_process(rng):
    params = make_params(
        d0=_draw(rng, ParameterRanges.D0),
        eta_eq=float(rng.uniform(0.5, 1.0)),
        epa=_draw(rng, ParameterRanges.EPA),
        c_gas=_draw(rng, ParameterRanges.C_GAS),
    )
    src = _draw(rng, ParameterRanges.CARBON_INTENSITY)
    return params, FabProfile(c_mfg_src=src, c_pkg_src=src, c_des_src=src)


def test_splitting_a_die_into_equal_dies_lowers_carbon() -> None:
    rng = np.random.default_rng(3)

    for _ in range(200):
        params, fab = _random_process(rng)
        area = float(rng.uniform(50.0, 800.0))
        whole = mfg_carbon(area, params, fab).carbon
        for n in (2, 4, 8):
            assert n * mfg_carbon(area / n, params, fab).carbon < whole


def test_cleaner_energy_lowers_cfpa_by_the_energy_term_only() -> None:
    rng = np.random.default_rng(5)

    for _ in range(100):
        params, fab = _random_process(rng)
        yield_ = float(rng.uniform(0.2, 1.0))
        k = float(rng.uniform(0.05, 0.95))

        gap = cfpa(yield_, params, fab.scaled(k)) - cfpa(yield_, params, fab)
        expected = (k - 1.0) * params.eta_eq * fab.c_mfg_src * params.epa / yield_

        assert gap == pytest.approx(expected, rel=1e-9)


def test_scaling_intensities_scales_energy_and_keeps_gas_and_material() -> None:
    params = make_params()
    base = cfpa_components(0.8, params, COAL)

    for k in (0.1, 0.5, 2.0):
        scaled = cfpa_components(0.8, params, COAL.scaled(k))

        assert scaled["energy"] == pytest.approx(k * base["energy"], rel=1e-12)
        assert scaled["gas"] == base["gas"]
        assert scaled["material"] == base["material"]


def test_carbon_is_cfpa_times_area() -> None:
    rng = np.random.default_rng(9)

    for _ in range(100):
        params, fab = _random_process(rng)
        area = float(rng.uniform(1.0, 800.0))

        result = mfg_carbon(area, params, fab)

        assert result.carbon == pytest.approx(result.cfpa * area / 100.0, rel=1e-12)
        assert result.cfpa == pytest.approx(cfpa(result.yield_, params, fab), rel=1e-12)
