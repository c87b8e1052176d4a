import math

import pytest

from qsspsim.channel import (
    ChannelParams,
    LinkGeometryError,
    LinkMetrics,
    arm_transmissivity,
    arm_transmissivity_from_geometry,
    atmospheric_transmissivity,
    connection_weight,
    free_space_transmissivity,
    link_metrics,
    pair_fidelity,
    pair_rate,
    photon_number_dist,
)
from qsspsim.orbital import EARTH_RADIUS_M, EcefPosition, GeodeticPoint, geodetic_to_ecef

DEFAULTS = ChannelParams()


# --- photon statistics -------------------------------------------------------

def test_vacuum_only_source():
    assert photon_number_dist(0.0, 0) == 1.0
    assert photon_number_dist(0.0, 1) == 0.0
    assert photon_number_dist(0.0, 5) == 0.0


def test_p0_at_default_pump_power():
    # direct evaluation of (n+1) Ns^n / (Ns+1)^(n+2) at n=0, Ns=0.078
    direct = 1.0 / 1.078**2
    assert photon_number_dist(0.078, 0) == pytest.approx(direct, abs=1e-15)
    assert photon_number_dist(0.078, 0) == pytest.approx(0.8605, abs=1e-4)


def test_distribution_sums_to_one():
    for pump in (0.01, 0.078, 0.3, 1.0):
        total = sum(photon_number_dist(pump, n) for n in range(201))
        assert total == pytest.approx(1.0, abs=1e-12)


def test_photon_dist_rejects_bad_inputs():
    with pytest.raises(ValueError):
        photon_number_dist(-0.1, 0)
    with pytest.raises(ValueError):
        photon_number_dist(0.1, -1)


# --- transmissivities --------------------------------------------------------

def test_free_space_clamps_near_field():
    assert free_space_transmissivity(1.0, DEFAULTS) == 1.0
    with pytest.raises(ValueError):
        free_space_transmissivity(0.0, DEFAULTS)


def test_free_space_at_1000_km():
    # (pi * 0.1 * 1.0 / (737e-9 * 1e6))^2
    expected = (math.pi * 0.1 * 1.0 / (737e-9 * 1e6)) ** 2
    got = free_space_transmissivity(1e6, DEFAULTS)
    assert got == pytest.approx(expected, rel=1e-15)
    assert got == pytest.approx(0.1817, abs=1e-4)


def test_free_space_inverse_square():
    base = free_space_transmissivity(1e6, DEFAULTS)
    assert free_space_transmissivity(2e6, DEFAULTS) == pytest.approx(
        base / 4.0, rel=1e-12
    )


def test_atmospheric_zenith_and_airmass():
    assert atmospheric_transmissivity(90.0, DEFAULTS) == pytest.approx(0.5, rel=1e-12)
    # 1/sin(30 deg) = 2 air masses
    assert atmospheric_transmissivity(30.0, DEFAULTS) == pytest.approx(0.25, rel=1e-12)


def test_atmospheric_below_limit_raises():
    with pytest.raises(LinkGeometryError):
        atmospheric_transmissivity(19.0, DEFAULTS)


def test_arm_transmissivity_composition_identity():
    # perfect devices, clamped free-space coupling: only the zenith
    # atmosphere term remains
    params = ChannelParams(eta_satellite=1.0, eta_ground=1.0)
    gs = EcefPosition(EARTH_RADIUS_M, 0.0, 0.0)
    sat = EcefPosition(EARTH_RADIUS_M + 100.0, 0.0, 0.0)
    assert arm_transmissivity(sat, gs, params) == pytest.approx(0.5, rel=1e-12)


def test_arm_transmissivity_default_zenith_550km():
    eta = arm_transmissivity_from_geometry(90.0, 550e3, DEFAULTS)
    fs = free_space_transmissivity(550e3, DEFAULTS)
    assert eta == pytest.approx(0.707 * 0.707 * fs * 0.5, rel=1e-12)
    assert eta == pytest.approx(0.25 * fs, rel=2e-3)


def test_arm_transmissivity_below_horizon_raises():
    gs = EcefPosition(EARTH_RADIUS_M, 0.0, 0.0)
    sat = EcefPosition(EARTH_RADIUS_M, 2_000_000.0, 0.0)  # elevation 0
    with pytest.raises(LinkGeometryError):
        arm_transmissivity(sat, gs, DEFAULTS)


# --- rate --------------------------------------------------------------------

def test_rate_zero_with_broken_arm():
    assert pair_rate(0.0, 0.9, DEFAULTS) == 0.0


def test_rate_perfect_arms():
    # 1e9 * p(1; 0.078) = 1e9 * 2 * 0.078 / 1.078^3
    expected = 1e9 * 2.0 * 0.078 / 1.078**3
    got = pair_rate(1.0, 1.0, DEFAULTS)
    assert got == pytest.approx(expected, rel=1e-15)
    assert got == pytest.approx(1.245e8, rel=1e-3)


def test_rate_monotone_in_each_arm():
    etas = [0.1, 0.3, 0.5, 0.9]
    rates = [pair_rate(e, 0.4, DEFAULTS) for e in etas]
    assert all(a < b for a, b in zip(rates, rates[1:]))
    rates = [pair_rate(0.4, e, DEFAULTS) for e in etas]
    assert all(a < b for a, b in zip(rates, rates[1:]))


# --- fidelity ----------------------------------------------------------------

def test_fidelity_noise_free_limit():
    # with no dark clicks the only noise is double-pair emission, which
    # vanishes linearly in pump power
    prev = 0.0
    for pump in (1e-2, 1e-4, 1e-6):
        f = pair_fidelity(1.0, 1.0, 0.0, ChannelParams(pump_power=pump))
        assert f > prev
        prev = f
    assert prev > 1.0 - 1e-5


def test_fidelity_pure_noise_floor():
    assert pair_fidelity(0.0, 0.0, 1e-3, DEFAULTS) == pytest.approx(0.25, rel=1e-12)


def test_fidelity_none_when_no_coincidences():
    assert pair_fidelity(0.0, 0.0, 0.0, DEFAULTS) is None


def test_fidelity_day_below_night():
    for eta in (1e-3, 1e-2, 0.1):
        day = pair_fidelity(eta, eta, DEFAULTS.dark_click_day, DEFAULTS)
        night = pair_fidelity(eta, eta, DEFAULTS.dark_click_night, DEFAULTS)
        assert day < night


def test_fidelity_decreases_with_pump_power_without_dark_clicks():
    pumps = [0.01, 0.078, 0.2, 0.5]
    fids = [
        pair_fidelity(0.05, 0.05, 0.0, ChannelParams(pump_power=p)) for p in pumps
    ]
    assert all(a > b for a, b in zip(fids, fids[1:]))


def test_fidelity_validates_inputs():
    with pytest.raises(ValueError):
        pair_fidelity(1.5, 0.5, 0.0, DEFAULTS)
    with pytest.raises(ValueError):
        pair_fidelity(0.5, 0.5, -0.1, DEFAULTS)


# --- end-to-end connection weight -------------------------------------------

def midpoint_zenith_geometry(half_separation_deg=2.0, altitude_m=550e3):
    gs_a = geodetic_to_ecef(GeodeticPoint(0.0, -half_separation_deg))
    gs_b = geodetic_to_ecef(GeodeticPoint(0.0, half_separation_deg))
    sat = geodetic_to_ecef(GeodeticPoint(0.0, 0.0, altitude_m))
    return sat, gs_a, gs_b


def test_weight_zero_when_one_arm_out_of_range():
    gs_a = geodetic_to_ecef(GeodeticPoint(0.0, 0.0))
    gs_b = geodetic_to_ecef(GeodeticPoint(0.0, 40.0))  # far over the horizon
    sat = geodetic_to_ecef(GeodeticPoint(0.0, 0.0, 550e3))
    rate, fid = connection_weight(sat, gs_a, gs_b, DEFAULTS, is_day=False)
    assert rate == 0.0
    assert fid is None


def test_weight_symmetric_in_station_order():
    sat, gs_a, gs_b = midpoint_zenith_geometry()
    lhs = connection_weight(sat, gs_a, gs_b, DEFAULTS, is_day=True)
    rhs = connection_weight(sat, gs_b, gs_a, DEFAULTS, is_day=True)
    assert lhs == rhs


def test_weight_composes_from_arm_transmissivities():
    sat, gs_a, gs_b = midpoint_zenith_geometry()
    metrics = link_metrics(sat, gs_a, gs_b, DEFAULTS, is_day=False)
    assert metrics.transmissivity_1 == pytest.approx(
        metrics.transmissivity_2, rel=1e-9
    )
    assert metrics.rate_ebits_s == pytest.approx(
        pair_rate(metrics.transmissivity_1, metrics.transmissivity_2, DEFAULTS),
        rel=1e-12,
    )
    rate, fid = connection_weight(sat, gs_a, gs_b, DEFAULTS, is_day=False)
    assert rate == metrics.rate_ebits_s
    assert fid == metrics.fidelity
    assert 0.0 < fid <= 1.0


# --- parameter plumbing ------------------------------------------------------

def test_params_validation():
    with pytest.raises(ValueError):
        ChannelParams(eta_satellite=1.2)
    with pytest.raises(ValueError):
        ChannelParams(wavelength_m=-1.0)
    with pytest.raises(ValueError):
        ChannelParams(pump_power=-0.01)
    with pytest.raises(ValueError):
        ChannelParams(min_elevation_deg=90.0)


def test_params_dark_click_switch():
    assert DEFAULTS.dark_click(True) == 3e-3
    assert DEFAULTS.dark_click(False) == 3e-7


def test_params_json_round_trip():
    params = ChannelParams(pump_power=0.1, min_elevation_deg=15.0)
    assert ChannelParams.from_json_dict(params.to_json_dict()) == params


def test_params_json_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        ChannelParams.from_json_dict({"pump": 0.1})


def test_link_metrics_validation():
    with pytest.raises(ValueError):
        LinkMetrics(1.2, 0.5, 1.0, 0.9)
    with pytest.raises(ValueError):
        LinkMetrics(0.5, 0.5, -1.0, 0.9)
    with pytest.raises(ValueError):
        LinkMetrics(0.5, 0.5, 1.0, 1.1)
    LinkMetrics(0.5, 0.5, 1.0, None)  # fidelity may be undefined
