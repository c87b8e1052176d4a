import math

import pytest

from qsspsim.channel import ChannelParams
from qsspsim.orbital import (
    EARTH_RADIUS_M,
    GeodeticPoint,
    elevation_angle,
    geodetic_to_ecef,
)
from qsspsim.rng import SplitMix64
from qsspsim.topology import (
    MASK_COLS,
    MASK_ROWS,
    UNBOUNDED,
    GroundStation,
    LandMask,
    StationPair,
    build_pair_set,
    load_population_csv,
    place_population_centers,
    place_random_on_land,
    station_geometry,
    visibility_snapshot,
)

DEFAULTS = ChannelParams()


def one_cell_mask(lat_deg, lon_deg):
    data = bytearray(MASK_ROWS * MASK_COLS)
    row = min(int(math.floor(90.0 - lat_deg)), MASK_ROWS - 1)
    col = min(int(math.floor(lon_deg + 180.0)), MASK_COLS - 1)
    data[row * MASK_COLS + col] = 1
    return LandMask(bytes(data))


def station(sid, lat, lon, receivers=1):
    return GroundStation(sid, GeodeticPoint(lat, lon), receivers)


def sat_at(lat, lon, altitude_m=550e3):
    return geodetic_to_ecef(GeodeticPoint(lat, lon, altitude_m))


# --- land mask ---------------------------------------------------------------

def test_mask_validates_shape_and_values():
    with pytest.raises(ValueError, match="bytes"):
        LandMask(b"\x01" * 100)
    with pytest.raises(ValueError, match="0 or 1"):
        LandMask(b"\x02" * (MASK_ROWS * MASK_COLS))


def test_mask_cell_lookup():
    mask = one_cell_mask(45.5, 10.5)
    assert mask.land_cell_count == 1
    assert mask.is_land(45.5, 10.5)
    assert mask.is_land(45.01, 10.99)  # same 1-degree cell
    assert not mask.is_land(45.5, 11.5)
    assert not mask.is_land(46.5, 10.5)


def test_mask_longitude_wraps_and_poles_clamp():
    mask = one_cell_mask(45.5, 10.5)
    assert mask.is_land(45.5, 10.5 + 360.0)
    assert mask.is_land(45.5, 10.5 - 360.0)
    polar = one_cell_mask(-90.0, 0.5)
    assert polar.is_land(-90.0, 0.5)  # bottom row is clamped, not out of range
    with pytest.raises(ValueError):
        mask.is_land(91.0, 0.0)


def test_mask_save_load_round_trip(tmp_path):
    mask = one_cell_mask(0.5, 0.5)
    path = tmp_path / "mask.bin"
    mask.save(path)
    loaded = LandMask.load(path)
    assert loaded.land_cell_count == 1
    assert loaded.is_land(0.5, 0.5)


def test_bundled_mask_is_plausible(bundled):
    mask = LandMask.load(bundled("land_mask_1deg.bin"))
    # roughly 29 percent of Earth is land; the 1-degree grid overweights
    # high latitudes so allow a generous band
    frac = mask.land_cell_count / (MASK_ROWS * MASK_COLS)
    assert 0.2 < frac < 0.5
    assert mask.is_land(51.5, -0.1)  # London
    assert mask.is_land(39.9, 116.4)  # Beijing
    assert mask.is_land(-25.0, 135.0)  # central Australia
    assert not mask.is_land(0.0, -150.0)  # equatorial Pacific
    assert not mask.is_land(45.0, -40.0)  # north Atlantic


# --- station placement -------------------------------------------------------

def test_random_placement_deterministic(bundled):
    mask = LandMask.load(bundled("land_mask_1deg.bin"))
    a = place_random_on_land(5, seed=7, mask=mask)
    b = place_random_on_land(5, seed=7, mask=mask)
    assert a == b
    assert [s.station_id for s in a] == ["gs00", "gs01", "gs02", "gs03", "gs04"]


def test_random_placement_lands_on_land(bundled):
    mask = LandMask.load(bundled("land_mask_1deg.bin"))
    for s in place_random_on_land(100, seed=3, mask=mask):
        assert mask.is_land(s.location.latitude_deg, s.location.longitude_deg)


def test_random_placement_scales_to_100(bundled):
    mask = LandMask.load(bundled("land_mask_1deg.bin"))
    stations = place_random_on_land(100, seed=1, mask=mask)
    assert len(stations) == 100
    assert len({s.station_id for s in stations}) == 100


def test_random_placement_rejects_bad_inputs(bundled):
    mask = LandMask.load(bundled("land_mask_1deg.bin"))
    with pytest.raises(ValueError):
        place_random_on_land(0, seed=1, mask=mask)
    water = LandMask(bytes(MASK_ROWS * MASK_COLS))
    with pytest.raises(ValueError, match="no land"):
        place_random_on_land(1, seed=1, mask=water)


def test_population_csv_loading(bundled, tmp_path):
    rows = load_population_csv(bundled("population_centers.csv"))
    assert len(rows) == 100
    assert {"name", "lat_deg", "lon_deg", "population"} <= set(rows[0])

    bad = tmp_path / "bad.csv"
    bad.write_text("name,lat_deg\nTokyo,35.7\n")
    with pytest.raises(ValueError, match="columns"):
        load_population_csv(bad)

    dup = tmp_path / "dup.csv"
    dup.write_text(
        "name,lat_deg,lon_deg,population\nA,1,2,10\nA,3,4,20\n"
    )
    with pytest.raises(ValueError, match="duplicate"):
        load_population_csv(dup)


def test_population_placement_order(bundled):
    top1 = place_population_centers(1, bundled("population_centers.csv"))
    assert top1[0].station_id == "Tokyo"

    top20 = place_population_centers(20, bundled("population_centers.csv"))
    rows = {r["name"]: r["population"]
            for r in load_population_csv(bundled("population_centers.csv"))}
    pops = [rows[s.station_id] for s in top20]
    assert pops == sorted(pops, reverse=True)

    everything = place_population_centers(100, bundled("population_centers.csv"))
    assert len(everything) == 100
    with pytest.raises(ValueError, match="only"):
        place_population_centers(101, bundled("population_centers.csv"))


# --- pair construction -------------------------------------------------------

def test_pairs_empty_beyond_distance_limit():
    far = [station("a", 0.0, 0.0), station("b", 0.0, 27.0)]  # about 3000 km
    assert build_pair_set(far, 2_250_000.0) == []


def test_pairs_complete_graph_when_close():
    close = [station(x, 0.0, k) for k, x in enumerate("abc")]
    pairs = build_pair_set(close, 2_250_000.0)
    assert [p.pair_id for p in pairs] == ["a|b", "a|c", "b|c"]


def test_pairs_single_within_reach():
    stations = [station("a", 0.0, 0.0), station("b", 0.0, 10.0)]  # ~1112 km
    pairs = build_pair_set(stations, 2_250_000.0)
    assert len(pairs) == 1
    assert (pairs[0].a, pairs[0].b) == ("a", "b")


def test_pair_capacity_is_min_of_l_and_receivers():
    stations = [station("a", 0.0, 0.0, receivers=2),
                station("b", 0.0, 1.0, receivers=3)]
    pairs = build_pair_set(stations, 2_250_000.0, default_l=5)
    assert pairs[0].max_connections == 2

    unbounded = [station("a", 0.0, 0.0, receivers=UNBOUNDED),
                 station("b", 0.0, 1.0, receivers=UNBOUNDED)]
    pairs = build_pair_set(unbounded, 2_250_000.0, default_l=UNBOUNDED)
    assert pairs[0].max_connections == UNBOUNDED


def test_duplicate_station_ids_rejected():
    with pytest.raises(ValueError, match="distinct"):
        build_pair_set([station("a", 0, 0), station("a", 1, 1)], 1e9)


def test_station_and_pair_validation():
    with pytest.raises(ValueError):
        station("a", 0, 0, receivers=0)
    with pytest.raises(ValueError, match="ascending"):
        StationPair("p", "b", "a")
    with pytest.raises(ValueError, match="repeats"):
        StationPair("p", "a", "a")
    GroundStation("ok", GeodeticPoint(0, 0), UNBOUNDED)


# --- geometry cross-check ----------------------------------------------------

def test_vectorized_geometry_matches_scalar_path():
    rng = SplitMix64(77)
    stations = [
        station(f"g{k}",
                math.degrees(math.asin(2 * rng.uniform() - 1)),
                -180 + 360 * rng.uniform())
        for k in range(6)
    ]
    sats = {
        f"s{k}": sat_at(
            math.degrees(math.asin(2 * rng.uniform() - 1)),
            -180 + 360 * rng.uniform(),
        )
        for k in range(5)
    }
    sat_ids, elevation, distance = station_geometry(stations, sats)
    for p, st in enumerate(stations):
        gs = geodetic_to_ecef(st.location)
        for s, sid in enumerate(sat_ids):
            sat = sats[sid]
            assert elevation[p, s] == pytest.approx(
                elevation_angle(gs, sat), abs=1e-9
            )
            want = math.dist(gs.as_tuple(), sat.as_tuple())
            assert distance[p, s] == pytest.approx(want, rel=1e-12)


# --- visibility snapshots ----------------------------------------------------

def close_pair(separation_deg=4.0):
    stations = [station("a", 0.0, -separation_deg / 2),
                station("b", 0.0, separation_deg / 2)]
    return stations, build_pair_set(stations, 2_250_000.0)


def night(stations):
    return {s.station_id: False for s in stations}


def test_snapshot_excludes_pair_when_one_arm_below_limit():
    stations, pairs = close_pair()
    # zenith over station a, far below the elevation limit at b
    far = {"s1": sat_at(0.0, -30.0)}
    snap = visibility_snapshot(far, stations, pairs, DEFAULTS, 0, night(stations))
    assert snap.connections == ()
    assert snap.pair_is_day == {"a|b": False}


def test_snapshot_empty_without_satellites():
    stations, pairs = close_pair()
    snap = visibility_snapshot({}, stations, pairs, DEFAULTS, 3, night(stations))
    assert snap.slot_index == 3
    assert snap.connections == ()
    assert snap.fidelity == {}


def test_snapshot_zenith_midpoint_connection():
    stations, pairs = close_pair()
    sats = {"s1": sat_at(0.0, 0.0)}
    snap = visibility_snapshot(sats, stations, pairs, DEFAULTS, 0, night(stations))
    assert len(snap.connections) == 1
    sat_id, pair_id, weight = snap.connections[0]
    assert (sat_id, pair_id) == ("s1", "a|b")
    assert weight > 0.0
    assert 0.0 < snap.fidelity[("s1", "a|b")] <= 1.0


def test_snapshot_day_flag_is_or_of_endpoints():
    stations, pairs = close_pair()
    sats = {"s1": sat_at(0.0, 0.0)}
    flags = {"a": True, "b": False}
    day = visibility_snapshot(sats, stations, pairs, DEFAULTS, 0, flags)
    assert day.pair_is_day == {"a|b": True}
    nocturnal = visibility_snapshot(sats, stations, pairs, DEFAULTS, 0,
                                    night(stations))
    # daytime dark clicks push fidelity down for the same geometry
    assert day.fidelity[("s1", "a|b")] < nocturnal.fidelity[("s1", "a|b")]
    # but the rate (the weight) is unchanged
    assert day.connections == nocturnal.connections


def test_snapshot_connections_shrink_as_elevation_limit_grows():
    rng = SplitMix64(13)
    stations = [station(f"g{k}", 5.0 * k - 10.0, 3.0 * k) for k in range(5)]
    pairs = build_pair_set(stations, 2_250_000.0)
    sats = {
        f"s{k}": sat_at(-15.0 + 7.0 * k + rng.uniform(), 2.0 * k)
        for k in range(8)
    }
    loose = visibility_snapshot(sats, stations, pairs,
                                ChannelParams(min_elevation_deg=20.0), 0,
                                night(stations))
    tight = visibility_snapshot(sats, stations, pairs,
                                ChannelParams(min_elevation_deg=40.0), 0,
                                night(stations))
    loose_set = {(i, j) for (i, j, _) in loose.connections}
    tight_set = {(i, j) for (i, j, _) in tight.connections}
    assert tight_set <= loose_set


def test_snapshot_connections_satisfy_elevation_at_both_stations():
    stations = [station(f"g{k}", 10.0 * k - 20.0, 5.0 * k) for k in range(5)]
    pairs = build_pair_set(stations, 2_250_000.0)
    rng = SplitMix64(14)
    sats = {
        f"s{k}": sat_at(-25.0 + 10.0 * k + rng.uniform(), 4.0 * k)
        for k in range(7)
    }
    snap = visibility_snapshot(sats, stations, pairs, DEFAULTS, 0, night(stations))
    assert snap.connections == tuple(sorted(snap.connections))
    by_id = {s.station_id: geodetic_to_ecef(s.location) for s in stations}
    assert snap.connections, "fixture must produce at least one connection"
    for (i, j, w) in snap.connections:
        assert w > 0.0
        a, b = j.split("|")
        assert elevation_angle(by_id[a], sats[i]) >= 20.0
        assert elevation_angle(by_id[b], sats[i]) >= 20.0
