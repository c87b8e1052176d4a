"""Ground-segment construction and per-slot visibility.

Stations are placed either uniformly at random on land (rejection sampling
against a bundled 1-degree land mask) or at the most populous cities of a
population CSV.  The pair set contains every station pair within a maximum
great-circle separation.  A visibility snapshot lists, for one time slot,
every (satellite, pair) connection whose satellite is above the minimum
elevation at both stations simultaneously, together with its channel
weight.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import channel
from .orbital import GeodeticPoint, geodetic_to_ecef, great_circle_distance
from .rng import SplitMix64

UNBOUNDED = math.inf

MASK_ROWS = 180
MASK_COLS = 360


class LandMask:
    """1-degree land/water grid.

    The backing store is 180x360 bytes, row-major, one byte per cell with
    value 1 for land and 0 for water.  Row 0 covers latitudes [89, 90] deg
    north and column 0 covers longitudes [-180, -179) deg; a point is land
    iff its containing cell holds 1.
    """

    def __init__(self, data: bytes):
        if len(data) != MASK_ROWS * MASK_COLS:
            raise ValueError(f"mask must be {MASK_ROWS * MASK_COLS} bytes, "
                             f"got {len(data)}")
        bad = set(data) - {0, 1}
        if bad:
            raise ValueError(f"mask cells must be 0 or 1, found {sorted(bad)}")
        self._data = bytes(data)

    @classmethod
    def load(cls, path) -> "LandMask":
        return cls(Path(path).read_bytes())

    def save(self, path) -> None:
        Path(path).write_bytes(self._data)

    @property
    def land_cell_count(self) -> int:
        return sum(self._data)

    def is_land(self, latitude_deg: float, longitude_deg: float) -> bool:
        if not -90.0 <= latitude_deg <= 90.0:
            raise ValueError(f"latitude {latitude_deg} outside [-90, 90]")
        longitude_deg = (longitude_deg + 180.0) % 360.0 - 180.0
        row = min(int(math.floor(90.0 - latitude_deg)), MASK_ROWS - 1)
        col = min(int(math.floor(longitude_deg + 180.0)), MASK_COLS - 1)
        return self._data[row * MASK_COLS + col] == 1


def _check_receiver_count(value) -> None:
    if value is UNBOUNDED or value == math.inf:
        return
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ValueError(f"receiver count {value!r} must be a positive "
                         "integer or unbounded")


@dataclass(frozen=True)
class GroundStation:
    """A station with R_g receivers at a geodetic location."""

    station_id: str
    location: GeodeticPoint
    receivers: object = 1  # positive int or UNBOUNDED

    def __post_init__(self):
        _check_receiver_count(self.receivers)


@dataclass(frozen=True)
class StationPair:
    """An unordered station pair that wants L_j simultaneous connections."""

    pair_id: str
    a: str
    b: str
    max_connections: object = 1  # positive int or UNBOUNDED

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"pair {self.pair_id!r} repeats station {self.a!r}")
        if not self.a < self.b:
            raise ValueError(f"pair {self.pair_id!r} station ids must be "
                             "in ascending order")
        _check_receiver_count(self.max_connections)


@dataclass(frozen=True)
class VisibilitySnapshot:
    """Connections available in one slot.

    connections holds (satellite_id, pair_id, weight) triples with
    positive weights, sorted by (satellite_id, pair_id); fidelity maps the
    same (satellite_id, pair_id) keys to the estimated pair fidelity (None
    when the channel produced no coincidences); pair_is_day records the
    dark-click regime used for each pair (True when either endpoint was in
    daylight).
    """

    slot_index: int
    connections: tuple
    fidelity: dict
    pair_is_day: dict

    def weight_map(self) -> dict:
        return {(i, j): w for (i, j, w) in self.connections}


def place_random_on_land(n: int, seed: int, mask: LandMask,
                         receivers=1) -> list:
    """n stations uniformly distributed on land.

    Points are drawn uniformly on the sphere (longitude uniform, then
    sine of latitude uniform) and redrawn until the land mask reports
    land.  Station ids are gs00, gs01, ... in draw order.  Deterministic
    for a fixed seed.
    """
    if n < 1:
        raise ValueError("station count must be >= 1")
    if mask.land_cell_count == 0:
        raise ValueError("land mask contains no land cells")
    rng = SplitMix64(seed)
    width = max(2, len(str(n - 1)))
    stations = []
    for k in range(n):
        while True:
            longitude = -180.0 + 360.0 * rng.uniform()
            latitude = math.degrees(math.asin(2.0 * rng.uniform() - 1.0))
            if mask.is_land(latitude, longitude):
                break
        stations.append(GroundStation(
            station_id=f"gs{k:0{width}d}",
            location=GeodeticPoint(latitude, longitude),
            receivers=receivers,
        ))
    return stations


def load_population_csv(path) -> list:
    """Rows of a `name,lat_deg,lon_deg,population` CSV, in file order."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        required = {"name", "lat_deg", "lon_deg", "population"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ValueError(f"population CSV {path} must have columns "
                             f"{sorted(required)}")
        rows = []
        for record in reader:
            rows.append({
                "name": record["name"],
                "lat_deg": float(record["lat_deg"]),
                "lon_deg": float(record["lon_deg"]),
                "population": float(record["population"]),
            })
    names = [r["name"] for r in rows]
    duplicates = {name for name in names if names.count(name) > 1}
    if duplicates:
        raise ValueError(f"duplicate population rows: {sorted(duplicates)}")
    return rows


def place_population_centers(n: int, dataset_path, receivers=1) -> list:
    """Stations at the n most populous rows of the dataset.

    Ties on population break by name ascending; the station id is the
    row's name.
    """
    rows = load_population_csv(dataset_path)
    if n < 1:
        raise ValueError("station count must be >= 1")
    if n > len(rows):
        raise ValueError(f"requested {n} stations but the dataset has "
                         f"only {len(rows)} rows")
    ranked = sorted(rows, key=lambda r: (-r["population"], r["name"]))
    return [
        GroundStation(
            station_id=row["name"],
            location=GeodeticPoint(row["lat_deg"], row["lon_deg"]),
            receivers=receivers,
        )
        for row in ranked[:n]
    ]


def build_pair_set(stations: list, max_pair_distance_m: float,
                   default_l=1) -> list:
    """All station pairs within the distance limit.

    Each pair's connection capacity is min(default_l, R_a, R_b); the pair
    id joins the two station ids with '|', lower id first.
    """
    ids = [s.station_id for s in stations]
    if len(set(ids)) != len(ids):
        raise ValueError("station ids must be distinct")
    by_id = {s.station_id: s for s in stations}
    pairs = []
    for a_id in sorted(by_id):
        for b_id in sorted(by_id):
            if not a_id < b_id:
                continue
            a, b = by_id[a_id], by_id[b_id]
            if great_circle_distance(a.location, b.location) > max_pair_distance_m:
                continue
            cap = min(default_l, a.receivers, b.receivers)
            pairs.append(StationPair(
                pair_id=f"{a_id}|{b_id}",
                a=a_id,
                b=b_id,
                max_connections=cap if cap == UNBOUNDED else int(cap),
            ))
    return pairs


def station_geometry(stations: list, satellite_positions: dict):
    """Elevation (deg) and range (m) between every station and satellite.

    Returns (sorted satellite ids, elevation array, distance array), both
    arrays indexed [station, satellite] following the given station order
    and the sorted satellite order.
    """
    sat_ids = sorted(satellite_positions)
    st_xyz = np.array(
        [geodetic_to_ecef(s.location).as_tuple() for s in stations],
        dtype=float).reshape(len(stations), 3)
    sat_xyz = np.array(
        [satellite_positions[i].as_tuple() for i in sat_ids],
        dtype=float).reshape(len(sat_ids), 3)
    delta = sat_xyz[None, :, :] - st_xyz[:, None, :]
    distance = np.linalg.norm(delta, axis=2)
    up = st_xyz / np.linalg.norm(st_xyz, axis=1, keepdims=True)
    sin_elevation = np.einsum("psk,pk->ps", delta, up) / distance
    elevation = np.degrees(np.arcsin(np.clip(sin_elevation, -1.0, 1.0)))
    return sat_ids, elevation, distance


def visibility_snapshot(satellite_positions: dict, stations: list,
                        pairs: list, params: channel.ChannelParams,
                        slot_index: int, day_flags: dict) -> VisibilitySnapshot:
    """Connections available in one slot with their channel weights.

    satellite_positions maps satellite id -> EcefPosition; day_flags maps
    station id -> True when the station is in daylight.  A connection
    (i, j) is included iff satellite i is at or above the minimum
    elevation at both stations of pair j; its weight is the delivered
    ebit rate and its fidelity uses the day dark-click level when either
    endpoint is in daylight.
    """
    if not satellite_positions or not stations or not pairs:
        return VisibilitySnapshot(slot_index=slot_index, connections=(),
                                  fidelity={}, pair_is_day={})
    sat_ids, elevation, distance = station_geometry(stations, satellite_positions)
    station_index = {s.station_id: k for k, s in enumerate(stations)}
    visible = elevation >= params.min_elevation_deg

    connections = []
    fidelity = {}
    pair_is_day = {}
    for pair in sorted(pairs, key=lambda p: p.pair_id):
        ka, kb = station_index[pair.a], station_index[pair.b]
        both = np.flatnonzero(visible[ka] & visible[kb])
        is_day = bool(day_flags[pair.a] or day_flags[pair.b])
        pair_is_day[pair.pair_id] = is_day
        for s in both:
            # plain floats from here on; numpy scalars must not leak into
            # weights, objectives, or exported cells
            metrics = channel.link_metrics_from_geometry(
                float(elevation[ka, s]), float(distance[ka, s]),
                float(elevation[kb, s]), float(distance[kb, s]),
                params, is_day)
            if metrics is None or metrics.rate_ebits_s <= 0.0:
                continue
            connections.append((sat_ids[s], pair.pair_id, metrics.rate_ebits_s))
            fidelity[(sat_ids[s], pair.pair_id)] = metrics.fidelity
    connections.sort(key=lambda c: (c[0], c[1]))
    return VisibilitySnapshot(slot_index=slot_index,
                              connections=tuple(connections),
                              fidelity=fidelity,
                              pair_is_day=pair_is_day)
