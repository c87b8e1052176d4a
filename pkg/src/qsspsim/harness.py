"""Time-slotted scenario runner and metrics exporter.

A scenario is one constellation (TLE file, generated Walker shell, or
precomputed ephemeris CSV), one ground-station placement, a time grid, a
channel parameterization, and one solver.  Each slot is solved
independently: propagate the constellation, classify day/night per
station, build the visibility snapshot, assemble the scheduling instance,
solve it, and record the slot's metrics.  Longevity and the aggregate
summary are folded afterwards from the ordered per-slot results, and
everything exports to deterministic CSV files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from . import channel, orbital, scheduler, topology

UNBOUNDED = math.inf

DAYLIGHT_SUN_ELEVATION_DEG = -6.0  # civil twilight

SOLVER_NAMES = ("random", "local_greedy", "global_greedy", "greedy_backoff",
                "exact")


class ConfigError(ValueError):
    """Raised when a scenario configuration cannot be parsed or validated."""


def bundled_data_path(name: str) -> Path:
    """Path of a data file shipped inside the package."""
    return Path(str(resources.files("qsspsim").joinpath("data", name)))


@dataclass(frozen=True)
class WalkerSpec:
    planes: int
    sats_per_plane: int
    inclination_deg: float
    altitude_m: float
    phasing: int = 0


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed scenario description.

    Exactly one of tle_path / walker / ephemeris_path selects the
    constellation, and exactly one of placement_seed / population_path
    selects the station placement.  station_receivers, default_l, and
    satellite_capacity apply uniformly (math.inf for unbounded).
    """

    time_grid: orbital.TimeGrid
    solver: str
    station_count: int
    tle_path: str | None = None
    walker: WalkerSpec | None = None
    ephemeris_path: str | None = None
    placement_seed: int | None = None
    population_path: str | None = None
    station_receivers: object = 1
    default_l: object = 1
    satellite_capacity: int = 1
    max_pair_distance_m: float = 2_250_000.0
    land_mask_path: str | None = None
    pair_allowlist: tuple | None = None
    channel_params: channel.ChannelParams = field(
        default_factory=channel.ChannelParams)
    solver_seed: int = 0
    output_dir: str | None = None

    def __post_init__(self):
        sources = [s for s in (self.tle_path, self.walker, self.ephemeris_path)
                   if s is not None]
        if len(sources) != 1:
            raise ConfigError("exactly one constellation source required "
                              "(tle_path, walker, or ephemeris_path)")
        placements = [p for p in (self.placement_seed, self.population_path)
                      if p is not None]
        if len(placements) != 1:
            raise ConfigError("exactly one placement required "
                              "(random_on_land seed or population_centers path)")
        if self.solver not in SOLVER_NAMES:
            raise ConfigError(f"unknown solver {self.solver!r}; "
                              f"choose from {', '.join(SOLVER_NAMES)}")
        if self.station_count < 1:
            raise ConfigError("station_count must be >= 1")
        if (not isinstance(self.satellite_capacity, int)
                or self.satellite_capacity < 0):
            raise ConfigError("satellite_capacity must be a nonnegative "
                              "integer")


def parse_start_utc(value) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        try:
            stamp = datetime.fromisoformat(value.replace("Z", "+00:00"))
        except ValueError as exc:
            raise ConfigError(f"unparsable start time {value!r}") from exc
        if stamp.tzinfo is None:
            stamp = stamp.replace(tzinfo=timezone.utc)
        return stamp.timestamp()
    raise ConfigError(f"start time {value!r} must be an ISO-8601 string "
                      "or unix seconds")


def _parse_capacity(value, label: str):
    if value == "unbounded":
        return UNBOUNDED
    if isinstance(value, int) and not isinstance(value, bool) and value >= 1:
        return value
    raise ConfigError(f"{label} must be a positive integer or \"unbounded\", "
                      f"got {value!r}")


def parse_config(data: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from a decoded JSON document."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {"constellation", "placement", "station_count",
             "station_receivers", "default_l", "satellite_capacity",
             "max_pair_distance_m", "land_mask_path", "pair_allowlist",
             "time_grid", "channel", "solver", "solver_seed", "output_dir"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    for key in ("constellation", "placement", "station_count", "time_grid",
                "solver"):
        if key not in data:
            raise ConfigError(f"config key {key!r} is required")

    constellation = data["constellation"]
    tle_path = walker = ephemeris_path = None
    if not isinstance(constellation, dict) or len(constellation) != 1:
        raise ConfigError("constellation must be an object with exactly one "
                          "of tle_path, walker, ephemeris_path")
    kind, value = next(iter(constellation.items()))
    if kind == "tle_path":
        tle_path = value
    elif kind == "ephemeris_path":
        ephemeris_path = value
    elif kind == "walker":
        try:
            walker = WalkerSpec(**value)
        except TypeError as exc:
            raise ConfigError(f"bad walker spec: {exc}") from exc
    else:
        raise ConfigError(f"unknown constellation source {kind!r}")

    placement = data["placement"]
    placement_seed = population_path = None
    if not isinstance(placement, dict) or len(placement) != 1:
        raise ConfigError("placement must be an object with exactly one of "
                          "random_on_land, population_centers")
    kind, value = next(iter(placement.items()))
    if kind == "random_on_land":
        if not isinstance(value, dict) or "seed" not in value:
            raise ConfigError("random_on_land placement needs a seed")
        placement_seed = int(value["seed"])
    elif kind == "population_centers":
        if not isinstance(value, dict) or "path" not in value:
            raise ConfigError("population_centers placement needs a path")
        population_path = value["path"]
    else:
        raise ConfigError(f"unknown placement {kind!r}")

    grid_data = data["time_grid"]
    try:
        grid = orbital.TimeGrid(
            start=parse_start_utc(grid_data["start_utc"]),
            slot_seconds=grid_data.get("slot_seconds", 60),
            slot_count=grid_data.get("slot_count", 1440),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad time_grid: {exc}") from exc

    try:
        params = channel.ChannelParams.from_json_dict(data.get("channel", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad channel parameters: {exc}") from exc

    allowlist = data.get("pair_allowlist")
    if allowlist is not None:
        allowlist = tuple(str(p) for p in allowlist)

    try:
        return ScenarioConfig(
            time_grid=grid,
            solver=data["solver"],
            station_count=data["station_count"],
            tle_path=tle_path,
            walker=walker,
            ephemeris_path=ephemeris_path,
            placement_seed=placement_seed,
            population_path=population_path,
            station_receivers=_parse_capacity(
                data.get("station_receivers", 1), "station_receivers"),
            default_l=_parse_capacity(data.get("default_l", 1), "default_l"),
            satellite_capacity=data.get("satellite_capacity", 1),
            max_pair_distance_m=float(
                data.get("max_pair_distance_m", 2_250_000.0)),
            land_mask_path=data.get("land_mask_path"),
            pair_allowlist=allowlist,
            channel_params=params,
            solver_seed=int(data.get("solver_seed", 0)),
            output_dir=data.get("output_dir"),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data)


def _ephemeris_key(t: float) -> float:
    return round(float(t), 6)


def load_ephemeris_csv(path) -> dict:
    """timestamp -> {satellite_id -> EcefPosition} from an ephemeris CSV.

    The file must carry the header satellite_id,unix_time_s,x_m,y_m,z_m;
    timestamps are matched to slot times after rounding to microseconds.
    """
    table: dict = {}
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        required = {"satellite_id", "unix_time_s", "x_m", "y_m", "z_m"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ValueError(f"ephemeris CSV {path} must have columns "
                             f"{sorted(required)}")
        for row in reader:
            key = _ephemeris_key(float(row["unix_time_s"]))
            table.setdefault(key, {})[row["satellite_id"]] = (
                orbital.EcefPosition(float(row["x_m"]), float(row["y_m"]),
                                     float(row["z_m"])))
    return table


@dataclass(frozen=True)
class SlotResult:
    """Everything recorded about one solved slot.

    connection_details maps each assigned (satellite, pair) to
    (weight, fidelity, is_day); connections_per_station counts assigned
    units touching each station.
    """

    slot_index: int
    unix_time_s: float
    assignment: scheduler.Assignment
    aggregate_rate_ebits_s: float
    mean_fidelity: float | None
    num_connections: int
    max_sats_per_pair: int
    max_pairs_per_sat: int
    connection_details: dict
    connections_per_station: dict


@dataclass(frozen=True)
class ScenarioSummary:
    mean_aggregate_rate_ebits_s: float
    fidelity_day: float | None
    fidelity_night: float | None
    per_station_mean_connections: dict
    max_sats_per_pair: tuple
    max_pairs_per_sat: tuple


@dataclass(frozen=True)
class MetricsSeries:
    """Ordered slot results plus the folded scenario-level metrics."""

    solver: str
    slots: tuple
    stations: tuple
    longevity: dict
    summary: ScenarioSummary | None


def longevity_histogram(assignments) -> dict:
    """Episode-length histogram of connection presence.

    assignments is the ordered per-slot list of Assignment objects.  An
    episode is a maximal run of consecutive slots in which the same
    (satellite, pair) connection has x >= 1; the result maps episode
    length to the number of episodes of that length.
    """
    histogram: dict = {}
    active: dict = {}
    for assignment in assignments:
        present = {conn for conn, units in assignment.x.items() if units >= 1}
        for conn in list(active):
            if conn not in present:
                length = active.pop(conn)
                histogram[length] = histogram.get(length, 0) + 1
        for conn in present:
            active[conn] = active.get(conn, 0) + 1
    for length in active.values():
        histogram[length] = histogram.get(length, 0) + 1
    return histogram


def aggregate_metrics(slots) -> ScenarioSummary:
    """Fold ordered SlotResults into scenario-level metrics.

    Mean fidelities weight each assigned connection by its delivered rate
    (x times weight) and split by the connection's day flag.
    """
    slots = list(slots)
    if not slots:
        raise ValueError("cannot aggregate an empty slot series")
    mean_rate = sum(s.aggregate_rate_ebits_s for s in slots) / len(slots)

    mass = {True: 0.0, False: 0.0}
    weighted = {True: 0.0, False: 0.0}
    for s in slots:
        for conn, units in s.assignment.x.items():
            w, fidelity, is_day = s.connection_details[conn]
            if fidelity is None:
                continue
            mass[is_day] += units * w
            weighted[is_day] += units * w * fidelity

    def mean_of(flag):
        return weighted[flag] / mass[flag] if mass[flag] > 0.0 else None

    station_ids = sorted(
        {g for s in slots for g in s.connections_per_station})
    per_station = {
        g: sum(s.connections_per_station.get(g, 0) for s in slots) / len(slots)
        for g in station_ids
    }
    return ScenarioSummary(
        mean_aggregate_rate_ebits_s=mean_rate,
        fidelity_day=mean_of(True),
        fidelity_night=mean_of(False),
        per_station_mean_connections=per_station,
        max_sats_per_pair=tuple(s.max_sats_per_pair for s in slots),
        max_pairs_per_sat=tuple(s.max_pairs_per_sat for s in slots),
    )


def _solve(inst: scheduler.QsspInstance, solver: str, seed: int,
           slot_index: int) -> scheduler.Assignment:
    if solver == "random":
        return scheduler.solve_random(inst, seed)
    if solver == "local_greedy":
        return scheduler.solve_local_greedy(inst, seed)
    if solver == "global_greedy":
        return scheduler.solve_global_greedy(inst)
    if solver == "greedy_backoff":
        return scheduler.solve_greedy_backoff(inst)
    if solver == "exact":
        try:
            return scheduler.solve_exact(inst)
        except scheduler.InstanceTooLargeError as exc:
            raise scheduler.InstanceTooLargeError(
                f"slot {slot_index}: {exc}") from exc
    raise ValueError(f"unknown solver {solver!r}")


def _instance_from_snapshot(snapshot: topology.VisibilitySnapshot,
                            stations_by_id: dict, pairs_by_id: dict,
                            satellite_capacity: int) -> scheduler.QsspInstance:
    """Scheduling instance over the entities the snapshot actually touches."""
    weights = snapshot.weight_map()
    sat_ids = {i for (i, _) in weights}
    pair_ids = {j for (_, j) in weights}
    station_ids = {g for j in pair_ids for g in (pairs_by_id[j].a,
                                                 pairs_by_id[j].b)}
    return scheduler.QsspInstance(
        satellite_capacity={i: satellite_capacity for i in sat_ids},
        pair_stations={j: (pairs_by_id[j].a, pairs_by_id[j].b)
                       for j in pair_ids},
        pair_capacity={j: pairs_by_id[j].max_connections for j in pair_ids},
        station_capacity={g: stations_by_id[g].receivers
                          for g in station_ids},
        weights=weights,
    )


def build_ground_segment(cfg: ScenarioConfig):
    """Stations and pairs for a config; (stations, pairs)."""
    if cfg.placement_seed is not None:
        mask_path = cfg.land_mask_path or bundled_data_path("land_mask_1deg.bin")
        mask = topology.LandMask.load(mask_path)
        stations = topology.place_random_on_land(
            cfg.station_count, cfg.placement_seed, mask,
            receivers=cfg.station_receivers)
    else:
        stations = topology.place_population_centers(
            cfg.station_count, cfg.population_path,
            receivers=cfg.station_receivers)
    pairs = topology.build_pair_set(stations, cfg.max_pair_distance_m,
                                    cfg.default_l)
    if cfg.pair_allowlist is not None:
        allowed = set(cfg.pair_allowlist)
        pairs = [p for p in pairs if p.pair_id in allowed]
    return stations, pairs


def run_scenario(cfg: ScenarioConfig) -> MetricsSeries:
    """Execute every slot of a scenario and fold the metrics."""
    elements = None
    ephemeris = None
    if cfg.tle_path is not None:
        elements = orbital.load_tle_file(cfg.tle_path)
    elif cfg.walker is not None:
        elements = orbital.generate_walker_constellation(
            planes=cfg.walker.planes,
            sats_per_plane=cfg.walker.sats_per_plane,
            inclination_deg=cfg.walker.inclination_deg,
            altitude_m=cfg.walker.altitude_m,
            phasing=cfg.walker.phasing,
            epoch=cfg.time_grid.start,
        )
    else:
        ephemeris = load_ephemeris_csv(cfg.ephemeris_path)

    stations, pairs = build_ground_segment(cfg)
    stations_by_id = {s.station_id: s for s in stations}
    pairs_by_id = {p.pair_id: p for p in pairs}

    slot_results = []
    for k in range(cfg.time_grid.slot_count):
        t = cfg.time_grid.slot_time(k)
        if ephemeris is not None:
            positions = ephemeris.get(_ephemeris_key(t), {})
        else:
            positions = {el.satellite_id: orbital.propagate_position(el, t)
                         for el in elements}
        day_flags = {
            s.station_id: orbital.sun_elevation(s.location, t)
            > DAYLIGHT_SUN_ELEVATION_DEG
            for s in stations
        }
        snapshot = topology.visibility_snapshot(
            positions, stations, pairs, cfg.channel_params, k, day_flags)
        inst = _instance_from_snapshot(snapshot, stations_by_id, pairs_by_id,
                                       cfg.satellite_capacity)
        seed = (cfg.solver_seed + k) & 0xFFFFFFFFFFFFFFFF
        assignment = _solve(inst, cfg.solver, seed, k)
        slot_results.append(_slot_result(k, t, snapshot, assignment,
                                         pairs_by_id))

    longevity = longevity_histogram([s.assignment for s in slot_results])
    summary = aggregate_metrics(slot_results) if slot_results else None
    return MetricsSeries(
        solver=cfg.solver,
        slots=tuple(slot_results),
        stations=tuple(stations),
        longevity=longevity,
        summary=summary,
    )


def _slot_result(slot_index: int, t: float,
                 snapshot: topology.VisibilitySnapshot,
                 assignment: scheduler.Assignment,
                 pairs_by_id: dict) -> SlotResult:
    sats_per_pair: dict = {}
    pairs_per_sat: dict = {}
    for (i, j, _) in snapshot.connections:
        sats_per_pair[j] = sats_per_pair.get(j, 0) + 1
        pairs_per_sat[i] = pairs_per_sat.get(i, 0) + 1

    weights = snapshot.weight_map()
    details = {}
    per_station: dict = {}
    mass = 0.0
    weighted_fidelity = 0.0
    fidelity_mass = 0.0
    for (i, j), units in assignment.x.items():
        w = weights[(i, j)]
        fidelity = snapshot.fidelity[(i, j)]
        pair = pairs_by_id[j]
        is_day = snapshot.pair_is_day[j]
        details[(i, j)] = (w, fidelity, is_day)
        for g in (pair.a, pair.b):
            per_station[g] = per_station.get(g, 0) + units
        mass += units * w
        if fidelity is not None:
            fidelity_mass += units * w
            weighted_fidelity += units * w * fidelity

    return SlotResult(
        slot_index=slot_index,
        unix_time_s=t,
        assignment=assignment,
        aggregate_rate_ebits_s=assignment.objective,
        mean_fidelity=(weighted_fidelity / fidelity_mass
                       if fidelity_mass > 0.0 else None),
        num_connections=sum(assignment.x.values()),
        max_sats_per_pair=max(sats_per_pair.values(), default=0),
        max_pairs_per_sat=max(pairs_per_sat.values(), default=0),
        connection_details=details,
        connections_per_station=per_station,
    )


def _format_cell(value) -> str:
    if value is None:
        return ""
    if value == UNBOUNDED:
        return "unbounded"
    if isinstance(value, float):
        return str(int(value)) if value.is_integer() else repr(value)
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])


def export_csv(series: MetricsSeries, out_dir) -> list:
    """Write the four result CSVs; returns the paths written.

    Ordering is slot-major, then (satellite, pair) id lexicographic, so a
    re-export of the same series is byte-identical.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    per_slot_rows = [
        (s.slot_index, s.unix_time_s, series.solver,
         s.aggregate_rate_ebits_s, s.mean_fidelity, s.num_connections,
         s.max_sats_per_pair, s.max_pairs_per_sat)
        for s in series.slots
    ]
    assignment_rows = [
        (s.slot_index, i, j, s.assignment.x[(i, j)],
         s.connection_details[(i, j)][0], s.connection_details[(i, j)][1])
        for s in series.slots
        for (i, j) in sorted(s.assignment.x)
    ]
    longevity_rows = [(d, series.longevity[d])
                      for d in sorted(series.longevity)]
    station_rows = []
    if series.slots:
        means = (series.summary.per_station_mean_connections
                 if series.summary else {})
        for st in sorted(series.stations, key=lambda s: s.station_id):
            station_rows.append((
                st.station_id, st.location.latitude_deg,
                st.location.longitude_deg, st.receivers,
                means.get(st.station_id, 0.0)))

    written = []
    for name, header, rows in (
        ("per_slot.csv",
         ("slot", "unix_time_s", "solver", "aggregate_rate_ebits_s",
          "mean_fidelity", "num_connections", "max_sats_per_pair",
          "max_pairs_per_sat"),
         per_slot_rows),
        ("assignments.csv",
         ("slot", "satellite_id", "pair_id", "x", "weight_ebits_s",
          "fidelity"),
         assignment_rows),
        ("longevity.csv", ("duration_slots", "count"), longevity_rows),
        ("stations.csv",
         ("station_id", "lat_deg", "lon_deg", "receivers",
          "mean_connections"),
         station_rows),
    ):
        path = out / name
        _write_csv(path, header, rows)
        written.append(path)
    return written
