"""Orbit propagation and ground-to-space geometry on a spherical Earth.

Satellites are described by mean Keplerian elements (parsed from TLE
records or generated as Walker shells) and propagated with two-body
dynamics: the mean anomaly advances linearly, Kepler's equation is solved
by Newton iteration, and the perifocal state is rotated into ECI and then
into ECEF by the Greenwich sidereal angle.  No drag or J2 is applied; the
goal is plausible contact geometry, not ephemeris accuracy.  A CSV
ephemeris-ingest path exists in the harness for callers that need exact
positions.

Earth is a sphere of radius 6,371,000 m throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone

EARTH_RADIUS_M = 6_371_000.0
MU_EARTH = 3.986004e14  # m^3/s^2
SECONDS_PER_DAY = 86_400.0
_TWO_PI = 2.0 * math.pi

# Eccentricities below this are treated as circular: Newton iteration on
# Kepler's equation can stagnate, and E = M is already exact to tolerance.
CIRCULAR_ECCENTRICITY = 1e-8


class TleParseError(ValueError):
    """Malformed TLE record; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class KeplerConvergenceError(RuntimeError):
    """Newton iteration on Kepler's equation failed to converge."""


@dataclass(frozen=True)
class OrbitalElements:
    """Mean Keplerian elements at an epoch, TLE-style units."""

    satellite_id: str
    epoch: float  # UTC unix timestamp, seconds
    inclination_deg: float  # [0, 180)
    raan_deg: float  # [0, 360)
    eccentricity: float  # [0, 1)
    arg_perigee_deg: float  # [0, 360)
    mean_anomaly_deg: float  # [0, 360)
    mean_motion_rev_day: float  # > 0

    def __post_init__(self):
        object.__setattr__(self, "inclination_deg", self.inclination_deg % 360.0)
        if not 0.0 <= self.inclination_deg < 180.0:
            raise ValueError(
                f"inclination {self.inclination_deg} outside [0, 180)"
            )
        object.__setattr__(self, "raan_deg", self.raan_deg % 360.0)
        object.__setattr__(self, "arg_perigee_deg", self.arg_perigee_deg % 360.0)
        object.__setattr__(self, "mean_anomaly_deg", self.mean_anomaly_deg % 360.0)
        if not 0.0 <= self.eccentricity < 1.0:
            raise ValueError(f"eccentricity {self.eccentricity} outside [0, 1)")
        if self.mean_motion_rev_day <= 0.0:
            raise ValueError("mean motion must be positive")
        if self.semi_major_axis_m <= EARTH_RADIUS_M:
            raise ValueError(
                f"derived semi-major axis {self.semi_major_axis_m:.0f} m is "
                "below the Earth surface"
            )

    @property
    def mean_motion_rad_s(self) -> float:
        return self.mean_motion_rev_day * _TWO_PI / SECONDS_PER_DAY

    @property
    def semi_major_axis_m(self) -> float:
        # Kepler's third law: a^3 = mu / n^2
        return (MU_EARTH / self.mean_motion_rad_s**2) ** (1.0 / 3.0)

    @property
    def period_s(self) -> float:
        return SECONDS_PER_DAY / self.mean_motion_rev_day


@dataclass(frozen=True)
class GeodeticPoint:
    """Latitude/longitude/altitude on the spherical Earth."""

    latitude_deg: float  # [-90, 90]
    longitude_deg: float  # [-180, 180)
    altitude_m: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise ValueError(f"latitude {self.latitude_deg} outside [-90, 90]")
        lon = self.longitude_deg
        if not -180.0 <= lon < 180.0:
            lon = (lon + 180.0) % 360.0 - 180.0
            object.__setattr__(self, "longitude_deg", lon)


@dataclass(frozen=True)
class EcefPosition:
    """Cartesian position in the Earth-centered Earth-fixed frame, meters."""

    x_m: float
    y_m: float
    z_m: float

    def norm(self) -> float:
        return math.sqrt(self.x_m**2 + self.y_m**2 + self.z_m**2)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x_m, self.y_m, self.z_m)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform slot grid; slot k starts at ``start + k * slot_seconds``."""

    start: float  # UTC unix timestamp, seconds
    slot_seconds: int = 60
    slot_count: int = 1440

    def __post_init__(self):
        if self.slot_seconds <= 0 or int(self.slot_seconds) != self.slot_seconds:
            raise ValueError("slot_seconds must be a positive integer")
        if self.slot_count <= 0 or int(self.slot_count) != self.slot_count:
            raise ValueError("slot_count must be a positive integer")

    def slot_time(self, slot: int) -> float:
        return self.start + slot * self.slot_seconds

    def slot_times(self) -> list[float]:
        return [self.slot_time(k) for k in range(self.slot_count)]

    @property
    def span_seconds(self) -> float:
        return self.slot_seconds * self.slot_count


# ---------------------------------------------------------------------------
# TLE handling
# ---------------------------------------------------------------------------

def tle_checksum(line: str) -> int:
    """Mod-10 checksum of the first 68 columns; '-' counts as 1."""
    total = 0
    for ch in line[:68]:
        if ch.isdigit():
            total += int(ch)
        elif ch == "-":
            total += 1
    return total % 10


def _tle_field(line: str, lineno: int, start: int, end: int, kind, what: str):
    """Extract columns [start, end] (1-based, inclusive) and convert."""
    raw = line[start - 1 : end].strip()
    try:
        return kind(raw)
    except ValueError:
        raise TleParseError(
            f"cannot parse {what} from {raw!r}", lineno, start
        ) from None


def _check_tle_line(line: str, lineno: int, expected_tag: str) -> None:
    if len(line) != 69:
        raise TleParseError(
            f"expected 69 columns, got {len(line)}", lineno, max(len(line), 1)
        )
    if line[0] != expected_tag:
        raise TleParseError(
            f"expected line number {expected_tag!r}, got {line[0]!r}", lineno, 1
        )
    digit = line[68]
    if not digit.isdigit():
        raise TleParseError("checksum column is not a digit", lineno, 69)
    if int(digit) != tle_checksum(line):
        raise TleParseError(
            f"checksum mismatch: recorded {digit}, computed {tle_checksum(line)}",
            lineno,
            69,
        )


def _tle_epoch_to_unix(epoch_year: int, epoch_day: float) -> float:
    year = 1900 + epoch_year if epoch_year >= 57 else 2000 + epoch_year
    jan1 = datetime(year, 1, 1, tzinfo=timezone.utc).timestamp()
    return jan1 + (epoch_day - 1.0) * SECONDS_PER_DAY


def parse_tle(text: str) -> OrbitalElements:
    """Parse one TLE record (two lines, or three with a leading name line)."""
    lines = [ln.rstrip("\r\n") for ln in text.splitlines() if ln.strip()]
    name = None
    if len(lines) == 3:
        name = lines[0].strip()
        lines = lines[1:]
    if len(lines) != 2:
        raise TleParseError(
            f"expected 2 element lines (optionally preceded by a name), "
            f"got {len(lines)}",
            1,
            1,
        )
    l1, l2 = lines
    _check_tle_line(l1, 1, "1")
    _check_tle_line(l2, 2, "2")

    catalog1 = l1[2:7].strip()
    catalog2 = l2[2:7].strip()
    if catalog1 != catalog2:
        raise TleParseError(
            f"catalog number {catalog2!r} differs from line 1 ({catalog1!r})",
            2,
            3,
        )

    epoch_year = _tle_field(l1, 1, 19, 20, int, "epoch year")
    epoch_day = _tle_field(l1, 1, 21, 32, float, "epoch day")
    inclination = _tle_field(l2, 2, 9, 16, float, "inclination")
    raan = _tle_field(l2, 2, 18, 25, float, "RAAN")
    ecc_digits = _tle_field(l2, 2, 27, 33, str, "eccentricity")
    try:
        eccentricity = float("0." + ecc_digits)
    except ValueError:
        raise TleParseError(
            f"cannot parse eccentricity from {ecc_digits!r}", 2, 27
        ) from None
    arg_perigee = _tle_field(l2, 2, 35, 42, float, "argument of perigee")
    mean_anomaly = _tle_field(l2, 2, 44, 51, float, "mean anomaly")
    mean_motion = _tle_field(l2, 2, 53, 63, float, "mean motion")

    return OrbitalElements(
        satellite_id=name if name else catalog1,
        epoch=_tle_epoch_to_unix(epoch_year, epoch_day),
        inclination_deg=inclination,
        raan_deg=raan,
        eccentricity=eccentricity,
        arg_perigee_deg=arg_perigee,
        mean_anomaly_deg=mean_anomaly,
        mean_motion_rev_day=mean_motion,
    )


def load_tle_file(path) -> list[OrbitalElements]:
    """Parse every record in a TLE file (two- or three-line records)."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.rstrip("\r\n") for ln in fh if ln.strip()]
    records = []
    i = 0
    while i < len(lines):
        step = 2 if lines[i].startswith("1 ") else 3
        records.append(parse_tle("\n".join(lines[i : i + step])))
        i += step
    return records


def _unix_to_tle_epoch(t: float) -> tuple[int, float]:
    dt = datetime.fromtimestamp(t, tz=timezone.utc)
    jan1 = datetime(dt.year, 1, 1, tzinfo=timezone.utc).timestamp()
    return dt.year % 100, (t - jan1) / SECONDS_PER_DAY + 1.0


def format_tle(el: OrbitalElements, catalog_number: int = 1, name: str | None = None) -> str:
    """Render elements as a TLE record (three-line when a name is given).

    Derivative/drag fields are zero-filled; only the fields this package
    reads back are meaningful.  Checksums are generated.
    """
    epoch_year, epoch_day = _unix_to_tle_epoch(el.epoch)
    l1 = (
        f"1 {catalog_number:05d}U 00000A   {epoch_year:02d}"
        f"{epoch_day:012.8f}  .00000000  00000-0  00000-0 0    0"
    )
    ecc_digits = f"{el.eccentricity:.7f}"[2:]
    l2 = (
        f"2 {catalog_number:05d} {el.inclination_deg:8.4f} {el.raan_deg:8.4f} "
        f"{ecc_digits} {el.arg_perigee_deg:8.4f} {el.mean_anomaly_deg:8.4f} "
        f"{el.mean_motion_rev_day:11.8f}    0"
    )
    l1 += str(tle_checksum(l1))
    l2 += str(tle_checksum(l2))
    record = f"{l1}\n{l2}"
    if name is not None:
        record = f"{name}\n{record}"
    return record


# ---------------------------------------------------------------------------
# Propagation
# ---------------------------------------------------------------------------

def solve_kepler(mean_anomaly_rad: float, eccentricity: float,
                 tol: float = 1e-12, max_iter: int = 50) -> float:
    """Eccentric anomaly from mean anomaly by Newton iteration."""
    if eccentricity < CIRCULAR_ECCENTRICITY:
        return mean_anomaly_rad
    m = math.fmod(mean_anomaly_rad, _TWO_PI)
    if m < 0.0:
        m += _TWO_PI
    e = eccentricity
    big_e = m if e < 0.8 else math.pi
    for _ in range(max_iter):
        f = big_e - e * math.sin(big_e) - m
        step = f / (1.0 - e * math.cos(big_e))
        big_e -= step
        if abs(step) <= tol:
            return big_e
    raise KeplerConvergenceError(
        f"Kepler iteration did not reach {tol} rad in {max_iter} steps "
        f"(M={mean_anomaly_rad}, e={eccentricity})"
    )


def julian_date(t: float) -> float:
    return t / SECONDS_PER_DAY + 2440587.5


def gmst_rad(t: float) -> float:
    """Greenwich mean sidereal time from the standard polynomial in
    Julian centuries (linear term dominant; sub-degree accuracy)."""
    d = julian_date(t) - 2451545.0
    tc = d / 36525.0
    gmst_deg = (
        280.46061837
        + 360.98564736629 * d
        + 0.000387933 * tc * tc
        - tc * tc * tc / 38710000.0
    )
    return math.radians(gmst_deg % 360.0)


def propagate_eci(el: OrbitalElements, t: float) -> tuple[float, float, float]:
    """Two-body position in the Earth-centered inertial frame at time t."""
    n = el.mean_motion_rad_s
    m = math.radians(el.mean_anomaly_deg) + n * (t - el.epoch)
    big_e = solve_kepler(m, el.eccentricity)
    e = el.eccentricity
    a = el.semi_major_axis_m
    cos_e = math.cos(big_e)
    sin_e = math.sin(big_e)
    x_pf = a * (cos_e - e)
    y_pf = a * math.sqrt(1.0 - e * e) * sin_e

    cos_o = math.cos(math.radians(el.raan_deg))
    sin_o = math.sin(math.radians(el.raan_deg))
    cos_i = math.cos(math.radians(el.inclination_deg))
    sin_i = math.sin(math.radians(el.inclination_deg))
    cos_w = math.cos(math.radians(el.arg_perigee_deg))
    sin_w = math.sin(math.radians(el.arg_perigee_deg))

    # R3(-raan) R1(-incl) R3(-argp) applied to the perifocal vector
    x = (cos_o * cos_w - sin_o * sin_w * cos_i) * x_pf + (
        -cos_o * sin_w - sin_o * cos_w * cos_i
    ) * y_pf
    y = (sin_o * cos_w + cos_o * sin_w * cos_i) * x_pf + (
        -sin_o * sin_w + cos_o * cos_w * cos_i
    ) * y_pf
    z = (sin_w * sin_i) * x_pf + (cos_w * sin_i) * y_pf
    return (x, y, z)


def eci_to_ecef(eci: tuple[float, float, float], t: float) -> EcefPosition:
    theta = gmst_rad(t)
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    x, y, z = eci
    return EcefPosition(x * cos_t + y * sin_t, -x * sin_t + y * cos_t, z)


def propagate_position(el: OrbitalElements, t: float) -> EcefPosition:
    """Two-body position in ECEF at time t (rotation by GMST)."""
    return eci_to_ecef(propagate_eci(el, t), t)


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------

def geodetic_to_ecef(p: GeodeticPoint) -> EcefPosition:
    r = EARTH_RADIUS_M + p.altitude_m
    lat = math.radians(p.latitude_deg)
    lon = math.radians(p.longitude_deg)
    cos_lat = math.cos(lat)
    return EcefPosition(
        r * cos_lat * math.cos(lon),
        r * cos_lat * math.sin(lon),
        r * math.sin(lat),
    )


def ecef_to_geodetic(pos: EcefPosition) -> GeodeticPoint:
    r = pos.norm()
    if r == 0.0:
        raise ValueError("cannot convert the origin to geodetic coordinates")
    lat = math.degrees(math.asin(max(-1.0, min(1.0, pos.z_m / r))))
    lon = math.degrees(math.atan2(pos.y_m, pos.x_m))
    if lon >= 180.0:
        lon -= 360.0
    return GeodeticPoint(lat, lon, r - EARTH_RADIUS_M)


def elevation_angle(gs: EcefPosition, sat: EcefPosition) -> float:
    """Elevation of ``sat`` above the local horizontal plane at ``gs``, degrees."""
    gr = gs.norm()
    if gr == 0.0:
        raise ValueError("ground position at Earth center")
    dx = sat.x_m - gs.x_m
    dy = sat.y_m - gs.y_m
    dz = sat.z_m - gs.z_m
    d = math.sqrt(dx * dx + dy * dy + dz * dz)
    if d < 1e-6:
        raise ValueError("satellite and ground station positions coincide")
    s = (gs.x_m * dx + gs.y_m * dy + gs.z_m * dz) / (gr * d)
    return math.degrees(math.asin(max(-1.0, min(1.0, s))))


def great_circle_distance(a: GeodeticPoint, b: GeodeticPoint) -> float:
    """Haversine distance in meters on the spherical Earth."""
    lat1 = math.radians(a.latitude_deg)
    lat2 = math.radians(b.latitude_deg)
    dlat = lat2 - lat1
    dlon = math.radians(b.longitude_deg - a.longitude_deg)
    h = (
        math.sin(dlat / 2.0) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    )
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def footprint_radius(altitude_m: float, min_elevation_deg: float) -> float:
    """Great-circle radius of the region that sees the satellite at or above
    the given elevation: R * (acos(R cos(e) / (R + h)) - e)."""
    if altitude_m <= 0.0:
        raise ValueError("altitude must be positive")
    if not 0.0 <= min_elevation_deg <= 90.0:
        raise ValueError("min elevation must be in [0, 90]")
    eps = math.radians(min_elevation_deg)
    ratio = EARTH_RADIUS_M * math.cos(eps) / (EARTH_RADIUS_M + altitude_m)
    # max() absorbs the ~1e-10 m negative rounding at exactly 90 degrees
    return max(0.0, EARTH_RADIUS_M * (math.acos(ratio) - eps))


def sub_satellite_point(sat: EcefPosition) -> GeodeticPoint:
    p = ecef_to_geodetic(sat)
    return GeodeticPoint(p.latitude_deg, p.longitude_deg, 0.0)


# ---------------------------------------------------------------------------
# Sun position
# ---------------------------------------------------------------------------

def sun_elevation(gs: GeodeticPoint, t: float) -> float:
    """Solar elevation in degrees from the low-precision solar ephemeris
    (mean anomaly -> ecliptic longitude -> declination + hour angle).
    Accurate to well under a degree for 2000-2100."""
    d = julian_date(t) - 2451545.0
    mean_lon = math.radians((280.460 + 0.9856474 * d) % 360.0)
    mean_anom = math.radians((357.528 + 0.9856003 * d) % 360.0)
    ecl_lon = mean_lon + math.radians(
        1.915 * math.sin(mean_anom) + 0.020 * math.sin(2.0 * mean_anom)
    )
    obliquity = math.radians(23.439 - 0.0000004 * d)

    sin_decl = math.sin(obliquity) * math.sin(ecl_lon)
    decl = math.asin(sin_decl)
    ra = math.atan2(math.cos(obliquity) * math.sin(ecl_lon), math.cos(ecl_lon))

    hour_angle = gmst_rad(t) + math.radians(gs.longitude_deg) - ra
    lat = math.radians(gs.latitude_deg)
    sin_el = math.sin(lat) * sin_decl + math.cos(lat) * math.cos(decl) * math.cos(
        hour_angle
    )
    return math.degrees(math.asin(max(-1.0, min(1.0, sin_el))))


# ---------------------------------------------------------------------------
# Constellation generation
# ---------------------------------------------------------------------------

def generate_walker_constellation(
    planes: int,
    sats_per_plane: int,
    inclination_deg: float,
    altitude_m: float,
    phasing: int,
    epoch: float,
    id_prefix: str = "w",
) -> list[OrbitalElements]:
    """Walker delta pattern: circular orbits, RAAN evenly spread over 360
    degrees, in-plane anomalies evenly spread, with the standard
    ``phasing * 360 / (planes * sats_per_plane)`` inter-plane offset."""
    if planes < 1 or sats_per_plane < 1:
        raise ValueError("planes and sats_per_plane must be >= 1")
    if altitude_m <= 0.0:
        raise ValueError("altitude must be positive")
    a = EARTH_RADIUS_M + altitude_m
    mean_motion_rev_day = (
        math.sqrt(MU_EARTH / a**3) * SECONDS_PER_DAY / _TWO_PI
    )
    total = planes * sats_per_plane
    pw = max(2, len(str(planes - 1)))
    sw = max(2, len(str(sats_per_plane - 1)))
    elements = []
    for p in range(planes):
        raan = 360.0 * p / planes
        phase_offset = 360.0 * phasing * p / total
        for k in range(sats_per_plane):
            elements.append(
                OrbitalElements(
                    satellite_id=f"{id_prefix}{p:0{pw}d}s{k:0{sw}d}",
                    epoch=epoch,
                    inclination_deg=inclination_deg,
                    raan_deg=raan,
                    eccentricity=0.0,
                    arg_perigee_deg=0.0,
                    mean_anomaly_deg=(360.0 * k / sats_per_plane + phase_offset)
                    % 360.0,
                    mean_motion_rev_day=mean_motion_rev_day,
                )
            )
    return elements
