"""Physical model of a dual-downlink entanglement link.

One satellite source emits photon pairs; each arm travels to its own
ground station through free space and the lower atmosphere.  The source
follows SPDC pair statistics p(n) = (n+1) Ns^n / (Ns+1)^(n+2).  Each arm's
end-to-end transmissivity is the product of device efficiencies, a
diffraction-limited aperture-coupling term (quadratic in distance), and an
airmass-scaled atmospheric term.  The delivered-ebit rate counts genuine
single-pair coincidences only; multi-pair emissions and dark clicks are
folded into a fidelity estimate with a maximally-mixed noise floor of 1/4.

The whole rate/fidelity model sits behind ``pair_rate`` / ``pair_fidelity``
/ ``connection_weight`` so alternative channel models can be swapped in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict, fields

from .orbital import EcefPosition, elevation_angle


class LinkGeometryError(ValueError):
    """Raised when a link is evaluated below the minimum elevation."""


@dataclass(frozen=True)
class ChannelParams:
    """Source, telescope, and atmosphere parameters.

    Defaults: 737 nm SPDC source at pump power 0.078 photons/mode and
    1 GHz repetition rate, 0.707 device efficiencies, 0.1 m / 1.0 m
    transmit/receive apertures, a 5 km atmospheric shell with 0.5 zenith
    transmissivity, a 20 degree elevation limit, and day/night dark-click
    probabilities of 3e-3 / 3e-7.
    """

    wavelength_m: float = 737e-9
    pump_power: float = 0.078  # mean photons per mode (Ns)
    rep_rate_hz: float = 1e9
    eta_satellite: float = 0.707
    eta_ground: float = 0.707
    tx_aperture_radius_m: float = 0.1
    rx_aperture_radius_m: float = 1.0
    atmosphere_thickness_m: float = 5000.0
    min_elevation_deg: float = 20.0
    dark_click_day: float = 3e-3
    dark_click_night: float = 3e-7
    zenith_atmospheric_transmissivity: float = 0.5

    def __post_init__(self):
        for name in (
            "eta_satellite",
            "eta_ground",
            "dark_click_day",
            "dark_click_night",
            "zenith_atmospheric_transmissivity",
        ):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        for name in (
            "wavelength_m",
            "rep_rate_hz",
            "tx_aperture_radius_m",
            "rx_aperture_radius_m",
            "atmosphere_thickness_m",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.pump_power < 0.0:
            raise ValueError("pump_power must be nonnegative")
        if not 0.0 <= self.min_elevation_deg < 90.0:
            raise ValueError("min_elevation_deg must be in [0, 90)")

    def dark_click(self, is_day: bool) -> float:
        return self.dark_click_day if is_day else self.dark_click_night

    def to_json_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json_dict(cls, data: dict) -> "ChannelParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown channel parameter(s): {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class LinkMetrics:
    """Per-connection outputs: both arm transmissivities, ebit rate, fidelity."""

    transmissivity_1: float
    transmissivity_2: float
    rate_ebits_s: float
    fidelity: float | None

    def __post_init__(self):
        for v in (self.transmissivity_1, self.transmissivity_2):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"transmissivity {v} outside [0, 1]")
        if self.rate_ebits_s < 0.0:
            raise ValueError("rate must be nonnegative")
        if self.fidelity is not None and not 0.0 <= self.fidelity <= 1.0:
            raise ValueError(f"fidelity {self.fidelity} outside [0, 1]")


def photon_number_dist(pump_power: float, n: int) -> float:
    """Probability of n photon pairs per mode: (n+1) Ns^n / (Ns+1)^(n+2)."""
    if pump_power < 0.0:
        raise ValueError("pump power must be nonnegative")
    if n < 0:
        raise ValueError("pair count must be nonnegative")
    if n == 0:
        return 1.0 / (pump_power + 1.0) ** 2
    return (n + 1) * pump_power**n / (pump_power + 1.0) ** (n + 2)


def free_space_transmissivity(distance_m: float, params: ChannelParams) -> float:
    """Diffraction-limited aperture coupling, min(1, (pi r_s r_g / (lambda L))^2)."""
    if distance_m <= 0.0:
        raise ValueError("distance must be positive")
    coupling = (
        math.pi
        * params.tx_aperture_radius_m
        * params.rx_aperture_radius_m
        / (params.wavelength_m * distance_m)
    )
    return min(1.0, coupling * coupling)


def atmospheric_transmissivity(elevation_deg: float, params: ChannelParams) -> float:
    """Zenith transmissivity raised to the 1/sin(elevation) airmass factor."""
    if elevation_deg < params.min_elevation_deg:
        raise LinkGeometryError(
            f"elevation {elevation_deg:.3f} deg below the "
            f"{params.min_elevation_deg} deg limit"
        )
    return params.zenith_atmospheric_transmissivity ** (
        1.0 / math.sin(math.radians(elevation_deg))
    )


def arm_transmissivity(sat: EcefPosition, gs: EcefPosition,
                       params: ChannelParams) -> float:
    """End-to-end single-arm efficiency: devices x free space x atmosphere."""
    elevation = elevation_angle(gs, sat)
    dx = sat.x_m - gs.x_m
    dy = sat.y_m - gs.y_m
    dz = sat.z_m - gs.z_m
    distance = math.sqrt(dx * dx + dy * dy + dz * dz)
    return arm_transmissivity_from_geometry(elevation, distance, params)


def arm_transmissivity_from_geometry(elevation_deg: float, distance_m: float,
                                     params: ChannelParams) -> float:
    return (
        params.eta_satellite
        * params.eta_ground
        * free_space_transmissivity(distance_m, params)
        * atmospheric_transmissivity(elevation_deg, params)
    )


def pair_rate(eta1: float, eta2: float, params: ChannelParams) -> float:
    """Delivered ebits/second: repetition rate x p(1) x both arm efficiencies."""
    return params.rep_rate_hz * photon_number_dist(params.pump_power, 1) * eta1 * eta2


def pair_fidelity(eta1: float, eta2: float, dark_click_prob: float,
                  params: ChannelParams) -> float | None:
    """Coincidence-bookkeeping fidelity estimate.

    Signal coincidences come from single-pair emissions surviving both
    arms.  Noise coincidences come from double-pair emissions that still
    trigger both detectors and from dark clicks paired with any click or
    with each other; both are treated as maximally mixed (fidelity 1/4).
    Returns None when no coincidences occur at all.
    """
    for name, v in (("eta1", eta1), ("eta2", eta2), ("dark_click", dark_click_prob)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name}={v} outside [0, 1]")
    p1 = photon_number_dist(params.pump_power, 1)
    p2 = photon_number_dist(params.pump_power, 2)
    hit1 = 1.0 - (1.0 - eta1) ** 2  # >=1 of 2 photons survives arm 1
    hit2 = 1.0 - (1.0 - eta2) ** 2
    p_signal = p1 * eta1 * eta2
    p_multi = p2 * hit1 * hit2
    p_click_1 = p1 * eta1 + p2 * hit1
    p_click_2 = p1 * eta2 + p2 * hit2
    p_dark = dark_click_prob * (p_click_1 + p_click_2) + dark_click_prob**2
    total = p_signal + p_multi + p_dark
    if total == 0.0:
        return None
    return (p_signal + 0.25 * (p_multi + p_dark)) / total


def link_metrics_from_geometry(
    elevation_a_deg: float,
    distance_a_m: float,
    elevation_b_deg: float,
    distance_b_m: float,
    params: ChannelParams,
    is_day: bool,
) -> LinkMetrics | None:
    """Metrics from precomputed geometry; None if either arm is below the
    elevation limit (zero-weight link)."""
    if (
        elevation_a_deg < params.min_elevation_deg
        or elevation_b_deg < params.min_elevation_deg
    ):
        return None
    eta1 = arm_transmissivity_from_geometry(elevation_a_deg, distance_a_m, params)
    eta2 = arm_transmissivity_from_geometry(elevation_b_deg, distance_b_m, params)
    return LinkMetrics(
        transmissivity_1=eta1,
        transmissivity_2=eta2,
        rate_ebits_s=pair_rate(eta1, eta2, params),
        fidelity=pair_fidelity(eta1, eta2, params.dark_click(is_day), params),
    )


def link_metrics(sat: EcefPosition, gs_a: EcefPosition, gs_b: EcefPosition,
                 params: ChannelParams, is_day: bool) -> LinkMetrics | None:
    def geom(gs):
        dx = sat.x_m - gs.x_m
        dy = sat.y_m - gs.y_m
        dz = sat.z_m - gs.z_m
        return elevation_angle(gs, sat), math.sqrt(dx * dx + dy * dy + dz * dz)

    el_a, dist_a = geom(gs_a)
    el_b, dist_b = geom(gs_b)
    return link_metrics_from_geometry(el_a, dist_a, el_b, dist_b, params, is_day)


def connection_weight(sat: EcefPosition, gs_a: EcefPosition, gs_b: EcefPosition,
                      params: ChannelParams, is_day: bool
                      ) -> tuple[float, float | None]:
    """(ebit rate, fidelity) for one satellite serving one station pair.

    The rate is zero (with no fidelity) when either arm is below the
    elevation limit.
    """
    metrics = link_metrics(sat, gs_a, gs_b, params, is_day)
    if metrics is None:
        return (0.0, None)
    return (metrics.rate_ebits_s, metrics.fidelity)
