"""Builders for the five figure kinds.

Every builder consumes only the documented CSV schemas, never mutates its
inputs, and tolerates headers-only files by drawing empty axes, so batch
rendering does not fall over on runs that produced no connections.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  backend must be set first

from .schemas import RenderError, load_rows, parse_number, sniff_schema


def run_labels(paths) -> list:
    """Human labels for runs: the containing directory name when those are
    distinct, else the full paths."""
    names = [Path(p).parent.name or Path(p).stem for p in paths]
    if len(set(names)) < len(names):
        names = [str(p) for p in paths]
    return names


def build_rate_bars(inputs):
    labels, values = [], []
    fallbacks = run_labels(inputs)
    for path, fallback in zip(inputs, fallbacks):
        rows = load_rows(path, "per_slot")
        rates = [parse_number(r["aggregate_rate_ebits_s"]) for r in rows]
        label = rows[0]["solver"] if rows else fallback
        while label in labels:
            label += "'"
        labels.append(label)
        values.append(statistics.mean(rates) if rates else 0.0)

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.bar(range(len(values)), values, color="tab:blue")
    ax.set_xticks(range(len(labels)), labels, rotation=20, ha="right")
    ax.set_ylabel("mean aggregate rate (ebits/s)")
    ax.set_title("entanglement distribution rate by solver")
    return fig


def build_longevity_hist(inputs):
    series = []
    for path, label in zip(inputs, run_labels(inputs)):
        hist = {}
        for row in load_rows(path, "longevity"):
            duration = int(parse_number(row["duration_slots"]))
            hist[duration] = int(parse_number(row["count"]))
        series.append((label, hist))

    durations = sorted({d for _, hist in series for d in hist})
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    width = 0.8 / len(series)
    for k, (label, hist) in enumerate(series):
        xs = [i + k * width for i in range(len(durations))]
        ax.bar(xs, [hist.get(d, 0) for d in durations], width=width,
               label=label)
    if durations:
        ax.set_xticks([i + 0.4 - width / 2 for i in range(len(durations))],
                      durations)
    ax.set_xlabel("connection episode length (slots)")
    ax.set_ylabel("episodes")
    ax.set_title("connection longevity")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    return fig


def build_fidelity_curve(inputs):
    """Rate-weighted mean fidelity against the station receiver count.

    Each input is a per-slot CSV whose run directory must also hold the
    matching stations CSV (that is where the receiver count lives).
    """
    points = []
    for path in inputs:
        rows = load_rows(path, "per_slot")
        stations = load_rows(Path(path).with_name("stations.csv"), "stations")
        receivers = max((parse_number(r["receivers"]) for r in stations),
                        default=None)
        mass = weighted = 0.0
        for row in rows:
            rate = parse_number(row["aggregate_rate_ebits_s"])
            fidelity = parse_number(row["mean_fidelity"])
            if rate is None or fidelity is None or rate <= 0.0:
                continue
            mass += rate
            weighted += rate * fidelity
        if receivers is None or mass == 0.0:
            continue  # run delivered nothing to average
        points.append((receivers, weighted / mass))

    grouped = {}
    for receivers, fidelity in points:
        grouped.setdefault(receivers, []).append(fidelity)
    xs = sorted(grouped)

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(range(len(xs)), [statistics.mean(grouped[x]) for x in xs],
            marker="o")
    ax.set_xticks(range(len(xs)),
                  ["unbounded" if math.isinf(x) else f"{x:g}" for x in xs])
    ax.set_xlabel("receivers per station")
    ax.set_ylabel("rate-weighted mean fidelity")
    ax.set_title("fidelity vs receiver count")
    return fig


def build_visibility_series(inputs):
    fig, ax = plt.subplots(figsize=(7.2, 4.0))
    fallbacks = run_labels(inputs)
    for path, fallback in zip(inputs, fallbacks):
        rows = load_rows(path, "per_slot")
        label = rows[0]["solver"] if rows else fallback
        slots = [parse_number(r["slot"]) for r in rows]
        ax.plot(slots, [parse_number(r["max_sats_per_pair"]) for r in rows],
                label=f"{label}: max satellites per pair")
        ax.plot(slots, [parse_number(r["max_pairs_per_sat"]) for r in rows],
                linestyle="--", label=f"{label}: max pairs per satellite")
    ax.set_xlabel("slot")
    ax.set_ylabel("count")
    ax.set_title("visibility over time")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    return fig


def build_connection_map(inputs):
    stations_path = None
    assignment_paths = []
    for path in inputs:
        schema = sniff_schema(path)
        if schema == "stations":
            if stations_path is not None:
                raise RenderError("connection_map takes exactly one "
                                  "stations file, got a second: " f"{path}")
            stations_path = path
        elif schema == "assignments":
            assignment_paths.append(path)
        else:
            raise RenderError(f"{path}: expected a stations or assignments "
                              "schema for connection_map")
    if stations_path is None:
        raise RenderError("connection_map needs a stations file")
    if not 1 <= len(assignment_paths) <= 2:
        raise RenderError("connection_map takes one or two assignments "
                          f"files, got {len(assignment_paths)}")

    coords = {}
    for row in load_rows(stations_path, "stations"):
        coords[row["station_id"]] = (parse_number(row["lon_deg"]),
                                     parse_number(row["lat_deg"]))

    def pair_set(path):
        pairs = set()
        for row in load_rows(path, "assignments"):
            a, sep, b = row["pair_id"].partition("|")
            if not sep:
                raise RenderError(f"{path}: pair id {row['pair_id']!r} is "
                                  "not of the form 'a|b'")
            for g in (a, b):
                if g not in coords:
                    raise RenderError(
                        f"{path}: pair {row['pair_id']!r} references "
                        f"station {g!r} absent from {stations_path}")
            pairs.add((a, b))
        return pairs

    sets = [pair_set(p) for p in assignment_paths]
    labels = run_labels(assignment_paths)
    if len(sets) == 1:
        groups = [(sets[0], "black", labels[0])]
    else:
        groups = [(sets[0] - sets[1], "tab:red", f"only {labels[0]}"),
                  (sets[1] - sets[0], "tab:blue", f"only {labels[1]}"),
                  (sets[0] & sets[1], "black", "both")]

    fig, ax = plt.subplots(figsize=(7.2, 4.4))
    if coords:
        lons, lats = zip(*coords.values())
        ax.scatter(lons, lats, s=12, color="tab:green", zorder=3)
        for station, (lon, lat) in coords.items():
            ax.annotate(station, (lon, lat), fontsize=6,
                        textcoords="offset points", xytext=(2, 2))
    for pairs, color, label in groups:
        for k, (a, b) in enumerate(sorted(pairs)):
            (lon_a, lat_a), (lon_b, lat_b) = coords[a], coords[b]
            ax.plot([lon_a, lon_b], [lat_a, lat_b], color=color,
                    linewidth=1.0, label=label if k == 0 else None)
    ax.set_xlim(-180.0, 180.0)
    ax.set_ylim(-90.0, 90.0)
    ax.set_xlabel("longitude (deg)")
    ax.set_ylabel("latitude (deg)")
    ax.set_title("assigned connections")
    ax.grid(True, linewidth=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="lower left", fontsize=7)
    return fig


BUILDERS = {
    "rate_bars": build_rate_bars,
    "longevity_hist": build_longevity_hist,
    "fidelity_curve": build_fidelity_curve,
    "visibility_series": build_visibility_series,
    "connection_map": build_connection_map,
}

FIGURE_KINDS = tuple(sorted(BUILDERS))


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSVs, figure kind, output image path."""

    inputs: tuple
    kind: str
    output: str

    def __post_init__(self):
        if self.kind not in BUILDERS:
            raise RenderError(f"unknown figure kind {self.kind!r}; choose "
                              f"from {', '.join(FIGURE_KINDS)}")
        if not self.inputs:
            raise RenderError("at least one input CSV is required")


def build_figure(spec: FigureSpec):
    """The matplotlib Figure for a spec, for callers that want to embed or
    inspect instead of writing a file."""
    return BUILDERS[spec.kind](tuple(spec.inputs))


def render(spec: FigureSpec) -> Path:
    """Write the figure for spec to its output path and return that path."""
    fig = build_figure(spec)
    out = Path(spec.output)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, dpi=150)
    finally:
        plt.close(fig)
    return out
