"""Command-line interface.

Subcommands: run (full scenario to CSV files), place (ground-station
placement to CSV on stdout), solve-once (single instance JSON to
assignment JSON), gen-walker (Walker shell to TLE text), and reduce-3dm
(hypergraph JSON to scheduling-instance JSON).

Machine-readable output goes to stdout or files; diagnostics go to
stderr.  Exit codes: 0 success, 2 configuration/parse problem, 3 I/O
failure, 4 solver refusal.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys

from . import harness, orbital, scheduler, topology

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_REFUSED = 4


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as f:
        return f.read()


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _parse_receivers(text: str):
    if text == "unbounded":
        return topology.UNBOUNDED
    try:
        value = int(text)
    except ValueError:
        raise harness.ConfigError(
            f"receivers must be a positive integer or 'unbounded', "
            f"got {text!r}") from None
    if value < 1:
        raise harness.ConfigError("receivers must be >= 1")
    return value


def _solve_instance(inst: scheduler.QsspInstance, solver: str,
                    seed: int) -> scheduler.Assignment:
    if solver == "random":
        return scheduler.solve_random(inst, seed)
    if solver == "local_greedy":
        return scheduler.solve_local_greedy(inst, seed)
    if solver == "global_greedy":
        return scheduler.solve_global_greedy(inst)
    if solver == "greedy_backoff":
        return scheduler.solve_greedy_backoff(inst)
    if solver == "exact":
        return scheduler.solve_exact(inst)
    raise harness.ConfigError(f"unknown solver {solver!r}")


def cmd_run(args) -> int:
    cfg = harness.load_config(args.config)
    if args.solver is not None:
        cfg = dataclasses.replace(cfg, solver=args.solver)
    out_dir = args.out if args.out is not None else cfg.output_dir
    if out_dir is None:
        raise harness.ConfigError(
            "no output directory: pass --out or set output_dir in the config")
    series = harness.run_scenario(cfg)
    written = harness.export_csv(series, out_dir)
    for path in written:
        sys.stdout.write(f"{path}\n")
    print(f"{cfg.solver}: {cfg.time_grid.slot_count} slots solved, "
          f"{len(written)} files in {out_dir}", file=sys.stderr)
    return EXIT_OK


def cmd_place(args) -> int:
    receivers = _parse_receivers(args.receivers)
    if args.mode == "random":
        if args.seed is None:
            raise harness.ConfigError("--seed is required with --mode random")
        mask_path = args.mask or harness.bundled_data_path("land_mask_1deg.bin")
        mask = topology.LandMask.load(mask_path)
        stations = topology.place_random_on_land(
            args.count, args.seed, mask, receivers=receivers)
    else:
        dataset = args.population or harness.bundled_data_path(
            "population_centers.csv")
        stations = topology.place_population_centers(
            args.count, dataset, receivers=receivers)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("station_id", "lat_deg", "lon_deg", "receivers"))
    for s in stations:
        r = "unbounded" if s.receivers == topology.UNBOUNDED else s.receivers
        writer.writerow((s.station_id, s.location.latitude_deg,
                         s.location.longitude_deg, r))
    return EXIT_OK


def cmd_solve_once(args) -> int:
    try:
        data = json.loads(_read_text(args.instance))
        inst = scheduler.QsspInstance.from_json_dict(data)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise harness.ConfigError(f"bad instance JSON: {exc}") from exc
    assignment = _solve_instance(inst, args.solver, args.seed)
    _print_json(assignment.to_json_dict())
    return EXIT_OK


def cmd_gen_walker(args) -> int:
    epoch = harness.parse_start_utc(args.epoch)
    elements = orbital.generate_walker_constellation(
        planes=args.planes,
        sats_per_plane=args.sats_per_plane,
        inclination_deg=args.inclination_deg,
        altitude_m=args.altitude_m,
        phasing=args.phasing,
        epoch=epoch,
    )
    for number, el in enumerate(elements, start=1):
        sys.stdout.write(orbital.format_tle(el, catalog_number=number,
                                            name=el.satellite_id) + "\n")
    return EXIT_OK


def cmd_reduce_3dm(args) -> int:
    try:
        data = json.loads(_read_text(args.hypergraph))
        h = scheduler.ThreeDMInstance.from_json_dict(data)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise harness.ConfigError(f"bad hypergraph JSON: {exc}") from exc
    inst, correspondence = scheduler.reduce_3dm_to_qssp(h)
    _print_json({
        "instance": inst.to_json_dict(),
        "correspondence": [
            {"hyperedge": list(edge), "satellite": i, "pair": j}
            for edge, (i, j) in sorted(correspondence.items())
        ],
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsspsim",
        description="Time-slotted satellite-to-ground-station-pair "
                    "scheduling simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario config and export CSVs")
    run.add_argument("--config", required=True, help="scenario JSON path")
    run.add_argument("--solver", choices=harness.SOLVER_NAMES,
                     help="override the config's solver")
    run.add_argument("--out", help="output directory (overrides config)")
    run.set_defaults(func=cmd_run)

    place = sub.add_parser("place", help="emit a station placement as CSV")
    place.add_argument("--mode", choices=("random", "population"),
                       required=True)
    place.add_argument("--count", type=int, required=True)
    place.add_argument("--seed", type=int, help="seed for --mode random")
    place.add_argument("--population",
                       help="population CSV (default: bundled dataset)")
    place.add_argument("--mask",
                       help="land mask file (default: bundled mask)")
    place.add_argument("--receivers", default="1",
                       help="receivers per station, integer or 'unbounded'")
    place.set_defaults(func=cmd_place)

    solve = sub.add_parser("solve-once",
                           help="solve one instance JSON ('-' for stdin)")
    solve.add_argument("--instance", required=True,
                       help="instance JSON path or '-'")
    solve.add_argument("--solver", choices=harness.SOLVER_NAMES,
                       required=True)
    solve.add_argument("--seed", type=int, default=0)
    solve.set_defaults(func=cmd_solve_once)

    walker = sub.add_parser("gen-walker",
                            help="emit a Walker constellation as TLE text")
    walker.add_argument("--planes", type=int, required=True)
    walker.add_argument("--sats-per-plane", type=int, required=True)
    walker.add_argument("--inclination-deg", type=float, required=True)
    walker.add_argument("--altitude-m", type=float, required=True)
    walker.add_argument("--phasing", type=int, default=0)
    walker.add_argument("--epoch", required=True,
                        help="ISO-8601 UTC or unix seconds")
    walker.set_defaults(func=cmd_gen_walker)

    reduce3 = sub.add_parser("reduce-3dm",
                             help="rewrite a 3D-matching hypergraph as a "
                                  "scheduling instance")
    reduce3.add_argument("--hypergraph", required=True,
                         help="hypergraph JSON path or '-'")
    reduce3.set_defaults(func=cmd_reduce_3dm)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except harness.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except scheduler.InstanceTooLargeError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (orbital.TleParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
