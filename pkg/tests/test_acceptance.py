"""End-to-end acceptance suite.

One test per shipped guarantee: exact-solver correctness against blind
enumeration, backoff optimality with unbounded receivers, the matching
reduction equivalence, b-matching optimality, coverage geometry, photon
statistics, heuristic feasibility under fuzzing, scenario-level heuristic
behavior, and byte-stable exports.  Wall-clock budgets are asserted so a
regression in asymptotics fails loudly instead of just slowly.
"""

import math
import statistics
import time

from qsspsim.channel import photon_number_dist
from qsspsim.harness import (
    ScenarioConfig,
    WalkerSpec,
    bundled_data_path,
    export_csv,
    run_scenario,
)
from qsspsim.matching import CapacitatedBipartiteGraph, max_weight_b_matching
from qsspsim.orbital import (
    EARTH_RADIUS_M,
    MU_EARTH,
    OrbitalElements,
    TimeGrid,
    footprint_radius,
)
from qsspsim.rng import SplitMix64
from qsspsim.scheduler import (
    UNBOUNDED,
    InstanceTooLargeError,
    brute_force_3dm,
    reduce_3dm_to_qssp,
    solve_exact,
    solve_global_greedy,
    solve_greedy_backoff,
    solve_local_greedy,
    solve_random,
    verify_feasible,
)

from gen import random_hypergraph, random_qssp_instance
from oracles import brute_force_b_matching, enumerate_qssp_optimum

EQUINOX_2026_09_23 = 1_790_121_600.0


def drawn_instances(rng, count, **kwargs):
    """Yield count instances the exact solver accepts, resampling the
    astronomically rare draws whose search tree exceeds its size limit."""
    produced = 0
    while produced < count:
        inst = random_qssp_instance(rng, **kwargs)
        try:
            exact = solve_exact(inst)
        except InstanceTooLargeError:
            continue
        produced += 1
        yield inst, exact


def test_exact_solver_matches_enumeration_on_500_instances():
    started = time.monotonic()
    rng = SplitMix64(11)
    for k, (inst, exact) in enumerate(drawn_instances(rng, 500)):
        assert exact.objective == enumerate_qssp_optimum(inst)
        verify_feasible(inst, exact)
        for sol in (solve_random(inst, k), solve_local_greedy(inst, k),
                    solve_global_greedy(inst), solve_greedy_backoff(inst)):
            verify_feasible(inst, sol)
            assert sol.objective <= exact.objective
    assert time.monotonic() - started < 30.0


def test_backoff_is_optimal_with_unbounded_receivers_200_instances():
    started = time.monotonic()
    rng = SplitMix64(12)
    for inst, exact in drawn_instances(rng, 200, unbounded_stations=True):
        assert solve_greedy_backoff(inst).objective == exact.objective
    assert time.monotonic() - started < 30.0


def test_matching_reduction_agrees_with_hypergraph_search_200_cases():
    started = time.monotonic()
    rng = SplitMix64(13)
    for _ in range(200):
        h = random_hypergraph(rng)
        inst, _ = reduce_3dm_to_qssp(h)
        assert solve_exact(inst).objective == brute_force_3dm(h)
    assert time.monotonic() - started < 60.0


def random_bipartite(rng):
    left = {f"L{k}": 1 + rng.randrange(3) for k in range(1 + rng.randrange(3))}
    right = {f"R{k}": 1 + rng.randrange(3) for k in range(1 + rng.randrange(2))}
    edges = tuple(
        (l, r, (1 + rng.randrange(400)) / 8.0)
        for l in sorted(left) for r in sorted(right)
        if rng.randrange(10) < 7
    )
    return CapacitatedBipartiteGraph(left_capacity=left,
                                     right_capacity=right, edges=edges)


def test_b_matching_matches_brute_force_on_500_graphs():
    started = time.monotonic()
    rng = SplitMix64(14)
    for _ in range(500):
        g = random_bipartite(rng)
        got = max_weight_b_matching(g)
        want = brute_force_b_matching(g.left_capacity, g.right_capacity,
                                      g.edges)
        assert abs(got.total_weight - want) <= 1e-9
    assert time.monotonic() - started < 30.0


def test_coverage_geometry_and_orbital_period():
    radius = footprint_radius(550e3, 20.0)
    assert abs(radius - 1_125_000.0) <= 10_000.0
    # two stations can share a satellite only within twice the footprint
    assert abs(2.0 * radius - 2_250_000.0) <= 20_000.0

    semi_major = EARTH_RADIUS_M + 550e3
    rev_day = 86400.0 / (2.0 * math.pi) * math.sqrt(MU_EARTH / semi_major**3)
    el = OrbitalElements(
        satellite_id="probe", epoch=EQUINOX_2026_09_23,
        inclination_deg=53.0, raan_deg=0.0, eccentricity=0.0,
        arg_perigee_deg=0.0, mean_anomaly_deg=0.0,
        mean_motion_rev_day=rev_day,
    )
    assert 94.0 <= el.period_s / 60.0 <= 102.0


def test_photon_number_distribution_normalizes():
    for pump in (0.01, 0.078, 0.3, 1.0):
        total = sum(photon_number_dist(pump, n) for n in range(201))
        assert abs(total - 1.0) <= 1e-12
    # closed form at n = 0: 1 / (N_s + 1)^2
    assert abs(photon_number_dist(0.078, 0) - 1.0 / 1.078**2) <= 1e-12


def test_heuristics_stay_feasible_on_1000_fuzzed_instances_each():
    started = time.monotonic()
    rng = SplitMix64(17)
    for k in range(1000):
        inst = random_qssp_instance(
            rng, max_sats=6, max_pairs=6, max_cap=3,
            unbounded_stations=(k % 5 == 0), weight_density=7)
        verify_feasible(inst, solve_random(inst, k))
        verify_feasible(inst, solve_local_greedy(inst, k + 1))
        verify_feasible(inst, solve_global_greedy(inst))
        verify_feasible(inst, solve_greedy_backoff(inst))
    assert time.monotonic() - started < 60.0


def trend_config(solver, receivers):
    """The bundled trend scenario: a 12x18 Walker shell at 550 km / 53 deg
    over the 20 most populous bundled cities, 24 hours of 1-minute slots.
    Pair capacity follows the receiver count (L_j = min R_g)."""
    return ScenarioConfig(
        time_grid=TimeGrid(start=EQUINOX_2026_09_23, slot_seconds=60,
                           slot_count=1440),
        solver=solver,
        station_count=20,
        walker=WalkerSpec(planes=12, sats_per_plane=18,
                          inclination_deg=53.0, altitude_m=550e3, phasing=1),
        population_path=str(bundled_data_path("population_centers.csv")),
        station_receivers=receivers,
        default_l=UNBOUNDED,
        solver_seed=1,
    )


def median_episode(histogram):
    durations = [d for d in sorted(histogram) for _ in range(histogram[d])]
    return statistics.median(durations) if durations else 0


def test_trend_scenario_heuristic_behavior():
    started = time.monotonic()
    runs = {name: run_scenario(trend_config(name, receivers=1))
            for name in ("random", "local_greedy", "global_greedy",
                         "greedy_backoff")}
    wide = run_scenario(trend_config("greedy_backoff", receivers=5))

    rate = {name: series.summary.mean_aggregate_rate_ebits_s
            for name, series in runs.items()}
    problems = []

    if abs(rate["greedy_backoff"] - rate["global_greedy"]) \
            > 0.05 * rate["global_greedy"]:
        problems.append(
            "GREEDY_BACKOFF and GLOBAL_GREEDY differ by more than 5%: "
            f"{rate['greedy_backoff']:.4e} vs {rate['global_greedy']:.4e}")
    if rate["global_greedy"] < rate["random"]:
        problems.append(
            f"GLOBAL_GREEDY mean rate {rate['global_greedy']:.4e} fell "
            f"below RANDOM {rate['random']:.4e}")
    if rate["random"] < rate["local_greedy"]:
        problems.append(
            f"RANDOM mean rate {rate['random']:.4e} is below LOCAL_GREEDY "
            f"{rate['local_greedy']:.4e}: in this 216-satellite shell a "
            "pair rarely sees more than two satellites at once, so the "
            "per-pair argmax beats connection-biased random draws; the "
            "crossover needs a far denser constellation (see the project "
            "decision ledger)")

    improvement = rate["greedy_backoff"] and (
        wide.summary.mean_aggregate_rate_ebits_s / rate["greedy_backoff"])
    if improvement < 1.10:
        problems.append(
            "going from 1 receiver to 5 improved GREEDY_BACKOFF by "
            f"only {improvement:.3f}x (need >= 1.10x)")

    backoff = runs["greedy_backoff"].summary
    if not (backoff.fidelity_day is not None
            and backoff.fidelity_night is not None
            and backoff.fidelity_day < backoff.fidelity_night):
        problems.append(
            f"day fidelity {backoff.fidelity_day!r} not below night "
            f"fidelity {backoff.fidelity_night!r}")

    gb_median = median_episode(runs["greedy_backoff"].longevity)
    lg_median = median_episode(runs["local_greedy"].longevity)
    if gb_median < lg_median:
        problems.append(
            f"GREEDY_BACKOFF median connection episode {gb_median} slots "
            f"is shorter than LOCAL_GREEDY's {lg_median}")

    assert not problems, "; ".join(problems)
    assert time.monotonic() - started < 600.0


def test_identical_configs_export_identical_bytes(tmp_path):
    def config():
        return ScenarioConfig(
            time_grid=TimeGrid(start=EQUINOX_2026_09_23, slot_seconds=60,
                               slot_count=90),
            solver="random",
            station_count=8,
            walker=WalkerSpec(planes=4, sats_per_plane=6,
                              inclination_deg=53.0, altitude_m=550e3,
                              phasing=1),
            population_path=str(bundled_data_path("population_centers.csv")),
            station_receivers=2,
            solver_seed=9,
        )

    first = export_csv(run_scenario(config()), tmp_path / "first")
    second = export_csv(run_scenario(config()), tmp_path / "second")
    assert [p.name for p in first] == [p.name for p in second]
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()
