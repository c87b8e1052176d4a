"""Single-slot scheduling of satellite downlink pairs.

An instance assigns satellites to ground-station pairs.  Each satellite i
can serve at most T_i pair-connections, each pair j can accept at most L_j,
and each ground station g owns R_g receivers, so connections of all pairs
touching g can use at most R_g of them.  A connection (i, j) delivers
weight w_ij per unit, multiplicities are integers, and the goal is to
maximize total weight.

Solvers:

- solve_random, solve_local_greedy, solve_global_greedy: one shared
  constructive loop (pick a live connection, commit one unit, drop
  whatever became saturated) with three pick rules.
- solve_greedy_backoff: rounds of maximum-weight b-matching that ignore
  the receiver constraint, then back off the cheapest violating units
  until receivers fit.  Exact when every R_g is unbounded.
- solve_exact: branch-and-bound oracle for small instances; refuses
  instances whose search tree would be too large rather than hanging.

A maximum 3-dimensional matching instance can be rewritten as a scheduling
instance with all capacities and weights equal to one; the optimum then
equals the maximum matching cardinality.  brute_force_3dm provides the
independent value for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .matching import CapacitatedBipartiteGraph, max_weight_b_matching
from .rng import SplitMix64

UNBOUNDED = math.inf

# solve_exact refuses instances whose enumeration tree exceeds this.
EXACT_TREE_LIMIT = 10_000_000

# brute_force_3dm refuses hypergraphs with more edges than this.
BRUTE_FORCE_EDGE_LIMIT = 20


class InstanceTooLargeError(ValueError):
    """Raised when an exhaustive solver refuses an oversized instance."""


def _check_capacity(label: str, value) -> None:
    if value is UNBOUNDED or value == math.inf:
        return
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ValueError(f"{label} capacity {value!r} must be a "
                         "nonnegative integer or unbounded")


@dataclass(frozen=True)
class QsspInstance:
    """One slot's scheduling problem.

    satellite_capacity maps satellite id -> T_i (finite); pair_stations
    maps pair id -> its two distinct station ids; pair_capacity maps pair
    id -> L_j; station_capacity maps station id -> R_g; pair and station
    capacities may be math.inf for unbounded.  weights maps (satellite id,
    pair id) -> w_ij > 0 and is sparse, absent connections have weight
    zero and are never scheduled.
    """

    satellite_capacity: dict
    pair_stations: dict
    pair_capacity: dict
    station_capacity: dict
    weights: dict

    def __post_init__(self):
        for i, t in self.satellite_capacity.items():
            if not isinstance(t, int) or isinstance(t, bool) or t < 0:
                raise ValueError(f"satellite {i!r} capacity {t!r} must be "
                                 "a nonnegative integer")
        for g, r in self.station_capacity.items():
            _check_capacity(f"station {g!r}", r)
        if set(self.pair_capacity) != set(self.pair_stations):
            raise ValueError("pair_capacity and pair_stations must cover "
                             "the same pair ids")
        for j, (a, b) in self.pair_stations.items():
            if a == b:
                raise ValueError(f"pair {j!r} repeats station {a!r}")
            for g in (a, b):
                if g not in self.station_capacity:
                    raise ValueError(f"pair {j!r} references unknown "
                                     f"station {g!r}")
        for j, cap in self.pair_capacity.items():
            _check_capacity(f"pair {j!r}", cap)
        for (i, j), w in self.weights.items():
            if i not in self.satellite_capacity:
                raise ValueError(f"weight references unknown satellite {i!r}")
            if j not in self.pair_stations:
                raise ValueError(f"weight references unknown pair {j!r}")
            if not (w > 0.0 and math.isfinite(w)):
                raise ValueError(f"weight w[{i!r}, {j!r}] = {w!r} must be "
                                 "positive and finite")

    def connections(self) -> list:
        """Connections with nonzero weight, sorted by (satellite, pair)."""
        return sorted(self.weights)

    def to_json_dict(self) -> dict:
        return {
            "satellites": {i: t for i, t in sorted(self.satellite_capacity.items())},
            "stations": {
                g: ("unbounded" if r == UNBOUNDED else r)
                for g, r in sorted(self.station_capacity.items())
            },
            "pairs": {
                j: {"stations": list(self.pair_stations[j]),
                    "capacity": ("unbounded"
                                 if self.pair_capacity[j] == UNBOUNDED
                                 else self.pair_capacity[j])}
                for j in sorted(self.pair_stations)
            },
            "weights": _nest(self.weights),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "QsspInstance":
        stations = {
            g: (UNBOUNDED if r == "unbounded" else r)
            for g, r in data["stations"].items()
        }
        return cls(
            satellite_capacity=dict(data["satellites"]),
            pair_stations={j: (p["stations"][0], p["stations"][1])
                           for j, p in data["pairs"].items()},
            pair_capacity={j: (UNBOUNDED if p["capacity"] == "unbounded"
                               else p["capacity"])
                           for j, p in data["pairs"].items()},
            station_capacity=stations,
            weights=_unnest(data["weights"]),
        )


@dataclass(frozen=True)
class Assignment:
    """Sparse multiplicity map (satellite, pair) -> units, with its value."""

    x: dict
    objective: float

    def to_json_dict(self) -> dict:
        return {"x": _nest(self.x), "objective": self.objective}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Assignment":
        return cls(x=_unnest(data["x"]), objective=data["objective"])


def _nest(flat: dict) -> dict:
    """{(a, b): v} -> {a: {b: v}} with both levels sorted."""
    out: dict = {}
    for (a, b) in sorted(flat):
        out.setdefault(a, {})[b] = flat[(a, b)]
    return out


def _unnest(nested: dict) -> dict:
    return {(a, b): v for a, inner in nested.items() for b, v in inner.items()}


def _make_assignment(inst: QsspInstance, x: dict) -> Assignment:
    kept = {k: v for k, v in sorted(x.items()) if v > 0}
    objective = sum(inst.weights[k] * v for k, v in kept.items())
    return Assignment(x=kept, objective=objective)


def verify_feasible(inst: QsspInstance, assignment: Assignment):
    """Check an assignment against all capacity constraints.

    Returns (feasible, violations) where violations is a deterministic
    list of human-readable strings.  Unknown connection ids raise.
    """
    violations = []
    for (i, j), v in sorted(assignment.x.items()):
        if i not in inst.satellite_capacity or j not in inst.pair_stations:
            raise ValueError(f"assignment references unknown connection "
                             f"({i!r}, {j!r})")
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            violations.append(f"x[{i}, {j}] = {v!r} is not a nonnegative integer")

    sat_load: dict = {}
    pair_load: dict = {}
    station_load: dict = {}
    for (i, j), v in assignment.x.items():
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            continue
        sat_load[i] = sat_load.get(i, 0) + v
        pair_load[j] = pair_load.get(j, 0) + v
        for g in inst.pair_stations[j]:
            station_load[g] = station_load.get(g, 0) + v

    for i in sorted(sat_load):
        if sat_load[i] > inst.satellite_capacity[i]:
            violations.append(
                f"satellite {i}: {sat_load[i]} connections exceed "
                f"capacity {inst.satellite_capacity[i]}")
    for j in sorted(pair_load):
        if pair_load[j] > inst.pair_capacity[j]:
            violations.append(
                f"pair {j}: {pair_load[j]} connections exceed "
                f"capacity {inst.pair_capacity[j]}")
    for g in sorted(station_load):
        if station_load[g] > inst.station_capacity[g]:
            violations.append(
                f"station {g}: {station_load[g]} connections exceed "
                f"receiver capacity {inst.station_capacity[g]}")
    return (not violations, violations)


class WorkingState:
    """Mutable residual capacities plus the live connection list.

    A connection is live while its satellite, pair, and both stations all
    have residual capacity.  The live list is kept sorted by (satellite,
    pair) so that index-based random picks are reproducible.
    """

    def __init__(self, inst: QsspInstance):
        self.inst = inst
        self.residual_satellite = dict(inst.satellite_capacity)
        self.residual_pair = dict(inst.pair_capacity)
        self.residual_station = dict(inst.station_capacity)
        self.x: dict = {}
        self.live = [
            (i, j) for (i, j) in inst.connections()
            if self.residual_satellite[i] >= 1
            and self.residual_pair[j] >= 1
            and all(self.residual_station[g] >= 1
                    for g in inst.pair_stations[j])
        ]

    def weight(self, i, j) -> float:
        return self.inst.weights[(i, j)]

    def to_assignment(self) -> Assignment:
        return _make_assignment(self.inst, self.x)


def update_state(state: WorkingState, i, j) -> None:
    """Commit one unit of connection (i, j) and prune saturated entities.

    Increments x_ij, decrements the four residual capacities, and removes
    from the live list every connection touching an entity whose residual
    reached zero.  The connection must currently be live.
    """
    if (i, j) not in state.inst.weights:
        raise ValueError(f"({i!r}, {j!r}) is not a connection of this instance")
    if (i, j) not in state.live:
        raise ValueError(f"connection ({i!r}, {j!r}) is not live")
    stations = state.inst.pair_stations[j]
    if (state.residual_satellite[i] < 1 or state.residual_pair[j] < 1
            or any(state.residual_station[g] < 1 for g in stations)):
        raise ValueError(f"connection ({i!r}, {j!r}) has an exhausted entity")

    state.x[(i, j)] = state.x.get((i, j), 0) + 1
    state.residual_satellite[i] -= 1
    state.residual_pair[j] -= 1
    for g in stations:
        state.residual_station[g] -= 1

    dead_sat = i if state.residual_satellite[i] == 0 else None
    dead_pair = j if state.residual_pair[j] == 0 else None
    dead_stations = {g for g in stations if state.residual_station[g] == 0}
    if dead_sat is None and dead_pair is None and not dead_stations:
        return
    state.live = [
        (i2, j2) for (i2, j2) in state.live
        if i2 != dead_sat and j2 != dead_pair
        and not dead_stations.intersection(state.inst.pair_stations[j2])
    ]


def solve_random(inst: QsspInstance, seed: int) -> Assignment:
    """Commit uniformly random live connections until none remain."""
    state = WorkingState(inst)
    rng = SplitMix64(seed)
    while state.live:
        i, j = state.live[rng.randrange(len(state.live))]
        update_state(state, i, j)
    return state.to_assignment()


def solve_local_greedy(inst: QsspInstance, seed: int) -> Assignment:
    """Pick a pair uniformly at random, then its best satellite.

    The pair is drawn from the pairs that still have a live connection;
    the satellite maximizes w_ij, ties going to the lowest satellite id.
    """
    state = WorkingState(inst)
    rng = SplitMix64(seed)
    while state.live:
        live_pairs = sorted({j for (_, j) in state.live})
        j = live_pairs[rng.randrange(len(live_pairs))]
        best = None
        for (i2, j2) in state.live:
            if j2 != j:
                continue
            if best is None or state.weight(i2, j2) > state.weight(best, j):
                best = i2
        update_state(state, best, j)
    return state.to_assignment()


def solve_global_greedy(inst: QsspInstance) -> Assignment:
    """Repeatedly commit the live connection with the largest weight.

    Ties break on the lowest (satellite, pair) id pair; the solver is
    deterministic with no seed.
    """
    state = WorkingState(inst)
    while state.live:
        best = state.live[0]
        best_w = state.weight(*best)
        for conn in state.live[1:]:
            w = state.weight(*conn)
            if w > best_w:
                best, best_w = conn, w
        update_state(state, *best)
    return state.to_assignment()


def solve_greedy_backoff(inst: QsspInstance) -> Assignment:
    """Rounds of receiver-blind b-matching followed by violation backoff.

    Each round solves a maximum-weight b-matching over the live
    connections with the residual satellite and pair capacities as vertex
    bounds, ignoring receivers entirely.  Units of the tentative matching
    are then removed, cheapest first (ties by connection id), while any
    station is over its receiver capacity.  Whatever survives commits
    permanently.  Rounds repeat while the previous round had to remove
    something and live connections remain.  With every R_g unbounded the
    first round's matching is already optimal and commits unchanged.
    """
    state = WorkingState(inst)
    while state.live:
        left = {}
        right = {}
        for (i, j) in state.live:
            left[i] = state.residual_satellite[i]
            right[j] = state.residual_pair[j]
        for j, cap in right.items():
            if cap == UNBOUNDED:
                # finite stand-in: a pair can never exceed what its
                # incident satellites can supply
                right[j] = sum(left[i] for (i, j2) in state.live if j2 == j)
        graph = CapacitatedBipartiteGraph(
            left_capacity=left,
            right_capacity=right,
            edges=tuple((i, j, state.weight(i, j)) for (i, j) in state.live),
        )
        tentative = dict(max_weight_b_matching(graph).multiplicity)
        if not tentative:
            break

        removed_any = False
        while True:
            load: dict = {}
            for (i, j), m in tentative.items():
                for g in state.inst.pair_stations[j]:
                    load[g] = load.get(g, 0) + m
            over = {g for g, used in load.items()
                    if used > state.residual_station[g]}
            if not over:
                break
            victim = None
            for (i, j) in sorted(tentative):
                if not over.intersection(state.inst.pair_stations[j]):
                    continue
                if victim is None or state.weight(i, j) < state.weight(*victim):
                    victim = (i, j)
            tentative[victim] -= 1
            if tentative[victim] == 0:
                del tentative[victim]
            removed_any = True

        for (i, j) in sorted(tentative):
            for _ in range(tentative[(i, j)]):
                update_state(state, i, j)
        if not removed_any:
            break
    return state.to_assignment()


def solve_exact(inst: QsspInstance, tree_limit: int = EXACT_TREE_LIMIT) -> Assignment:
    """Provably optimal assignment by depth-first branch and bound.

    Connections are branched in (satellite, pair) order, multiplicities
    high first, with an optimistic bound of remaining weight times
    residual capacity.  Raises InstanceTooLargeError instead of starting
    when the full enumeration tree would exceed tree_limit nodes.
    """
    conns = inst.connections()
    caps = {}
    tree_size = 1
    for (i, j) in conns:
        gl, gm = inst.pair_stations[j]
        cap = min(inst.satellite_capacity[i], inst.pair_capacity[j],
                  inst.station_capacity[gl], inst.station_capacity[gm])
        caps[(i, j)] = int(cap)
        tree_size *= caps[(i, j)] + 1
        if tree_size > tree_limit:
            raise InstanceTooLargeError(
                f"enumeration tree exceeds {tree_limit} nodes; "
                "instance too large for the exact solver")

    res_sat = dict(inst.satellite_capacity)
    res_pair = dict(inst.pair_capacity)
    res_station = dict(inst.station_capacity)
    best_x: dict = {}
    best_value = 0.0
    x: dict = {}

    def dfs(k: int, value: float) -> None:
        nonlocal best_x, best_value
        if value > best_value:
            best_value = value
            best_x = dict(x)
        if k == len(conns):
            return
        bound = value
        for (i2, j2) in conns[k:]:
            g2l, g2m = inst.pair_stations[j2]
            room = min(res_sat[i2], res_pair[j2],
                       res_station[g2l], res_station[g2m])
            bound += inst.weights[(i2, j2)] * room
        if bound <= best_value:
            return
        i, j = conns[k]
        gl, gm = inst.pair_stations[j]
        room = int(min(res_sat[i], res_pair[j],
                       res_station[gl], res_station[gm]))
        w = inst.weights[(i, j)]
        for m in range(room, -1, -1):
            if m > 0:
                x[(i, j)] = m
                res_sat[i] -= m
                res_pair[j] -= m
                res_station[gl] -= m
                res_station[gm] -= m
            dfs(k + 1, value + m * w)
            if m > 0:
                del x[(i, j)]
                res_sat[i] += m
                res_pair[j] += m
                res_station[gl] += m
                res_station[gm] += m

    dfs(0, 0.0)
    return _make_assignment(inst, best_x)


@dataclass(frozen=True)
class ThreeDMInstance:
    """Tripartite hypergraph: hyperedges are triples from v1 x v2 x v3."""

    v1: frozenset
    v2: frozenset
    v3: frozenset
    hyperedges: tuple

    def __post_init__(self):
        seen = set()
        for edge in self.hyperedges:
            if len(edge) != 3:
                raise ValueError(f"hyperedge {edge!r} is not a triple")
            a, b, c = edge
            if a not in self.v1 or b not in self.v2 or c not in self.v3:
                raise ValueError(f"hyperedge {edge!r} has a vertex outside "
                                 "its vertex set")
            if edge in seen:
                raise ValueError(f"duplicate hyperedge {edge!r}")
            seen.add(edge)

    def to_json_dict(self) -> dict:
        return {
            "v1": sorted(self.v1),
            "v2": sorted(self.v2),
            "v3": sorted(self.v3),
            "hyperedges": [list(e) for e in sorted(self.hyperedges)],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ThreeDMInstance":
        return cls(
            v1=frozenset(data["v1"]),
            v2=frozenset(data["v2"]),
            v3=frozenset(data["v3"]),
            hyperedges=tuple(tuple(e) for e in data["hyperedges"]),
        )


def reduce_3dm_to_qssp(h: ThreeDMInstance):
    """Rewrite maximum 3-dimensional matching as a scheduling instance.

    Every first-component vertex that appears in a hyperedge becomes a
    satellite, every second/third-component vertex a station, and every
    distinct (second, third) combination a pair; each hyperedge becomes a
    unit-weight connection, and all capacities are one.  The optimum of
    the produced instance equals the maximum matching cardinality.

    Returns (instance, correspondence) where correspondence maps each
    hyperedge to its (satellite id, pair id) connection.
    """
    edges = sorted(h.hyperedges)
    sat_id = {v: f"s{n}" for n, v in enumerate(sorted({e[0] for e in edges}))}
    ga_id = {v: f"ga{n}" for n, v in enumerate(sorted({e[1] for e in edges}))}
    gb_id = {v: f"gb{n}" for n, v in enumerate(sorted({e[2] for e in edges}))}
    combos = sorted({(e[1], e[2]) for e in edges})
    pair_id = {combo: f"j{n}" for n, combo in enumerate(combos)}

    inst = QsspInstance(
        satellite_capacity={s: 1 for s in sat_id.values()},
        pair_stations={pair_id[(b, c)]: (ga_id[b], gb_id[c])
                       for (b, c) in combos},
        pair_capacity={j: 1 for j in pair_id.values()},
        station_capacity={g: 1 for g in list(ga_id.values()) + list(gb_id.values())},
        weights={(sat_id[a], pair_id[(b, c)]): 1.0 for (a, b, c) in edges},
    )
    correspondence = {(a, b, c): (sat_id[a], pair_id[(b, c)])
                      for (a, b, c) in edges}
    return inst, correspondence


def brute_force_3dm(h: ThreeDMInstance,
                    max_edges: int = BRUTE_FORCE_EDGE_LIMIT) -> int:
    """Maximum cardinality of a pairwise-disjoint hyperedge set.

    Exhaustive search; refuses hypergraphs with more than max_edges
    hyperedges.
    """
    edges = sorted(h.hyperedges)
    if len(edges) > max_edges:
        raise InstanceTooLargeError(
            f"{len(edges)} hyperedges exceed the exhaustive-search limit "
            f"of {max_edges}")
    best = 0

    def dfs(k: int, used1: set, used2: set, used3: set, count: int) -> None:
        nonlocal best
        best = max(best, count)
        if k == len(edges) or count + (len(edges) - k) <= best:
            return
        a, b, c = edges[k]
        if a not in used1 and b not in used2 and c not in used3:
            dfs(k + 1, used1 | {a}, used2 | {b}, used3 | {c}, count + 1)
        dfs(k + 1, used1, used2, used3, count)

    dfs(0, set(), set(), set(), 0)
    return best
