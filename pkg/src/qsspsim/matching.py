"""Maximum-weight bipartite b-matching on top of a small min-cost-flow engine.

The b-matching is solved by the textbook reduction: a source feeds every
left vertex through an arc of capacity b(i), each edge becomes an arc of
capacity min(b(i), b(j)) and cost -w, and every right vertex drains into a
sink through an arc of capacity b(j).  Successive shortest augmenting paths
with node potentials then push flow while doing so still pays, stopping at
the first augmenting path whose cost is nonnegative.  That stopping rule is
what makes the result a maximum-weight matching rather than a maximum-
cardinality one.

The engine also exposes a plain min-cost flow with node supplies, which is
useful on its own and lets the brute-force tests exercise the machinery on
arbitrary small networks.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

# Stop augmenting once the cheapest path costs at least this (floating-point
# slack so rounding noise cannot keep the loop alive).
COST_TOLERANCE = 1e-12


class InfeasibleFlowError(ValueError):
    """Raised when the requested supplies cannot be routed."""


@dataclass(frozen=True)
class CapacitatedBipartiteGraph:
    """Bipartite graph with per-vertex integer capacities b(.) >= 1.

    edges are (left id, right id, weight) with positive finite weights and
    no duplicate (left, right) entries.
    """

    left_capacity: dict
    right_capacity: dict
    edges: tuple

    def __post_init__(self):
        for side, caps in (("left", self.left_capacity),
                           ("right", self.right_capacity)):
            for v, b in caps.items():
                if not isinstance(b, int) or b < 1:
                    raise ValueError(f"{side} capacity b({v!r})={b!r} "
                                     "must be an integer >= 1")
        seen = set()
        for left, right, w in self.edges:
            if left not in self.left_capacity:
                raise ValueError(f"edge references unknown left vertex {left!r}")
            if right not in self.right_capacity:
                raise ValueError(f"edge references unknown right vertex {right!r}")
            if not (w > 0.0 and math.isfinite(w)):
                raise ValueError(f"edge ({left!r}, {right!r}) weight {w} "
                                 "must be positive and finite")
            if (left, right) in seen:
                raise ValueError(f"duplicate edge ({left!r}, {right!r})")
            seen.add((left, right))


@dataclass(frozen=True)
class BMatching:
    """Multiplicity map (left, right) -> positive count, plus its weight."""

    multiplicity: dict
    total_weight: float

    def count(self, left, right) -> int:
        return self.multiplicity.get((left, right), 0)


@dataclass
class FlowNetwork:
    """Residual network with paired forward/backward arcs.

    Arc k and arc k^1 are mutual residuals; forward arcs sit at even
    indices.  Adjacency lists keep insertion order, so callers control
    determinism by adding arcs in a fixed order.
    """

    num_nodes: int
    _head: list = field(default_factory=list)
    _residual: list = field(default_factory=list)
    _cost: list = field(default_factory=list)
    _adjacency: list = field(default_factory=list)

    def __post_init__(self):
        if not self._adjacency:
            self._adjacency = [[] for _ in range(self.num_nodes)]

    def add_arc(self, tail: int, head: int, capacity, cost: float) -> int:
        if not 0 <= tail < self.num_nodes or not 0 <= head < self.num_nodes:
            raise ValueError("arc endpoint out of range")
        if capacity < 0:
            raise ValueError("arc capacity must be nonnegative")
        index = len(self._head)
        self._head.append(head)
        self._residual.append(capacity)
        self._cost.append(cost)
        self._adjacency[tail].append(index)
        self._head.append(tail)
        self._residual.append(0)
        self._cost.append(-cost)
        self._adjacency[head].append(index + 1)
        return index

    def flow_on(self, arc_index: int):
        """Flow pushed through the forward arc added as arc_index."""
        return self._residual[arc_index ^ 1]

    def _initial_potentials(self) -> list:
        """Bellman-Ford from a virtual node linked to everything at cost 0.

        Handles negative arc costs; the caller guarantees there are no
        negative cycles, so num_nodes rounds converge.
        """
        potential = [0.0] * self.num_nodes
        for _ in range(self.num_nodes):
            changed = False
            for tail in range(self.num_nodes):
                for k in self._adjacency[tail]:
                    if self._residual[k] <= 0:
                        continue
                    candidate = potential[tail] + self._cost[k]
                    if candidate < potential[self._head[k]] - COST_TOLERANCE:
                        potential[self._head[k]] = candidate
                        changed = True
            if not changed:
                break
        return potential

    def _shortest_paths(self, source: int, potential: list):
        """Dijkstra over reduced costs; returns (distance, parent arc)."""
        dist = [math.inf] * self.num_nodes
        parent = [-1] * self.num_nodes
        dist[source] = 0.0
        heap = [(0.0, source)]
        done = [False] * self.num_nodes
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for k in self._adjacency[u]:
                if self._residual[k] <= 0:
                    continue
                v = self._head[k]
                if done[v]:
                    continue
                # Rounding can push a reduced cost a hair below zero.
                reduced = max(0.0, self._cost[k] + potential[u] - potential[v])
                if d + reduced < dist[v] - COST_TOLERANCE:
                    dist[v] = d + reduced
                    parent[v] = k
                    heapq.heappush(heap, (dist[v], v))
        return dist, parent

    def _augment(self, source: int, sink: int, parent: list, limit):
        """Push the bottleneck (capped at limit) along the parent-arc path."""
        bottleneck = limit
        v = sink
        while v != source:
            k = parent[v]
            bottleneck = min(bottleneck, self._residual[k])
            v = self._head[k ^ 1]
        v = sink
        while v != source:
            k = parent[v]
            self._residual[k] -= bottleneck
            self._residual[k ^ 1] += bottleneck
            v = self._head[k ^ 1]
        return bottleneck

    def send_while_profitable(self, source: int, sink: int) -> None:
        """Augment source->sink while the cheapest path has negative cost."""
        potential = self._initial_potentials()
        while True:
            dist, parent = self._shortest_paths(source, potential)
            if dist[sink] == math.inf:
                return
            true_cost = dist[sink] + potential[sink] - potential[source]
            if true_cost >= -COST_TOLERANCE:
                return
            self._augment(source, sink, parent, math.inf)
            for v in range(self.num_nodes):
                if dist[v] < math.inf:
                    potential[v] += dist[v]

    def send_exact(self, source: int, sink: int, amount) -> None:
        """Route exactly amount units source->sink at minimum cost."""
        potential = self._initial_potentials()
        remaining = amount
        while remaining > 0:
            dist, parent = self._shortest_paths(source, potential)
            if dist[sink] == math.inf:
                raise InfeasibleFlowError(
                    f"only {amount - remaining} of {amount} units routable")
            remaining -= self._augment(source, sink, parent, remaining)
            for v in range(self.num_nodes):
                if dist[v] < math.inf:
                    potential[v] += dist[v]

    def total_cost(self) -> float:
        return sum(self._cost[k] * self._residual[k ^ 1]
                   for k in range(0, len(self._head), 2))


def min_cost_flow(num_nodes: int, arcs, supplies):
    """Minimum-cost flow meeting the given node supplies exactly.

    arcs is a sequence of (tail, head, capacity, cost); supplies maps node
    index -> balance (positive = source, negative = demand) and must sum to
    zero.  Returns (total cost, per-arc flow list).  The flow is integral
    whenever capacities and supplies are.  Raises InfeasibleFlowError when
    the supplies cannot be routed.
    """
    balance = [0] * num_nodes
    for node, amount in supplies.items():
        if not 0 <= node < num_nodes:
            raise ValueError(f"supply node {node} out of range")
        balance[node] += amount
    if sum(balance) != 0:
        raise InfeasibleFlowError("supplies do not balance demands")

    net = FlowNetwork(num_nodes + 2)
    arc_indices = [net.add_arc(t, h, cap, cost) for t, h, cap, cost in arcs]
    source, sink = num_nodes, num_nodes + 1
    total_supply = 0
    for node, b in enumerate(balance):
        if b > 0:
            net.add_arc(source, node, b, 0.0)
            total_supply += b
        elif b < 0:
            net.add_arc(node, sink, -b, 0.0)
    net.send_exact(source, sink, total_supply)
    flows = [net.flow_on(k) for k in arc_indices]
    cost = sum(f * a[3] for f, a in zip(flows, arcs))
    return cost, flows


def max_weight_b_matching(graph: CapacitatedBipartiteGraph) -> BMatching:
    """Maximum-weight b-matching of a capacitated bipartite graph.

    Multiplicities are integral, respect both vertex capacities, and the
    total weight is optimal.  Ties between equal-weight optima are broken
    deterministically by processing edges in (left, right) id order.
    """
    if not graph.edges:
        return BMatching(multiplicity={}, total_weight=0.0)

    lefts = sorted(graph.left_capacity)
    rights = sorted(graph.right_capacity)
    left_index = {v: 2 + i for i, v in enumerate(lefts)}
    right_index = {v: 2 + len(lefts) + i for i, v in enumerate(rights)}

    net = FlowNetwork(2 + len(lefts) + len(rights))
    source, sink = 0, 1
    for v in lefts:
        net.add_arc(source, left_index[v], graph.left_capacity[v], 0.0)
    edge_arcs = {}
    for left, right, w in sorted(graph.edges, key=lambda e: (e[0], e[1])):
        cap = min(graph.left_capacity[left], graph.right_capacity[right])
        edge_arcs[(left, right)] = net.add_arc(
            left_index[left], right_index[right], cap, -w)
    for v in rights:
        net.add_arc(right_index[v], sink, graph.right_capacity[v], 0.0)

    net.send_while_profitable(source, sink)

    weight_of = {(left, right): w for left, right, w in graph.edges}
    multiplicity = {}
    total = 0.0
    for key, arc in edge_arcs.items():
        m = net.flow_on(arc)
        if m > 0:
            multiplicity[key] = m
            total += m * weight_of[key]
    return BMatching(multiplicity=multiplicity, total_weight=total)
