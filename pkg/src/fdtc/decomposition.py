"""Types of cut curves on a closed surface assembled from periodic pieces.

A *piece orbit* is a set of ``k`` homeomorphic pieces of genus ``h``, cycled
by the monodromy.  A *curve orbit* of ``c`` curves joins two piece orbits; curve
``j`` lands on piece ``(j + t) mod k`` at each end.  Offsets along a spanning
forest can be normalised to zero; every other offset is a genuine choice, so
all of them are tried and a type is reported only when every connected
realization agrees.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd
from typing import Hashable, Mapping, Sequence

MAX_REALIZATIONS = 4096


@dataclass(frozen=True)
class CurveOrbit:
    key: Hashable
    end1: Hashable
    end2: Hashable  # ignored for amphidrome orbits
    curves: int
    amphidrome: bool = False


def _components(n_nodes: int, edges: Sequence[tuple[int, int]], skip: int | None) -> list[int]:
    parent = list(range(n_nodes))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, (u, v) in enumerate(edges):
        if i != skip:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    return [find(x) for x in range(n_nodes)]


def _realize(nodes, orbits, choice, offsets):
    """Explicit piece graph for one choice of (k, h) per node and offsets."""
    index: dict[tuple, int] = {}
    genus_of: list[int] = []
    for key, (k, h) in zip(nodes, choice):
        for i in range(k):
            index[(key, i)] = len(genus_of)
            genus_of.append(h)
    k_of = {key: k for key, (k, _h) in zip(nodes, choice)}
    edges: list[tuple[int, int]] = []
    first_edge: dict[Hashable, int] = {}
    for orbit in orbits:
        first_edge[orbit.key] = len(edges)
        ka = k_of[orbit.end1]
        if orbit.amphidrome:
            for j in range(orbit.curves):
                edges.append((index[(orbit.end1, j % ka)], index[(orbit.end1, (j + orbit.curves) % ka)]))
        else:
            kb = k_of[orbit.end2]
            t = offsets.get(orbit.key, 0)
            for j in range(orbit.curves):
                edges.append((index[(orbit.end1, j % ka)], index[(orbit.end2, (j + t) % kb)]))
    return genus_of, edges, first_edge


def _curve_type(genus_of, edges, e, genus):
    comp = _components(len(genus_of), edges, skip=e)
    u, v = edges[e]
    if comp[u] == comp[v]:
        return 0
    side = comp[u]
    nodes_a = [x for x in range(len(genus_of)) if comp[x] == side]
    edges_a = sum(1 for i, (a, b) in enumerate(edges) if i != e and comp[a] == side)
    g_a = sum(genus_of[x] for x in nodes_a) + edges_a - len(nodes_a) + 1
    return min(g_a, genus - g_a)


def curve_types(
    nodes: Mapping[Hashable, Sequence[tuple[int, int]]],
    orbits: Sequence[CurveOrbit],
    genus: int,
) -> dict[Hashable, int | None]:
    """Type of a representative curve of every orbit, or ``None`` if undetermined.

    ``nodes`` maps each piece orbit to its candidate ``(pieces, piece_genus)``
    pairs.  Realizations that are disconnected or of the wrong genus are
    discarded.
    """
    keys = list(nodes)
    result: dict[Hashable, int | None] = {o.key: None for o in orbits}
    if any(not nodes[k] for k in keys):
        return result
    node_choices = [list(nodes[k]) for k in keys]
    seen: dict[Hashable, set] = {o.key: set() for o in orbits}
    realizations = 0
    for choice in product(*node_choices):
        k_of = {key: k for key, (k, _h) in zip(keys, choice)}
        if not all(_spreads_evenly(o, k_of) for o in orbits):
            continue
        free = _free_offsets(keys, orbits, k_of)
        for values in product(*(range(r) for _key, r in free)):
            realizations += 1
            if realizations > MAX_REALIZATIONS:
                return {o.key: None for o in orbits}
            offsets = {key: t for (key, _r), t in zip(free, values)}
            genus_of, edges, first_edge = _realize(keys, orbits, choice, offsets)
            comp = _components(len(genus_of), edges, skip=None)
            if len(set(comp)) != 1:
                continue
            if sum(genus_of) + len(edges) - len(genus_of) + 1 != genus:
                continue
            for o in orbits:
                seen[o.key].add(_curve_type(genus_of, edges, first_edge[o.key], genus))
    for key, types in seen.items():
        if len(types) == 1:
            result[key] = types.pop()
    return result


def _spreads_evenly(o: CurveOrbit, k_of) -> bool:
    # boundary circles of an orbit are shared equally among the pieces
    if o.amphidrome:
        return (2 * o.curves) % k_of[o.end1] == 0
    return o.curves % k_of[o.end1] == 0 and o.curves % k_of[o.end2] == 0


def _free_offsets(keys, orbits, k_of) -> list[tuple[Hashable, int]]:
    """Orbits whose attachment offset cannot be normalised away."""
    parent = {key: key for key in keys}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    free = []
    for o in orbits:
        if o.amphidrome:
            continue
        r = gcd(k_of[o.end1], k_of[o.end2])
        if o.end1 != o.end2:
            ra, rb = find(o.end1), find(o.end2)
            if ra != rb:
                parent[ra] = rb
                continue
        if r > 1:
            free.append((o.key, r))
    return free
