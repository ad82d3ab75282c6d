"""Exact enumeration of SAWs, polygons and bridges from the root.

Every walk of at most ``n`` steps stays inside the ball of radius ``n``, so we
materialize that ball once as an integer-indexed CSR adjacency and run
compiled backtracking kernels on it.  The walk tree is split at a fixed
prefix depth into independent subtasks; per-task results are summed in task
order, so the output does not depend on the worker count.
"""
from __future__ import annotations

from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, ConsistencyError, InputError
from .graphs import DEFAULT_BUDGET, GraphModel, Vertex, bfs_layers
from .height import HeightFunction
from .series import CountSeries, checked

PREFIX_DEPTH = 3


@dataclass
class Ball:
    """The ball of radius ``radius`` about ``center`` as CSR arrays.

    Vertices on the outer sphere get no outgoing edges: a walk reaching
    them has already used all its steps.
    """

    graph: GraphModel
    center: Vertex
    radius: int
    vertices: list[Vertex]
    index: dict[Vertex, int]
    indptr: np.ndarray
    indices: np.ndarray
    dist: np.ndarray

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]


_BALLS: OrderedDict = OrderedDict()
_BALL_CACHE_SIZE = 4


def build_ball(g: GraphModel, radius: int, center: Vertex | None = None, budget: int = DEFAULT_BUDGET) -> Ball:
    center = g.root if center is None else center
    key = (id(g), g.fingerprint(), center)
    cached = _BALLS.get(key)
    if cached is not None and cached.radius >= radius:
        _BALLS.move_to_end(key)
        return cached
    layers = bfs_layers(g, radius, center, budget)
    vertices = [v for layer in layers for v in layer]
    if len(vertices) > budget:
        raise BudgetExceeded(f"ball of radius {radius} has {len(vertices)} vertices > budget {budget}")
    index = {v: i for i, v in enumerate(vertices)}
    inner = len(vertices) - len(layers[-1])
    adj = g._adjacent
    indptr = np.zeros(len(vertices) + 1, np.int64)
    flat: list[int] = []
    for i in range(inner):
        flat.extend(index[u] for u in adj(vertices[i]))
        indptr[i + 1] = len(flat)
    indptr[inner + 1:] = len(flat)
    dist = np.empty(len(vertices), np.int64)
    pos = 0
    for d, layer in enumerate(layers):
        dist[pos:pos + len(layer)] = d
        pos += len(layer)
    ball = Ball(g, center, radius, vertices, index, indptr, np.asarray(flat, np.int64), dist)
    _BALLS[key] = ball
    while len(_BALLS) > _BALL_CACHE_SIZE:
        _BALLS.popitem(last=False)
    return ball


def clear_ball_cache():
    _BALLS.clear()


def _prefixes(ball: Ball, depth: int, admissible=None):
    """All SAW prefixes of exactly ``depth`` steps from vertex 0, plus the
    shorter dead-end walks met on the way (as ``(walk, complete)`` pairs)."""
    out = []
    path = [0]

    def rec():
        if len(path) - 1 == depth:
            out.append((tuple(path), True))
            return
        out.append((tuple(path), False))
        for u in ball.neighbors(path[-1]):
            u = int(u)
            if u in path or (admissible is not None and not admissible(u)):
                continue
            path.append(u)
            rec()
            path.pop()

    rec()
    return out


def _run(tasks, fn, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


@dataclass
class SawStatistics:
    counts: list[int]
    to_neighbor: list[int]
    histogram: dict[int, int]


def saw_statistics(
    g: GraphModel,
    n_max: int,
    hist_n: int | None = None,
    workers: int = 1,
    center: Vertex | None = None,
    budget: int = DEFAULT_BUDGET,
    prefix_depth: int = PREFIX_DEPTH,
) -> SawStatistics:
    """c_n, c_n(neighbours of the start) and the endpoint-distance histogram at
    ``hist_n``, all from one backtracking pass."""
    if n_max < 0:
        raise InputError("n_max must be nonnegative")
    if workers < 1:
        raise InputError("workers must be at least 1")
    ball = build_ball(g, n_max, center, budget)
    root_adj = np.zeros(len(ball.vertices), np.uint8)
    for u in ball.neighbors(0):
        root_adj[u] = 1
    hn = -1 if hist_n is None else hist_n
    counts = [0] * (n_max + 1)
    to_nbr = [0] * (n_max + 1)
    hist = [0] * (n_max + 1)
    depth = min(prefix_depth, n_max)
    tasks = []
    for walk, complete in _prefixes(ball, depth):
        if complete:
            tasks.append(np.asarray(walk, np.int64))
            continue
        m = len(walk) - 1
        counts[m] += 1
        to_nbr[m] += int(root_adj[walk[-1]])
        if m == hn:
            hist[int(ball.dist[walk[-1]])] += 1

    def task(prefix):
        c = np.zeros(n_max + 1, np.int64)
        a = np.zeros(n_max + 1, np.int64)
        hh = np.zeros(n_max + 1, np.int64)
        _kernels.saw_kernel(ball.indptr, ball.indices, root_adj, ball.dist, prefix, n_max, hn, c, a, hh)
        return c, a, hh

    for c, a, hh in _run(tasks, task, workers):
        for i in range(n_max + 1):
            counts[i] += int(c[i])
            to_nbr[i] += int(a[i])
            hist[i] += int(hh[i])
    for i in range(n_max + 1):
        checked(i, counts[i])
    histogram = {d: x for d, x in enumerate(hist) if x} if hist_n is not None else {}
    return SawStatistics(counts, to_nbr, histogram)


def count_saws(g: GraphModel, n_max: int, workers: int = 1, center: Vertex | None = None,
               budget: int = DEFAULT_BUDGET) -> CountSeries:
    stats = saw_statistics(g, n_max, workers=workers, center=center, budget=budget)
    return CountSeries("saw", g.name, dict(enumerate(stats.counts)))


def count_saws_to_neighbor(g: GraphModel, n_max: int, workers: int = 1,
                           budget: int = DEFAULT_BUDGET) -> CountSeries:
    """c_n(neighbours of root): n-step SAWs whose last vertex is adjacent to the root."""
    if n_max < 1:
        raise InputError("n_max must be at least 1")
    stats = saw_statistics(g, n_max, workers=workers, budget=budget)
    return CountSeries("saw_to_neighbor", g.name, dict(enumerate(stats.to_neighbor)))


def polygons_from_neighbor_counts(to_neighbor: list[int], n_max: int) -> dict[int, int]:
    out = {}
    for n in range(3, n_max + 1):
        c = to_neighbor[n - 1]
        if c % 2:
            raise ConsistencyError(f"c_{n - 1}(root neighbours) = {c} is odd")
        out[n] = c // 2
    return out


def count_polygons(g: GraphModel, n_max: int, workers: int = 1, budget: int = DEFAULT_BUDGET) -> CountSeries:
    """p_n for 3 <= n <= n_max: unoriented, unbased cycles through the root.

    Computed as c_{n-1}(root neighbours) / 2; each cycle is traversed once in
    each direction by SAWs leaving the root.
    """
    if n_max < 3:
        raise InputError("n_max must be at least 3")
    stats = saw_statistics(g, n_max - 1, workers=workers, budget=budget)
    return CountSeries("polygon", g.name, polygons_from_neighbor_counts(stats.to_neighbor, n_max))


def count_polygons_direct(g: GraphModel, n_max: int, budget: int = DEFAULT_BUDGET) -> dict[int, int]:
    """Cycle enumeration with one orientation kept (second vertex before
    penultimate in ball order); independent of the compiled kernels."""
    ball = build_ball(g, n_max, budget=budget)
    counts = dict.fromkeys(range(3, n_max + 1), 0)
    root_nbrs = {int(u) for u in ball.neighbors(0)}
    path = [0]
    on = {0}

    def rec():
        v = path[-1]
        steps = len(path) - 1
        if steps >= 2 and v in root_nbrs and path[1] < v:
            counts[steps + 1] += 1
        if steps + 1 >= n_max:
            return
        for u in ball.neighbors(v):
            u = int(u)
            if u not in on:
                path.append(u)
                on.add(u)
                rec()
                path.pop()
                on.discard(u)

    rec()
    return counts


def _heights(ball: Ball, h: HeightFunction) -> np.ndarray:
    return np.fromiter((h(v) for v in ball.vertices), np.int64, len(ball.vertices))


def _bridge_pass(g, h, n_max, census_n, workers, budget, prefix_depth=PREFIX_DEPTH):
    if n_max < 0:
        raise InputError("n_max must be nonnegative")
    ball = build_ball(g, n_max, budget=budget)
    heights = _heights(ball, h)
    h0 = int(heights[0])
    counts = [0] * (n_max + 1)
    census = {}
    cn = -1 if census_n is None else census_n
    depth = min(prefix_depth, n_max)
    tasks = []
    for walk, complete in _prefixes(ball, depth, admissible=lambda u: heights[u] > h0):
        hs = [int(heights[x]) for x in walk[1:]]
        pmax = max(hs) if hs else h0
        if complete:
            tasks.append((np.asarray(walk, np.int64), pmax))
            continue
        m = len(walk) - 1
        if m == 0 or hs[-1] == pmax:
            counts[m] += 1
            if m == cn:
                census[walk[-1]] = census.get(walk[-1], 0) + 1

    size = len(ball.vertices) if census_n is not None else 1

    def task(item):
        prefix, pmax = item
        c = np.zeros(n_max + 1, np.int64)
        cen = np.zeros(size, np.int64)
        _kernels.bridge_kernel(ball.indptr, ball.indices, heights, prefix, pmax, n_max, cn, c, cen)
        return c, cen

    for c, cen in _run(tasks, task, workers):
        for i in range(n_max + 1):
            counts[i] += int(c[i])
        if census_n is not None:
            for i in np.nonzero(cen)[0]:
                census[int(i)] = census.get(int(i), 0) + int(cen[i])
    for i in range(n_max + 1):
        checked(i, counts[i])
    return ball, counts, census


def count_bridges(g: GraphModel, h: HeightFunction, n_max: int, workers: int = 1,
                  budget: int = DEFAULT_BUDGET) -> CountSeries:
    """b_n: n-step h-bridges from the root (b_0 = 1 by the vacuous condition)."""
    _, counts, _ = _bridge_pass(g, h, n_max, None, workers, budget)
    return CountSeries("bridge", g.name, dict(enumerate(counts)), height_label=h.label)


def bridge_endpoint_census(g: GraphModel, h: HeightFunction, n: int, workers: int = 1,
                           budget: int = DEFAULT_BUDGET) -> dict[Vertex, int]:
    """Number of n-step bridges from the root ending at each vertex."""
    if n < 1:
        raise InputError("n must be at least 1")
    ball, counts, census = _bridge_pass(g, h, n, n, workers, budget)
    out = {ball.vertices[i]: c for i, c in census.items()}
    out = dict(sorted(out.items()))
    gamma_n = len(ball.vertices)
    b_n = counts[n]
    # pigeonhole: endpoints lie in the ball, so some endpoint takes b_n / Gamma_n
    if b_n and max(out.values()) * gamma_n < b_n:
        raise ConsistencyError("bridge census violates the pigeonhole bound")
    if sum(out.values()) != b_n:
        raise ConsistencyError("bridge census does not sum to b_n")
    return out


def endpoint_distance_histogram(g: GraphModel, n: int, workers: int = 1,
                                budget: int = DEFAULT_BUDGET) -> dict[int, int]:
    """Distribution of d(root, endpoint) over all n-step SAWs."""
    if n < 1:
        raise InputError("n must be at least 1")
    return saw_statistics(g, n, hist_n=n, workers=workers, budget=budget).histogram


# --------------------------------------------------------------------------
# walk streams


@dataclass(frozen=True)
class WalkRecord:
    vertices: tuple[Vertex, ...]
    kind: str

    @property
    def steps(self) -> int:
        return len(self.vertices) - 1

    def __len__(self):
        return self.steps


WALK_KINDS = ("saw", "bridge", "polygon")


def enumerate_walks(g: GraphModel, kind: str, n: int, h: HeightFunction | None = None,
                    budget: int = DEFAULT_BUDGET) -> Iterator[WalkRecord]:
    """All n-step walks of the given kind from the root, in canonical DFS order.

    Polygons are yielded once each as closed vertex sequences (first == last),
    in the orientation whose second vertex precedes the penultimate one.
    """
    if kind not in WALK_KINDS:
        raise InputError(f"unknown walk kind {kind!r}")
    if kind == "bridge" and h is None:
        raise InputError("bridges need a height function")
    if kind == "polygon" and n < 3:
        return
    radius = n - 1 if kind == "polygon" else n
    ball = build_ball(g, max(radius, 0), budget=budget)
    verts = ball.vertices
    heights = _heights(ball, h) if kind == "bridge" else None
    target = n - 1 if kind == "polygon" else n
    root_nbrs = {int(u) for u in ball.neighbors(0)} if kind == "polygon" else set()
    path = [0]
    on = {0}
    maxes = [None]

    def rec():
        steps = len(path) - 1
        if steps == target:
            if kind == "polygon":
                if path[-1] in root_nbrs and path[1] < path[-1]:
                    yield WalkRecord(tuple(verts[i] for i in path) + (verts[0],), kind)
            elif kind == "saw" or heights[path[-1]] == maxes[-1]:
                yield WalkRecord(tuple(verts[i] for i in path), kind)
            return
        for u in ball.neighbors(path[-1]):
            u = int(u)
            if u in on:
                continue
            if kind == "bridge":
                hu = int(heights[u])
                if hu <= heights[0]:
                    continue
                maxes.append(hu if maxes[-1] is None else max(hu, maxes[-1]))
            path.append(u)
            on.add(u)
            yield from rec()
            path.pop()
            on.discard(u)
            if kind == "bridge":
                maxes.pop()

    yield from rec()


def is_saw(g: GraphModel, walk) -> bool:
    if len(set(walk)) != len(walk):
        return False
    return all(b in g._adjacent(a) for a, b in zip(walk, walk[1:]))


def is_bridge(g: GraphModel, h: HeightFunction, walk) -> bool:
    if not is_saw(g, walk):
        return False
    hs = [h(v) for v in walk]
    return all(hs[0] < x <= hs[-1] for x in hs[1:])


def is_polygon(g: GraphModel, walk, through: Vertex | None = None) -> bool:
    """Closed walk, length >= 3, first == last, otherwise distinct."""
    if len(walk) < 4 or walk[0] != walk[-1]:
        return False
    if not is_saw(g, walk[:-1]) or walk[-1] not in g._adjacent(walk[-2]):
        return False
    return through is None or through in walk
