"""Bridges in a tube, two disjoint tubes, and polygons pieced together from them.

Pipeline: pick an endpoint P_n carrying many n-step bridges, extend it by a
stiff path to P'_n in the root's H-orbit, build the region D_n around a
shortest bridge l_n, stack N translates of it along gamma (gamma(root) = P'_n),
push a second copy away with rho^k, and close up pairs of long bridges with
connector paths running below height 0 and above the top of the tube.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .enumerate import bridge_endpoint_census, enumerate_walks, is_bridge, is_saw, WalkRecord
from .errors import AssemblyError, CapExceeded, ConstructionError, InputError, PropertyViolation
from .graphs import (
    AutomorphismAction,
    GraphModel,
    PeriodicLattice,
    Vertex,
    ball_vertices,
    format_vertex,
    graph_distance,
)
from .height import HeightFunction, StiffPathTable, descending_path

DEFAULT_N_CAP = 2
MATERIALIZE_LIMIT = 100_000


def shortest_path(g: GraphModel, start: Vertex, goal: Vertex, allowed=None, cap: int = 10_000) -> list[Vertex] | None:
    """BFS path, first-discovered parents (so ties follow neighbour order)."""
    if start == goal:
        return [start]
    parent = {start: None}
    frontier = deque([start])
    while frontier:
        v = frontier.popleft()
        for u in g._adjacent(v):
            if u in parent or (allowed is not None and not allowed(u)):
                continue
            parent[u] = v
            if u == goal:
                path = [u]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            if len(parent) > cap:
                return None
            frontier.append(u)
    return None


def loop_erase(walk) -> list[Vertex]:
    """Chronological loop erasure: cut back to the earlier visit on every return."""
    out: list[Vertex] = []
    pos: dict[Vertex, int] = {}
    for v in walk:
        if v in pos:
            cut = pos[v]
            for x in out[cut + 1:]:
                del pos[x]
            del out[cut + 1:]
        else:
            pos[v] = len(out)
            out.append(v)
    return out


def neighbourhood(g: GraphModel, sources, radius: int) -> dict[Vertex, int]:
    """Distance to the source set, for every vertex within ``radius`` of it."""
    dist = {s: 0 for s in sources}
    frontier = list(dist)
    for d in range(1, radius + 1):
        nxt = []
        for v in frontier:
            for u in g._adjacent(v):
                if u not in dist:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    return dist


@dataclass
class TubeSpec:
    graph: GraphModel
    height: HeightFunction
    n: int
    ell: int
    p_n: Vertex
    p_prime: Vertex
    extension: tuple[Vertex, ...]
    base_bridge: WalkRecord
    gamma: AutomorphismAction
    region: frozenset
    census: dict[Vertex, int]
    b_n: int
    ball_n: int
    r: int

    def membership(self, v: Vertex) -> bool:
        return v in self.region

    @property
    def top(self) -> int:
        return self.height(self.p_prime)

    def tube_vertices(self, N: int) -> frozenset:
        """S_N: the union of gamma^i(D_n) for 0 <= i < N."""
        out = set(self.region)
        layer = self.region
        for _ in range(1, N):
            layer = {self.gamma(v) for v in layer}
            out |= layer
        return frozenset(out)

    def endpoint(self, N: int) -> Vertex:
        return self.gamma.power(N - 1)(self.p_prime)

    def bridges(self) -> list[WalkRecord]:
        """The (n+ell)-step bridges root -> P'_n: every n-step bridge to P_n
        followed by the fixed stiff extension."""
        out = []
        for w in enumerate_walks(self.graph, "bridge", self.n, self.height):
            if w.vertices[-1] == self.p_n:
                out.append(WalkRecord(w.vertices + self.extension[1:], "bridge"))
        return out


def _pick_endpoint(census: dict[Vertex, int], h: HeightFunction) -> Vertex:
    # most bridges, then highest, then canonical order
    return min(census, key=lambda v: (-census[v], -h(v), v))


def build_tube(g: GraphModel, h: HeightFunction, stiff: StiffPathTable, n: int) -> TubeSpec:
    if n < 1:
        raise InputError("n must be at least 1")
    census = bridge_endpoint_census(g, h, n)
    if not census:
        raise ConstructionError(f"no {n}-step bridges from the root")
    b_n = sum(census.values())
    ball_n = len(ball_vertices(g, n))
    p_n = _pick_endpoint(census, h)
    root_orbit = h.orbit_of(g.root)
    if h.orbit_of(p_n) == root_orbit:
        ext = (p_n,)
    else:
        try:
            ext = stiff.extension(h, p_n, root_orbit)
        except KeyError:
            raise ConstructionError(
                f"no stiff path from {format_vertex(p_n)} into the root orbit") from None
    p_prime = ext[-1]
    ell = len(ext) - 1
    if h.orbit_of(p_prime) != root_orbit or h(p_prime) < 1:
        raise ConstructionError(f"extension ends at {format_vertex(p_prime)}, outside the root orbit")
    top = h(p_prime)
    root = g.root
    path = shortest_path(g, root, p_prime, allowed=lambda u: u == root or 1 <= h(u) <= top)
    if path is None:
        raise ConstructionError(f"no bridge from the root to {format_vertex(p_prime)}")
    base = WalkRecord(tuple(path), "bridge")
    near = neighbourhood(g, path, n)
    region = frozenset([root] + [v for v in near if 1 <= h(v) <= top])
    gamma = h.carrier(p_prime)
    if gamma(root) != p_prime:
        raise ConstructionError("carrier does not move the root to P'_n")
    return TubeSpec(g, h, n, ell, p_n, p_prime, ext, base, gamma, region, census, b_n, ball_n, stiff.r)


def concatenate_bridges(tube: TubeSpec, bridges, N: int) -> WalkRecord:
    """Join gamma^i(bridges[i]) end to end; the result is re-checked as a bridge in S_N."""
    if len(bridges) != N or N < 1:
        raise InputError(f"expected {N} bridges, got {len(bridges)}")
    g, h = tube.graph, tube.height
    walk: list[Vertex] = []
    for i, b in enumerate(bridges):
        verts = b.vertices if isinstance(b, WalkRecord) else tuple(b)
        if verts[0] != g.root or verts[-1] != tube.p_prime or len(verts) - 1 != tube.n + tube.ell:
            raise InputError(f"bridge {i} is not an (n+ell)-step walk root -> P'_n")
        if not all(tube.membership(v) for v in verts):
            raise InputError(f"bridge {i} leaves the region D_n")
        if i == 0:
            walk.extend(verts)
        else:
            walk.extend(map(tube.gamma.power(i), verts[1:]))
    if not is_bridge(g, h, walk):
        raise ConstructionError("concatenated translates do not form a bridge; gamma is misconfigured")
    return WalkRecord(tuple(walk), "bridge")


def find_disjoint_k(tube: TubeSpec, rho: AutomorphismAction, N: int, k_cap: int) -> int:
    """Least k <= k_cap with S_N and rho^k(S_N) disjoint (exhaustive membership test)."""
    if k_cap < 1:
        raise InputError("k_cap must be at least 1")
    tube_set = tube.tube_vertices(N)
    moved = tube_set
    worst = 0
    for k in range(1, k_cap + 1):
        moved = frozenset(rho(v) for v in moved)
        overlap = len(tube_set & moved)
        if not overlap:
            return k
        worst = max(worst, overlap)
    raise CapExceeded(f"S_N meets rho^k(S_N) for every k <= {k_cap} (largest overlap {worst} vertices)")


def shift_delta(g: GraphModel, h: HeightFunction, rho: AutomorphismAction, cap: int = 256) -> int:
    """max d(v, rho v); rho commutes with H, so orbit representatives suffice."""
    out = 0
    for v in h.orbit_reps:
        d = graph_distance(g, v, rho(v), cap)
        if d is None:
            raise PropertyViolation(f"d(v, rho v) exceeds {cap} at {format_vertex(v)}")
        out = max(out, d)
    return out


def _connector(g, h, rho_k, start, t, bound, direction):
    """nu_1 (monotone path of t steps), nu_2 (shortest path across), nu_3 =
    rho^k(nu_1) reversed, loop-erased into one path start -> rho^k(start)."""
    hh = h if direction < 0 else h.negated()
    nu1 = descending_path(g, hh, start, t)
    far = nu1[-1]
    nu2 = shortest_path(g, far, rho_k(far))
    if nu2 is None or len(nu2) - 1 > bound:
        raise PropertyViolation(
            f"shortest path {format_vertex(far)} -> rho^k is longer than k*delta = {bound}")
    nu3 = [rho_k(v) for v in reversed(nu1)]
    return loop_erase(nu1 + nu2[1:] + nu3[1:])


def _clear(g, h, v, radius, level, direction) -> bool:
    """No vertex on the wrong side of ``level`` within ``radius`` of v."""
    for u in neighbourhood(g, [v], radius):
        if (direction < 0 and h(u) >= level) or (direction > 0 and h(u) <= level):
            return False
    return True


def build_connectors(tube: TubeSpec, rho: AutomorphismAction, k: int, N: int, delta: int | None = None,
                     t_cap: int = 200):
    """(nu_minus, nu_plus, t): connectors root -> rho^k(root) below height 0 and
    P^N -> rho^k(P^N) above h(P^N); t is the least depth that works for both."""
    g, h = tube.graph, tube.height
    if delta is None:
        delta = shift_delta(g, h, rho)
    bound = k * delta
    rho_k = rho.power(k)
    root = g.root
    top = tube.top
    down = descending_path(g, h, root, t_cap)
    up = descending_path(g, h.negated(), tube.p_prime, t_cap)
    t = None
    for i in range(1, t_cap + 1):
        if _clear(g, h, down[i], bound, h(root), -1) and _clear(g, h, up[i], bound, top, +1):
            t = i
            break
    if t is None:
        raise CapExceeded(f"no descent depth t <= {t_cap} clears k*delta = {bound}")
    nu_minus = _connector(g, h, rho_k, root, t, bound, -1)
    zeta = _connector(g, h, rho_k, tube.p_prime, t, bound, +1)
    lift = tube.gamma.power(N - 1)
    nu_plus = [lift(v) for v in zeta]
    for name, path in (("nu_minus", nu_minus), ("nu_plus", nu_plus)):
        if len(path) - 1 > 2 * t + bound:
            raise PropertyViolation(f"{name} has length {len(path) - 1} > 2t + k*delta = {2 * t + bound}")
    return WalkRecord(tuple(nu_minus), "saw"), WalkRecord(tuple(nu_plus), "saw"), t


@dataclass
class PolygonAssembly:
    tube: TubeSpec
    N: int
    k: int
    t: int
    delta: int
    nu_minus: WalkRecord
    nu_plus: WalkRecord
    bridge_out: WalkRecord
    bridge_back: WalkRecord
    polygon: WalkRecord
    rho_k: AutomorphismAction
    verdicts: dict[str, bool] = field(default_factory=dict)

    @property
    def length(self) -> int:
        return len(self.polygon.vertices) - 1

    def expected_length(self) -> int:
        return (2 * (self.tube.n + self.tube.ell) * self.N
                + self.nu_minus.steps + self.nu_plus.steps)

    def edge_set(self) -> frozenset:
        vs = self.polygon.vertices
        return frozenset(frozenset(e) for e in zip(vs, vs[1:]))

    def to_json(self, coordinates: bool = True) -> dict:
        tube = self.tube
        fmt = lambda w: [format_vertex(v) for v in w.vertices]  # noqa: E731
        back = [self.rho_k(v) for v in self.bridge_back.vertices]
        doc = {
            "graph": tube.graph.name,
            "height": tube.height.label,
            "parameters": {
                "n": tube.n, "ell": tube.ell, "N": self.N, "k": self.k,
                "t": self.t, "delta": self.delta, "r": tube.r,
                "length": self.length,
            },
            "segments": {
                "bridge_out": fmt(self.bridge_out),
                "nu_plus": fmt(self.nu_plus),
                "bridge_back": [format_vertex(v) for v in back],
                "nu_minus": fmt(self.nu_minus),
            },
            "polygon": fmt(self.polygon),
            "verdicts": dict(self.verdicts),
        }
        if coordinates and isinstance(tube.graph, PeriodicLattice) and tube.graph.dimension == 2:
            doc["coordinates"] = [[v.cell, *v.offset] for v in self.polygon.vertices]
        return doc


def assemble_polygon(tube: TubeSpec, rho: AutomorphismAction, k: int, N: int,
                     bridge_out: WalkRecord, bridge_back: WalkRecord,
                     connectors=None, delta: int | None = None) -> PolygonAssembly:
    """bridge_out, nu_plus, rho^k(bridge_back) reversed, nu_minus reversed."""
    g, h = tube.graph, tube.height
    if delta is None:
        delta = shift_delta(g, h, rho)
    rho_k = rho.power(k)
    end = tube.endpoint(N)
    steps = (tube.n + tube.ell) * N
    tube_set = tube.tube_vertices(N)
    for name, b in (("bridge_out", bridge_out), ("bridge_back", bridge_back)):
        vs = b.vertices
        if vs[0] != g.root or vs[-1] != end or len(vs) - 1 != steps or not is_bridge(g, h, vs):
            raise InputError(f"{name} is not a {steps}-step bridge root -> P^N")
        outside = [v for v in vs if v not in tube_set]
        if outside:
            raise InputError(f"{name} leaves S_N at {format_vertex(outside[0])}")
    shared = tube_set & {rho_k(v) for v in tube_set}
    if shared:
        raise AssemblyError(
            f"S_N and rho^{k}(S_N) share {len(shared)} vertices, e.g. {format_vertex(min(shared))}")
    if connectors is None:
        connectors = build_connectors(tube, rho, k, N, delta)
    nu_minus, nu_plus, t = connectors

    back = [rho_k(v) for v in bridge_back.vertices]
    segments = [
        ("bridge_out", list(bridge_out.vertices)),
        ("nu_plus", list(nu_plus.vertices)),
        ("bridge_back", back[::-1]),
        ("nu_minus", list(nu_minus.vertices)[::-1]),
    ]
    walk = [g.root]
    owner = {g.root: "nu_minus"}
    for name, seg in segments:
        if seg[0] != walk[-1]:
            raise AssemblyError(f"{name} starts at {format_vertex(seg[0])}, expected {format_vertex(walk[-1])}")
        for v in seg[1:]:
            closing = name == "nu_minus" and v == g.root and v == seg[-1]
            if v in owner and not closing:
                raise AssemblyError(f"{name} meets {owner[v]} at {format_vertex(v)}")
            owner[v] = name
            walk.append(v)
    polygon = WalkRecord(tuple(walk), "polygon")
    asm = PolygonAssembly(tube, N, k, t, delta, nu_minus, nu_plus, bridge_out, bridge_back, polygon, rho_k)
    closed = walk[0] == walk[-1] and is_saw(g, walk[:-1]) and walk[-1] in g._adjacent(walk[-2])
    bound = 2 * t + k * delta
    asm.verdicts = {
        "closed_saw": closed and len(walk) >= 4,
        "through_root": g.root in walk,
        "length_identity": asm.length == asm.expected_length(),
        "connector_bound": nu_minus.steps <= bound and nu_plus.steps <= bound,
        "nu_minus_below": all(h(v) < 0 for v in nu_minus.vertices[1:-1]),
        "nu_plus_above": all(h(v) > h(end) for v in nu_plus.vertices[1:-1]),
        "tubes_disjoint": True,
    }
    failed = [name for name, ok in asm.verdicts.items() if not ok]
    if failed:
        raise AssemblyError(f"assembled polygon fails: {', '.join(failed)}")
    return asm


@dataclass
class SequenceRow:
    N: int
    length: int
    assembled_count: int
    lower_bound: Fraction
    materialized: int | None
    partial: bool = False

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "m_N": self.length,
            "assembled_count": str(self.assembled_count),
            "lower_bound": str(self.lower_bound),
            "materialized": None if self.materialized is None else str(self.materialized),
            "partial": self.partial,
        }


def long_bridges(tube: TubeSpec, N: int, base=None):
    """All (n+ell)N-step tube bridges built from N translated pieces, in order."""
    base = tube.bridges() if base is None else base
    for combo in itertools.product(base, repeat=N):
        yield concatenate_bridges(tube, list(combo), N)


def materialize_polygons(tube: TubeSpec, rho: AutomorphismAction, k: int, N: int,
                         limit: int = MATERIALIZE_LIMIT, delta: int | None = None):
    """Assemble every (bridge_out, bridge_back) pair; returns (distinct edge sets, complete?)."""
    if delta is None:
        delta = shift_delta(tube.graph, tube.height, rho)
    connectors = build_connectors(tube, rho, k, N, delta)
    longs = list(long_bridges(tube, N))
    seen = set()
    pairs = 0
    for out in longs:
        for back in longs:
            if pairs >= limit:
                return seen, False
            asm = assemble_polygon(tube, rho, k, N, out, back, connectors, delta)
            seen.add(asm.edge_set())
            pairs += 1
    if len(seen) != pairs:
        raise AssemblyError(f"{pairs} bridge pairs gave only {len(seen)} distinct polygons")
    return seen, True


def arithmetic_subsequence(tube: TubeSpec, rho: AutomorphismAction, k: int, N_max: int,
                           materialize_to: int = DEFAULT_N_CAP, limit: int = MATERIALIZE_LIMIT) -> list[SequenceRow]:
    """Polygon lengths m_N = 2(n+ell)N + l^- + l^+ with the guaranteed counts."""
    if N_max < 1:
        raise InputError("N_max must be at least 1")
    delta = shift_delta(tube.graph, tube.height, rho)
    per_piece = tube.census[tube.p_n]
    rows = []
    for N in range(1, N_max + 1):
        nu_minus, nu_plus, _ = build_connectors(tube, rho, k, N, delta)
        m = 2 * (tube.n + tube.ell) * N + nu_minus.steps + nu_plus.steps
        bound = Fraction(tube.b_n, tube.ball_n) ** (2 * N)
        count = per_piece ** (2 * N)
        materialized, partial = None, False
        if N <= materialize_to:
            seen, complete = materialize_polygons(tube, rho, k, N, limit, delta)
            materialized, partial = len(seen), not complete
            if complete and materialized < bound:
                raise PropertyViolation(f"N={N}: {materialized} polygons < lower bound {bound}")
        rows.append(SequenceRow(N, m, count, bound, materialized, partial))
    return rows
