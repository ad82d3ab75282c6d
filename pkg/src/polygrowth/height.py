"""Height functions on catalog graphs and their finite-ball verification.

A height function comes with the group H that makes it difference-invariant.
We never enumerate H; it is presented by generators plus two helpers that
quasi-transitivity needs in practice: ``orbit_of`` (which H-orbit a vertex is
in) and ``carrier`` (an element of H taking the orbit representative to a
given vertex).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import horocycle
from .errors import AutomorphismError, InputError, PropertyViolation, StiffPathError
from .graphs import (
    AutomorphismAction,
    DEFAULT_BUDGET,
    GraphModel,
    PeriodicLattice,
    RegularTree,
    TreeTimesLine,
    Vertex,
    ball_vertices,
    format_vertex,
    graph_distance,
    translation,
    tree_action,
)


@dataclass(frozen=True, eq=False)
class HeightFunction:
    label: str
    evaluate: Callable[[Vertex], int]
    lipschitz_d: int
    group_generators: list[AutomorphismAction]
    orbit_of: Callable[[Vertex], int]
    orbit_reps: list[Vertex]
    carrier: Callable[[Vertex], AutomorphismAction]

    def __call__(self, v: Vertex) -> int:
        return self.evaluate(v)

    @property
    def orbit_count(self) -> int:
        return len(self.orbit_reps)

    def negated(self) -> HeightFunction:
        f = self.evaluate
        label = self.label[1:] if self.label.startswith("-") else "-" + self.label
        return HeightFunction(
            label, lambda v: -f(v), self.lipschitz_d, self.group_generators,
            self.orbit_of, self.orbit_reps, self.carrier,
        )


# --------------------------------------------------------------------------
# catalog heights


def affine_height(g: PeriodicLattice, direction, cell_heights, label: str) -> HeightFunction:
    """h(c, off) = <direction, off> + cell_heights[c] - cell_heights[root], H = translations."""
    direction = tuple(direction)
    base = cell_heights[g.root_cell]
    corr = [c - base for c in cell_heights]
    if len(direction) != g.dimension or len(corr) != len(g.cells):
        raise InputError(f"height {label} does not match lattice {g.name}")

    def evaluate(v: Vertex) -> int:
        return sum(a * b for a, b in zip(direction, v.offset)) + corr[v.cell]

    d = 0
    for a, b, delta in g.edges:
        d = max(d, abs(sum(x * y for x, y in zip(direction, delta)) + corr[b] - corr[a]))
    gens = []
    for i in range(g.dimension):
        e = tuple(int(i == j) for j in range(g.dimension))
        gens.append(translation(e, f"e{i + 1}", height_preserving=direction[i] == 0))
    reps = g.orbit_representatives()
    rep_of_cell = {r.cell: k for k, r in enumerate(reps)}
    return HeightFunction(
        label, evaluate, d, gens,
        orbit_of=lambda v: rep_of_cell[v.cell],
        orbit_reps=reps,
        carrier=lambda v: translation(v.offset),
    )


def absolute_x_height(g: PeriodicLattice) -> HeightFunction:
    """|x| on Z^d; fails the ghf axioms and exists to exercise the verifier."""
    h = affine_height(g, (1,) + (0,) * (g.dimension - 1), [0], "absx")
    return HeightFunction("absx", lambda v: abs(v.offset[0]), 1, h.group_generators,
                          h.orbit_of, h.orbit_reps, h.carrier)


def horocyclic(g: RegularTree | TreeTimesLine) -> HeightFunction:
    k = g.k
    gens = [
        tree_action(horocycle.AffineMap(k, 0, Fraction(1)), "shift"),
        tree_action(horocycle.AffineMap(k, 1, Fraction(0)), "scale"),
    ]
    lifted_line = isinstance(g, TreeTimesLine)
    if lifted_line:
        gens.append(translation((1,), "z-shift", height_preserving=True))

    def carrier(v: Vertex) -> AutomorphismAction:
        a = tree_action(horocycle.carrier_map(v.word, k), f"carry[{format_vertex(v)}]")
        if lifted_line and v.offset[0]:
            a = translation(v.offset).compose(a)
        return a

    return HeightFunction(
        "horocyclic", lambda v: horocycle.horocyclic_height(v.word), 1, gens,
        orbit_of=lambda v: 0, orbit_reps=[g.root], carrier=carrier,
    )


def _swap_rows(m: int) -> AutomorphismAction:
    def f(v: Vertex) -> Vertex:
        return Vertex(m - 1 - v.cell, v.offset, v.word)

    return AutomorphismAction("rung-swap" if m == 2 else "row-flip", f, f, True)


_LATTICE_HEIGHTS = {
    "Z1": {"x": ((1,), [0])},
    "Z2": {"x": ((1, 0), [0])},
    "Z3": {"x": ((1, 0, 0), [0])},
    "hex": {"fig1": ((2, 1), [0, 1])},
    "sqoct": {"fig1": ((3, 0), [0, 1, 2, 1])},
    "L2": {"x": ((1,), [0, 0])},
    "L3": {"x": ((1,), [0, 0, 0])},
}
_HEIGHT_ALIASES = {"hex": {"x": "fig1"}, "sqoct": {"x": "fig1"}}

_LATTICE_RHOS = {
    "Z2": {"y-shift": (0, 1)},
    "Z3": {"y-shift": (0, 1, 0)},
    "hex": {"shift": (-1, 2)},
    "sqoct": {"shift": (0, 1)},
}


def height_labels(g: GraphModel) -> list[str]:
    if isinstance(g, (RegularTree, TreeTimesLine)):
        return ["horocyclic"]
    labels = list(_LATTICE_HEIGHTS.get(g.name, {}))
    if g.name == "Z2":
        labels.append("absx")
    spec = getattr(g, "height_spec", None)
    if spec:
        labels.append(spec.get("label", "file"))
    return labels


def get_height(g: GraphModel, label: str | None = None) -> HeightFunction:
    """Catalog height function for ``g``; ``label`` defaults to the first listed."""
    labels = height_labels(g)
    if not labels:
        raise InputError(f"no height function known for {g.name}")
    label = labels[0] if label in (None, "default") else label
    negate = label.startswith("-")
    base = label[1:] if negate else label
    base = _HEIGHT_ALIASES.get(g.name, {}).get(base, base)
    if base not in labels:
        raise InputError(f"unknown height {label!r} for {g.name}; known: {', '.join(labels)}")
    if isinstance(g, (RegularTree, TreeTimesLine)):
        h = horocyclic(g)
    elif base == "absx":
        h = absolute_x_height(g)
    elif base in _LATTICE_HEIGHTS.get(g.name, {}):
        h = affine_height(g, *_LATTICE_HEIGHTS[g.name][base], base)
    else:
        spec = g.height_spec
        h = affine_height(g, spec["direction"], spec["cell_heights"], base)
    return h.negated() if negate else h


def rho_labels(g: GraphModel) -> list[str]:
    if isinstance(g, TreeTimesLine):
        return ["z-shift"]
    if g.name == "L2":
        return ["rung-swap"]
    if g.name == "L3":
        return ["row-flip"]
    labels = list(_LATTICE_RHOS.get(g.name, {}))
    spec = getattr(g, "height_spec", None)
    if spec and "rho" in spec:
        labels.append("rho")
    return labels


def get_rho(g: GraphModel, label: str | None = None) -> AutomorphismAction:
    labels = rho_labels(g)
    if not labels:
        raise InputError(f"no candidate rho known for {g.name}")
    label = labels[0] if label in (None, "default") else label
    if label not in labels:
        raise InputError(f"unknown rho {label!r} for {g.name}; known: {', '.join(labels)}")
    if isinstance(g, TreeTimesLine):
        return translation((1,), "z-shift", height_preserving=True)
    if g.name in ("L2", "L3"):
        return _swap_rows(len(g.cells))
    if label == "rho":
        return translation(g.height_spec["rho"], "rho", height_preserving=True)
    return translation(_LATTICE_RHOS[g.name][label], label, height_preserving=True)


# --------------------------------------------------------------------------
# ghf verification


@dataclass
class GhfReport:
    passed: bool
    radius: int
    failures: list[dict]
    checked_vertices: int
    lipschitz_d: int
    axioms: dict[str, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "radius": self.radius,
            "checked_vertices": self.checked_vertices,
            "lipschitz_d": self.lipschitz_d,
            "axioms": self.axioms,
            "failures": self.failures,
        }

    def witnesses(self, axiom: str) -> list[list[str]]:
        return [f["witness"] for f in self.failures if f["axiom"] == axiom]


def _fail(failures, axiom, witness, detail=""):
    failures.append({"axiom": axiom, "witness": [format_vertex(w) for w in witness], "detail": detail})


GHF_AXIOMS = ("root_zero", "difference_invariant", "automorphism", "orbits", "up_down", "lipschitz")


def verify_ghf(g: GraphModel, h: HeightFunction, radius: int, budget: int = DEFAULT_BUDGET) -> GhfReport:
    """Check the ghf axioms on every vertex of the ball of the given radius."""
    if radius < 1:
        raise InputError("radius must be at least 1")
    ball = ball_vertices(g, radius, budget=budget)
    failures: list[dict] = []
    adj = g._adjacent
    if h(g.root) != 0:
        _fail(failures, "root_zero", [g.root], f"h(root) = {h(g.root)}")
    gens = [a for gen in h.group_generators for a in (gen, gen.inv())]
    observed_d = 0
    for v in ball:
        hv = h(v)
        nbrs = adj(v)
        hs = [h(u) for u in nbrs]
        for u, hu in zip(nbrs, hs):
            observed_d = max(observed_d, abs(hu - hv))
            if abs(hu - hv) > h.lipschitz_d:
                _fail(failures, "lipschitz", [v, u], f"|dh| = {abs(hu - hv)} > d = {h.lipschitz_d}")
        if not (any(x < hv for x in hs) and any(x > hv for x in hs)):
            side = "lower" if not any(x < hv for x in hs) else "higher"
            _fail(failures, "up_down", [v], f"no {side} neighbour")
        rep = h.orbit_reps[h.orbit_of(v)]
        if h.carrier(v)(rep) != v:
            _fail(failures, "orbits", [v], "carrier does not reach vertex from its orbit representative")
        for a in gens:
            av = a(v)
            if h.orbit_of(av) != h.orbit_of(v):
                _fail(failures, "orbits", [v, av], f"{a.name} changes orbit label")
            images = [a(u) for u in nbrs]
            if sorted(images) != sorted(adj(av)):
                _fail(failures, "automorphism", [v], f"{a.name} breaks adjacency")
            hav = h(av)
            for u, au, hu in zip(nbrs, images, hs):
                if hav - h(au) != hv - hu:
                    _fail(failures, "difference_invariant", [v, u], f"under {a.name}")
    axioms = {ax: not any(f["axiom"] == ax for f in failures) for ax in GHF_AXIOMS}
    return GhfReport(not failures, radius, failures, len(ball), observed_d, axioms)


@dataclass
class SquareGhfCertificate:
    rho: AutomorphismAction
    delta: int
    translation_checked_to: int
    commutation_radius: int
    passed: bool
    axioms: dict[str, bool]
    min_shift_distance: list[int]
    failures: list[dict]
    fixed_set: list[Vertex] = field(default_factory=list)
    period: int | None = None
    stiff_r: int = 0

    def to_json(self) -> dict:
        return {
            "rho": self.rho.name,
            "delta": self.delta,
            "translation_checked_to": self.translation_checked_to,
            "commutation_radius": self.commutation_radius,
            "passed": self.passed,
            "axioms": self.axioms,
            "min_shift_distance": self.min_shift_distance,
            "fixed_set": [format_vertex(v) for v in self.fixed_set],
            "period": self.period,
            "r": self.stiff_r,
            "failures": self.failures,
        }


SQUARE_AXIOMS = ("translation", "height_preserving", "commutes", "shift_bound", "divergence_trend")


def verify_square_ghf(
    g: GraphModel,
    h: HeightFunction,
    rho: AutomorphismAction,
    radius: int,
    k_max: int,
    budget: int = DEFAULT_BUDGET,
    distance_cap: int = 256,
) -> SquareGhfCertificate:
    """Check that ``rho`` is a height-preserving translation commuting with H.

    The translation property is only checked for powers 1..k_max; the
    certificate records that scale.
    """
    if k_max < 1:
        raise InputError("k_max must be at least 1")
    ball = ball_vertices(g, radius, budget=budget)
    adj = g._adjacent
    failures: list[dict] = []
    for v in ball:
        rv = rho(v)
        if rho.inverse(rv) != v:
            raise AutomorphismError(f"{rho.name} inverse fails at {format_vertex(v)}")
        if sorted(rho(u) for u in adj(v)) != sorted(adj(rv)):
            raise AutomorphismError(f"{rho.name} breaks adjacency at {format_vertex(v)}")
        if h(rv) != h(v):
            _fail(failures, "height_preserving", [v, rv])
        for a in h.group_generators:
            if rho(a(v)) != a(rv):
                _fail(failures, "commutes", [v], f"rho does not commute with {a.name}")

    delta = 0
    for v in ball:
        dist = graph_distance(g, v, rho(v), distance_cap)
        if dist is None:
            raise PropertyViolation(f"d(v, rho v) exceeds {distance_cap} at {format_vertex(v)}")
        delta = max(delta, dist)

    fixed_set: list[Vertex] = []
    mins: list[int] = []
    images = list(ball)
    for k in range(1, k_max + 1):
        images = [rho(x) for x in images]
        best = None
        for v, img in zip(ball, images):
            if img == v:
                if not fixed_set or v == g.root:
                    orbit, x = [v], rho(v)
                    while x != v:
                        orbit.append(x)
                        x = rho(x)
                    fixed_set = sorted(orbit)
                best = 0
                continue
            dist = graph_distance(g, v, img, k * delta)
            if dist is None:
                _fail(failures, "shift_bound", [v, img], f"d(v, rho^{k} v) > {k} * delta")
                dist = k * delta + 1
            best = dist if best is None else min(best, dist)
        mins.append(best)
        if best == 0:
            _fail(failures, "translation", fixed_set, f"rho^{k} fixes a finite set")

    try:
        r = compute_stiff_paths(g, h).r
    except (StiffPathError, PropertyViolation):
        r = 0
    for k in range(1, len(mins)):
        if mins[k] < mins[k - 1] - 2 * r:
            _fail(failures, "divergence_trend", [g.root], f"min d(v, rho^k v) drops at k={k + 1}")
    period = None
    if all(m > 0 for m in mins):
        for p in range(1, len(mins)):
            if all(mins[k + p] > mins[k] for k in range(len(mins) - p)):
                period = p
                break
    axioms = {ax: not any(f["axiom"] == ax for f in failures) for ax in SQUARE_AXIOMS}
    return SquareGhfCertificate(
        rho, delta, k_max, radius, not failures, axioms, mins, failures, fixed_set, period, r,
    )


# --------------------------------------------------------------------------
# stiff paths


def stiff_bound(h: HeightFunction) -> int:
    return (h.orbit_count - 1) * (2 * h.lipschitz_d + 1) + 2


def is_stiff(h: HeightFunction, path) -> bool:
    """Interior heights strictly between the endpoint heights (start lower)."""
    if len(path) == 1:
        return True
    lo, hi = h(path[0]), h(path[-1])
    return lo < hi and all(lo < h(x) < hi for x in path[1:-1])


@dataclass
class StiffPathTable:
    r: int
    paths: dict[tuple[int, int], tuple[Vertex, ...]]
    orbit_reps: list[Vertex]

    def extension(self, h: HeightFunction, v: Vertex, target_orbit: int = 0) -> tuple[Vertex, ...]:
        """A stiff path from ``v`` into orbit ``target_orbit``: the table entry moved by H."""
        i = h.orbit_of(v)
        alpha = h.carrier(v)
        return tuple(alpha(x) for x in self.paths[(i, target_orbit)])


def _shortest_stiff(g, h, start, target_orbit, cap):
    h0 = h(start)
    adj = g._adjacent
    for length in range(1, cap + 1):
        path = [start]
        on_path = {start}

        def dfs():
            v = path[-1]
            if len(path) == length + 1:
                if h.orbit_of(v) == target_orbit and is_stiff(h, path):
                    return tuple(path)
                return None
            for u in adj(v):
                if u in on_path or h(u) <= h0:
                    continue
                path.append(u)
                on_path.add(u)
                found = dfs()
                path.pop()
                on_path.discard(u)
                if found:
                    return found
            return None

        found = dfs()
        if found:
            return found
    return None


def compute_stiff_paths(g: GraphModel, h: HeightFunction, search_cap: int | None = None) -> StiffPathTable:
    """Minimal stiff SAWs between orbit representatives, and the constant r."""
    reps = h.orbit_reps
    m = len(reps)
    paths = {(i, i): (reps[i],) for i in range(m)}
    if m == 1:
        return StiffPathTable(0, paths, reps)
    bound = stiff_bound(h)
    cap = bound if search_cap is None else search_cap
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            found = _shortest_stiff(g, h, reps[i], j, cap)
            if found is None:
                raise StiffPathError(f"no stiff path from orbit {i} to orbit {j} within {cap} steps")
            paths[(i, j)] = found
    r = max(len(p) - 1 for p in paths.values())
    if r > bound:
        raise PropertyViolation(f"r = {r} exceeds (M-1)(2d+1)+2 = {bound}")
    return StiffPathTable(r, paths, reps)


def descending_path(g: GraphModel, h: HeightFunction, start: Vertex, t: int) -> list[Vertex]:
    """Greedy walk with h(c_i) <= h(start) - i, first lower neighbour each step."""
    path = [start]
    for _ in range(t):
        v = path[-1]
        hv = h(v)
        for u in g._adjacent(v):
            if h(u) < hv:
                path.append(u)
                break
        else:
            raise PropertyViolation(f"no lower neighbour at {format_vertex(v)}; height function is not a ghf")
    return path
