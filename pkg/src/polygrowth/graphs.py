"""Lazily generated infinite quasi-transitive graphs.

Vertices are :class:`Vertex` triples ``(cell, offset, word)``; the natural
tuple order of that triple is the canonical neighbour order used everywhere,
so every traversal in the package is deterministic.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

from . import horocycle
from .errors import BudgetExceeded, ConfigurationError, InputError
from .series import CountSeries, checked

DEFAULT_BUDGET = 5_000_000

LETTERS = "abcdefghijklmnopqrstuvwxyz"


class Vertex(NamedTuple):
    cell: int
    offset: tuple[int, ...]
    word: tuple[int, ...] = ()

    def __str__(self):
        return format_vertex(self)


def format_vertex(v: Vertex) -> str:
    parts = [f"c{v.cell}"]
    if v.offset:
        parts.append("(" + ",".join(str(x) for x in v.offset) + ")")
    if v.word:
        parts.append("[" + "".join(LETTERS[i] for i in v.word) + "]")
    return "".join(parts)


def vertex_to_json(v: Vertex) -> dict:
    return {"cell": v.cell, "offset": list(v.offset), "word": "".join(LETTERS[i] for i in v.word)}


def vertex_from_json(data: dict) -> Vertex:
    word = data.get("word", "")
    if isinstance(word, str):
        word = tuple(LETTERS.index(ch) for ch in word)
    return Vertex(int(data.get("cell", 0)), tuple(data.get("offset", ())), tuple(word))


# --------------------------------------------------------------------------
# automorphisms


@dataclass(frozen=True)
class AutomorphismAction:
    name: str
    apply: Callable[[Vertex], Vertex] = field(compare=False)
    inverse: Callable[[Vertex], Vertex] = field(compare=False)
    height_preserving: bool = False

    def __call__(self, v: Vertex) -> Vertex:
        return self.apply(v)

    def inv(self) -> AutomorphismAction:
        return AutomorphismAction(f"{self.name}^-1", self.inverse, self.apply, self.height_preserving)

    def compose(self, other: AutomorphismAction) -> AutomorphismAction:
        """``self`` after ``other``."""
        f, g, fi, gi = self.apply, other.apply, self.inverse, other.inverse
        return AutomorphismAction(
            f"{self.name}*{other.name}",
            lambda v: f(g(v)),
            lambda v: gi(fi(v)),
            self.height_preserving and other.height_preserving,
        )

    def power(self, k: int) -> AutomorphismAction:
        step, name = (self.apply, self.name) if k >= 0 else (self.inverse, f"{self.name}^-1")
        back = self.inverse if k >= 0 else self.apply
        m = abs(k)

        def fwd(v):
            for _ in range(m):
                v = step(v)
            return v

        def rev(v):
            for _ in range(m):
                v = back(v)
            return v

        return AutomorphismAction(f"{name}^{m}", fwd, rev, self.height_preserving)


IDENTITY = AutomorphismAction("id", lambda v: v, lambda v: v, True)


def translation(delta: Sequence[int], name: str | None = None, height_preserving=False) -> AutomorphismAction:
    """Lattice translation by ``delta``, acting on the offset coordinates."""
    delta = tuple(delta)
    neg = tuple(-d for d in delta)

    def shift(by):
        def f(v: Vertex) -> Vertex:
            if len(v.offset) != len(by):
                raise ConfigurationError(f"translation {by} undefined on {v}")
            return Vertex(v.cell, tuple(a + b for a, b in zip(v.offset, by)), v.word)

        return f

    return AutomorphismAction(name or f"t{delta}", shift(delta), shift(neg), height_preserving)


def tree_action(m: horocycle.AffineMap, name: str) -> AutomorphismAction:
    """Lift an end-fixing tree automorphism to vertices (acts on the word only)."""
    inv = m.inverse()

    def lift(f):
        return lambda v: Vertex(v.cell, v.offset, f(v.word))

    return AutomorphismAction(name, lift(m), lift(inv), m.scale == 0)


# --------------------------------------------------------------------------
# graph models


class GraphModel:
    """Base class: a rooted, locally finite graph given by a neighbour oracle."""

    name: str
    dimension: int
    max_degree: int
    orbit_count: int
    bipartite: bool
    root: Vertex

    def neighbors(self, v: Vertex) -> list[Vertex]:
        self.validate(v)
        return self._adjacent(v)

    def _adjacent(self, v: Vertex) -> list[Vertex]:  # pragma: no cover - abstract
        raise NotImplementedError

    def validate(self, v: Vertex) -> None:  # pragma: no cover - abstract
        raise NotImplementedError

    def describe(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError

    def orbit_representatives(self) -> list[Vertex]:
        """One vertex per orbit of the translation/deck group used by the catalog."""
        return [self.root]

    def fingerprint(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class PeriodicLattice(GraphModel):
    """A Z^d-periodic graph: finitely many cells per unit cell, edges by offset."""

    height_spec: dict | None = None

    def __init__(self, name, dimension, cells, edges, root_cell=0, bipartite=None):
        self.name = name
        self.dimension = int(dimension)
        self.cells = list(cells)
        ncell = len(self.cells)
        if ncell == 0:
            raise InputError("lattice needs at least one cell")
        if not 0 <= root_cell < ncell:
            raise InputError(f"root_cell {root_cell} out of range")
        self.edges = []
        moves: list[set] = [set() for _ in range(ncell)]
        for e in edges:
            a, b, delta = int(e[0]), int(e[1]), tuple(int(x) for x in e[2])
            if not (0 <= a < ncell and 0 <= b < ncell):
                raise InputError(f"edge {e} references a missing cell")
            if len(delta) != self.dimension:
                raise InputError(f"edge {e} offset has wrong dimension")
            if a == b and not any(delta):
                raise InputError(f"edge {e} is a loop")
            fwd, back = (b, delta), (a, tuple(-x for x in delta))
            if fwd in moves[a] or back in moves[b]:
                raise InputError(f"edge {e} duplicates an existing edge")
            moves[a].add(fwd)
            moves[b].add(back)
            self.edges.append((a, b, delta))
        # ordering of (cell, offset + delta) equals ordering of (cell, delta)
        self._moves = [sorted(m) for m in moves]
        if any(not m for m in self._moves):
            raise InputError("every cell needs at least one edge")
        self.max_degree = max(len(m) for m in self._moves)
        self.orbit_count = ncell
        self.root = Vertex(root_cell, (0,) * self.dimension)
        self.root_cell = root_cell
        self.bipartite = self._detect_bipartite() if bipartite is None else bipartite

    def _detect_bipartite(self) -> bool:
        # colour(c, off) = s_c + <w, off> mod 2 must flip across every edge
        n = len(self.cells)
        for bits in itertools.product((0, 1), repeat=n + self.dimension):
            s, w = bits[:n], bits[n:]
            if all((s[a] + s[b] + sum(x * y for x, y in zip(w, d))) % 2 == 1 for a, b, d in self.edges):
                return True
        return False

    def validate(self, v: Vertex) -> None:
        if not isinstance(v, tuple) or len(v) != 3:
            raise InputError(f"malformed vertex {v!r}")
        if not 0 <= v.cell < len(self.cells):
            raise InputError(f"cell {v.cell} out of range for {self.name}")
        if len(v.offset) != self.dimension:
            raise InputError(f"offset {v.offset} has wrong dimension for {self.name}")
        if v.word:
            raise InputError(f"{self.name} vertices carry no word")

    def _adjacent(self, v: Vertex) -> list[Vertex]:
        off = v.offset
        return [Vertex(c, tuple(a + b for a, b in zip(off, d))) for c, d in self._moves[v.cell]]

    def orbit_representatives(self) -> list[Vertex]:
        zero = (0,) * self.dimension
        reps = [Vertex(c, zero) for c in range(len(self.cells))]
        reps.insert(0, reps.pop(self.root_cell))
        return reps

    def describe(self) -> dict:
        return {
            "kind": "periodic",
            "name": self.name,
            "dimension": self.dimension,
            "cells": [str(c) for c in self.cells],
            "edges": [[a, b, list(d)] for a, b, d in self.edges],
            "root_cell": self.root_cell,
        }


class RegularTree(GraphModel):
    """The k-regular tree T_k, vertices as reduced words over k involutions."""

    def __init__(self, k: int):
        if k < 3:
            raise InputError("tree degree must be at least 3")
        self.k = k
        self.name = f"T{k}"
        self.dimension = 0
        self.max_degree = k
        self.orbit_count = 1
        self.bipartite = True
        self.root = Vertex(0, ())

    def validate(self, v: Vertex) -> None:
        if not isinstance(v, tuple) or len(v) != 3 or v.cell != 0 or v.offset:
            raise InputError(f"malformed tree vertex {v!r}")
        _check_word(v.word, self.k)

    def _adjacent(self, v: Vertex) -> list[Vertex]:
        w = v.word
        if not w:
            return [Vertex(0, (), (c,)) for c in range(self.k)]
        last = w[-1]
        out = [Vertex(0, (), w[:-1])]
        out.extend(Vertex(0, (), w + (c,)) for c in range(self.k) if c != last)
        return out

    def describe(self) -> dict:
        return {"kind": "tree", "k": self.k}


class TreeTimesLine(GraphModel):
    """Cartesian product T_k x Z; vertices carry the Z coordinate as offset."""

    def __init__(self, k: int):
        self.tree = RegularTree(k)
        self.k = k
        self.name = f"T{k}xZ"
        self.dimension = 1
        self.max_degree = k + 2
        self.orbit_count = 1
        self.bipartite = True
        self.root = Vertex(0, (0,))

    def validate(self, v: Vertex) -> None:
        if not isinstance(v, tuple) or len(v) != 3 or v.cell != 0 or len(v.offset) != 1:
            raise InputError(f"malformed {self.name} vertex {v!r}")
        _check_word(v.word, self.k)

    def _adjacent(self, v: Vertex) -> list[Vertex]:
        (z,) = v.offset
        w = v.word
        out = [Vertex(0, (z - 1,), w)]
        out.extend(Vertex(0, (z,), u.word) for u in self.tree._adjacent(Vertex(0, (), w)))
        out.append(Vertex(0, (z + 1,), w))
        return out

    def describe(self) -> dict:
        return {"kind": "tree_x_line", "k": self.k}


def _check_word(word, k):
    prev = None
    for letter in word:
        if not isinstance(letter, int) or not 0 <= letter < k:
            raise InputError(f"letter {letter!r} outside alphabet of size {k}")
        if letter == prev:
            raise InputError(f"word {word} is not reduced")
        prev = letter


# --------------------------------------------------------------------------
# catalog


def hypercubic(d: int) -> PeriodicLattice:
    edges = [(0, 0, tuple(int(i == j) for j in range(d))) for i in range(d)]
    return PeriodicLattice(f"Z{d}", d, ["o"], edges, bipartite=True)


def hexagonal() -> PeriodicLattice:
    # brick-wall embedding, cell c at offset (i, j) sits at (2i + j + c, j);
    # horizontal edges always, vertical edge up from even-parity sites
    edges = [(0, 1, (0, 0)), (1, 0, (1, 0)), (0, 1, (-1, 1))]
    return PeriodicLattice("hex", 2, ["even", "odd"], edges, bipartite=True)


def square_octagon() -> PeriodicLattice:
    # each unit cell holds a small square W, N, E, S; octagons in between
    edges = [
        (0, 1, (0, 0)), (1, 2, (0, 0)), (2, 3, (0, 0)), (3, 0, (0, 0)),
        (2, 0, (1, 0)), (1, 3, (0, 1)),
    ]
    return PeriodicLattice("sqoct", 2, ["W", "N", "E", "S"], edges, bipartite=True)


def ladder(m: int) -> PeriodicLattice:
    """Z x {0, ..., m-1}; cell = row."""
    edges = [(r, r, (1,)) for r in range(m)] + [(r, r + 1, (0,)) for r in range(m - 1)]
    return PeriodicLattice(f"L{m}", 1, [f"row{r}" for r in range(m)], edges, bipartite=True)


_BUILDERS: dict[str, Callable[[], GraphModel]] = {
    "Z1": lambda: hypercubic(1),
    "Z2": lambda: hypercubic(2),
    "Z3": lambda: hypercubic(3),
    "hex": hexagonal,
    "sqoct": square_octagon,
    "L2": lambda: ladder(2),
    "L3": lambda: ladder(3),
    "T3": lambda: RegularTree(3),
    "T4": lambda: RegularTree(4),
    "T3xZ": lambda: TreeTimesLine(3),
    "T4xZ": lambda: TreeTimesLine(4),
}

ALIASES = {
    "hexagonal": "hex",
    "square-octagon": "sqoct",
    "square_octagon": "sqoct",
    "t3xz": "T3xZ",
    "t4xz": "T4xZ",
}

CATALOG = tuple(_BUILDERS)
_CACHE: dict[str, GraphModel] = {}


def get_graph(name: str) -> GraphModel:
    """Catalog graph by name, or a periodic lattice loaded from a JSON path."""
    key = ALIASES.get(name, ALIASES.get(name.lower(), name))
    if key in _BUILDERS:
        if key not in _CACHE:
            _CACHE[key] = _BUILDERS[key]()
        return _CACHE[key]
    if name.endswith(".json") or Path(name).is_file():
        return load_lattice(name)
    raise InputError(f"unknown graph {name!r}; catalog: {', '.join(CATALOG)}")


def load_lattice(path) -> PeriodicLattice:
    """Read the periodic-lattice description file format."""
    from .schemas import validate_document

    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read lattice file {path}: {exc}") from exc
    validate_document(data, "lattice")
    return lattice_from_dict(data)


def lattice_from_dict(data: dict) -> PeriodicLattice:
    edges = [(e["from_cell"], e["to_cell"], e["offset_delta"]) for e in data["edges"]]
    g = PeriodicLattice(data["name"], data["dimension"], data["cells"], edges, data.get("root_cell", 0))
    g.height_spec = data.get("height")
    return g


# --------------------------------------------------------------------------
# distances and balls


def graph_distance(g: GraphModel, u: Vertex, v: Vertex, cap: int) -> int | None:
    """Bidirectional BFS distance, or ``None`` if it exceeds ``cap``."""
    if cap < 0:
        raise InputError("cap must be nonnegative")
    g.validate(u)
    g.validate(v)
    if u == v:
        return 0
    adj = g._adjacent
    seen = [{u: 0}, {v: 0}]
    frontier = [[u], [v]]
    radius = [0, 0]
    while frontier[0] and frontier[1]:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        if radius[0] + radius[1] + 1 > cap:
            return None
        mine, other = seen[side], seen[1 - side]
        nxt = []
        best = None
        for x in frontier[side]:
            for y in adj(x):
                if y in other:
                    total = radius[side] + 1 + other[y]
                    best = total if best is None else min(best, total)
                if y not in mine:
                    mine[y] = radius[side] + 1
                    nxt.append(y)
        if best is not None:
            return best if best <= cap else None
        radius[side] += 1
        frontier[side] = nxt
    return None


def bfs_layers(g: GraphModel, radius: int, center: Vertex | None = None, budget: int = DEFAULT_BUDGET):
    """Spheres S_0, ..., S_radius around ``center`` (default: the root)."""
    center = g.root if center is None else center
    g.validate(center)
    seen = {center}
    layers = [[center]]
    adj = g._adjacent
    for _ in range(radius):
        nxt = []
        for v in layers[-1]:
            for u in adj(v):
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        if len(seen) > budget:
            raise BudgetExceeded(f"ball exceeds vertex budget {budget}")
        layers.append(nxt)
    return layers


def ball_vertices(g: GraphModel, radius: int, center: Vertex | None = None, budget: int = DEFAULT_BUDGET):
    return [v for layer in bfs_layers(g, radius, center, budget) for v in layer]


def ball_size(g: GraphModel, n: int, budget: int = DEFAULT_BUDGET) -> CountSeries:
    """Growth function: Gamma_k = |{v : d(root, v) <= k}| for k <= n."""
    if n < 0:
        raise InputError("n must be nonnegative")
    total = 0
    counts = {}
    for k, layer in enumerate(bfs_layers(g, n, budget=budget)):
        total += len(layer)
        counts[k] = checked(k, total)
    return CountSeries("ball", g.name, counts)


def apply_auto(a: AutomorphismAction, v: Vertex) -> Vertex:
    return a.apply(v)


def parse_word(text: str) -> tuple[int, ...]:
    try:
        return tuple(LETTERS.index(ch) for ch in text)
    except ValueError:
        raise InputError(f"bad word {text!r}") from None


def parse_vertex(g: GraphModel, text: str) -> Vertex:
    """Parse ``"x,y"`` (cell 0), ``"c1:x,y"``, ``"ab"`` (tree) or ``"ab@z"``."""
    text = text.strip()
    try:
        if isinstance(g, RegularTree):
            v = Vertex(0, (), parse_word(text))
        elif isinstance(g, TreeTimesLine):
            word, _, z = text.partition("@")
            v = Vertex(0, (int(z or 0),), parse_word(word))
        else:
            cell = 0
            if ":" in text:
                head, text = text.split(":", 1)
                cell = int(head.lstrip("c"))
            v = Vertex(cell, tuple(int(x) for x in text.strip("()").split(",") if x.strip()))
    except ValueError as exc:
        raise InputError(f"cannot parse vertex {text!r}: {exc}") from None
    g.validate(v)
    return v


def horocyclic_affine(k: int, scale: int, shift) -> horocycle.AffineMap:
    return horocycle.AffineMap(k, scale, Fraction(shift))
