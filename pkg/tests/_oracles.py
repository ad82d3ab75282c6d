"""Slow, obviously-correct reference counters on explicit coordinates.

Nothing here touches the package's graph models: each lattice is re-described
by a neighbour function on integer points, and the counts are obtained by
plain recursion with Python sets.
"""
from __future__ import annotations

from polygrowth.graphs import Vertex


def square_neighbours(p):
    x, y = p
    return [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]


def ladder_neighbours(rows):
    def nbrs(p):
        x, r = p
        out = [(x + 1, r), (x - 1, r)]
        if r > 0:
            out.append((x, r - 1))
        if r < rows - 1:
            out.append((x, r + 1))
        return out

    return nbrs


def brick_neighbours(p):
    """Honeycomb as a brick wall: horizontal edges everywhere, a vertical edge
    up from (x, y) when x + y is even."""
    x, y = p
    out = [(x + 1, y), (x - 1, y)]
    out.append((x, y + 1) if (x + y) % 2 == 0 else (x, y - 1))
    return out


def square_vertex(p) -> Vertex:
    return Vertex(0, tuple(p))


def ladder_vertex(p) -> Vertex:
    x, r = p
    return Vertex(r, (x,))


def brick_vertex(p) -> Vertex:
    x, y = p
    c = (x + y) % 2
    return Vertex(c, ((x - y - c) // 2, y))


def saw_counts(nbrs, n_max, origin=(0, 0)):
    counts = [0] * (n_max + 1)

    def walk(path, seen):
        counts[len(path) - 1] += 1
        if len(path) - 1 == n_max:
            return
        for q in nbrs(path[-1]):
            if q not in seen:
                seen.add(q)
                path.append(q)
                walk(path, seen)
                path.pop()
                seen.remove(q)

    walk([origin], {origin})
    return counts


def polygon_counts(nbrs, n_max, origin=(0, 0)):
    """Cycles through the origin, deduplicated as edge sets."""
    found = {n: set() for n in range(3, n_max + 1)}

    def walk(path, seen):
        steps = len(path) - 1
        last = path[-1]
        if steps >= 2 and origin in nbrs(last):
            cyc = path + [origin]
            found[steps + 1].add(frozenset(frozenset(e) for e in zip(cyc, cyc[1:])))
        if steps + 1 >= n_max:
            return
        for q in nbrs(last):
            if q not in seen:
                seen.add(q)
                path.append(q)
                walk(path, seen)
                path.pop()
                seen.remove(q)

    walk([origin], {origin})
    return {n: len(s) for n, s in found.items()}


def bridge_counts(nbrs, height, n_max, origin=(0, 0)):
    """Walks checked against the bridge inequalities only at the end."""
    counts = [0] * (n_max + 1)

    def walk(path, seen):
        hs = [height(p) for p in path]
        if all(hs[0] < x <= hs[-1] for x in hs[1:]):
            counts[len(path) - 1] += 1
        if len(path) - 1 == n_max:
            return
        for q in nbrs(path[-1]):
            if q not in seen and height(q) > hs[0]:
                seen.add(q)
                path.append(q)
                walk(path, seen)
                path.pop()
                seen.remove(q)

    walk([origin], {origin})
    return counts


def saws(nbrs, n, origin=(0, 0)):
    out = []

    def walk(path, seen):
        if len(path) - 1 == n:
            out.append(tuple(path))
            return
        for q in nbrs(path[-1]):
            if q not in seen:
                seen.add(q)
                path.append(q)
                walk(path, seen)
                path.pop()
                seen.remove(q)

    walk([origin], {origin})
    return out


def ball_counts(nbrs, n_max, origin=(0, 0)):
    seen = {origin}
    frontier = [origin]
    out = [1]
    for _ in range(n_max):
        nxt = []
        for p in frontier:
            for q in nbrs(p):
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
        out.append(len(seen))
    return out


def tree_ball(k, n):
    # 1 + k + k(k-1) + ... + k(k-1)^(n-1)
    return 1 + sum(k * (k - 1) ** (i - 1) for i in range(1, n + 1))
