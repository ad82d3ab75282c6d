"""Growth-constant estimates and diagnostics computed from exact count series."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .enumerate import count_bridges, endpoint_distance_histogram, polygons_from_neighbor_counts, saw_statistics
from .errors import ConsistencyError, InputError
from .graphs import DEFAULT_BUDGET, GraphModel, ball_size, format_vertex
from .height import HeightFunction
from .series import CountSeries

ESTIMATE_FOR = {"saw": "mu", "bridge": "beta", "polygon": "pi", "saw_to_neighbor": "mu", "ball": "growth"}
METHODS = ("nth_root", "ratio")


def _root(count: int, n: int) -> float:
    return math.exp(math.log(count) / n) if count else 0.0


@dataclass
class GrowthEstimate:
    quantity: str
    method: str
    per_n: dict[int, float]
    final: float
    max_n: int
    zero_growth: bool = False
    step: int = 1

    def to_json(self) -> dict:
        return {
            "quantity": self.quantity,
            "method": self.method,
            "step": self.step,
            "per_n": {str(n): v for n, v in self.per_n.items()},
            "final": self.final,
            "max_n": self.max_n,
            "zero_growth": self.zero_growth,
        }


def estimate_growth(series: CountSeries, method: str = "ratio", step: int = 1,
                    quantity: str | None = None) -> GrowthEstimate:
    """nth-root or ratio estimates along n = step, 2*step, ... (step 2 for
    polygons on bipartite graphs, whose odd terms vanish).

    The ratio at n is (count_n / count_{n-step})^(1/step).
    """
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}; expected one of {METHODS}")
    if step not in (1, 2):
        raise InputError("step must be 1 or 2")
    quantity = quantity or ESTIMATE_FOR[series.quantity]
    counts = {n: c for n, c in series.counts.items() if n >= 1 and n % step == 0}
    if not any(counts.values()):
        return GrowthEstimate(quantity, method, {n: 0.0 for n in counts}, 0.0,
                              max(counts, default=0), zero_growth=True, step=step)
    if sum(1 for c in counts.values() if c) < 4:
        raise InputError("growth estimates need at least 4 nonzero terms")
    per_n: dict[int, float] = {}
    for n, c in sorted(counts.items()):
        if method == "nth_root":
            per_n[n] = _root(c, n)
        else:
            prev = series.counts.get(n - step, 0)
            if prev and c:
                per_n[n] = (c / prev) ** (1 / step) if step > 1 else c / prev
    last = max(per_n)
    return GrowthEstimate(quantity, method, per_n, per_n[last], last, step=step)


def series_csv(series: CountSeries, step: int = 1) -> str:
    """Columns n, count, root, ratio; counts as exact decimal strings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "count", "root", "ratio"])
    for n in sorted(series.counts):
        c = series.counts[n]
        prev = series.counts.get(n - step)
        root = f"{_root(c, n):.12g}" if n >= 1 and c else ""
        ratio = f"{(c / prev) ** (1 / step):.12g}" if prev and c else ""
        w.writerow([n, str(c), root, ratio])
    return buf.getvalue()


# --------------------------------------------------------------------------
# pi <= mu = beta


@dataclass
class OrderingReport:
    graph: str
    height: str
    n_max: int
    saw: CountSeries
    polygon: CountSeries
    bridge: CountSeries
    bridge_reversed: CountSeries
    curves: dict[str, dict[int, float]]
    polygon_below_bridge: dict[int, bool]
    beta_direction: str

    def to_json(self) -> dict:
        return {
            "graph": self.graph,
            "height": self.height,
            "n_max": self.n_max,
            "series": {s.quantity + ("_reversed" if s is self.bridge_reversed else ""): s.to_json()
                       for s in (self.saw, self.polygon, self.bridge, self.bridge_reversed)},
            "curves": {k: {str(n): v for n, v in c.items()} for k, c in self.curves.items()},
            "polygon_below_bridge": {str(n): ok for n, ok in self.polygon_below_bridge.items()},
            "beta_direction": self.beta_direction,
        }


def ordering_check(g: GraphModel, h: HeightFunction, n_max: int, workers: int = 1,
                   budget: int = DEFAULT_BUDGET) -> OrderingReport:
    """Exact per-n checks 2p_n <= c_n and b_n <= c_n, plus the three root curves.

    beta uses the larger of the h and -h bridge counts at each n.
    """
    if n_max < 3:
        raise InputError("n_max must be at least 3")
    stats = saw_statistics(g, n_max, workers=workers, budget=budget)
    c = stats.counts
    p = polygons_from_neighbor_counts(stats.to_neighbor, n_max)
    b = count_bridges(g, h, n_max, workers, budget)
    b_rev = count_bridges(g, h.negated(), n_max, workers, budget)
    for n in range(3, n_max + 1):
        if 2 * p[n] > c[n]:
            raise ConsistencyError(f"2p_{n} = {2 * p[n]} exceeds c_{n} = {c[n]}")
    for n in range(n_max + 1):
        for s in (b, b_rev):
            if s[n] > c[n]:
                raise ConsistencyError(f"b_{n} = {s[n]} ({s.height_label}) exceeds c_{n} = {c[n]}")
    curves = {"mu": {}, "beta": {}, "pi": {}}
    below = {}
    for n in range(1, n_max + 1):
        bn = max(b[n], b_rev[n])
        curves["mu"][n] = _root(c[n], n)
        curves["beta"][n] = _root(bn, n)
        if n >= 3:
            curves["pi"][n] = _root(p[n], n)
            if p[n]:
                below[n] = p[n] < bn
    tail_h = sum(b[n] for n in range(n_max + 1))
    tail_rev = sum(b_rev[n] for n in range(n_max + 1))
    direction = h.label if tail_h >= tail_rev else h.negated().label
    return OrderingReport(
        g.name, h.label, n_max,
        CountSeries("saw", g.name, dict(enumerate(c))),
        CountSeries("polygon", g.name, p),
        b, b_rev, curves, below, direction,
    )


# --------------------------------------------------------------------------
# ball growth


@dataclass
class SubexponentialReport:
    graph: str
    n_max: int
    ball: CountSeries
    log_rate: dict[int, float]
    slopes: dict[int, float]
    terminal_slope: float
    threshold: float
    exponential: bool
    decreasing: bool

    @property
    def verdict(self) -> str:
        return "exponential" if self.exponential else "sub-exponential"

    def to_json(self) -> dict:
        return {
            "graph": self.graph,
            "n_max": self.n_max,
            "ball": self.ball.to_json(),
            "log_rate": {str(n): v for n, v in self.log_rate.items()},
            "slopes": {str(n): v for n, v in self.slopes.items()},
            "terminal_slope": self.terminal_slope,
            "threshold": self.threshold,
            "decreasing": self.decreasing,
            "verdict": self.verdict,
        }


def _fit_residual(x, y) -> float:
    coeffs = np.polyfit(x, y, 1)
    return float(np.sum((np.polyval(coeffs, x) - y) ** 2))


def subexponential_diagnostic(g: GraphModel, n_max: int, threshold: float = 0.05,
                              budget: int = DEFAULT_BUDGET) -> SubexponentialReport:
    """(1/n) log Gamma_n and the increments log Gamma_n - log Gamma_{n-1}.

    Growth is called exponential when the terminal increment exceeds
    ``threshold`` and, over the second half of the data, log Gamma_n is
    better fitted by a line in n than by a line in log n.
    """
    if n_max < 4:
        raise InputError("subexponential diagnostic needs n_max >= 4")
    ball = ball_size(g, n_max, budget)
    logs = {n: math.log(ball[n]) for n in range(n_max + 1)}
    rate = {n: logs[n] / n for n in range(1, n_max + 1)}
    slopes = {n: logs[n] - logs[n - 1] for n in range(1, n_max + 1)}
    terminal = slopes[n_max]
    tail = np.arange(max(1, n_max // 2), n_max + 1, dtype=float)
    y = np.array([logs[int(n)] for n in tail])
    exp_fit = _fit_residual(tail, y)
    poly_fit = _fit_residual(np.log(tail), y)
    exponential = terminal > threshold and exp_fit < poly_fit
    values = [rate[n] for n in range(2, n_max + 1)]
    decreasing = all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    return SubexponentialReport(g.name, n_max, ball, rate, slopes, terminal, threshold, exponential, decreasing)


# --------------------------------------------------------------------------
# ballisticity


@dataclass
class BallisticityReport:
    graph: str
    n: int
    c: Fraction
    probability: Fraction
    histogram: dict[int, int]

    def to_json(self) -> dict:
        return {
            "graph": self.graph,
            "n": self.n,
            "c": str(self.c),
            "probability": str(self.probability),
            "probability_float": float(self.probability),
            "histogram": {str(d): str(x) for d, x in self.histogram.items()},
        }


def ballisticity(g: GraphModel, n: int, c, workers: int = 1, budget: int = DEFAULT_BUDGET) -> BallisticityReport:
    """Exact P(d(root, endpoint) <= c*n) under the uniform measure on n-step SAWs."""
    c = Fraction(str(c)) if isinstance(c, float) else Fraction(c)
    if c < 0:
        raise InputError("speed threshold c must be nonnegative")
    hist = endpoint_distance_histogram(g, n, workers, budget)
    total = sum(hist.values())
    mass = sum(x for d, x in hist.items() if d <= c * n)
    return BallisticityReport(g.name, n, c, Fraction(mass, total), hist)


# --------------------------------------------------------------------------
# root independence


@dataclass
class RootIndependenceReport:
    graph: str
    n_max: int
    per_root: dict[str, list[int]]
    transitive: bool
    spread: dict[int, float] = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        rows = list(self.per_root.values())
        if self.transitive:
            return all(r == rows[0] for r in rows)
        ns = sorted(self.spread)
        return not ns or self.spread[ns[-1]] <= self.spread[ns[0]]

    def to_json(self) -> dict:
        return {
            "graph": self.graph,
            "n_max": self.n_max,
            "per_root": {k: [str(x) for x in v] for k, v in self.per_root.items()},
            "transitive": self.transitive,
            "spread": {str(n): s for n, s in self.spread.items()},
            "agree": self.agree,
        }


def root_independence(g: GraphModel, n_max: int, workers: int = 1,
                      budget: int = DEFAULT_BUDGET) -> RootIndependenceReport:
    """c_n from every vertex-orbit representative; on quasi-transitive graphs the
    spread of the nth-root estimates across representatives should shrink."""
    reps = g.orbit_representatives()
    per_root = {}
    for v in reps:
        per_root[format_vertex(v)] = saw_statistics(g, n_max, workers=workers, center=v, budget=budget).counts
    spread = {}
    if len(reps) > 1:
        for n in range(1, n_max + 1):
            roots = [_root(cs[n], n) for cs in per_root.values()]
            spread[n] = max(roots) - min(roots)
    return RootIndependenceReport(g.name, n_max, per_root, len(reps) == 1, spread)
