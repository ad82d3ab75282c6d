import json
import math
from fractions import Fraction

import pytest

from polygrowth import analysis, height
from polygrowth import enumerate as enum
from polygrowth.errors import InputError
from polygrowth.graphs import get_graph
from polygrowth.series import CountSeries


def synthetic(base, n_max, quantity="saw"):
    return CountSeries(quantity, "synthetic", {n: base ** n for n in range(n_max + 1)})


@pytest.mark.parametrize("method", analysis.METHODS)
def test_powers_of_two(method):
    est = analysis.estimate_growth(synthetic(2, 12), method)
    assert est.final == pytest.approx(2.0, abs=1e-12)
    assert est.quantity == "mu" and est.max_n == 12


def test_nth_root_values_are_exact_roots():
    s = enum.count_saws(get_graph("Z2"), 10)
    est = analysis.estimate_growth(s, "nth_root")
    for n, v in est.per_n.items():
        assert v == pytest.approx(s[n] ** (1 / n), rel=1e-12)


def test_tree_ratio_is_exactly_two():
    est = analysis.estimate_growth(enum.count_saws(get_graph("T3"), 14), "ratio")
    assert all(est.per_n[n] == 2.0 for n in range(2, 15))


def test_tree_polygons_have_zero_growth():
    est = analysis.estimate_growth(enum.count_polygons(get_graph("T3"), 12))
    assert est.zero_growth and est.final == 0.0 and est.quantity == "pi"


def test_bipartite_pi_uses_even_terms_only():
    p = enum.count_polygons(get_graph("Z2"), 14)
    est = analysis.estimate_growth(p, "ratio", step=2)
    assert set(est.per_n) == {6, 8, 10, 12, 14}
    assert est.per_n[14] == pytest.approx(math.sqrt(p[14] / p[12]))
    roots = analysis.estimate_growth(p, "nth_root", step=2)
    assert all(n % 2 == 0 for n in roots.per_n)


def test_too_few_terms():
    with pytest.raises(InputError):
        analysis.estimate_growth(CountSeries("saw", "x", {0: 1, 1: 2, 2: 4}))
    with pytest.raises(InputError):
        analysis.estimate_growth(synthetic(2, 8), "median")


def test_series_csv_columns():
    text = analysis.series_csv(enum.count_polygons(get_graph("Z2"), 6))
    lines = text.strip().splitlines()
    assert lines[0] == "n,count,root,ratio"
    assert lines[2].startswith("4,4,")


def test_ordering_on_square_lattice():
    g = get_graph("Z2")
    rep = analysis.ordering_check(g, height.get_height(g), 12)
    for n in range(3, 13):
        assert 2 * rep.polygon[n] <= rep.saw[n]
        assert rep.curves["pi"][n] <= rep.curves["mu"][n]
    json.dumps(rep.to_json())


def test_ordering_on_ladder_trends():
    g = get_graph("L2")
    rep = analysis.ordering_check(g, height.get_height(g), 20)
    mu = rep.curves["mu"]
    pi = rep.curves["pi"]
    assert abs(mu[20] - 1.618) < abs(mu[10] - 1.618)
    assert abs(pi[20] - 1) < abs(pi[10] - 1)


def test_polygons_below_bridges_on_tree_times_line():
    g = get_graph("T3xZ")
    rep = analysis.ordering_check(g, height.get_height(g), 10)
    assert rep.polygon_below_bridge and all(rep.polygon_below_bridge.values())


def test_beta_takes_larger_direction():
    g = get_graph("T3xZ")
    h = height.get_height(g)
    rep = analysis.ordering_check(g, h, 8)
    for n in range(1, 9):
        best = max(rep.bridge[n], rep.bridge_reversed[n])
        assert rep.curves["beta"][n] == pytest.approx(best ** (1 / n))


@pytest.mark.parametrize("name,verdict", [("Z2", "sub-exponential"), ("L2", "sub-exponential"),
                                          ("hex", "sub-exponential"), ("T3", "exponential")])
def test_growth_verdicts(name, verdict):
    rep = analysis.subexponential_diagnostic(get_graph(name), 12)
    assert rep.verdict == verdict


def test_tree_terminal_slope():
    rep = analysis.subexponential_diagnostic(get_graph("T3"), 12)
    gamma = [3 * 2 ** n - 2 for n in range(13)]
    assert rep.ball.values() == gamma
    assert rep.terminal_slope == pytest.approx(math.log(gamma[12] / gamma[11]))
    assert abs(rep.terminal_slope - math.log(2)) < 0.05


def test_subexponential_needs_data():
    with pytest.raises(InputError):
        analysis.subexponential_diagnostic(get_graph("Z2"), 3)


def test_ballisticity_examples():
    assert analysis.ballisticity(get_graph("T3"), 8, 0.5).probability == 0
    rep = analysis.ballisticity(get_graph("Z2"), 3, 0.4)
    assert rep.probability == Fraction(8, 36)
    assert rep.histogram == {1: 8, 3: 28}
    assert analysis.ballisticity(get_graph("Z2"), 3, 1.0).probability == 1


def test_ballisticity_threshold_is_exact():
    # c*n = 1 exactly: 0.1 * 10 must not round below 1
    rep = analysis.ballisticity(get_graph("Z2"), 10, 0.1)
    hist = rep.histogram
    assert rep.probability == Fraction(hist.get(0, 0) + hist.get(1, 0), sum(hist.values()))


def test_root_independence():
    assert analysis.root_independence(get_graph("Z2"), 8).agree
    rep = analysis.root_independence(get_graph("sqoct"), 10)
    assert not rep.transitive
    assert rep.agree
    rows = list(rep.per_root.values())
    assert all(r == rows[0] for r in rows)
