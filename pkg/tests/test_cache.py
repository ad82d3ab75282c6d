import json

from polygrowth import __version__
from polygrowth import enumerate as enum
from polygrowth.cache import ENV_VAR, CountCache, default_cache_dir
from polygrowth.graphs import get_graph


def test_store_and_lookup(tmp_path):
    g = get_graph("Z2")
    cache = CountCache(tmp_path)
    series = enum.count_saws(g, 6)
    assert cache.store(g, series) == 7
    assert cache.store(g, series) == 0
    fresh = CountCache(tmp_path)
    assert fresh.lookup(g, "saw", 6) == 780
    assert fresh.series(g, "saw", range(7)) == series
    assert fresh.series(g, "saw", range(8)) is None


def test_keys_separate_graphs_and_heights(tmp_path):
    cache = CountCache(tmp_path)
    z2, hexagonal = get_graph("Z2"), get_graph("hex")
    cache.store(z2, enum.count_saws(z2, 3))
    assert cache.lookup(hexagonal, "saw", 3) is None
    assert cache.lookup(z2, "saw", 3, height="x") is None


def test_corrupt_lines_are_skipped(tmp_path, caplog):
    g = get_graph("Z2")
    cache = CountCache(tmp_path)
    cache.store(g, enum.count_saws(g, 2))
    with cache.path.open("a") as fh:
        fh.write("{not json\n")
        fh.write(json.dumps({"fingerprint": "x"}) + "\n")
    with caplog.at_level("WARNING"):
        fresh = CountCache(tmp_path)
        assert fresh.lookup(g, "saw", 2) == 12
    assert sum("corrupt" in r.message for r in caplog.records) == 2


def test_other_versions_are_ignored(tmp_path):
    g = get_graph("Z2")
    rec = {"fingerprint": g.fingerprint(), "height": None, "quantity": "saw", "n": 1,
           "count": "999", "version": __version__ + "-old", "graph": "Z2"}
    (tmp_path / "counts.jsonl").write_text(json.dumps(rec) + "\n")
    assert CountCache(tmp_path).lookup(g, "saw", 1) is None


def test_environment_override(monkeypatch, tmp_path):
    monkeypatch.setenv(ENV_VAR, str(tmp_path / "c"))
    assert default_cache_dir() == tmp_path / "c"
