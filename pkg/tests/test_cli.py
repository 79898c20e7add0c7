import json

import pytest

from memoria.cli import main
from memoria.simulate import parse_manifest

MANIFEST = """\
# small deterministic run
dim = 6
n_wm = 4
stm_capacity = 16
n_stm_rem = 3
n_ltm_rem = 3
n_depth = 4
initial_lifespan = 9
alpha = 2
workload = clustered-topics
clusters = 4
cluster_std = 0.3
steps = 120
vectors_per_step = 4
contribution = uniform
seed = 21
reset_period = 0
"""


@pytest.fixture
def manifest_path(tmp_path):
    path = tmp_path / "run.manifest"
    path.write_text(MANIFEST)
    return path


def test_parse_manifest_key_value(manifest_path):
    manifest = parse_manifest(manifest_path)
    assert manifest.config.dim == 6
    assert manifest.workload.kind == "clustered-topics"
    assert manifest.workload.seed == 21
    assert manifest.contribution.kind == "uniform"


def test_parse_manifest_json(tmp_path, manifest_path):
    raw = {}
    for line in MANIFEST.splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            raw[key.strip()] = value.strip()
    json_path = tmp_path / "run.json"
    json_path.write_text(json.dumps(raw))
    assert parse_manifest(json_path) == parse_manifest(manifest_path)


def test_parse_manifest_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.manifest"
    path.write_text(MANIFEST + "bogus_key = 1\n")
    from memoria.errors import ConfigError
    with pytest.raises(ConfigError):
        parse_manifest(path)


def test_simulate_is_byte_deterministic(manifest_path, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["simulate", "--manifest", str(manifest_path),
                 "--out", str(out_a)]) == 0
    assert main(["simulate", "--manifest", str(manifest_path),
                 "--out", str(out_b)]) == 0
    assert (out_a / "trace.jsonl").read_bytes() == \
        (out_b / "trace.jsonl").read_bytes()
    assert (out_a / "snapshot.txt").read_bytes() == \
        (out_b / "snapshot.txt").read_bytes()


def test_simulate_creates_missing_out_dir(manifest_path, tmp_path):
    out = tmp_path / "deeply" / "nested" / "dir"
    assert main(["simulate", "--manifest", str(manifest_path),
                 "--out", str(out)]) == 0
    assert (out / "trace.jsonl").exists()


def test_simulate_invalid_manifest_exits_one(tmp_path):
    path = tmp_path / "bad.manifest"
    path.write_text("dim = 0\nworkload = iid-gaussian\nsteps = 5\n")
    assert main(["simulate", "--manifest", str(path),
                 "--out", str(tmp_path / "x")]) == 1


def test_reset_period_produces_markers(tmp_path):
    path = tmp_path / "reset.manifest"
    path.write_text(MANIFEST.replace("reset_period = 0",
                                     "reset_period = 50"))
    out = tmp_path / "out"
    assert main(["simulate", "--manifest", str(path),
                 "--out", str(out)]) == 0
    from memoria import read_trace
    log = read_trace(out / "trace.jsonl")
    assert log.resets == [50, 100]
    for record in log.records:
        if record.step in (50, 100):
            assert record.reset_before
            assert record.stm_rem == [] and record.ltm_rem == []


def test_analyze_writes_all_artifacts(manifest_path, tmp_path):
    out = tmp_path / "run"
    main(["simulate", "--manifest", str(manifest_path), "--out", str(out)])
    adir = tmp_path / "analysis"
    code = main(["analyze", "--trace", str(out / "trace.jsonl"),
                 "--snapshot", str(out / "snapshot.txt"),
                 "--analysis", "all", "--out", str(adir), "--max-lag", "3"])
    assert code == 0
    for name in ("creation", "contiguity", "acf", "age", "bound"):
        assert (adir / f"{name}.csv").exists()
        assert (adir / f"{name}.png").exists()


def test_analyze_single_selector(manifest_path, tmp_path):
    out = tmp_path / "run"
    main(["simulate", "--manifest", str(manifest_path), "--out", str(out)])
    adir = tmp_path / "only-bound"
    code = main(["analyze", "--trace", str(out / "trace.jsonl"),
                 "--snapshot", str(out / "snapshot.txt"),
                 "--analysis", "bound", "--out", str(adir), "--no-plots"])
    assert code == 0
    assert (adir / "bound.csv").exists()
    assert not (adir / "creation.csv").exists()


def test_analyze_unknown_selector_exits_one(tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["analyze", "--trace", "x", "--snapshot", "y",
              "--analysis", "nope", "--out", str(tmp_path)])
    assert err.value.code == 1


def test_verify_ok_run():
    assert main(["verify", "--iterations", "25", "--seed", "3"]) == 0


def test_verify_zero_iterations_vacuous_pass():
    with pytest.warns(UserWarning):
        assert main(["verify", "--iterations", "0"]) == 0


def test_verify_detects_broken_tie_break(monkeypatch, tmp_path):
    # invert the retrieval tie-break: differential campaign must fail and
    # serialize the first divergent state
    import memoria.retrieval as retrieval_mod
    import numpy as np

    original = retrieval_mod.select_top_k

    def inverted(scores, k):
        if not scores:
            return []
        ids = np.fromiter(scores.keys(), dtype=np.int64, count=len(scores))
        vals = np.fromiter(scores.values(), dtype=np.float64,
                           count=len(scores))
        order = np.lexsort((-ids, -vals))
        return ids[order[:k]].tolist()

    monkeypatch.setattr(retrieval_mod, "select_top_k", inverted)
    try:
        out = tmp_path / "failures"
        code = main(["verify", "--iterations", "60", "--seed", "0",
                     "--out", str(out)])
        assert code == 2
        assert list(out.glob("divergent-*.snapshot"))
    finally:
        monkeypatch.setattr(retrieval_mod, "select_top_k", original)


def test_export_graph_min_weight_filters(tmp_path, manifest_path):
    out = tmp_path / "run"
    main(["simulate", "--manifest", str(manifest_path), "--out", str(out)])
    dot_all = tmp_path / "all.dot"
    dot_none = tmp_path / "none.dot"
    assert main(["export-graph", "--snapshot", str(out / "snapshot.txt"),
                 "--min-weight", "0", "--out", str(dot_all)]) == 0
    assert main(["export-graph", "--snapshot", str(out / "snapshot.txt"),
                 "--min-weight", "1.1", "--out", str(dot_none)]) == 0
    all_text = dot_all.read_text()
    none_text = dot_none.read_text()
    assert "->" in all_text
    assert "->" not in none_text
    assert all_text.startswith("digraph")


def test_export_graph_two_engram_fixture(tmp_path):
    from memoria import Config, new_engine, save_snapshot
    from memoria.lifecycle import record_cofiring
    state = new_engine(Config(dim=2, n_wm=2, stm_capacity=4, n_stm_rem=2,
                              n_ltm_rem=2, n_depth=1, initial_lifespan=9.0,
                              alpha=1.0))
    a, b = state.add_working_memory([[0.0, 0.0], [1.0, 1.0]])
    record_cofiring(state, [a, b])
    record_cofiring(state, [a])
    snap = tmp_path / "s.txt"
    save_snapshot(state, snap)
    dot = tmp_path / "g.dot"
    assert main(["export-graph", "--snapshot", str(snap),
                 "--out", str(dot)]) == 0
    text = dot.read_text()
    assert f'e{a} -> e{b} [weight="0.5"];' in text
    assert f'e{b} -> e{a} [weight="1.0"];' in text
