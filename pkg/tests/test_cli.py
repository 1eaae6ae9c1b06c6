"""CLI surface tests: every subcommand over temp files, plus the demo run."""

import json
import time

import pytest

from anlforge.cli import main
from anlforge.core import read_jsonl


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture
def corpus(tmp_path):
    path = tmp_path / "corpus.jsonl"
    assert run_cli("synth", "--out", path, "--docs", "10", "--seed", "5",
                   "--relations", "tree", "--markers") == 0
    return path


def test_synth_deterministic(tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    run_cli("synth", "--out", a, "--docs", "6", "--seed", "9")
    run_cli("synth", "--out", b, "--docs", "6", "--seed", "9")
    assert a.read_text() == b.read_text()


def test_encode_decode_eval_identity(tmp_path, corpus):
    pairs = tmp_path / "pairs.jsonl"
    assert run_cli("encode", "--variant", "acre", "--in", corpus,
                   "--out", pairs, "--schema", "aae") == 0
    gens = tmp_path / "gen.jsonl"
    with open(gens, "w") as handle:
        for record in read_jsonl(pairs):
            handle.write(json.dumps({"doc_id": record["doc_id"],
                                     "output": record["target"]}) + "\n")
    parsed = tmp_path / "parsed.jsonl"
    assert run_cli("decode", "--variant", "acre", "--generations", gens,
                   "--corpus", corpus, "--out", parsed, "--schema", "aae") == 0
    report = tmp_path / "report.json"
    assert run_cli("eval", "score", "--gold", corpus, "--pred", parsed,
                   "--out", report) == 0
    payload = json.loads(report.read_text())
    assert payload["ace"]["micro_f1"] == 1.0
    assert payload["arc"]["micro_f1"] == 1.0
    assert payload["error_rates"] == {"IT": 0.0, "IC": 0.0, "IF": 0.0}


def test_jobs_flag_gives_identical_output(tmp_path, corpus):
    serial = tmp_path / "serial.jsonl"
    parallel = tmp_path / "parallel.jsonl"
    run_cli("encode", "--variant", "abbr", "--in", corpus, "--out", serial)
    run_cli("encode", "--variant", "abbr", "--in", corpus, "--out", parallel,
            "--jobs", "2")
    assert serial.read_text() == parallel.read_text()


def test_marker_pipeline(tmp_path, corpus):
    candidates = tmp_path / "candidates.tsv"
    assert run_cli("markers", "extract", "--in", corpus,
                   "--out", candidates) == 0
    assert candidates.read_text().strip()
    filter_file = tmp_path / "filter.txt"
    filter_file.write_text("because\n", encoding="utf-8")
    lexicon = tmp_path / "lexicon.json"
    assert run_cli("markers", "build", "--candidates", candidates,
                   "--filter", filter_file, "--out", lexicon) == 0
    payload = json.loads(lexicon.read_text())
    assert "because" not in payload["argumentative"]
    annotated = tmp_path / "annotated.jsonl"
    assert run_cli("markers", "annotate", "--in", corpus,
                   "--lexicon", lexicon, "--out", annotated) == 0
    assert any(r["markers"] for r in read_jsonl(annotated))


def test_mft_build_all_strategies(tmp_path, corpus):
    for strategy in ("amkt", "smmkt", "emkt"):
        out = tmp_path / f"{strategy}.jsonl"
        assert run_cli("mft", "build", "--strategy", strategy, "--in", corpus,
                       "--out", out) == 0
        records = list(read_jsonl(out))
        assert records
        assert all(set(r) == {"strategy", "input", "target"} for r in records)
    dm = tmp_path / "dm.jsonl"
    dm.write_text(json.dumps({"sen1": "I trained.", "sen2": "it paid off.",
                              "dm": "Truly,"}) + "\n", encoding="utf-8")
    out = tmp_path / "dmkt.jsonl"
    assert run_cli("mft", "build", "--strategy", "dmkt", "--in", dm,
                   "--out", out) == 0
    record = next(iter(read_jsonl(out)))
    assert record["target"] == "I trained. Truly, it paid off."


def test_stats_length(tmp_path, corpus):
    std = tmp_path / "std.jsonl"
    abbr = tmp_path / "abbr.jsonl"
    run_cli("encode", "--variant", "acre", "--in", corpus, "--out", std)
    run_cli("encode", "--variant", "abbr", "--in", corpus, "--out", abbr)
    out = tmp_path / "length.json"
    assert run_cli("stats", "length", "--standard", std, "--abbr", abbr,
                   "--out", out) == 0
    payload = json.loads(out.read_text())
    assert set(payload) == {"mean_len_standard", "mean_len_abbr",
                            "reduction_pct"}


def test_stats_buckets(tmp_path, corpus):
    pairs = tmp_path / "pairs.jsonl"
    run_cli("encode", "--variant", "acre", "--in", corpus, "--out", pairs)
    gens = tmp_path / "gen.jsonl"
    with open(gens, "w") as handle:
        for record in read_jsonl(pairs):
            handle.write(json.dumps({"doc_id": record["doc_id"],
                                     "output": record["target"]}) + "\n")
    parsed = tmp_path / "parsed.jsonl"
    run_cli("decode", "--variant", "acre", "--generations", gens,
            "--corpus", corpus, "--out", parsed)
    out = tmp_path / "buckets.json"
    assert run_cli("stats", "buckets", "--gold", corpus, "--pred", parsed,
                   "--key", "adu_count", "--out", out) == 0
    payload = json.loads(out.read_text())
    assert all(bucket["ace"]["micro_f1"] == 1.0 for bucket in payload.values())


def test_me_variant_refused_for_cdcp(tmp_path, corpus):
    out = tmp_path / "pairs.jsonl"
    code = run_cli("encode", "--variant", "me", "--in", corpus,
                   "--out", out, "--schema", "cdcp")
    assert code == 2


def test_ingest_cli_standoff(tmp_path):
    from test_ingest import ESSAY, write_standoff

    start = ESSAY.index("Sports build character")
    src = tmp_path / "src"
    src.mkdir()
    write_standoff(src, ann_lines=[f"T1\tClaim {start} {start + 22}\tx"])
    out = tmp_path / "corpus.jsonl"
    assert run_cli("ingest", "--corpus", "aae", "--in", src, "--out", out) == 0
    assert len(list(read_jsonl(out))) == 3


def test_demo_run_fast_and_idempotent(tmp_path):
    out_dir = tmp_path / "run1"
    started = time.monotonic()
    assert run_cli("run", "--out-dir", out_dir) == 0
    elapsed = time.monotonic() - started
    assert elapsed < 10.0
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["scores"]["ace_f1"] == 1.0
    assert manifest["scores"]["arc_f1"] == 1.0
    out_dir2 = tmp_path / "run2"
    assert run_cli("run", "--out-dir", out_dir2) == 0
    second = json.loads((out_dir2 / "manifest.json").read_text())
    # identical artifacts, manifests differ only in timestamp and paths
    assert [v["sha256"] for v in manifest["outputs"].values()] == \
        [v["sha256"] for v in second["outputs"].values()]


def test_run_me_variant_on_demo(tmp_path):
    out_dir = tmp_path / "me-run"
    assert run_cli("run", "--variant", "me", "--out-dir", out_dir) == 0
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["scores"]["ace_f1"] == 1.0


def test_run_refuses_me_on_cdcp(tmp_path):
    assert run_cli("run", "--variant", "me", "--corpus", "cdcp",
                   "--out-dir", tmp_path / "x") == 2
