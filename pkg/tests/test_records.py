import json

import pytest

from clogsim import records
from clogsim.harness import SweepConfig, run_to_blockage, sweep
from clogsim.model import ModelParams


@pytest.fixture
def sample_result():
    return run_to_blockage(ModelParams(n=3), 4242, run_index=7)


class TestRunRecords:
    def test_schema_keys_and_order(self, sample_result):
        rec = records.run_record(sample_result)
        assert list(rec) == [
            "run_index",
            "seed",
            "n",
            "B",
            "particles_used",
            "truncated",
            "escaped_count",
            "profile_summary",
        ]
        assert list(rec["profile_summary"]) == ["rightmost", "counts", "counts_capped"]

    def test_jsonl_roundtrip(self, tmp_path, sample_result):
        rec = records.run_record(sample_result)
        path = tmp_path / "runs.jsonl"
        records.write_jsonl(path, [rec, rec])
        back = records.read_jsonl(path)
        assert back == [rec, rec]
        raw = path.read_bytes()
        assert raw.endswith(b"\n") and b"\r" not in raw

    def test_profile_cap(self, sample_result):
        sample_result.final_counts = [1] * (records.PROFILE_COUNTS_CAP + 50)
        rec = records.run_record(sample_result)
        assert len(rec["profile_summary"]["counts"]) == records.PROFILE_COUNTS_CAP
        assert rec["profile_summary"]["counts_capped"] is True

    def test_truncated_run_has_null_blockage(self):
        r = run_to_blockage(ModelParams(n=6, max_particles=2), 1)
        line = records.dumps_record(records.run_record(r))
        assert '"B":null' in line


class TestFloatFormatting:
    @pytest.mark.parametrize("value", [0.0, 3.0, 2.5, 1 / 3, 18254.5, 1e-12])
    def test_roundtrip_exact(self, value):
        assert float(records.fmt_float(value)) == value

    def test_none_is_empty(self):
        assert records.fmt_float(None) == ""


class TestSweepCsv:
    @pytest.fixture
    def summary(self):
        return sweep(SweepConfig(n_values=[2, 3, 4], runs=40, master_seed=9, workers=2))

    def test_header_and_roundtrip(self, tmp_path, summary):
        rows = records.sweep_rows_dicts(summary)
        fit = summary.fit.to_dict()
        path = tmp_path / "sweep.csv"
        records.write_sweep_csv(path, rows, fit, summary.fit_note)
        text = path.read_text()
        assert text.splitlines()[0] == records.SWEEP_CSV_HEADER
        back = records.read_sweep_csv(path)
        assert [r["n"] for r in back] == [2, 3, 4]
        assert back[0]["median_B"] == summary.rows[0].median_B
        ctx = records.parse_slope_context(back[0]["slope_context"])
        assert float(ctx["slope"]) == summary.fit.slope
        assert int(ctx["points"]) == 3

    def test_empty_context_when_no_fit(self, tmp_path):
        summary = sweep(SweepConfig(n_values=[3], runs=20, master_seed=10))
        rows = records.sweep_rows_dicts(summary)
        lines = records.sweep_csv_lines(rows, None, "")
        assert lines[1].endswith(",")
        assert records.parse_slope_context("") == {}

    def test_refused_fit_context(self):
        ctx = records.slope_context(None, "fit refused: truncation above 50% at n in [6]")
        assert ctx.startswith("fit=refused")
        assert "," not in ctx

    def test_header_mismatch_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            records.read_sweep_csv(bad)


class TestMetadata:
    def test_echo_is_byte_stable(self):
        meta = records.metadata_block(
            "sweep", 7, {"n_values": [2, 3], "runs": 200}, records.SWEEP_CSV_SCHEMA
        )
        assert records.dumps_metadata(meta) == records.dumps_metadata(
            json.loads(records.dumps_metadata(meta))
        )

    def test_sidecar_roundtrip(self, tmp_path):
        out = tmp_path / "runs.jsonl"
        meta = records.metadata_block("simulate", 1, {"runs": 5}, records.RUN_RECORDS_SCHEMA)
        records.write_metadata(out, meta)
        assert records.meta_path(out).name == "runs.jsonl.meta.json"
        assert records.read_metadata(out) == meta

    def test_metadata_fields(self):
        meta = records.metadata_block("simulate", 3, {}, records.RUN_RECORDS_SCHEMA)
        assert meta["seed_derivation"] == "splitmix64-golden-v1"
        assert meta["version"] and meta["schema"] == "clogsim/run-records-v1"
