import json

import pytest
from fastapi.testclient import TestClient

import clogsim.cli as cli
from clogsim import records
from clogsim.cli import main, parse_int_list
from clogsim.service.app import app


class TestParseIntList:
    def test_forms(self):
        assert parse_int_list("4") == [4]
        assert parse_int_list("2:5") == [2, 3, 4, 5]
        assert parse_int_list("4,8") == [4, 8]

    def test_empty_range_rejected(self):
        with pytest.raises(ValueError):
            parse_int_list("5:2")


class TestExitCodes:
    def test_help_is_success(self, capsys):
        assert main(["--help"]) == 0
        assert "simulate" in capsys.readouterr().out

    def test_missing_required_flag(self, capsys):
        assert main(["simulate", "--n", "3", "--out", "x.jsonl"]) == 1

    def test_unknown_flag(self):
        assert main(["simulate", "--n", "3", "--seed", "1", "--out", "x", "--bogus"]) == 1

    def test_invalid_capacity(self, tmp_path):
        rc = main(["simulate", "--n", "0", "--seed", "1", "--out", str(tmp_path / "x.jsonl")])
        assert rc == 1

    def test_invalid_bias(self, tmp_path):
        rc = main(
            ["simulate", "--n", "2", "--bias", "0", "--seed", "1", "--out", str(tmp_path / "x")]
        )
        assert rc == 1


class TestSimulateCommand:
    def test_writes_records_and_metadata(self, tmp_path, capsys):
        out = tmp_path / "run.jsonl"
        rc = main(
            ["simulate", "--n", "4", "--seed", "7", "--runs", "8",
             "--max-particles", "100000", "--out", str(out), "-v"]
        )
        assert rc == 0
        lines = records.read_jsonl(out)
        assert len(lines) == 8
        assert list(lines[0]) == [
            "run_index", "seed", "n", "B", "particles_used",
            "truncated", "escaped_count", "profile_summary",
        ]
        meta = records.read_metadata(out)
        assert meta["command"] == "simulate" and meta["master_seed"] == 7
        assert meta["config"]["params"]["max_particles"] == 100000
        assert "run 0:" in capsys.readouterr().out

    def test_informal_init_echoed(self, tmp_path):
        out = tmp_path / "run.jsonl"
        main(["simulate", "--n", "3", "--seed", "1", "--runs", "2",
              "--informal-init", "--out", str(out)])
        meta = records.read_metadata(out)
        assert meta["config"]["params"]["initial_occupancy"] == {"0": 1, "1": 1}

    def test_reproduction_from_metadata(self, tmp_path):
        # The sidecar carries everything needed to recreate the file.
        first = tmp_path / "a.jsonl"
        main(["simulate", "--n", "3", "--seed", "42", "--runs", "5", "--out", str(first)])
        meta = records.read_metadata(first)
        second = tmp_path / "b.jsonl"
        rc = main(
            ["simulate",
             "--n", str(meta["config"]["params"]["n"]),
             "--seed", str(meta["master_seed"]),
             "--runs", str(meta["config"]["runs"]),
             "--out", str(second)]
        )
        assert rc == 0
        assert first.read_bytes() == second.read_bytes()
        assert records.read_metadata(second) == meta


class TestWorkerInvariance:
    def test_simulate_bytes_identical(self, tmp_path):
        outs = []
        for workers in ("1", "8"):
            out = tmp_path / f"run_w{workers}.jsonl"
            rc = main(["simulate", "--n", "3", "--seed", "11", "--runs", "24",
                       "--workers", workers, "--out", str(out)])
            assert rc == 0
            outs.append(out)
        assert outs[0].read_bytes() == outs[1].read_bytes()
        assert records.meta_path(outs[0]).read_bytes() == records.meta_path(outs[1]).read_bytes()

    def test_sweep_bytes_identical(self, tmp_path):
        outs = []
        for workers in ("1", "8"):
            out = tmp_path / f"sweep_w{workers}.csv"
            rc = main(["sweep", "--n", "2:4", "--runs", "30", "--seed", "11",
                       "--workers", workers, "--out", str(out)])
            assert rc == 0
            outs.append(out)
        assert outs[0].read_bytes() == outs[1].read_bytes()


class TestValidateCommand:
    def test_pass_path(self, tmp_path):
        # The 0.02 TV threshold assumes thousands of samples; small counts
        # sit above its noise floor and would void a genuine match.
        report = tmp_path / "report.json"
        rc = main(["validate", "--n", "2", "--particles", "3", "--samples", "4000",
                   "--margins", "2,4", "--seed", "3", "--out", str(report)])
        assert rc == 0
        body = json.loads(report.read_text())
        assert body["passed"] is True

    def test_void_exits_two(self):
        rc = main(["validate", "--n", "3", "--particles", "4", "--samples", "300",
                   "--margins", "8", "--step-cap", "40", "--seed", "3"])
        assert rc == 2


class TestLemmaCommand:
    def test_writes_rows(self, tmp_path):
        out = tmp_path / "lemma.jsonl"
        rc = main(["lemma-stats", "--n", "4", "--site", "1", "--min-qualifying", "80",
                   "--batch-runs", "60", "--max-runs", "600", "--seed", "5",
                   "--out", str(out)])
        assert rc == 0
        rows = records.read_jsonl(out)
        assert rows[0]["n"] == 4 and rows[0]["qualifying"] >= 80
        assert records.read_metadata(out)["command"] == "lemma-stats"


class TestHttpClientMode:
    def test_server_flag_round_trips(self, tmp_path, monkeypatch):
        client = TestClient(app)

        def fake_post(url, json=None, timeout=None):
            path = url.replace("http://svc", "")
            return client.post(path, json=json)

        monkeypatch.setattr(cli.httpx, "post", fake_post)
        via_http = tmp_path / "http.jsonl"
        rc = main(["simulate", "--n", "3", "--seed", "21", "--runs", "6",
                   "--server", "http://svc", "--out", str(via_http)])
        assert rc == 0
        local = tmp_path / "local.jsonl"
        main(["simulate", "--n", "3", "--seed", "21", "--runs", "6", "--out", str(local)])
        assert via_http.read_bytes() == local.read_bytes()
        assert records.meta_path(via_http).read_bytes() == records.meta_path(local).read_bytes()
