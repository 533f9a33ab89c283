"""
End-to-end tests of the command line subcommands and their exit codes.
"""

import csv
import json

import pytest

from src.cli.commands import EXIT_ASSERTION_FAILED, EXIT_ERROR, EXIT_OK, build_parser, float_list, run
from src.services.experiment_service import ExperimentService, spec_from_params
from src.storage.artifact_store import ArtifactStore
from src.utils.errors import InvariantViolation, PostconditionFailed
from src.utils.validators import parse_params


@pytest.fixture
def qwalk(config_file, capsys):
    """Run one subcommand with the temporary config; returns (exit code, parsed stdout)."""
    def invoke(*argv):
        capsys.readouterr()
        code = run([*map(str, argv), "--config", str(config_file)])
        out = capsys.readouterr().out
        return code, json.loads(out) if out.strip() else None
    return invoke


@pytest.fixture
def torus_file(qwalk, tmp_path):
    path = tmp_path / "torus.json"
    code, _ = qwalk("generate", "--family", "torus", "--params", "p=5,d=2", "--out", path)
    assert code == EXIT_OK
    return path


def read_csv(path):
    with open(path, newline='') as f:
        return list(csv.reader(f))


class TestGenerate:
    def test_generate_reports_graph(self, qwalk, tmp_path):
        code, out = qwalk("generate", "--family", "complete", "--params", "N=8,self_loops=true",
                          "--out", tmp_path / "k8.json")
        assert code == EXIT_OK
        assert out == {'graph': "complete(8,self_loops)", 'N': 8, 'out': str(tmp_path / "k8.json")}

    def test_generate_lazy_chain(self, qwalk, tmp_path):
        code, out = qwalk("generate", "--family", "cycle", "--params", "n=4,lazy=true", "--out", tmp_path / "c.json")
        assert code == EXIT_OK
        assert out['graph'] == "lazy(cycle(4))"

    def test_generate_custom_graph(self, qwalk, tmp_path):
        adjacency = tmp_path / "adjacency.json"
        adjacency.write_text(json.dumps({'rows': [[0, 1, 1], [1, 0, 1], [1, 1, 0]]}))
        code, out = qwalk("generate", "--family", "custom", "--adjacency", adjacency, "--out", tmp_path / "m.json")
        assert code == EXIT_OK
        assert out['N'] == 3

    def test_custom_graph_needs_adjacency(self, qwalk, tmp_path):
        code, _ = qwalk("generate", "--family", "custom", "--out", tmp_path / "m.json")
        assert code == EXIT_ERROR

    def test_invalid_parameters(self, qwalk, tmp_path):
        code, _ = qwalk("generate", "--family", "torus", "--params", "p=5,q=2", "--out", tmp_path / "m.json")
        assert code == EXIT_ERROR


class TestAnalysisCommands:
    def test_pi_floor(self, qwalk, torus_file, tmp_path):
        code, out = qwalk("pi", "--matrix", torus_file, "--out", tmp_path / "pi.json")
        assert code == EXIT_OK
        assert out['passes']
        assert out['min_entry'] >= 1 / 625
        assert (tmp_path / "pi.json").exists()

    def test_cesaro_snapshot(self, qwalk, torus_file, tmp_path):
        code, out = qwalk("cesaro", "--matrix", torus_file, "--T", "3.5", "--out", tmp_path / "cesaro.json")
        assert code == EXIT_OK
        assert out['T'] == 3.5
        snapshot = ArtifactStore(tmp_path).load_snapshot(tmp_path / "cesaro.json")
        assert snapshot.kind.value == out['kind']
        assert snapshot.parameter == 3.5
        assert snapshot.entries.shape == (25, 25)

    def test_qmix(self, qwalk, torus_file):
        code, out = qwalk("qmix", "--matrix", torus_file, "--eps", "0.1")
        assert code == EXIT_OK
        assert out['tau_prime'] > 0
        assert out['eps0'] == pytest.approx((1 - out['alpha']) / 4)

    def test_analyze_then_report(self, qwalk, tmp_path):
        matrix = tmp_path / "lazy.json"
        qwalk("generate", "--family", "cycle", "--params", "n=4,lazy=true", "--out", matrix)
        code, out = qwalk("analyze", "--matrix", matrix, "--eps", "0.01", "--out", tmp_path / "analysis.json")
        assert code == EXIT_OK
        assert out['tau_mix'] == 2

        profile = read_csv(tmp_path / "analysis_distances.csv")
        assert profile[0] == ["t", "d", "dbar"]

        code, _ = qwalk("qmix", "--matrix", matrix, "--eps", "0.1", "--out", tmp_path / "qmix.json")
        assert code == EXIT_OK
        code, out = qwalk("report", "--inputs", tmp_path / "analysis.json", tmp_path / "qmix.json",
                          "--out", tmp_path / "report.md")
        assert code == EXIT_OK
        assert out['rows'] == 1

        rows = read_csv(tmp_path / "report.csv")
        table = dict(zip(rows[0], rows[1]))
        assert table['graph'] == "lazy(cycle(4))"
        assert table['tau_eps'] == "6"
        assert (tmp_path / "report.md").read_text().startswith("# Classical against quantum sampling cost")

    def test_report_rejects_unknown_artifact(self, qwalk, tmp_path):
        stray = tmp_path / "stray.json"
        stray.write_text(json.dumps({'graph': "cycle(5)"}))
        code, _ = qwalk("report", "--inputs", stray, "--out", tmp_path / "report.md")
        assert code == EXIT_ERROR


class TestSampleCommand:
    def test_exact_mode(self, qwalk, torus_file, tmp_path):
        code, out = qwalk("sample", "--matrix", torus_file, "--eps", "0.01", "--mode", "exact",
                          "--out", tmp_path / "sample.json")
        assert code == EXIT_OK
        assert out['mode'] == "exact"
        assert out['trials'] == 0
        assert out['tv_to_uniform_exact'] <= 0.01

    def test_same_seed_gives_identical_traces(self, qwalk, torus_file, tmp_path):
        for name in ("first", "second"):
            code, _ = qwalk("sample", "--matrix", torus_file, "--eps", "0.1", "--trials", "40", "--seed", "7",
                            "--trace", tmp_path / f"{name}.csv", "--out", tmp_path / f"{name}.json")
            assert code == EXIT_OK
        first = (tmp_path / "first.csv").read_bytes()
        assert first == (tmp_path / "second.csv").read_bytes()
        rows = read_csv(tmp_path / "first.csv")
        assert rows[0] == ["trial_id", "seed", "initial_state", "round", "time", "state"]
        assert {row[1] for row in rows[1:]} == {"7"}

    def test_single_mode(self, qwalk, torus_file, tmp_path):
        code, out = qwalk("sample", "--matrix", torus_file, "--eps", "0.2", "--mode", "single", "--trials", "10",
                          "--out", tmp_path / "single.json")
        assert code == EXIT_OK
        assert out['T_prime'] == 1

    def test_initial_state_out_of_range(self, qwalk, torus_file, tmp_path):
        code, _ = qwalk("sample", "--matrix", torus_file, "--eps", "0.1", "--mode", "exact", "--x0", "25",
                        "--out", tmp_path / "sample.json")
        assert code == EXIT_ERROR


class TestLabAndTrotter:
    def test_conjecture_complete_suite(self, qwalk, tmp_path):
        code, out = qwalk("conjecture", "--suite", "complete", "--out", tmp_path / "lab.json")
        assert code == EXIT_OK
        assert out['passed'] and out['failed'] == []
        evidence = read_csv(tmp_path / "lab_evidence.csv")
        assert evidence[0] == ["check", "row", "field", "value"]

    def test_trotter_sweep(self, qwalk, torus_file, tmp_path):
        code, out = qwalk("trotter", "--matrix", torus_file, "--t", "1.0", "--j", "4,8", "--out", tmp_path / "t.csv")
        assert code == EXIT_OK
        rows = read_csv(tmp_path / "t.csv")
        assert rows[0] == ["j", "t", "error_2norm", "error_max_entry", "bound"]
        assert [row[0] for row in rows[1:]] == ["4", "8"]
        assert len(out['rows']) == 2


class TestErrors:
    def test_broken_bound_is_an_assertion_failure(self, qwalk, torus_file, monkeypatch):
        def broken(*args, **kwargs):
            raise PostconditionFailed("pi-entry-floor", "entry below 1/N^2")

        monkeypatch.setattr(ExperimentService, "pi", broken)
        code, _ = qwalk("pi", "--matrix", torus_file)
        assert code == EXIT_ASSERTION_FAILED

    def test_unknown_flag(self, qwalk, torus_file):
        code, _ = qwalk("pi", "--matrix", torus_file, "--bogus")
        assert code == EXIT_ERROR

    def test_missing_matrix(self, qwalk, tmp_path):
        code, _ = qwalk("pi", "--matrix", tmp_path / "absent.json")
        assert code == EXIT_ERROR

    def test_malformed_json(self, qwalk, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text("{ not json")
        code, _ = qwalk("qmix", "--matrix", broken, "--eps", "0.1")
        assert code == EXIT_ERROR

    def test_non_stochastic_matrix(self, qwalk, torus_file, tmp_path):
        data = json.loads(torus_file.read_text())
        data['rows'][0][0] = 0.5
        tampered = tmp_path / "tampered.json"
        tampered.write_text(json.dumps(data))
        code, _ = qwalk("pi", "--matrix", tampered)
        assert code == EXIT_ERROR

    def test_missing_config(self, tmp_path):
        assert run(["pi", "--matrix", str(tmp_path / "m.json"), "--config", str(tmp_path / "none.yaml")]) == EXIT_ERROR

    def test_invalid_override(self, qwalk, torus_file):
        code, _ = qwalk("pi", "--matrix", torus_file, "--threads", "0")
        assert code == EXIT_ERROR


class TestHelpers:
    def test_float_list(self):
        assert float_list("0.1, 0.01,") == [0.1, 0.01]

    def test_parser_defaults(self):
        args = build_parser().parse_args(["trotter", "--matrix", "m.json", "--out", "t.csv"])
        assert args.t == 1.0
        assert args.j == [4, 8, 16, 32]

    def test_parse_params(self):
        assert parse_params("N=8,self_loops=true,lazy=0") == {'N': 8, 'self_loops': True, 'lazy': False}
        with pytest.raises(ValueError):
            parse_params("p5")

    def test_spec_from_params_aliases(self):
        spec, lazy = spec_from_params("complete", {'N': 6, 'self_loops': True, 'lazy': True})
        assert spec.label == "complete(6,self_loops)"
        assert lazy

    def test_spec_from_params_rejects_custom(self):
        with pytest.raises(InvariantViolation, match="graph-family"):
            spec_from_params("custom", {})

    def test_service_statistics(self, settings, tmp_path):
        store = ArtifactStore(tmp_path)
        service = ExperimentService(settings, store)
        service.generate("cycle", {'n': 5}, tmp_path / "c5.json")
        stats = service.get_statistics()
        assert stats['artifacts_written'] == 1
        assert stats['total_size_bytes'] > 0
        assert store.get_statistics()['total_artifacts'] == 1

    def test_unknown_log_level(self, qwalk, torus_file):
        code, _ = qwalk("pi", "--matrix", torus_file, "--log-level", "loud")
        assert code == EXIT_ERROR


def test_log_records_carry_subcommand(qwalk, torus_file, tmp_path):
    code, _ = qwalk("qmix", "--matrix", torus_file, "--eps", "0.1")
    assert code == EXIT_OK
    lines = (tmp_path / "logs" / "qwalk.log").read_text().splitlines()
    assert any("[qmix] [src.cli.commands] qwalk qmix finished with exit code 0" in line for line in lines)
