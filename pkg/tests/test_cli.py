import json

import numpy as np
import pytest

from qmarkov import serialize as ser
from qmarkov.algebra import AlgebraShape, AlgElement
from qmarkov.channel import identity_channel, transpose_channel
from qmarkov.cli import main
from qmarkov.state import state_from_density


@pytest.fixture
def files(tmp_path):
    m2 = AlgebraShape((2,))
    out = {}

    def dump(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        out[name] = str(path)

    dump("identity.json", ser.channel_to_json(identity_channel(m2)))
    dump("transpose2.json", ser.channel_to_json(transpose_channel(m2)))
    rho = AlgElement(m2, (np.array([[0.7, 0.1], [0.1, 0.3]], dtype=complex),))
    dump("state.json", ser.state_to_json(state_from_density(rho)))
    corner = AlgElement(m2, (np.diag([1.0, 0.0]).astype(complex),))
    dump("corner.json", ser.state_to_json(state_from_density(corner)))
    dump("kernel.json", {"rows": 2, "cols": 2,
                         "entries": [["1/2", "1/3"], ["1/2", "2/3"]]})
    dump("func.json", {"rows": 2, "cols": 3,
                       "entries": [["1", "0", "1"], ["0", "1", "0"]]})
    dump("p3.json", {"prob": ["1/2", "1/4", "1/4"]})
    dump("p2.json", {"prob": ["1/4", "3/4"]})
    out["dir"] = str(tmp_path)
    return out


def test_check_passes_on_identity(files, capsys):
    code = main(["check", files["identity.json"], "--props", "cp,unital,det"])
    assert code == 0
    assert "PASS" in capsys.readouterr().out


def test_check_fails_on_transpose_schwarz(files, capsys):
    code = main(["check", files["transpose2.json"], "--props", "schwarz"])
    assert code == 1
    assert "witness" in capsys.readouterr().out


def test_check_state_properties(files):
    assert main(["check", files["identity.json"], "--props", "ae-det,ae-unital",
                 "--state", files["state.json"]]) == 0
    assert main(["check", files["identity.json"], "--props", "ae-det"]) == 2


def test_check_rejects_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert main(["check", str(bad), "--props", "cp"]) == 2
    err = capsys.readouterr().err
    assert "line" in err and "column" in err

    ragged = tmp_path / "ragged.json"
    ragged.write_text(json.dumps({
        "domain": {"blocks": [2]}, "codomain": {"blocks": [2]},
        "kind": "matrix", "matrix": [[[1, 0]], [[0, 0]]],
    }))
    assert main(["check", str(ragged), "--props", "cp"]) == 2
    assert main(["check", str(tmp_path / "missing.json"), "--props", "cp"]) == 2


def test_check_json_format_is_machine_readable(files, capsys):
    code = main(["check", files["transpose2.json"], "--props", "cp,unital",
                 "--format", "json"])
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    verdicts = {c["property"]: c["verdict"] for c in payload["checks"]}
    assert verdicts == {"cp": "fail", "unital": "pass"}


def test_bayes_command_writes_candidate(files, tmp_path, capsys):
    out = tmp_path / "g.json"
    code = main(["bayes", "--channel", files["identity.json"],
                 "--state", files["state.json"], "--out", str(out)])
    assert code == 0
    candidate = ser.channel_from_json(json.loads(out.read_text()))
    assert np.allclose(candidate.matrix, np.eye(4), atol=1e-9)


def test_petz_commands(files, capsys):
    assert main(["petz", "--channel", files["identity.json"],
                 "--state", files["state.json"]]) == 0
    # deficient support is an input-level error
    assert main(["petz", "--channel", files["identity.json"],
                 "--state", files["corner.json"]]) == 1


def test_disint_verify_runs_modularity(files, tmp_path, capsys):
    code = main(["disint", "verify", "--channel", files["identity.json"],
                 "--state", files["state.json"],
                 "--candidate", files["identity.json"], "--format", "json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert "modularity" in payload and not payload["modularity"]["violations"]


def test_disint_verify_reports_failure(files, capsys):
    # the transpose is not state-preserving as a section of the identity
    code = main(["disint", "verify", "--channel", files["identity.json"],
                 "--state", files["state.json"],
                 "--candidate", files["transpose2.json"]])
    assert code == 1


def test_disint_construct_on_noncommutative_codomain_fails(files, tmp_path, capsys):
    # identity on M_2 has a noncommutative codomain: construction must refuse
    code = main(["disint", "construct", "--channel", files["identity.json"],
                 "--state", files["state.json"]])
    assert code == 1
    assert "NotCommutative" in capsys.readouterr().err


def test_disint_construct_on_embedded_function(files, tmp_path, capsys):
    func_chan = ser.channel_to_json(
        __import__("qmarkov.finstoch", fromlist=["embed"]).embed(
            ser.stochastic_from_json(json.loads(open(files["func.json"]).read()))
        )
    )
    chan_path = tmp_path / "func_chan.json"
    chan_path.write_text(json.dumps(func_chan))
    state_payload = {"shape": {"blocks": [1, 1, 1]},
                     "density": [[[[0.5, 0]]], [[[0.25, 0]]], [[[0.25, 0]]]]}
    state_path = tmp_path / "p_state.json"
    state_path.write_text(json.dumps(state_payload))
    code = main(["disint", "construct", "--channel", str(chan_path),
                 "--state", str(state_path)])
    assert code == 0


def test_classical_commands(files, tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["classical", "bayes", "--kernel", files["kernel.json"],
                 "--prob", files["p2.json"], "--out", str(out)]) == 0
    g = ser.stochastic_from_json(json.loads(out.read_text()))
    assert g.exact
    assert main(["classical", "check", "--kernel", files["kernel.json"]]) == 0
    assert main(["classical", "disint", "--kernel", files["func.json"],
                 "--prob", files["p3.json"]]) == 0
    # random kernel has no disintegration formula
    assert main(["classical", "disint", "--kernel", files["kernel.json"],
                 "--prob", files["p2.json"]]) == 1


def test_bayes_command_on_embedded_classical_problem(files, tmp_path):
    kernel = ser.stochastic_from_json(json.loads(open(files["kernel.json"]).read()))
    from qmarkov.finstoch import embed

    chan_path = tmp_path / "embedded.json"
    chan_path.write_text(json.dumps(ser.channel_to_json(embed(kernel))))
    state_path = tmp_path / "p_state.json"
    state_path.write_text(json.dumps({
        "shape": {"blocks": [1, 1]},
        "density": [[[[0.25, 0]]], [[[0.75, 0]]]],
    }))
    out = tmp_path / "g.json"
    assert main(["bayes", "--channel", str(chan_path), "--state", str(state_path),
                 "--out", str(out)]) == 0
    assert out.exists()


def test_corpus_commands(capsys):
    assert main(["corpus", "list"]) == 0
    assert "hamming-7-4" in capsys.readouterr().out
    assert main(["corpus", "run", "mu-norm"]) == 0
    assert main(["corpus", "run", "nosuch"]) == 2


def test_corpus_run_all(capsys):
    assert main(["corpus", "run", "--all", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["fixtures"]) == 13


def test_props_command(capsys):
    assert main(["props", "--trials", "8", "--seed", "0", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["seed"] == 0 and payload["trials"] == 8


def test_seed_env_fallback(files, monkeypatch, capsys):
    monkeypatch.setenv("QMARKOV_SEED", "3")
    assert main(["props", "--trials", "8", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["seed"] == 3


def test_reproducible_outputs(files, capsys):
    main(["check", files["transpose2.json"], "--props", "schwarz", "--format", "json"])
    first = capsys.readouterr().out
    main(["check", files["transpose2.json"], "--props", "schwarz", "--format", "json"])
    second = capsys.readouterr().out
    assert first == second


def test_corpus_json_is_byte_identical_across_runs(capsys):
    main(["corpus", "run", "knill-laflamme", "--format", "json"])
    first = capsys.readouterr().out
    main(["corpus", "run", "knill-laflamme", "--format", "json"])
    second = capsys.readouterr().out
    assert first == second


def test_usage_error_exit_code():
    assert main(["check"]) == 2
    assert main([]) == 2
