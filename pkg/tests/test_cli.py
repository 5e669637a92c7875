import json

import pytest

from birthday_mcmc import cli, oracle


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_fixture(tmp_path, capsys):
    out = tmp_path / "run.json"
    code, _, _ = run(capsys, "sample", "--graph", "complete:16", "--epsilon", "1", "--seed", "7", "--output", str(out))
    assert code == 0
    data = json.loads(out.read_text())
    assert data["schema"] == "1"
    assert data["i_final"] == 1 and data["horizon"] == 2
    assert data["samples"] == [13]
    assert data["guarantee"] == "full_constants" and data["capped"] is False
    assert data["total_steps"] == 105 * 4097 * 2 + 2
    first = out.read_bytes()
    run(capsys, "sample", "--graph", "complete:16", "--epsilon", "1", "--seed", "7", "--output", str(out))
    assert out.read_bytes() == first


def test_sample_csv_table(tmp_path, capsys):
    out = tmp_path / "run.json"
    code, _, _ = run(capsys, "sample", "--graph", "glued:16", "--scale", "0.05", "--seed", "1", "--output", str(out))
    assert code == 0
    lines = (tmp_path / "run.csv").read_text().splitlines()
    assert lines[0] == "stage_i,horizon,experiments,successes,mean_z,threshold,steps_charged"
    data = json.loads(out.read_text())
    assert len(lines) == 1 + len(data["stages"])
    assert [int(r.split(",")[0]) for r in lines[1:]] == list(range(1, data["i_final"] + 1))


def test_sample_verify_glued(capsys):
    code, out, _ = run(capsys, "sample", "--graph", "glued:32", "--epsilon", "1", "--scale", "0.05", "--seed", "3", "--verify")
    assert code == 0
    data = json.loads(out)
    assert data["guarantee"] == "voided_by_scale"
    v = data["verify"]
    assert v["deviation_sq"] == pytest.approx(v["deviation"] ** 2)
    assert 0 <= v["tv_to_uniform"] <= 1


def test_sample_disconnected_edge_list(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("4 1\n0 1\n2 3\n")
    code, _, err = run(capsys, "sample", "--graph", f"edgelist:{bad}", "--seed", "0")
    assert code == 3
    assert "disconnected" in err


def test_sample_edge_list_ok(tmp_path, capsys):
    tri = tmp_path / "tri.txt"
    tri.write_text("# triangle\n3 2\n0 1\n1 2\n2 0\n")
    code, out, _ = run(capsys, "sample", "--graph", f"edgelist:{tri}", "--seed", "0", "--scale", "0.01")
    assert code == 0 and json.loads(out)["n"] == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["sample"],
        ["sample", "--graph", "glued:5", "--seed", "0"],
        ["sample", "--graph", "banana:3", "--seed", "0"],
        ["sample", "--graph", "complete", "--seed", "0"],
        ["sample", "--graph", "complete:x", "--seed", "0"],
        ["sample", "--graph", "complete:8", "--epsilon", "2", "--seed", "0"],
        ["sample", "--graph", "complete:8", "--x0", "9", "--seed", "0"],
        ["sample", "--graph", "edgelist:/no/such/file", "--seed", "0"],
        ["sample", "--graph", "complete:8", "--config", "/no/such.toml"],
    ],
)
def test_config_errors(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('graph = "complete:8"\nscale = 0.02\nseed = 4\nsamples = 3\n')
    code, out, _ = run(capsys, "sample", "--config", str(cfg), "--samples", "2")
    assert code == 0
    data = json.loads(out)
    assert data["seed"] == 4 and data["params"]["scale"] == 0.02
    assert len(data["samples"]) == 2


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('graph = "complete:8"\ncolour = "red"\n')
    assert run(capsys, "sample", "--config", str(cfg))[0] == 2


def test_seed_printed_when_absent(capsys):
    code, out, err = run(capsys, "sample", "--graph", "complete:4", "--scale", "0.01")
    assert code == 0
    assert f"seed: {json.loads(out)['seed']}" in err


def test_random_regular_spec(capsys):
    code, out, _ = run(capsys, "sample", "--graph", "regular:20,3", "--scale", "0.02", "--seed", "5")
    assert code == 0 and json.loads(out)["d"] == 3


def test_verify_complete64(tmp_path, capsys):
    out = tmp_path / "v.json"
    code, table, _ = run(capsys, "verify", "--graph", "complete:64", "--output", str(out))
    assert code == 0
    checks = {c["name"]: c for c in json.loads(out.read_text())["checks"]}
    assert checks["spectral_gap"]["value"] == pytest.approx(1.0)
    assert all(c["pass"] for c in checks.values())
    assert "FAIL" not in table


def test_verify_hypercube_and_cycle(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert run(capsys, "verify", "--graph", "hypercube:6", "--output", str(out))[0] == 0
    checks = {c["name"]: c["value"] for c in json.loads(out.read_text())["checks"]}
    assert checks["tau_mix"] == 32
    assert run(capsys, "verify", "--graph", "cycle:3", "--output", str(out))[0] == 0
    checks = {c["name"]: c["value"] for c in json.loads(out.read_text())["checks"]}
    assert checks["tau_mix"] == 1


def test_verify_reports_violation(monkeypatch, capsys):
    monkeypatch.setattr(oracle, "spectral_check", lambda P: oracle.SpectralReport(0.0, -1.0))
    code, table, _ = run(capsys, "verify", "--graph", "complete:8")
    assert code == 4 and "FAIL" in table


def test_verify_too_large(capsys):
    assert run(capsys, "verify", "--graph", "cycle:5000")[0] == 2


@pytest.mark.parametrize("n, l", [(2, 2), (3, 4)])
def test_lemma_check_passes(n, l, capsys):
    code, out, _ = run(capsys, "lemma-check", "--n", str(n), "--l", str(l), "--trials", "100", "--seed", "1")
    assert code == 0 and out.strip().endswith("PASS")


def test_lemma_check_cap(capsys):
    assert run(capsys, "lemma-check", "--n", "4", "--l", "20")[0] == 2


def test_distinguish_separates(capsys):
    code, out, _ = run(capsys, "distinguish", "--n", "32", "--seed", "0", "--budget", "50")
    assert code == 0
    report = json.loads(out)
    assert report["separated"]
    g, k = report["glued"], report["complete"]
    assert g["exact_expected_z"] > 1.9 * k["exact_expected_z"]
    assert g["mean_z"] == pytest.approx(g["exact_expected_z"], rel=0.05)
    assert k["mean_z"] == pytest.approx(k["exact_expected_z"], rel=0.05)


def test_distinguish_small_and_deterministic(capsys):
    a = run(capsys, "distinguish", "--n", "4", "--seed", "3", "--budget", "20")
    b = run(capsys, "distinguish", "--n", "4", "--seed", "3", "--budget", "20")
    assert a[0] == 0 and a[1] == b[1]


def test_distinguish_odd_n(capsys):
    assert run(capsys, "distinguish", "--n", "7")[0] == 2
