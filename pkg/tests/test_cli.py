import json
import subprocess
import sys

import numpy as np
import pytest

from catsampler.cli import run_cli
from catsampler.optics_core import haar_random_unitary, read_matrix, write_matrix

CONFIG = {
    "modes": [
        {"kind": "odd_cat", "alpha": [0.4, 0.0]},
        {"kind": "even_cat", "alpha": [0.0, 0.3]},
        {"kind": "vacuum"},
    ],
    "unitary": {"kind": "haar", "seed": 11},
    "cutoff": {"auto": 1e-9},
    "samples": 500,
    "seed": 7,
}


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(CONFIG, indent=2))
    return path


def run(argv, capsys):
    code = run_cli([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bound_plain(capsys):
    code, out, _ = run(["bound", "--n", 1, "--alpha", 1], capsys)
    assert code == 0
    assert out.strip() == "0.850918128"


def test_bound_verbose_json(capsys):
    code, out, _ = run(["bound", "--n", 1000, "--alpha", 0.5, "--k", 2, "--json"], capsys)
    payload = json.loads(out)
    assert code == 0
    assert payload["satisfied"] is True
    assert payload["manifest"]["command"] == "bound"


def test_hom(capsys):
    code, out, _ = run(["hom", "--alpha", 1e-3], capsys)
    assert code == 0
    assert "signs ok: True" in out
    code, out, _ = run(["hom", "--alpha", 1e-3, "--json"], capsys)
    payload = json.loads(out)
    assert payload["p11"] <= 1e-12
    assert payload["gamma20"][0] > 0 > payload["gamma02"][0]


def test_reduction(capsys):
    code, out, _ = run(["reduction", "--n", 2, "--m", 4, "--alpha", 1e-3, "--seed", 0, "--json"], capsys)
    assert code == 0
    assert json.loads(out)["max_deviation"] <= 1e-4


def test_reduction_out_of_range(capsys):
    code, _, err = run(["reduction", "--n", 5, "--m", 6, "--alpha", 1e-3, "--seed", 0], capsys)
    assert code == 1 and "error" in err


def test_simulate_outputs_and_manifest(config, tmp_path, capsys):
    dist, samples = tmp_path / "dist.csv", tmp_path / "samples.csv"
    code, out, _ = run(["simulate", "--config", config, "--out-dist", dist, "--out-samples", samples], capsys)
    assert code == 0
    lines = dist.read_text().splitlines()
    assert lines[0] == "s_1,s_2,s_3,probability"
    assert lines[-1].startswith("# captured_mass=")
    assert float(lines[-1].split("=")[1]) >= 1 - 1e-9
    assert len(samples.read_text().splitlines()) == 500
    man = json.loads((tmp_path / "dist.csv.manifest.json").read_text())
    assert man["seed"] == 7 and man["samples"] == 500
    assert man["inputs"] == CONFIG
    assert man["metadata"]["n_branches"] == 4


def test_simulate_is_reproducible(config, tmp_path, capsys):
    outs = []
    for k in range(2):
        d, s = tmp_path / f"d{k}.csv", tmp_path / f"s{k}.csv"
        assert run(["simulate", "--config", config, "--out-dist", d, "--out-samples", s, "--seed", 3], capsys)[0] == 0
        outs.append((d.read_bytes(), s.read_bytes()))
    assert outs[0] == outs[1]


def test_simulate_thread_count_does_not_change_output(config, tmp_path):
    texts = []
    for threads in ("1", "3"):
        d = tmp_path / f"d{threads}.csv"
        subprocess.run(
            [sys.executable, "-m", "catsampler.cli", "simulate", "--config", str(config), "--out-dist", str(d)],
            check=True,
            capture_output=True,
            env={"CATSAMPLER_THREADS": threads, "PATH": ""},
        )
        texts.append(d.read_bytes())
    assert texts[0] == texts[1]


def test_simulate_json_mirrors(config, tmp_path, capsys):
    d, s = tmp_path / "d.csv", tmp_path / "s.csv"
    code, out, _ = run(["simulate", "--config", config, "--out-dist", d, "--out-samples", s, "--json"], capsys)
    assert code == 0
    payload = json.loads(out)
    mirror = json.loads((tmp_path / "d.json").read_text())
    assert mirror["captured_mass"] == payload["captured_mass"]
    assert len(json.loads((tmp_path / "s.json").read_text())["samples"]) == 500


def test_simulate_stdout_summary(config, capsys):
    code, out, _ = run(["simulate", "--config", config, "--samples", 0], capsys)
    assert code == 0
    assert "most likely signatures:" in out


def test_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "modes": [,]\n}\n')
    code, _, err = run(["simulate", "--config", bad], capsys)
    assert code == 1
    assert f"{bad}:2:" in err


def test_missing_config(tmp_path, capsys):
    assert run(["simulate", "--config", tmp_path / "nope.json"], capsys)[0] == 1


def test_bad_arguments(capsys):
    assert run(["bound", "--n", "x", "--alpha", 1], capsys)[0] == 1
    assert run(["bound", "--n", 0, "--alpha", 1], capsys)[0] == 1
    assert run([], capsys)[0] == 1


def test_haar_permanent_roundtrip(tmp_path, capsys):
    out = tmp_path / "u.json"
    man = tmp_path / "man.json"
    code, _, _ = run(["haar", "--m", 4, "--seed", 9, "--out", out, "--manifest", man], capsys)
    assert code == 0
    np.testing.assert_array_equal(read_matrix(out), haar_random_unitary(4, 9).entries)
    assert json.loads(man.read_text())["seed"] == 9
    code, text, _ = run(["permanent", "--matrix", out, "--json"], capsys)
    assert code == 0
    from catsampler.optics_core import permanent_naive

    expect = permanent_naive(haar_random_unitary(4, 9).entries)
    re, im = json.loads(text)["permanent"]
    assert complex(re, im) == pytest.approx(expect, abs=1e-12)


def test_permanent_non_unitary_matrix(tmp_path, capsys):
    path = tmp_path / "ones.json"
    write_matrix(path, np.ones((3, 3), dtype=complex))
    code, out, _ = run(["permanent", "--matrix", path], capsys)
    assert code == 0
    assert out.split()[0] == "6"


def test_permanent_too_large(tmp_path, capsys):
    path = tmp_path / "big.json"
    write_matrix(path, np.ones((31, 31), dtype=complex))
    code, _, err = run(["permanent", "--matrix", path], capsys)
    assert code == 2 and "error" in err


def test_resource_cap_in_simulate(tmp_path, capsys):
    cfg = dict(CONFIG, cutoff={"per_mode": [1000, 1000, 1000]})
    path = tmp_path / "huge.json"
    path.write_text(json.dumps(cfg))
    assert run(["simulate", "--config", path], capsys)[0] == 2


def test_console_script_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    proc = subprocess.run([sys.executable, "-m", "catsampler.cli", "simulate", "--config", str(bad)],
                          capture_output=True, text=True)
    assert proc.returncode == 1
