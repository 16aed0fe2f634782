import json

import pytest

from gwlocal.cli import EXIT_BUDGET, EXIT_CONFIG, EXIT_OK, EXIT_ZERO_MASS, main, parse_dist


def run(tmp_path, *args):
    return main(list(args) + ["--out", str(tmp_path)])


def load(tmp_path, stem):
    return json.loads((tmp_path / f"{stem}.json").read_text())


def test_sample_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "sample", "--dist", "binary", "--n", "3", "--seed", "7") == EXIT_OK
    assert run(b, "sample", "--dist", "binary", "--n", "3", "--seed", "7") == EXIT_OK
    assert (a / "sample.json").read_bytes() == (b / "sample.json").read_bytes()
    doc = load(a, "sample")
    assert len(doc["samples"]) == 3 and doc["config"]["seed"] == 7


def test_sample_kesten_and_cycle(tmp_path):
    assert run(tmp_path, "sample", "--kesten", "--height", "4", "--n", "2") == EXIT_OK
    doc = load(tmp_path, "sample")
    assert all(len(s["spine"]) == 4 for s in doc["samples"])
    assert run(tmp_path, "sample", "--event", "card=5", "--exact-cycle", "--n", "20") == EXIT_OK
    assert all(len(t) == 5 for t in load(tmp_path, "sample")["samples"])
    assert run(tmp_path, "sample", "--event", "leaves=3", "--n", "5") == EXIT_OK


def test_exact_outputs(tmp_path):
    assert run(tmp_path, "exact", "progeny", "--kmax", "50") == EXIT_OK
    lines = (tmp_path / "exact_progeny.csv").read_text().splitlines()
    assert lines[0].startswith("# config: ") and lines[1] == "n,mass"
    assert run(tmp_path, "exact", "height", "--nmax", "1000") == EXIT_OK
    doc = load(tmp_path, "exact_height")
    tail, pmf = doc["tail"]["probs"], doc["pmf"]["probs"]
    assert all(abs(pmf[n] - (tail[n] - tail[n + 1])) < 1e-15 for n in range(1000))
    assert run(tmp_path, "exact", "generation", "--q", "0.5", "--n", "10", "--kmax", "5") == EXIT_OK
    pm = load(tmp_path, "exact_generation")["pmf"]
    assert pm[1] == pytest.approx(10 ** 0 / 11 ** 2)
    assert run(tmp_path, "exact", "enumerate", "--card-max", "5") == EXIT_OK
    assert load(tmp_path, "exact_enumerate")["mass"] == pytest.approx(0.5 + 1 / 8 + 1 / 16)


def test_converge_commands(tmp_path):
    assert run(tmp_path, "converge", "ratio", "--event", "height_ge", "--nmax", "1000",
               "--dist", "geometric:0.5") == EXIT_OK
    rep = load(tmp_path, "converge_ratio")["report"]
    assert abs(rep["rows"][-1]["ratio"] - 1.0) <= 0.01
    assert run(tmp_path, "converge", "tv", "--event", "card", "--h", "2", "--exact",
               "--nmin", "3", "--nmax", "21", "--nstep", "2") == EXIT_OK
    tvs = [r["tv"] for r in load(tmp_path, "converge_tv")["reports"]]
    assert tvs == sorted(tvs, reverse=True)
    assert run(tmp_path, "converge", "tilt", "--A", "0", "--theta", "0.8", "--n", "2",
               "--dist", "binary:0.6") == EXIT_OK
    assert load(tmp_path, "converge_tilt")["report"]["discrepancy"] <= 1e-12
    assert run(tmp_path, "converge", "generation", "--q", "0.5", "--nmin", "1000",
               "--nmax", "1000") == EXIT_OK


def test_tilt_solve(tmp_path):
    assert run(tmp_path, "tilt-solve", "--dist", "binary:0.6") == EXIT_OK
    assert load(tmp_path, "tilt_solve")["theta_c"] == pytest.approx(1.5 ** 0.5, abs=1e-9)
    assert run(tmp_path, "tilt-solve", "--dist", "power_law:6:0.5") == EXIT_OK
    assert load(tmp_path, "tilt_solve")["generic"] is False


def test_exit_codes(tmp_path):
    assert run(tmp_path, "sample", "--dist", "nonsense") == EXIT_CONFIG
    assert run(tmp_path, "sample", "--event", "card=>3") == EXIT_CONFIG
    assert run(tmp_path, "sample", "--event", "gen3=10") == EXIT_ZERO_MASS  # binary: at most 8
    assert run(tmp_path, "exact", "enumerate", "--card-max", "40") == EXIT_BUDGET
    assert run(tmp_path, "sample", "--event", "card=4", "--exact-cycle") == EXIT_ZERO_MASS
    assert run(tmp_path, "converge", "tv", "--event", "card", "--nmin", "1", "--nmax", "1",
               "--h", "1", "--dist", "binary", "--card-max", "3") == EXIT_OK
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == EXIT_CONFIG


def test_threads_do_not_change_files(tmp_path, monkeypatch):
    outs = []
    for threads in ("1", "4"):
        d = tmp_path / threads
        assert run(d, "converge", "kesten", "--h", "2", "--m", "30000", "--seed", "3",
                   "--threads", threads) == EXIT_OK
        outs.append(((d / "converge_kesten.json").read_bytes(),
                     (d / "converge_kesten.csv").read_bytes()))
    monkeypatch.setenv("GWLOCAL_THREADS", "8")
    d = tmp_path / "env"
    assert run(d, "converge", "kesten", "--h", "2", "--m", "30000", "--seed", "3") == EXIT_OK
    outs.append(((d / "converge_kesten.json").read_bytes(), (d / "converge_kesten.csv").read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_parse_dist(tmp_path):
    f = tmp_path / "d.json"
    f.write_text(json.dumps({"kind": "pmf", "values": {"0": 0.5, "2": 0.5}}))
    assert parse_dist(str(f)).mean == 1.0
    assert parse_dist('{"kind": "geometric_mixture", "q": 0.5}').name == "geometric_mixture"
    assert parse_dist("poisson:0.9").mean == pytest.approx(0.9)


def test_sample_height_and_generation_events(tmp_path):
    assert run(tmp_path, "sample", "--event", "height>=5", "--height", "2", "--n", "4") == EXIT_OK
    doc = load(tmp_path, "sample")
    assert doc["config"]["method"] == "rejection_generationwise"
    assert all(len(t) >= 2 for t in doc["samples"])  # the root has children
    assert run(tmp_path, "sample", "--event", "gen3=10", "--height", "3", "--n", "3",
               "--dist", "geometric:0.5") == EXIT_OK
    from gwlocal import Tree
    assert all(Tree(tuple(t)).generation_size(3) == 10 for t in load(tmp_path, "sample")["samples"])
