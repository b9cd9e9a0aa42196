import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ctrlscore.cli import main


def run(*argv):
    out = io.StringIO()
    try:
        code = main(list(argv), out)
    except SystemExit as exc:
        code = exc.code
    return code, out.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines()]


def scores(text):
    return np.array([r["p"] for r in records(text) if r["record"] == "score"])


def test_score_net1_table():
    code, out = run("score", "--network", "net1", "--kind", "vcs")
    assert code == 0
    assert "   7  0.341" in out
    assert "   5  0.000" in out


def test_score_agg1_aecs_top_node():
    code, out = run("score", "--network", "agg1", "--kind", "aecs", "--output", "records")
    p = scores(out)
    assert code == 0 and int(np.argmax(p)) == 2 and p[2] == pytest.approx(0.177, abs=0.0005)


def test_score_net2_top_node():
    code, out = run("score", "--network", "net2", "--output", "records")
    p = scores(out)
    assert int(np.argmax(p)) == 0 and p[0] == pytest.approx(0.150, abs=0.0005)


def test_records_are_deterministic():
    a = run("score", "--network", "net3", "--kind", "aecs", "--output", "records")
    b = run("score", "--network", "net3", "--kind", "aecs", "--output", "records")
    assert a == b
    report = records(a[1])[-1]
    assert report["record"] == "report" and report["converged"] is True


def test_gramian_file_roundtrip_bit_exact(tmp_path):
    path = str(tmp_path / "w.npz")
    assert run("gramian", "--network", "net1", "--gramian-file", path)[0] == 0
    fused = run("score", "--network", "net1", "--output", "records")[1]
    split = run("score", "--gramian-file", path, "--output", "records")[1]
    assert scores(fused).tolist() == scores(split).tolist()


def test_lyapunov_file_agrees_with_quadrature(tmp_path):
    path = str(tmp_path / "w.npz")
    run("gramian", "--network", "net1", "--backend", "lyapunov", "--gramian-file", path)
    a = scores(run("score", "--gramian-file", path, "--output", "records")[1])
    b = scores(run("score", "--network", "net1", "--output", "records")[1])
    assert np.abs(a - b).max() < 1e-3


def test_datadriven_pipeline(tmp_path):
    traj = str(tmp_path / "t.csv")
    code, out = run("generate-trajectories", "--network", "net1", "--count", "12", "--seed", "4",
                    "--trajectories", traj)
    assert code == 0 and "10/10" in out
    dd = scores(run("score", "--backend", "datadriven", "--trajectories", traj,
                    "--output", "records")[1])
    mb = scores(run("score", "--network", "net1", "--output", "records")[1])
    assert np.abs(dd - mb).max() < 0.01


def test_certify():
    code, out = run("certify", "--network", "net1")
    assert code == 0 and "regular" in out


def test_certify_single_node_and_zero_horizon(tmp_path):
    net = tmp_path / "one.json"
    net.write_text(json.dumps({"n": 1, "self_loop": 0.0, "directed": True,
                               "snapshots": [{"duration": 1.0, "edges": []}]}))
    code, out = run("certify", "--network", str(net), "--output", "records")
    rec = records(out)[0]
    assert code == 0 and rec["verdict"] == "regular" and rec["det_R"] == pytest.approx(1.0)
    net.write_text(json.dumps({"n": 2, "snapshots": [{"duration": 0.0}, {"duration": 0.0}]}))
    code, _ = run("certify", "--network", str(net))
    assert code == 2


def test_centrality_outputs():
    code, out = run("centrality", "--network", "net1")
    assert code == 0 and "92.147" in out
    code, out = run("centrality", "--network", "net2", "--generalized", "--kind", "aecs",
                    "--output", "records")
    recs = records(out)
    assert code == 0 and len(recs) == 40
    assert all(r["reading"] == "per-snapshot LTI" for r in recs)


def test_reproduce_table_two(tmp_path):
    code, out = run("reproduce", "II", "--out-dir", str(tmp_path))
    assert code == 0 and "100/100 cells" in out
    assert (tmp_path / "tableII_comparison.csv").exists()


def test_reproduce_fig5_small(tmp_path):
    code, out = run("reproduce", "fig5", "--trials", "2", "--out-dir", str(tmp_path),
                    "--output", "records")
    med = {r["N"]: r["median"] for r in records(out)}
    assert code == 0 and sorted(med) == [7, 8, 9, 10, 11, 12]
    lines = (tmp_path / "fig5_errors.dat").read_text().splitlines()
    assert lines[0].split() == ["N7", "N8", "N9", "N10", "N11", "N12"] and len(lines) == 3


@pytest.mark.parametrize("argv", [
    ("score", "--network", "nope"),
    ("score",),
    ("score", "--network", "net1", "--gramian-file", "x.npz"),
    ("score", "--network", "net1", "--backend", "datadriven"),
    ("score", "--network", "net1", "--dt", "-1"),
    ("score", "--network", "net1", "--kind", "max"),
    ("score", "--gramian-file", "/nonexistent/w.npz"),
    ("bogus",),
])
def test_validation_exit_code(argv):
    assert run(*argv)[0] == 2


def test_numerical_exit_code(tmp_path):
    # node 2 is never reachable: W(p) is singular under the uniform allocation
    path = str(tmp_path / "w.npz")
    W = np.zeros((2, 2, 2))
    W[:, 0, 0] = 1.0
    np.savez(path, W=W, n=np.int64(2), backend="x", params="{}")
    assert run("score", "--gramian-file", path)[0] == 3
    # A = 0 shares its eigenvalues with -A, so the Lyapunov backend refuses it
    net = tmp_path / "n.json"
    net.write_text(json.dumps({"n": 2, "snapshots": [{"duration": 1.0, "edges": []}]}))
    assert run("gramian", "--network", str(net), "--backend", "lyapunov",
               "--gramian-file", path)[0] == 3


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ctrlscore", "certify", "--network", "agg1"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0 and "verdict" in res.stdout
