import io
import subprocess
import sys

from nwlearn.cli import COMMANDS, EXIT_BUDGET, EXIT_OK, EXIT_USAGE, git_blob_sha1, run


def call(argv):
    buf = io.StringIO()
    code = run(argv, buf)
    return code, buf.getvalue()


def test_design_example(tmp_path):
    out = tmp_path / "d.csv"
    code, text = call(["design", "--b", "3", "--l", "3", "--deg", "1", "--out", str(out)])
    assert code == EXIT_OK
    assert "MAX_INTERSECT=1" in text
    lines = out.read_text().splitlines()
    assert lines[0] == "# command=design"
    assert any(line.startswith("# config_sha1=") for line in lines)
    assert sum(line.startswith("# seed=") for line in lines) == 1
    assert (tmp_path / "d.csv.summary.txt").exists()


def test_bfkl_toy_advantage(tmp_path):
    code, text = call(["bfkl", "--n", "1", "--m", "1", "--exact", "--out", str(tmp_path / "b.csv")])
    assert code == EXIT_OK and "ADVANTAGE=1" in text.split()


def test_instance_predict_default(tmp_path):
    code, text = call(["instance-predict", "--out", str(tmp_path / "i.csv")])
    assert code == EXIT_OK and "PREDICTION=0" in text


def test_reruns_are_byte_identical(tmp_path):
    for cmd in ("design", "gcsp", "dichotomy"):
        a, b = tmp_path / f"{cmd}1.csv", tmp_path / f"{cmd}2.csv"
        assert call([cmd, "--seed", "3", "--out", str(a)])[0] == EXIT_OK
        assert call([cmd, "--seed", "3", "--out", str(b)])[0] == EXIT_OK
        assert a.read_bytes() == b.read_bytes()


def test_seed_changes_header(tmp_path):
    call(["design", "--seed", "1", "--out", str(tmp_path / "a.csv")])
    call(["design", "--seed", "2", "--out", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_text() != (tmp_path / "b.csv").read_text()


def test_exit_codes(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense = 4\n")
    assert call(["design", "--config", str(cfg), "--out", str(tmp_path / "x.csv")])[0] == EXIT_USAGE
    assert call(["design", "--b", "notanint"])[0] == EXIT_USAGE
    assert call(["nosuchcommand"])[0] == EXIT_USAGE
    code, _ = call(["bfkl", "--n", "2", "--m", "3", "--exact", "--budget", "10",
                    "--out", str(tmp_path / "y.csv")])
    assert code == EXIT_BUDGET


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "design.cfg"
    cfg.write_text("# small design\nb = 2\nl = 5\n")
    out = tmp_path / "c.csv"
    call(["design", "--config", str(cfg), "--out", str(out)])
    text = out.read_text()
    assert "# b=2" in text and "# l=5" in text
    call(["design", "--config", str(cfg), "--b", "3", "--out", str(out)])
    assert "# b=3" in out.read_text()


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("NWLEARN_OUT", str(tmp_path / "results"))
    assert call(["design"])[0] == EXIT_OK
    assert (tmp_path / "results" / "design.csv").exists()


def test_git_blob_sha1():
    # matches `git hash-object` of an empty file
    assert git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391"


def test_all_commands_registered():
    assert sorted(COMMANDS) == sorted([
        "design", "gcsp", "bfkl", "natural-learn", "dichotomy", "anticheckers", "witness",
        "reconstruct", "speedup", "instance-predict"])


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "nwlearn", "design", "--out", str(tmp_path / "m.csv")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "MAX_INTERSECT=1" in res.stdout
