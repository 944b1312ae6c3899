import csv
import json
import sys
from pathlib import Path

import pytest

from cactus_hecke.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_THEOREM_FAILED,
    EXIT_TOO_LARGE,
    ConfigError,
    JobConfig,
    main,
    run,
)
from helpers import GOLDEN

sys.path.insert(0, str(GOLDEN))
import regen  # noqa: E402


def load(path: Path) -> dict:
    return json.loads(path.read_text())


def records(out: Path, task: str) -> list[dict]:
    return load(out / f"{task}.json")["records"]


# -- documented examples ---------------------------------------------------


def test_dihedral_golden_i2_5(tmp_path):
    cfg = JobConfig.from_dict({"group": "I2(5)", "tasks": ["dihedral-golden"], "output": tmp_path})
    assert run(cfg) == EXIT_OK
    rows = records(tmp_path, "dihedral-golden")
    assert [r["part"] for r in rows] == ["f(gamma_s1)", "f(gamma_s2)", "f(gamma_S)"]
    assert all(r["pass"] == "pass" and r["got"] == r["expected"] for r in rows)
    # (-1)^m t_1 - t_{w0 s1} - t_{w0 s2} + t_{w0}
    assert rows[2]["got"] == {"t_1": -1, "t_s2 s1 s2 s1": -1, "t_s1 s2 s1 s2": -1, "t_s1 s2 s1 s2 s1": 1}


def test_a1_jring_table(tmp_path):
    assert run(JobConfig("A1", ["jring"], out=tmp_path)) == EXIT_OK
    table = {(r["x"], r["y"]): {r["z"]: r["coeff"]} for r in records(tmp_path, "jring")}
    assert table[("s1", "s1")] == {"s1": 1}
    assert ("1", "s1") not in table and ("s1", "1") not in table
    assert load(tmp_path / "jring.json")["meta"]["identity"] == {"t_1": 1, "t_s1": 1}


def test_b3_verify_theorem(tmp_path):
    assert run(JobConfig("B3", ["verify-theorem"], out=tmp_path)) == EXIT_OK
    rows = records(tmp_path, "verify-theorem")
    assert rows and all(r["pass"] == "pass" for r in rows)
    parts = {r["part"] for r in rows}
    assert {"formula:square", "formula:specializes-to-w0", "formula:conjugation", "sigma-law-left"} <= parts


def test_a2_verify_theorem_reports_sign(tmp_path):
    """On A2 the signed formula misses w0 at v=1; the characterized element does not."""
    assert run(JobConfig("A2", ["verify-theorem"], out=tmp_path)) == EXIT_THEOREM_FAILED
    failed = {r["part"] for r in records(tmp_path, "verify-theorem") if r["pass"] == "fail"}
    assert failed == {"formula:specializes-to-w0", "f(gamma_S)=formula"}
    assert load(tmp_path / "summary.json")["exit_code"] == EXIT_THEOREM_FAILED


# -- determinism and formats ---------------------------------------------------


def test_output_independent_of_threads(tmp_path):
    tasks = ["group-info", "kl", "hecke-tables", "afunction", "cells", "jring", "wtilde", "verify-conjecture", "orbits"]
    one, many = tmp_path / "one", tmp_path / "many"
    assert run(JobConfig("B2", tasks, out=one, threads=1, figures=True)) == EXIT_OK
    assert run(JobConfig("B2", tasks, out=many, threads=4, figures=True)) == EXIT_OK
    names = sorted(p.name for p in one.iterdir())
    assert names == sorted(p.name for p in many.iterdir())
    assert any(n.endswith(".png") for n in names)
    for n in names:
        assert (one / n).read_bytes() == (many / n).read_bytes(), n


def test_csv_format(tmp_path):
    assert run(JobConfig("A2", ["kl", "verify-conjecture"], out=tmp_path, format="csv")) == EXIT_OK
    with (tmp_path / "verify-conjecture.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert rows and {"I", "part", "pass", "witness", "theorem_backed"} <= set(rows[0])
    assert all(r["pass"] == "pass" for r in rows)
    assert (tmp_path / "kl.csv").exists()


def test_wtilde_subset_token(tmp_path):
    assert run(JobConfig("A2", ["wtilde:s1"], out=tmp_path)) == EXIT_OK
    rows = records(tmp_path, "wtilde_s1")
    assert {r["I"] for r in rows} == {"{s1}"}
    assert {r["T"] for r in rows} == {"1", "s1"}


def test_figures(tmp_path):
    assert run(JobConfig("A3", ["cells", "afunction", "verify-conjecture", "orbits"], out=tmp_path, figures=True)) == EXIT_OK
    pngs = list(tmp_path.glob("*.png"))
    assert pngs and all(p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n" for p in pngs)


# -- errors ------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ConfigError):
        JobConfig("A2", [])
    with pytest.raises(ConfigError):
        JobConfig("A2", ["bogus"])
    with pytest.raises(ConfigError):
        JobConfig("A2", ["kl"], format="xml")
    with pytest.raises(ConfigError):
        JobConfig.from_dict({"group": "A2", "tasks": ["kl"], "colour": "red"})


def test_exit_codes(tmp_path, caplog):
    assert run(JobConfig("Q7", ["kl"], out=tmp_path)) == EXIT_CONFIG
    assert run(JobConfig("H4", ["kl"], out=tmp_path, max_size=1000)) == EXIT_TOO_LARGE
    assert "max_size=1000" in caplog.text
    assert run(JobConfig("A2", ["wtilde:s9"], out=tmp_path)) == EXIT_CONFIG


def test_main_with_config_file(tmp_path, capsys):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"group": "A1", "tasks": ["jring"], "output": str(tmp_path / "a")}))
    assert main(["--config", str(cfg), "--out", str(tmp_path / "b")]) == EXIT_OK
    assert (tmp_path / "b" / "jring.json").exists() and not (tmp_path / "a").exists()
    assert "jring\tjring.json" in capsys.readouterr().out


def test_main_matrix_file(tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"size": 2, "m": [[1, 6], [6, 1]]}))
    assert main(["--matrix-file", str(m), "--tasks", "group-info", "--out", str(tmp_path / "o")]) == EXIT_OK
    assert load(tmp_path / "o" / "summary.json")["order"] == 12


def test_main_rejects_bad_arguments(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["--group", "A2", "--tasks", "nope", "--out", str(tmp_path)])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["--tasks", "kl"])


# -- committed golden files ----------------------------------------------------


@pytest.mark.parametrize("label", sorted(regen.GROUPS))
def test_golden_files(label, tmp_path):
    assert run(JobConfig(label, regen.GROUPS[label], out=tmp_path)) == EXIT_OK
    expected = sorted(p.name for p in (GOLDEN / label).iterdir())
    assert sorted(p.name for p in tmp_path.iterdir()) == expected
    for name in expected:
        assert (tmp_path / name).read_text() == (GOLDEN / label / name).read_text(), name
