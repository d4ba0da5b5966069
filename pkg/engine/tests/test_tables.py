import os

import pandas
import pytest

import plugins.tables
import plugins.timer


def test_display_and_full_tables(tmp_path):
    frame = pandas.DataFrame({"name": ["a", "b"], "value": [1 / 3, -2.0]})
    display, full = plugins.tables.write_table(str(tmp_path / "out"), "demo", frame, 1)
    with open(display, newline="") as f:
        assert f.read() == "name,value\na,0.3\nb,-2.0\n"
    reloaded = pandas.read_csv(full)
    assert reloaded["value"].iloc[0] == 1 / 3
    assert not [n for n in os.listdir(tmp_path / "out") if n.startswith(".tmp-")]


def test_atomic_write_replaces_existing_file(tmp_path):
    path = str(tmp_path / "figure.svg")
    plugins.tables.write_text_atomic(path, "old\n")
    plugins.tables.write_text_atomic(path, "new\n")
    with open(path) as f:
        assert f.read() == "new\n"


def test_timer_reports_done_and_failure(capsys):
    with plugins.timer.ProgTimer("Crunching"):
        pass
    with pytest.raises(ValueError):
        with plugins.timer.ProgTimer("Breaking"):
            raise ValueError
    out = capsys.readouterr().out
    assert "Crunching..." in out and "Done in" in out
    assert "Breaking..." in out and "Failed after" in out
