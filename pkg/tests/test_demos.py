import importlib.util
import pathlib

import pytest

DEMOS = pathlib.Path(__file__).resolve().parent.parent / "demos"


def load(name):
    found = importlib.util.spec_from_file_location(name, DEMOS / f"{name}.py")
    mod = importlib.util.module_from_spec(found)
    found.loader.exec_module(mod)
    return mod


@pytest.mark.parametrize("name,args", [
    ("sweep_rl", ()),
    ("cusp_ladders", ("{tmp}",)),
    ("tessellation_dictionary", ("RL", "{tmp}")),
])
def test_demo_runs(name, args, tmp_path, capsys):
    load(name).main(*(a.format(tmp=tmp_path) for a in args))
    out = capsys.readouterr().out
    assert "Ok" in out or "holds" in out or "ladders" in out
    for svg in tmp_path.glob("*.svg"):
        assert svg.read_text().startswith("<svg")
