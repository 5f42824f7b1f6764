import io
import json
import subprocess
import sys

import pytest

from ibvp3 import cli
from ibvp3.exceptions import WindingNumberError

NEU = """direction = "-i"
[[bc]]
order = 0
left = 1
right = 0
[[bc]]
order = 0
left = 0
right = 1
[[bc]]
order = 1
left = 1
right = -0.5
"""
LEFT = '{"direction": "+i", "bc": [{"order": 0, "left": 1, "right": 0},' \
       '{"order": 1, "left": 1, "right": 0}, {"order": 2, "left": 1, "right": 0}]}'
PP = '{"direction": "+i", "bc": [{"order": 0, "left": 1, "right": 1},' \
     '{"order": 1, "left": 1, "right": 2}, {"order": 2, "left": 1, "right": 3}]}'
STRAY = '{"direction": "+i", "bc": [{"order": 0, "left": 0, "right": 1},' \
        '{"order": 1, "left": 1, "right": 2}, {"order": 2, "left": 1, "right": -2}]}'


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, text, ext in (("neu", NEU, "toml"), ("left", LEFT, "json"), ("pp", PP, "json"), ("stray", STRAY, "json")):
        p = tmp_path / f"{name}.{ext}"
        p.write_text(text)
        out[name] = str(p)
    return out


def run_json(*argv):
    buf = io.StringIO()
    code = cli.run([*argv, "--format", "json"], out=buf)
    return code, (json.loads(buf.getvalue()) if buf.getvalue() else None)


def test_classify(files):
    assert run_json("classify", files["neu"])[1]["class"] == "IVa"
    assert run_json("classify", files["left"])[1]["class"] == "I"
    code, rep = run_json("classify", files["pp"])
    assert code == 0 and rep["class"] == "IVc" and rep["schema"] == 1
    assert rep["canonical_form"]["Y"]["exact"] == "11/6"
    assert rep["canonical_form"]["table_row"] == [2, 7]


def test_zero_table(files):
    code, rep = run_json("zeros", files["neu"], "--k-max", "4")
    assert code == 0
    for fam in ("lambda", "mu"):
        rows = [r for r in rep["zeros"] if r["family"] == fam]
        assert [r["k"] for r in rows] == [1, 2, 3, 4]
        errs = [r["error"] for r in rows]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert all(r["residual"] <= 1e-12 for r in rows)


def test_class_one_zero_table(files):
    code, rep = run_json("zeros", files["left"])
    assert code == 0 and rep["zeros"] == []
    assert "No such λ_k or μ_k" in rep["notes"]


def test_k_max_zero_is_usage_error(files):
    with pytest.raises(SystemExit) as exc:
        cli.run(["zeros", files["neu"], "--k-max", "0"])
    assert exc.value.code == 2


def test_verdict(files):
    code, rep = run_json("verdict", files["neu"], "--direction", "both")
    assert code == 0
    assert rep["verdict"]["+i"] == {"conditioned": True, "bound": True, "wellposed": True}
    assert rep["verdict"]["-i"] == {"conditioned": True, "bound": False, "wellposed": False}
    assert rep["growth"]["-i"]["divergent"] and not rep["growth"]["+i"]["divergent"]
    code, rep = run_json("verdict", files["neu"])
    assert list(rep["verdict"]) == ["-i"]


def test_verdict_class_one(files):
    code, rep = run_json("verdict", files["left"], "--direction", "both")
    assert code == 0
    assert not rep["verdict"]["+i"]["wellposed"] and not rep["verdict"]["-i"]["wellposed"]


def test_pseudo_periodic_verdict(files):
    rep = run_json("verdict", files["pp"], "--direction", "both")[1]
    assert rep["verdict"]["-i"]["wellposed"] and not rep["verdict"]["+i"]["wellposed"]


@pytest.mark.parametrize("consts,illposed,beta", [
    (("1", "1", "1", "1"), True, "1"), (("1", "-1", "1", "-1"), True, None), (("1", "-1", "-1", "1"), False, "0"),
])
def test_pseudo4(consts, illposed, beta):
    code, rep = run_json("pseudo4", *consts)
    assert code == 0 and rep["illposed"] is illposed
    assert (rep["beta"] or {}).get("exact") == beta


def test_pseudo4_bad_constant():
    assert run_json("pseudo4", "1", "x", "1", "1")[0] == 2


def test_deterministic(files):
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        cli.run(["verdict", files["pp"], "--format", "json", "--direction", "both"], out=buf)
        outs.append(buf.getvalue())
    assert outs[0] == outs[1]


def test_parse_errors(tmp_path, files):
    bad = tmp_path / "bad.json"
    bad.write_text('{"direction": "+i", "bc": [{"order": 0, "left": 1, "right": 0}]}')
    assert cli.run(["classify", str(bad)], out=io.StringIO()) == 2
    assert cli.run(["classify", str(tmp_path / "missing.json")], out=io.StringIO()) == 2
    bad.write_text('{"direction": "+i", "bc": [{"order": 0, "left": 1, "right": 0},'
                   '{"order": 1, "left": 1, "right": 0}, {"order": 2, "left": 1, "right": [1, 1]}]}')
    assert cli.run(["classify", str(bad)], out=io.StringIO()) == 2


def test_numerical_failure(monkeypatch, files):
    def boom(*a, **k):
        raise WindingNumberError("edge too close")
    monkeypatch.setattr(cli, "zero_table", boom)
    assert cli.run(["zeros", files["neu"]], out=io.StringIO()) == 3


def test_warnings_do_not_change_exit_code(files):
    code, rep = run_json("zeros", files["stray"], "--k-max", "6")
    assert code == 0
    assert any("MissingZeroWarning" in w for w in rep["warnings"])
    assert rep["unmatched"]


def test_config_file(tmp_path, files):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text('k_max = 3\nformat = "json"\ndirection = "both"\n')
    buf = io.StringIO()
    assert cli.run(["zeros", files["neu"], "--config", str(cfg)], out=buf) == 0
    rep = json.loads(buf.getvalue())
    assert max(r["k"] for r in rep["zeros"]) == 3
    buf = io.StringIO()
    cli.run(["zeros", files["neu"], "--config", str(cfg), "--k-max", "5", "--format", "text"], out=buf)
    assert "mu       5" in buf.getvalue()
    cfg.write_text("colour = 1\n")
    assert cli.run(["zeros", files["neu"], "--config", str(cfg)], out=io.StringIO()) == 2
    cfg.write_text("k_max = \n")
    assert cli.run(["zeros", files["neu"], "--config", str(cfg)], out=io.StringIO()) == 2


def test_text_output(files):
    buf = io.StringIO()
    assert cli.run(["verdict", files["neu"], "--k-max", "3"], out=buf) == 0
    text = buf.getvalue()
    assert "class: IVa" in text
    assert "a=-i: conditioned=True bound=False wellposed=False" in text


def test_console_script(files):
    res = subprocess.run([sys.executable, "-m", "ibvp3.cli", "classify", files["pp"]], capture_output=True, text=True)
    assert res.returncode == 0 and "class: IVc" in res.stdout
