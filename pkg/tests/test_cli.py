import json

import pytest

from dialg import checks, cli
from dialg.checks import Check, CheckPlan, build_registry, matches


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_serre_equiv_example(capsys):
    code, out, _ = run(["--type", "A2", "--check", "serre-equiv", "--p-order", "3"], capsys)
    assert code == 0 and "4 passed, 0 failed" in out


def test_strange_example(capsys):
    code, out, _ = run(["--type", "G2", "--check", "strange", "--trials", "4"], capsys)
    assert code == 0
    assert "strange.J1" in out and "strange.J3" in out


def test_generic_all_skips_theta_only(capsys):
    code, out, _ = run(["--type", "B3", "--check", "all", "--mode", "generic", "--report", "machine"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["summary"]["fail"] == 0
    skipped = {c["id"] for c in doc["checks"] if c["status"] == "skipped"}
    assert "di.cond" in skipped and "serre-equiv[3,2].e" in skipped and "lemma.pef" in skipped
    assert "hopf.p0" not in skipped and "serre.crit[3,2].e" not in skipped


def test_machine_report_deterministic(capsys, tmp_path):
    argv = ["--type", "A2", "--check", "strange.2q,hopf.delta.e.f,hopf.p0", "--p-order", "2",
            "--trials", "3", "--report", "machine"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert set(doc) == {"schema", "plan", "checks", "summary"}
    assert set(doc["checks"][0]) == {"id", "status", "elapsed", "strategy", "witness"}
    assert doc["plan"]["seed"] == "0xd1a" and doc["plan"]["N"] == 2


def test_usage_errors(capsys):
    assert run(["--type", "Q7"], capsys)[0] == 2
    assert run(["--type", "B2"], capsys)[0] == 2
    assert run(["--type", "A2", "--check", "no.such.check"], capsys)[0] == 2
    assert run(["--type", "A2", "--p-order", "9"], capsys)[0] == 2
    assert run(["--type", "A2", "--trials", "0"], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["--type", "A2", "--mode", "elliptic"])
    assert exc.value.code == 2


def test_failure_exit_code(capsys, monkeypatch):
    real = checks.build_registry

    def patched(plan):
        return real(plan) + [Check("broken.check", lambda p: {"ok": False, "witness": {"why": "test"}})]

    monkeypatch.setattr(cli, "build_registry", patched)
    cli._REGISTRY.clear()
    try:
        code, out, _ = run(["--type", "A2", "--check", "broken,strange.2q"], capsys)
    finally:
        cli._REGISTRY.clear()
    assert code == 1 and "FAIL" in out and "why" in out


def test_selectors():
    assert matches("serre-equiv", "serre-equiv[1,2].e")
    assert matches("hopf.delta", "hopf.delta.e.f[1,1]")
    assert matches("all", "anything")
    assert not matches("serre", "serre-equiv[1,2].e")
    assert not matches("hopf.co", "hopf.coassoc.e1")


def test_registry_completeness():
    from dialg import hopf as H
    from dialg import serre as S
    from dialg.rootdata import cartan_data, serre_pairs
    ids = [c.id for c in build_registry(CheckPlan("G2"))]
    assert len(ids) == len(set(ids))
    need = {cid for cid, _ in S.strange_checks()} | {cid for cid, _ in S.corollary_checks("G2")}
    need |= {"taut.a2", "taut.a3", "constraint.a4", "di.cond", "lemma.pef", "lemma.pp", "lemma.ee",
             "confluence", "hopf.p0", "hopf.moment", "hopf.tensor", "hopf.bigrade", "kernel.ring",
             "kernel.series-inverse", "kernel.equality", "rootdata.symmetrization"}
    cd = cartan_data("G2")
    for i, j, _, _ in serre_pairs("G2"):
        for v in "ef":
            need |= {f"serre.crit[{i},{j}].{v}", f"serre-equiv[{i},{j}].{v}", f"hopf.delta.serre[{i},{j}].{v}"}
    need |= {f"hopf.delta.{r[0]}" for r in H.quadratic_relations(cd)}
    need |= {f"hopf.antihom.{r[0]}" for r in H.quadratic_relations(cd)}
    for gid, _ in H.generators(cd):
        need |= {f"hopf.coassoc.{gid}", f"hopf.counit.{gid}", f"hopf.antipode.{gid}"}
    assert need <= set(ids), sorted(need - set(ids))


def test_jobs_match_serial(capsys):
    argv = ["--type", "A2", "--check", "strange.2q,taut,hopf.counit", "--trials", "2", "--report", "machine"]
    code1, a, _ = run(argv, capsys)
    code2, b, _ = run(argv + ["--jobs", "2"], capsys)
    assert code1 == code2 == 0 and a == b


def test_list(capsys):
    code, out, _ = run(["--type", "A2", "--list"], capsys)
    assert code == 0 and "hopf.p0" in out.split()
