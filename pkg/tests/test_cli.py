import csv
import json

import pytest

from schedreduce import cli
from schedreduce.serialize import read_file, read_obj, sidecar_path, write_file


def run(*argv):
    return cli.main(list(argv))


@pytest.fixture
def sample8_file(tmp_path, sample8):
    p = tmp_path / "sample8.json"
    write_file(p, sample8)
    return str(p)


# ---------------------------------------------------------------------------
# gen


def test_gen_is_byte_deterministic(tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    argv = ["gen", "layered", "--params", "layers=3,per_layer=2,edge_prob=1/2",
            "--seed", "7"]
    assert run(*argv, "--out", a) == 0
    assert run(*argv, "--out", b) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_gen_every_family(tmp_path):
    out = lambda name: str(tmp_path / name)
    assert run("gen", "layered", "--params", "layers=2,per_layer=2", "--out",
               out("lay.json")) == 0
    assert run("gen", "random", "--params", "n=4,m=2", "--seed", "3", "--out",
               out("rnd.json")) == 0
    assert run("gen", "jobshop", "--params", "jobs=2,machines=2,ops_per_job=2",
               "--out", out("js.json")) == 0
    assert run("gen", "kpartite_yes", "--params", "n=4,k=2", "--out",
               out("yes.json")) == 0
    assert run("gen", "kpartite_dense", "--params", "n=3,k=2,density=1",
               "--out", out("no.json")) == 0
    assert read_obj(out("lay.json"))["kind"] == "umps"
    assert read_obj(out("js.json"))["kind"] == "jobshop"
    assert read_obj(out("yes.json"))["kind"] == "kpartite"
    assert read_obj(sidecar_path(out("yes.json")))["kind"] == "kpartite_certificate"
    # fractional builds on an instance and a solved schedule
    assert run("solve", out("rnd.json"), "--out", out("sched.json")) == 0
    assert run("gen", "fractional",
               "--params", f"instance={out('rnd.json')},schedule={out('sched.json')}",
               "--params", "gamma=1/160,split_prob=1/2",
               "--seed", "5", "--out", out("frac.json")) == 0
    assert read_obj(out("frac.json"))["kind"] == "fractional"


def test_gen_rejects_bad_input(tmp_path):
    assert run("gen", "mystery", "--out", str(tmp_path / "x.json")) == 2
    assert run("gen", "layered", "--out", str(tmp_path / "x.json")) == 2  # missing params
    assert run("gen", "fractional", "--out", str(tmp_path / "x.json")) == 2


# ---------------------------------------------------------------------------
# reduce


def test_reduce_commdelay_writes_sidecar(tmp_path, sample8_file):
    out = str(tmp_path / "cd.json")
    assert run("reduce", sample8_file, "--reduction", "commdelay", "--out", out) == 0
    obj = read_obj(out)
    assert obj["kind"] == "commdelay" and obj["n_total"] == 11
    side = read_obj(sidecar_path(out))
    assert side["c_infinity"] == 64
    assert side["source"]["kind"] == "umps"


def test_reduce_related_with_override(tmp_path, sample8_file):
    out = str(tmp_path / "rel.json")
    assert run("reduce", sample8_file, "--reduction", "related",
               "--kappa-override", "2", "--out", out) == 0
    assert read_obj(out)["kind"] == "related_grouped"
    side = read_obj(sidecar_path(out))
    assert side["kappa"] == 2 and side["kappa_meets_bound"] is False


def test_reduce_jobshop_and_kpartite_to_umps(tmp_path):
    js, yes = str(tmp_path / "js.json"), str(tmp_path / "yes.json")
    run("gen", "jobshop", "--params", "jobs=2,machines=2,ops_per_job=3", "--out", js)
    run("gen", "kpartite_yes", "--params", "n=4,k=2", "--out", yes)
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert run("reduce", js, "--reduction", "umps", "--out", a) == 0
    assert read_file(a).n == 6  # one job per operation
    assert read_obj(sidecar_path(a))["kind"] == "jobshop_origin"
    assert run("reduce", yes, "--reduction", "umps", "--out", b) == 0
    assert read_file(b).n == 8  # n*k vertices become jobs


def test_reduce_wrong_kind_is_usage_error(tmp_path):
    js = str(tmp_path / "js.json")
    run("gen", "jobshop", "--params", "jobs=1,machines=1,ops_per_job=1", "--out", js)
    assert run("reduce", js, "--reduction", "commdelay",
               "--out", str(tmp_path / "x.json")) == 2


# ---------------------------------------------------------------------------
# solve / verify


def test_solve_exact_reports_optimum(tmp_path, sample8_file, capsys):
    out = str(tmp_path / "sched.json")
    assert run("solve", sample8_file, "--out", out) == 0
    obj = read_obj(out)
    assert obj["optimum"] == "5" and obj["proven_optimal"] is True
    assert obj["solver_states"] > 0
    assert run("verify", sample8_file, out) == 0
    report = json.loads(capsys.readouterr().out)
    assert report == {"feasible": True, "violations": []}


def test_solve_budget_capped_still_writes_feasible_schedule(tmp_path, sample8_file):
    out = str(tmp_path / "sched.json")
    assert run("solve", sample8_file, "--limits", "max_jobs=1", "--out", out) == 3
    assert read_obj(out)["proven_optimal"] is False
    assert run("verify", sample8_file, out) == 0


def test_solve_greedy_exits_zero(tmp_path, sample8_file):
    out = str(tmp_path / "sched.json")
    assert run("solve", sample8_file, "--solver", "greedy", "--out", out) == 0
    assert read_obj(out)["proven_optimal"] is False
    assert run("verify", sample8_file, out) == 0


def test_verify_reports_violations(tmp_path, sample8_file, capsys):
    out = str(tmp_path / "sched.json")
    run("solve", sample8_file, "--out", out)
    obj = read_obj(out)
    obj["entries"]["1"][0] = 3  # move job 1 off its home machine
    (tmp_path / "bad.json").write_text(json.dumps(obj))
    assert run("verify", sample8_file, str(tmp_path / "bad.json")) == 1
    report = json.loads(capsys.readouterr().out)
    assert not report["feasible"]
    assert any(v["kind"] == "wrong_machine" for v in report["violations"])


def test_missing_file_is_usage_error(tmp_path):
    assert run("solve", str(tmp_path / "nope.json"), "--out",
               str(tmp_path / "x.json")) == 2


# ---------------------------------------------------------------------------
# roundtrip / bench


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_roundtrip_commdelay_row(tmp_path, sample8_file):
    out = str(tmp_path / "gap.csv")
    assert run("roundtrip", sample8_file, "--mode", "commdelay",
               "--limits", "max_jobs=12", "--out", out) == 0
    (row,) = read_rows(out)
    assert row == {
        "instance_id": "sample8", "n": "8", "m": "3",
        "opt_source": "5", "opt_target": "6",
        "bound_kind": "sandwich_plus_one", "bound_holds": "true",
        "solver_states": row["solver_states"], "wall_ms": "0",
    }
    assert int(row["solver_states"]) > 0


def test_roundtrip_budget_flagged_but_row_kept(tmp_path, sample8_file, capsys):
    # default max_jobs=10 cannot prove the 11-job reduced instance optimal:
    # the row is kept, the unproven upper bound cannot falsify the sandwich,
    # and the exit code flags the budget instead
    out = str(tmp_path / "gap.csv")
    assert run("roundtrip", sample8_file, "--mode", "commdelay", "--out", out) == 3
    (row,) = read_rows(out)
    assert row["bound_holds"] == "true"
    assert "budget exceeded" in capsys.readouterr().err


def test_roundtrip_related_row(tmp_path, sample8_file):
    out = str(tmp_path / "gap.csv")
    assert run("roundtrip", sample8_file, "--mode", "related",
               "--kappa-override", "2", "--out", out) == 0
    (row,) = read_rows(out)
    assert row["bound_kind"] == "rounding_2L" and row["bound_holds"] == "true"
    assert int(row["opt_target"]) <= 2 * int(row["opt_source"])


def test_roundtrip_kpartite_yes_row(tmp_path):
    yes = str(tmp_path / "yes.json")
    run("gen", "kpartite_yes", "--params", "n=4,k=2", "--seed", "2", "--out", yes)
    out = str(tmp_path / "gap.csv")
    assert run("roundtrip", yes, "--mode", "kpartite", "--out", out) == 0
    (row,) = read_rows(out)
    assert row["bound_kind"] == "yes_3n" and row["bound_holds"] == "true"
    assert int(row["opt_target"]) == 12


def test_bench_over_corpus(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    run("gen", "random", "--params", "n=4,m=2", "--seed", "1",
        "--out", str(corpus / "r1.json"))
    run("gen", "random", "--params", "n=5,m=2", "--seed", "2",
        "--out", str(corpus / "r2.json"))
    run("gen", "kpartite_yes", "--params", "n=4,k=2", "--seed", "3",
        "--out", str(corpus / "k1.json"))
    (corpus / "broken.json").write_text("{not json")
    out = str(tmp_path / "gap.csv")
    assert run("bench", str(corpus), "--out", out) == 0
    assert capsys.readouterr().out.strip() == "rows=3 bound_holds=3/3"
    rows = read_rows(out)
    assert [r["instance_id"] for r in rows] == ["k1", "r1", "r2"]
    assert all(r["bound_holds"] == "true" and r["wall_ms"] == "0" for r in rows)
    # rerun: byte-identical despite the measured timings on stderr
    first = (tmp_path / "gap.csv").read_bytes()
    assert run("bench", str(corpus), "--out", out) == 0
    assert (tmp_path / "gap.csv").read_bytes() == first


def test_bench_empty_dir(tmp_path, capsys):
    corpus = tmp_path / "empty"
    corpus.mkdir()
    assert run("bench", str(corpus)) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == ",".join(cli.GAP_COLUMNS)
    assert out[-1] == "rows=0 bound_holds=0/0"
