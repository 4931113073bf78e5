import json

from degdet.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def gen_file(capsys, tmp_path, *extra):
    path = tmp_path / "inst.json"
    code, out = run_cli(capsys, "gen", *extra, "--out", str(path))
    assert code == 0
    doc = json.loads(out)
    assert "digest" in doc
    return path, doc["digest"]


def test_gen_bipartite_file(capsys, tmp_path):
    path, digest = gen_file(capsys, tmp_path, "bipartite", "--n", "3", "--seed", "1")
    assert path.exists()
    assert len(digest) == 64


def test_gen_rank1_large_costs(capsys, tmp_path):
    path, _ = gen_file(capsys, tmp_path, "rank1", "--n", "3", "--m", "5",
                       "--cmax", "1000000")
    assert path.exists()


def test_gen_unknown_generator_exits_2(capsys, tmp_path):
    code = main(["gen", "nonsense", "--n", "3"])
    assert code == 2


def test_solve_reports_value(capsys, tmp_path):
    path, digest = gen_file(capsys, tmp_path, "bipartite", "--n", "3", "--seed", "1")
    code, out = run_cli(capsys, "solve", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["digest"] == digest
    assert isinstance(doc["value"], int)
    assert doc["iterations"][0] == 1


def test_solve_identity_fixture(capsys, tmp_path):
    from degdet import Instance, save
    import numpy as np
    path = tmp_path / "ident.json"
    path.write_bytes(save(Instance.from_arrays(2**31 - 1, [np.eye(3, dtype=int)], [4])))
    code, out = run_cli(capsys, "solve", str(path))
    assert code == 0
    assert json.loads(out)["value"] == 12


def test_solve_singular_prints_minus_inf(capsys, tmp_path):
    from degdet import gen_bipartite, save
    path = tmp_path / "sing.json"
    path.write_bytes(save(gen_bipartite([[1, None], [None, None]])))
    code, out = run_cli(capsys, "solve", str(path))
    assert code == 0
    assert json.loads(out)["value"] == "-inf"


def test_solve_deterministic_reports(capsys, tmp_path):
    path, _ = gen_file(capsys, tmp_path, "dense", "--n", "3", "--m", "3", "--seed", "5")
    _, out1 = run_cli(capsys, "solve", str(path), "--seed", "3")
    _, out2 = run_cli(capsys, "solve", str(path), "--seed", "3")
    d1, d2 = json.loads(out1), json.loads(out2)
    d1.pop("timing"), d2.pop("timing")
    assert d1 == d2


def test_verify_bipartite_agrees(capsys, tmp_path):
    path, _ = gen_file(capsys, tmp_path, "bipartite", "--n", "3", "--seed", "2")
    code, out = run_cli(capsys, "verify", str(path),
                        "--oracle", "hungarian,commutative,newton")
    assert code == 0
    doc = json.loads(out)
    assert all(entry["agree"] for entry in doc["oracles"])


def test_verify_corrupted_solver_exits_3(capsys, tmp_path):
    path, _ = gen_file(capsys, tmp_path, "bipartite", "--n", "3", "--seed", "2")
    code, out = run_cli(capsys, "verify", str(path), "--oracle", "hungarian",
                        "--inject-value", "123456789")
    assert code == 3
    doc = json.loads(out)
    assert not doc["oracles"][0]["agree"]


def test_verify_partitioned_enumeration(capsys, tmp_path):
    path, _ = gen_file(capsys, tmp_path, "partitioned2x2", "--n", "2", "--seed", "4")
    code, out = run_cli(capsys, "verify", str(path),
                        "--oracle", "enumerate2x2,commutative,blowup")
    assert code == 0


def test_solve_integer_instance_routes_to_rational(capsys, tmp_path):
    path, _ = gen_file(capsys, tmp_path, "dense", "--n", "2", "--m", "3",
                       "--seed", "5", "--integer")
    code, out = run_cli(capsys, "solve", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "rational"
    assert "per_prime" in doc


def test_missing_file_exits_2(capsys, tmp_path):
    code = main(["solve", str(tmp_path / "absent.json")])
    assert code == 2


def test_selftest_passes(capsys):
    code, out = run_cli(capsys, "selftest")
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] is True


def test_solve_flags_no_scaling_and_truncate_depth(capsys, tmp_path):
    path, _ = gen_file(capsys, tmp_path, "dense", "--n", "3", "--m", "3",
                       "--seed", "7", "--cmin", "-30", "--cmax", "30")
    _, out_default = run_cli(capsys, "solve", str(path))
    code, out_direct = run_cli(capsys, "solve", str(path), "--no-scaling")
    assert code == 0
    code, out_depth = run_cli(capsys, "solve", str(path), "--truncate-depth", "54")
    assert code == 0
    vals = {json.loads(o)["value"] for o in (out_default, out_direct, out_depth)}
    assert len(vals) == 1


def test_solve_prime_override(capsys, tmp_path):
    path, _ = gen_file(capsys, tmp_path, "bipartite", "--n", "2", "--seed", "3",
                       "--cmin", "1", "--cmax", "5")
    code, out = run_cli(capsys, "solve", str(path), "--prime", "101")
    assert code == 0
    base = json.loads(run_cli(capsys, "solve", str(path))[1])["value"]
    assert json.loads(out)["value"] == base  # bipartite degree is field-independent
