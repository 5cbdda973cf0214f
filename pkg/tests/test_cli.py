import pytest

import nck3
from src.point_counter import format_count_table
from src.rational_poly import ONE_MINUS_T, ONE_PLUS_T
from src.weil_polynomial import counts_from_weil, format_weil


@pytest.fixture
def cubics(fixtures_dir):
    return fixtures_dir / "cubics"


@pytest.fixture
def weil_dir(fixtures_dir):
    return fixtures_dir / "weil"


def _run(capsys, *argv):
    code = nck3.main(list(argv))
    return code, capsys.readouterr().out


def test_count(capsys, cubics):
    code, out = _run(capsys, "count", "--cubic", str(cubics / "fermat.txt"), "--ext", "1")
    assert code == 0
    assert out.strip() == "31"
    code, out = _run(capsys, "count", "--cubic", str(cubics / "fermat.txt"), "--ext", "1", "--affine")
    assert out.strip() == "32"


def test_count_table_records(capsys, cubics):
    code, out = _run(capsys, "count-table", "--cubic", str(cubics / "special_fourfold.txt"),
                     "--max-ext", "2", "--format", "records")
    assert out.strip() == "q=2\n1 35\n2 325"


def test_ack3_from_counts_file(capsys, tmp_path):
    counts = tmp_path / "x.txt"
    counts.write_text("q=2\n1 35\n2 325\n3 4841\n4 70161\n", encoding="utf-8")
    code, out = _run(capsys, "ack3", "--counts", str(counts), "--max-ext", "4", "--format", "records")
    assert code == 0
    assert out.strip() == "q=2\n1 7\n2 13\n3 85\n4 273"


def test_usage_errors(capsys, cubics, tmp_path):
    assert nck3.main(["no-such-command"]) == 2
    assert nck3.main(["--help"]) == 0
    assert nck3.main(["count", "--cubic", str(tmp_path / "absent.txt"), "--ext", "1"]) == 2
    # q^n = 128 выше предела без --allow-large
    assert nck3.main(["count", "--cubic", str(cubics / "fermat.txt"), "--ext", "7"]) == 2
    capsys.readouterr()


def test_filter_exit_codes(capsys, weil_dir, tmp_path):
    one_bad = str(weil_dir / "one_bad.txt")
    assert nck3.main(["filter", "--input", one_bad, "--strict"]) == 1
    assert nck3.main(["filter", "--input", one_bad]) == 0
    capsys.readouterr()
    report = tmp_path / "report.txt"
    code, out = _run(capsys, "filter", "--input", str(weil_dir / "three_examples.txt"),
                     "--format", "records", "--report", str(report))
    assert out.startswith("# total=3 ")
    assert report.read_text(encoding="utf-8").splitlines()[0].startswith("id=2 overall=")


def test_weil_reconstruct(capsys, special_weil, tmp_path):
    counts = tmp_path / "a.txt"
    counts.write_text(format_count_table(counts_from_weil(special_weil, 11)) + "\n", encoding="utf-8")
    code, out = _run(capsys, "weil", "reconstruct", "--counts", str(counts))
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == format_weil(special_weil)
    assert lines[-1].startswith("# candidates=1 unique")


def test_weil_split_and_newton(capsys, weil_dir):
    special = str(weil_dir / "special_fourfold.txt")
    code, out = _run(capsys, "weil", "split", "--input", special)
    assert out.startswith("id=2 rho=2 rho_bar=2 factors=C1^2 L_trc=1,")
    code, out = _run(capsys, "weil", "newton", "--input", special)
    assert out.startswith("id=2 slopes=-1/3,-1/3,-1/3,0,")
    assert out.strip().endswith("height=3 ordinary=false")


def test_weil_check_and_expand(capsys, weil_dir):
    code, out = _run(capsys, "weil", "check", "--input", str(weil_dir / "special_fourfold.txt"),
                     "--format", "records")
    assert out.strip() == "id=2 overall=PASS cond:unit_circle=PASS cond:functional_equation=PASS:eps=+1"
    code, out = _run(capsys, "weil", "expand", "--input", str(weil_dir / "special_fourfold.txt"))
    assert out.strip().splitlines()[-1].split() == ["4", "273", "70161"]


def test_convert_ks_round_trip(capsys, weil_dir, special_weil, tmp_path):
    code, out = _run(capsys, "weil", "convert-ks", "--input", str(weil_dir / "special_fourfold.txt"))
    ks_file = tmp_path / "ks.txt"
    ks_file.write_text(out, encoding="utf-8")
    code, out = _run(capsys, "weil", "convert-ks", "--input", str(ks_file), "--ks")
    assert out.strip() == format_weil(special_weil)


def test_picard_stats(capsys, weil_dir):
    code, out = _run(capsys, "stats", "picard", "--input", str(weil_dir / "three_examples.txt"))
    lines = out.splitlines()
    assert lines[0] == "# inputs=3 rejected_integrality=0 skipped=0"
    assert "22 1" in lines
    assert "22 2" in lines


def test_zeta(capsys, weil_dir):
    code, out = _run(capsys, "zeta", "--input", str(weil_dir / "special_fourfold.txt"), "--terms", "4")
    assert code == 0
    assert "n*a_n=273" in out
    code, mukai_out = _run(capsys, "zeta", "--input", str(weil_dir / "special_fourfold.txt"),
                           "--terms", "4", "--mukai")
    assert "4 a_n=273/4 n*a_n=273" in mukai_out


def test_hilb_check_perturbed_table(capsys, tmp_path):
    counts = tmp_path / "x.txt"
    counts.write_text("q=2\n1 35\n2 326\n", encoding="utf-8")
    code, out = _run(capsys, "hilb", "check", "--counts", str(counts), "--max-ext", "1",
                     "--strict", "--format", "records")
    assert code == 1
    assert "cond:fano_hilbert=FAIL:n=1,fano=361/8,hilbert=361/8" in out


def test_geom_check_negative_cubic(capsys, cubics):
    code, out = _run(capsys, "geom-check", "--cubic", str(cubics / "nl_general_negative.txt"),
                     "--max-ext", "3", "--strict", "--format", "records")
    assert code == 1
    assert "cond:nonnegative=FAIL:n=1,count=-1" in out


def test_field_table(capsys):
    code, out = _run(capsys, "field-table", "--p", "2", "--k", "2")
    assert code == 0
    assert "modulus: 1,1,1" in out


def test_descending_coefficients(capsys, tmp_path):
    L = ONE_MINUS_T * ONE_PLUS_T ** 21
    path = tmp_path / "descending.txt"
    path.write_text("q=2; " + ",".join(str(c) for c in reversed(L.coeffs)) + "\n", encoding="utf-8")
    code, out = _run(capsys, "weil", "split", "--input", str(path), "--descending")
    assert code == 0
    assert out == "id=1 rho=1 rho_bar=22 factors=C1^1,C2^21 L_trc=1\n"
    # без флага та же строка читается как многочлен со свободным членом -1
    code, out = _run(capsys, "weil", "split", "--input", str(path))
    assert out == ""
