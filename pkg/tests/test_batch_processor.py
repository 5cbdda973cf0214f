from fractions import Fraction

import pytest

from src.batch_processor import BatchProcessor, batch_filter, picard_stats
from src.config import Config
from src.rational_poly import ONE_MINUS_T, RatPoly
from src.weil_polynomial import WeilPolynomial, cyclotomic_split, format_weil


@pytest.fixture
def three_examples(fixtures_dir):
    return fixtures_dir / "weil" / "three_examples.txt"


def test_three_examples(three_examples):
    result = batch_filter(three_examples)
    assert [r.input_id for r in result.reports] == [2, 3, 4]
    tallies = result.tallies
    assert tallies["FAIL"] == 2
    assert tallies["PASS"] == 1
    assert result.skipped == []
    assert result.condition_tallies()["artin_tate"]["FAIL"] == 1


def test_summary_and_stream(three_examples):
    result = BatchProcessor().batch_filter(three_examples)
    stream = result.format_stream()
    lines = stream.splitlines()
    assert lines[0].startswith("id=2 overall=PASS")
    assert lines[1].startswith("id=3 overall=FAIL")
    assert any(line.startswith("# total=3 ") for line in lines)
    assert stream.endswith("\n")
    assert "input 4: FAIL" in result.format_stream("table")


def test_empty_input():
    result = batch_filter("")
    assert result.reports == []
    assert result.format_summary() == "# total=0 PASS=0 FAIL=0 UNKNOWN=0 skipped=0"


def test_malformed_line_is_skipped(special_weil):
    text = "q=2; 1,2\n" + format_weil(special_weil) + "\n"
    result = batch_filter(text)
    assert [r.input_id for r in result.reports] == [2]
    assert [n for n, _ in result.skipped] == [1]
    assert "# skipped line 1:" in result.format_summary()


def test_cubic_suite_batch(three_examples):
    result = batch_filter(three_examples, suite="cubic")
    assert len(result.reports) == 3
    assert result.reports[1]["cubic_nonnegative"].witness == "n=1,count=-57"
    with pytest.raises(ValueError):
        batch_filter(three_examples, suite="k4")


def test_picard_stats(three_examples):
    stats = picard_stats(three_examples)
    assert stats.considered == 3
    assert stats.rho == {2: 1, 0: 1, 22: 1}
    assert stats.rho_bar == {2: 1, 22: 2}
    assert stats.purely_transcendental == 0
    text = stats.format()
    assert text.splitlines()[0] == "# inputs=3 rejected_integrality=0 skipped=0"
    assert "22 1" in text.splitlines()


def test_picard_stats_transcendental_and_rejected(special_weil):
    g = cyclotomic_split(special_weil).L_trc
    L = g * RatPoly((1, Fraction(-3, 2), 1))
    transcendental = format_weil(WeilPolynomial(4, L))
    non_integral = format_weil(WeilPolynomial(2, RatPoly((1, Fraction(-1, 4), 1)) * ONE_MINUS_T ** 20))
    stats = picard_stats("\n".join([transcendental, non_integral, "q=3; 1"]))
    assert stats.considered == 1
    assert stats.rejected == 1
    assert [n for n, _ in stats.skipped] == [3]
    assert stats.rho == {0: 1}
    assert stats.rho_bar == {0: 1}
    assert stats.purely_transcendental == 1


def test_picard_stats_all_roots_one(fixtures_dir):
    stats = picard_stats(fixtures_dir / "weil" / "all_roots_one.txt")
    assert stats.rho == {22: 1}
    assert stats.rho_bar == {22: 1}


def test_workers_from_config_and_environment(monkeypatch):
    config = Config.from_dict({"batch": {"workers": 3, "chunk_size": 10}})
    processor = BatchProcessor(config)
    assert (processor.workers, processor.chunk_size) == (3, 10)
    monkeypatch.setenv("NCK3_WORKERS", "2")
    assert BatchProcessor(config).workers == 2


def _expected_overall(line_no):
    # строки 100, 200, ...: специальная кубика; 50, 150, ...: корни вне окружности;
    # остальные: (1 - T)^a (1 + T)^(22 - a), a = line_no % 23
    if line_no % 100 == 0:
        return "PASS"
    if line_no % 100 == 50:
        return "FAIL"
    return "PASS" if 10 <= line_no % 23 <= 21 else "FAIL"


@pytest.fixture
def synthetic_file(fixtures_dir):
    return fixtures_dir / "weil" / "synthetic_1000.txt"


@pytest.mark.slow
def test_synthetic_file_tallies(synthetic_file):
    result = batch_filter(synthetic_file)
    assert [r.input_id for r in result.reports] == list(range(1, 1001))
    overall = [r.overall.value for r in result.reports]
    assert overall == [_expected_overall(n) for n in range(1, 1001)]
    expected_pass = sum(_expected_overall(n) == "PASS" for n in range(1, 1001))
    assert result.tallies == {"PASS": expected_pass, "FAIL": 1000 - expected_pass, "UNKNOWN": 0}
    assert result.condition_tallies()["unit_circle"]["FAIL"] == 10
    assert result.format_summary().startswith(
        f"# total=1000 PASS={expected_pass} FAIL={1000 - expected_pass} UNKNOWN=0 skipped=0")


@pytest.mark.slow
def test_parallel_run_matches_serial(synthetic_file):
    config = Config.from_dict({"batch": {"workers": 1, "chunk_size": 64}})
    processor = BatchProcessor(config)
    serial = processor.batch_filter(synthetic_file, workers=1)
    parallel = processor.batch_filter(synthetic_file, workers=2)
    assert parallel.format_stream() == serial.format_stream()
    assert [r.input_id for r in parallel.reports] == list(range(1, 1001))
    assert parallel.tallies == serial.tallies
    assert sum(serial.tallies.values()) == 1000
