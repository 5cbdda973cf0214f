import random
from fractions import Fraction

import pytest

from conftest import (
    UNIT_QUADRATICS,
    random_cyclotomic_product,
    random_unit_circle_poly,
    synthetic_unit_circle_factor,
)
from src.errors import (
    InfeasibleCountsError,
    InsufficientDataError,
    MalformedPolynomialError,
    ProjectivityError,
    WeilFormatError,
)
from src.point_counter import PointCountTable
from src.rational_poly import ONE_MINUS_T, ONE_PLUS_T, RatPoly, cyclotomic, cyclotomic_indices
from src.weil_polynomial import (
    WeilPolynomial,
    counts_from_weil,
    cyclotomic_split,
    format_weil,
    from_reversed,
    is_self_inversive,
    ks_convert,
    ks_invert,
    non_integral_counts,
    parse_weil_line,
    parse_weil_text,
    prime_of,
    roots_on_unit_circle,
    weil_from_counts,
)


def test_validation():
    with pytest.raises(MalformedPolynomialError):
        WeilPolynomial(2, ONE_MINUS_T ** 21)
    with pytest.raises(MalformedPolynomialError):
        WeilPolynomial(2, ONE_MINUS_T ** 22 * 2)
    assert prime_of(8) == (2, 3)


def test_unit_circle_on_reference_polynomials(special_weil, plus_weil, minus_weil):
    assert roots_on_unit_circle(special_weil)
    assert roots_on_unit_circle(plus_weil)
    assert roots_on_unit_circle(minus_weil)
    assert is_self_inversive(special_weil) == 1


def test_unit_circle_rejects_off_circle_roots():
    real_pair = RatPoly((1, -3, 1)) * ONE_MINUS_T ** 20
    assert not roots_on_unit_circle(WeilPolynomial(2, real_pair))
    not_palindromic = RatPoly((1, 2)) * ONE_MINUS_T ** 21
    assert not roots_on_unit_circle(WeilPolynomial(2, not_palindromic))
    wide = RatPoly((1, Fraction(-5, 2), 1)) * ONE_PLUS_T ** 20
    assert not roots_on_unit_circle(WeilPolynomial(2, wide))


def test_unit_circle_random_products():
    rng = random.Random(20240611)
    wide = RatPoly((1, Fraction(-5, 2), 1))
    for _ in range(40):
        P = random_unit_circle_poly(rng)
        assert roots_on_unit_circle(WeilPolynomial(2, P))
        # замена одного множителя на квадратичный с вещественными корнями
        quad = next((f for f in UNIT_QUADRATICS if f.divides(P)), None)
        if quad is not None:
            assert not roots_on_unit_circle(P.exact_div(quad) * wide)


def test_counts_from_weil(special_weil, plus_weil, minus_weil):
    assert counts_from_weil(special_weil, 4).counts == {1: 7, 2: 13, 3: 85, 4: 273}
    assert counts_from_weil(plus_weil, 2).counts == {1: -39, 2: 105}
    assert counts_from_weil(minus_weil, 2).counts == {1: 49, 2: 105}


def test_non_integral_counts_stay_exact():
    L = RatPoly((1, Fraction(-1, 4), 1)) * ONE_MINUS_T ** 20
    table = counts_from_weil(WeilPolynomial(2, L), 1)
    assert table.counts[1] == Fraction(91, 2)
    assert non_integral_counts(table) == {1: Fraction(91, 2)}


def test_reconstruction_recovers_special_polynomial(special_weil):
    counts = counts_from_weil(special_weil, 11)
    result = weil_from_counts(counts)
    assert not result.ambiguous
    assert list(result) == [special_weil]


def test_reconstruction_uses_twelfth_count(minus_weil):
    counts = counts_from_weil(minus_weil, 12)
    assert list(weil_from_counts(counts)) == [minus_weil]


def test_reconstruction_errors(special_weil):
    with pytest.raises(InsufficientDataError):
        weil_from_counts(counts_from_weil(special_weil, 5))
    counts = counts_from_weil(special_weil, 11)
    bad = PointCountTable(q=2, counts=dict(counts.counts))
    bad.counts[1] = 1 + 4 + 2 * 30
    with pytest.raises(InfeasibleCountsError):
        weil_from_counts(bad)


def test_cyclotomic_split(special_weil, plus_weil, minus_weil):
    split = cyclotomic_split(special_weil)
    assert (split.rho, split.rho_bar) == (2, 2)
    assert split.L_trc.degree == 20
    assert split.L_alg * split.L_trc == special_weil.L
    assert not any(cyclotomic(n).divides(split.L_trc) for n in cyclotomic_indices(22))

    split = cyclotomic_split(minus_weil)
    assert (split.rho, split.rho_bar, split.supersingular) == (22, 22, True)
    split = cyclotomic_split(plus_weil)
    assert (split.rho, split.rho_bar) == (0, 22)
    assert split.factors == ((2, 22),)


def test_cyclotomic_split_random_products():
    rng = random.Random(7)
    for _ in range(20):
        P = random_unit_circle_poly(rng)
        split = cyclotomic_split(WeilPolynomial(2, P))
        assert split.L_alg * split.L_trc == P
        expected_rho = 0
        rest = P
        while ONE_MINUS_T.divides(rest):
            rest = rest.exact_div(ONE_MINUS_T)
            expected_rho += 1
        assert split.rho == expected_rho


def test_ks_conversion(special_weil, plus_weil):
    K = ks_convert(special_weil)
    assert K.degree == 21
    assert K[0] == 2
    assert ks_invert(K, 2) == special_weil
    with pytest.raises(ProjectivityError):
        ks_convert(plus_weil)


def test_text_format(special_weil):
    line = format_weil(special_weil)
    assert parse_weil_line(line) == special_weil
    K = ks_convert(special_weil)
    ks_line = "q=2; " + ",".join(str(c) for c in K.coeffs)
    assert parse_weil_line(ks_line, ks=True) == special_weil
    assert len(parse_weil_text("# comment\n\n" + line + "\n" + line)) == 2


@pytest.mark.parametrize("line", [
    "q=2 1,2,3",
    "p=2; 1,1",
    "q=2; 1,1",
    "q=6; " + ",".join(["1"] + ["0"] * 21 + ["1"]),
    "q=2; 1,x",
])
def test_malformed_lines(line):
    with pytest.raises(WeilFormatError) as err:
        parse_weil_line(line, line_no=7)
    assert err.value.line_no == 7


def test_descending_input(special_weil):
    descending = list(reversed(special_weil.L.coeffs))
    assert from_reversed(descending, 2) == special_weil
    L = ONE_MINUS_T ** 3 * ONE_PLUS_T ** 19
    line = "q=2; " + ",".join(str(c) for c in reversed(L.coeffs))
    assert parse_weil_line(line, descending=True) == WeilPolynomial(2, L)
    with pytest.raises(WeilFormatError):
        parse_weil_line(line, ks=True, descending=True)
    with pytest.raises(MalformedPolynomialError):
        from_reversed([1] * 24, 2)


def test_reconstruction_round_trip_random_products():
    rng = random.Random(314)
    for _ in range(100):
        W = WeilPolynomial(2, random_unit_circle_poly(rng))
        result = weil_from_counts(counts_from_weil(W, 12))
        assert W in result.candidates


def test_cyclotomic_split_with_synthetic_factor():
    h = synthetic_unit_circle_factor(random.Random(8), 9)
    assert h.degree == 18
    L = cyclotomic(1) ** 2 * cyclotomic(3) * h
    split = cyclotomic_split(WeilPolynomial(2, L))
    assert (split.rho, split.rho_bar) == (2, 4)
    assert split.factors == ((1, 2), (3, 1))
    assert split.L_trc == h
    assert split.L_alg == ONE_MINUS_T ** 2 * cyclotomic(3)


def test_reconstruction_round_trip_cyclotomic_products():
    rng = random.Random(2718)
    for _ in range(100):
        W = WeilPolynomial(2, random_cyclotomic_product(rng))
        assert W in weil_from_counts(counts_from_weil(W, 12)).candidates


def test_reconstruction_round_trip_mixed_inputs():
    rng = random.Random(1618)
    for _ in range(20):
        pairs = rng.randint(1, 6)
        h = synthetic_unit_circle_factor(rng, pairs)
        W = WeilPolynomial(2, h * random_cyclotomic_product(rng, 22 - 2 * pairs))
        assert roots_on_unit_circle(W)
        assert W in weil_from_counts(counts_from_weil(W, 12)).candidates
