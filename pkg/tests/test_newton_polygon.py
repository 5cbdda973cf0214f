from fractions import Fraction

import pytest

from src.newton_polygon import (
    INFINITE_HEIGHT,
    auxiliary_primes,
    certify_irreducible,
    height_and_ordinarity,
    hodge_polygon,
    negative_slope_part,
    newton_above_hodge,
    newton_polygon,
    perfect_power_and_irreducibility,
    polygon_above_hodge,
    polygon_from_points,
    valuation,
)
from src.rational_poly import ONE, RatPoly
from src.verdicts import Verdict
from src.weil_polynomial import CyclotomicSplit, cyclotomic_split

ORDINARY_Q = RatPoly((1, Fraction(-3, 2), 1))
SPLIT_Q = RatPoly((1, Fraction(-5, 2), 1))


def _split_of(Q: RatPoly) -> CyclotomicSplit:
    return CyclotomicSplit(L_alg=ONE, L_trc=Q, rho=0, rho_bar=0)


def test_valuation():
    assert valuation(12, 2) == 2
    assert valuation(Fraction(3, 8), 2) == -3
    assert valuation(Fraction(-5, 2), 5) == 1
    with pytest.raises(ValueError):
        valuation(0, 2)


def test_special_polynomial_slopes(special_weil):
    split = cyclotomic_split(special_weil)
    polygon = newton_polygon(split.L_trc, 2)
    third = Fraction(1, 3)
    assert polygon.slopes == (-third,) * 3 + (Fraction(0),) * 14 + (third,) * 3
    assert height_and_ordinarity(split, 2) == (3, False)
    assert newton_above_hodge(split, 2).verdict is Verdict.PASS


def test_hodge_polygon():
    assert hodge_polygon(4).slopes == (-1, 0, 0, 1)
    assert hodge_polygon(2).slopes == (-1, 1)


def test_polygon_below_hodge_fails():
    polygon = polygon_from_points([(0, Fraction(0)), (1, Fraction(-2)), (2, Fraction(0))])
    result = polygon_above_hodge(polygon)
    assert result.verdict is Verdict.FAIL
    assert result.witness == "x=1,newton=-2,hodge=-1"


def test_ordinary_height_one():
    split = _split_of(ORDINARY_Q)
    assert height_and_ordinarity(split, 2) == (1, True)
    assert newton_above_hodge(split, 2).verdict is Verdict.PASS


def test_supersingular_height(minus_weil):
    split = cyclotomic_split(minus_weil)
    height = height_and_ordinarity(split, 2)
    assert height.height == INFINITE_HEIGHT
    assert height.format_height() == "inf"
    assert newton_above_hodge(split, 2).witness == "supersingular"


def test_perfect_power_of_irreducible_quadratic():
    result = perfect_power_and_irreducibility(ORDINARY_Q ** 2, 2)
    Q, e, status = result
    assert Q == ORDINARY_Q
    assert e == 2
    assert status is Verdict.PASS
    assert result.witness == "ell=3"


def test_rational_root_is_reported():
    result = perfect_power_and_irreducibility(SPLIT_Q, 2)
    assert result.e == 1
    assert result.status is Verdict.FAIL
    assert result.witness == "root=2"


def test_certify_irreducible():
    assert certify_irreducible(ORDINARY_Q, 2) == (True, 3)
    assert certify_irreducible(SPLIT_Q, 2) == (False, None)
    assert auxiliary_primes(2, 3) == (3, 5, 7)


def test_negative_slope_part():
    assert negative_slope_part(ORDINARY_Q, 2) == (Verdict.PASS, None)
    # два отрицательных наклона: -2 и -1/2
    Q = RatPoly((1, Fraction(1, 4), 0, Fraction(1, 8)))
    verdict, witness = negative_slope_part(Q, 2)
    assert verdict is Verdict.FAIL
    assert witness == "slopes=-2/-1/2"
