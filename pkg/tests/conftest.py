"""
Общие фикстуры тестов nck3
"""

import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.point_counter import load_cubic  # noqa: E402
from src.rational_poly import ONE_MINUS_T, RatPoly, cyclotomic, cyclotomic_indices, poly_from_power_sums  # noqa: E402
from src.weil_polynomial import WeilPolynomial, parse_weil_line  # noqa: E402

FIXTURES = ROOT / "fixtures"

SPECIAL_LINE = (FIXTURES / "weil" / "special_fourfold.txt").read_text(encoding="utf-8")
SPECIAL_LINE = next(line for line in SPECIAL_LINE.splitlines() if line.strip() and not line.startswith("#"))

# квадратичные множители 1 - rT + T^2 с корнями на окружности, не круговые
UNIT_QUADRATICS = [RatPoly((1, -r, 1)) for r in (Fraction(1, 2), Fraction(-1, 2),
                                                  Fraction(3, 2), Fraction(-3, 2))]
CYCLOTOMIC_PIECES = [cyclotomic(n) for n in cyclotomic_indices(22)]


def random_unit_circle_poly(rng: random.Random, degree: int = 22) -> RatPoly:
    """Произведение круговых и квадратичных множителей степени degree"""
    P = RatPoly.constant(1)
    while P.degree < degree:
        left = degree - P.degree
        if left >= 2 and rng.random() < 0.5:
            P = P * rng.choice(UNIT_QUADRATICS)
        else:
            P = P * rng.choice([f for f in CYCLOTOMIC_PIECES if f.degree <= left])
    return P


def random_cyclotomic_product(rng: random.Random, degree: int = 22) -> RatPoly:
    P = RatPoly.constant(1)
    while P.degree < degree:
        P = P * rng.choice([f for f in CYCLOTOMIC_PIECES if f.degree <= degree - P.degree])
    return P


def circle_power_sums(traces, n_max: int):
    """p_n для корней e^{+-i t_j} с 2 cos t_j = traces[j]: V_n = r V_{n-1} - V_{n-2}"""
    sums = [Fraction(0)] * n_max
    for r in traces:
        prev, cur = Fraction(2), Fraction(r)
        for n in range(n_max):
            sums[n] += cur
            prev, cur = cur, r * cur - prev
    return sums


def synthetic_unit_circle_factor(rng: random.Random, pairs: int) -> RatPoly:
    """Некруговой множитель степени 2 pairs, собранный по степенным суммам"""
    traces = []
    for _ in range(pairs):
        d = rng.choice((3, 4, 5))
        k = rng.randint(1, 2 * d - 2)
        traces.append(Fraction(rng.choice((-1, 1)) * (k if k < d else k + 1), d))
    return poly_from_power_sums(circle_power_sums(traces, 2 * pairs), 2 * pairs)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def special_weil() -> WeilPolynomial:
    """L специальной кубики над F_2: f(T) = (1 - T)^2 g(T)"""
    return parse_weil_line(SPECIAL_LINE)


@pytest.fixture
def plus_weil() -> WeilPolynomial:
    return WeilPolynomial(2, RatPoly((1, 1)) ** 22)


@pytest.fixture
def minus_weil() -> WeilPolynomial:
    return WeilPolynomial(2, ONE_MINUS_T ** 22)


@pytest.fixture
def special_cubic():
    return load_cubic(FIXTURES / "cubics" / "special_fourfold.txt")


@pytest.fixture
def negative_cubic():
    return load_cubic(FIXTURES / "cubics" / "nl_general_negative.txt")


@pytest.fixture
def fermat_cubic():
    return load_cubic(FIXTURES / "cubics" / "fermat.txt")


@pytest.fixture(autouse=True)
def _no_worker_env(monkeypatch):
    monkeypatch.delenv("NCK3_WORKERS", raising=False)
