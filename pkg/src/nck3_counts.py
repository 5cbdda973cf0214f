"""
Числа точек K3-категории кубики, квадрата Гильберта и многообразия Фано

Все величины считаются точно в рациональных числах; целочисленность
проверяется явно, а не предполагается.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .errors import ConsistencyError, InsufficientDataError, IntegralityError, MalformedPolynomialError
from .point_counter import PointCountTable
from .rational_poly import ONE, ONE_MINUS_T, RatPoly, format_poly, log_coefficients
from .verdicts import ConditionResult, Verdict, witness_text
from .weil_polynomial import WeilPolynomial, counts_from_weil


logger = logging.getLogger(__name__)

Count = Union[int, Fraction]


def _clean(v: Fraction) -> Count:
    return int(v) if v.denominator == 1 else v


def _choose2(a: Fraction) -> Fraction:
    return a * (a - 1) / 2


@dataclass
class NcK3Counts:
    """|A(F_{q^n})| по n"""

    q: int
    counts: Dict[int, Count] = field(default_factory=dict)

    def __getitem__(self, n: int) -> Count:
        if n not in self.counts:
            raise InsufficientDataError(f"нет |A(F_q^{n})|")
        return self.counts[n]

    def __contains__(self, n: int) -> bool:
        return n in self.counts

    @property
    def max_n(self) -> int:
        return max(self.counts) if self.counts else 0

    def is_integral(self) -> bool:
        return all(Fraction(v).denominator == 1 for v in self.counts.values())

    def negative_counts(self) -> List[Tuple[int, Count]]:
        """Все n с отрицательным числом точек"""
        return [(n, v) for n, v in sorted(self.counts.items()) if v < 0]

    def growth_violations(self) -> List[Tuple[int, int]]:
        """Пары (n, m), n | m, m > n, с |A(F_{q^m})| < |A(F_{q^n})|"""
        out = []
        for n in sorted(self.counts):
            for m in sorted(self.counts):
                if m > n and m % n == 0 and self.counts[m] < self.counts[n]:
                    out.append((n, m))
        return out


# --- формулы перехода ---

def _ack3_value(x: Count, n: int, q: int) -> Fraction:
    qn = Fraction(q) ** n
    return (Fraction(x) - 1 - qn ** 2 - qn ** 4) / qn


def ack3_rational(XT: PointCountTable) -> NcK3Counts:
    """A_n = (X_n - 1 - q^{2n} - q^{4n}) / q^n без проверки целочисленности"""
    return NcK3Counts(q=XT.q, counts={n: _clean(_ack3_value(x, n, XT.q))
                                      for n, x in sorted(XT.counts.items())})


def ack3_from_cubic(XT: PointCountTable) -> NcK3Counts:
    """
    Числа точек K3-категории по числам точек кубики

    Raises:
        IntegralityError: таблица не является таблицей кубики (нарушено сравнение Акса)
    """
    A = ack3_rational(XT)
    for n, v in A.counts.items():
        if Fraction(v).denominator != 1:
            raise IntegralityError(
                f"n={n}: |A| = {v} не целое; X_n = {XT.counts[n]} не число точек кубики",
                n=n, value=v,
            )
    return A


def cubic_from_ack3(A: NcK3Counts) -> PointCountTable:
    """X_n = 1 + q^n A_n + q^{2n} + q^{4n}"""
    q = A.q
    counts = {}
    for n, a in sorted(A.counts.items()):
        qn = Fraction(q) ** n
        counts[n] = _clean(1 + qn * a + qn ** 2 + qn ** 4)
    return PointCountTable(q=q, counts=counts)


def cubic_counts_from_weil(W: WeilPolynomial, n_max: int) -> PointCountTable:
    """|X(F_{q^n})| кубики с примитивной частью L"""
    A = counts_from_weil(W, n_max)
    return cubic_from_ack3(NcK3Counts(q=A.q, counts=dict(A.counts)))


def ack3_from_weil(W: WeilPolynomial, n_max: int) -> NcK3Counts:
    A = counts_from_weil(W, n_max)
    return NcK3Counts(q=A.q, counts=dict(A.counts))


def _require(table, n_max: int, what: str) -> None:
    missing = [n for n in range(1, 2 * n_max + 1) if n not in table.counts]
    if missing:
        raise InsufficientDataError(f"{what}: нет значений для n = {missing}")


def hilbert_square_counts(A: NcK3Counts, n_max: int) -> Dict[int, Fraction]:
    """H_n = C(A_n, 2) + (q^n + 1) A_n + (A_{2n} - A_n) / 2"""
    _require(A, n_max, "квадрат Гильберта")
    q = A.q
    out = {}
    for n in range(1, n_max + 1):
        a, a2 = Fraction(A.counts[n]), Fraction(A.counts[2 * n])
        out[n] = _choose2(a) + (q ** n + 1) * a + (a2 - a) / 2
    return out


def fano_counts(XT: PointCountTable, n_max: int) -> Dict[int, Fraction]:
    """F_n = (X_n^2 - 2 (1 + q^{4n}) X_n + X_{2n}) / (2 q^{2n})"""
    _require(XT, n_max, "многообразие Фано")
    q = XT.q
    out = {}
    for n in range(1, n_max + 1):
        x, x2 = Fraction(XT.counts[n]), Fraction(XT.counts[2 * n])
        out[n] = (x * x - 2 * (1 + q ** (4 * n)) * x + x2) / (2 * q ** (2 * n))
    return out


def fourfold_hilbert_square_counts(XT: PointCountTable, n_max: int) -> Dict[int, Fraction]:
    """|X^[2]| = C(X_n, 2) + X_n (1 + q^n + q^{2n} + q^{3n}) + (X_{2n} - X_n) / 2"""
    _require(XT, n_max, "квадрат Гильберта четырёхмерия")
    q = XT.q
    out = {}
    for n in range(1, n_max + 1):
        x, x2 = Fraction(XT.counts[n]), Fraction(XT.counts[2 * n])
        qn = q ** n
        out[n] = _choose2(x) + x * (1 + qn + qn ** 2 + qn ** 3) + (x2 - x) / 2
    return out


def projective_space_count(q: int, n: int, dim: int = 4) -> int:
    qn = q ** n
    return (qn ** (dim + 1) - 1) // (qn - 1)


def _equal_and_integral(name: str, left: Dict[int, Fraction], right: Dict[int, Fraction],
                        labels: Tuple[str, str]) -> ConditionResult:
    for n in sorted(left):
        lv, rv = left[n], right[n]
        if lv != rv or lv.denominator != 1:
            return ConditionResult(name, Verdict.FAIL,
                                   witness_text(n=n, **{labels[0]: lv, labels[1]: rv}))
    return ConditionResult(name, Verdict.PASS)


def check_fano_hilbert(XT: PointCountTable, n_max: int) -> ConditionResult:
    """
    Равенство чисел точек Фано и квадрата Гильберта K3-категории

    PASS, если для n = 1..n_max обе величины совпадают и целые; иначе FAIL
    с первым n в свидетеле.
    """
    fano = fano_counts(XT, n_max)
    hilbert = hilbert_square_counts(ack3_rational(XT), n_max)
    result = _equal_and_integral("fano_hilbert", fano, hilbert, ("fano", "hilbert"))
    logger.debug(f"Фано/Гильберт до n={n_max}: {result.verdict}")
    return result


def grothendieck_identity_check(XT: PointCountTable, n_max: int) -> ConditionResult:
    """(|X^[2]| - |P^4| |X|) / q^{2n} = H_n для n = 1..n_max"""
    hilbert4 = fourfold_hilbert_square_counts(XT, n_max)
    q = XT.q
    lhs = {n: (hilbert4[n] - projective_space_count(q, n) * Fraction(XT.counts[n])) / q ** (2 * n)
           for n in range(1, n_max + 1)}
    hilbert = hilbert_square_counts(ack3_rational(XT), n_max)
    return _equal_and_integral("grothendieck_identity", lhs, hilbert, ("lhs", "hilbert"))


# --- дзета-функции ---

@dataclass(frozen=True)
class ZetaFunction:
    """Z(T) = numerator / denominator, оба с постоянным членом 1"""

    q: int
    numerator: RatPoly
    denominator: RatPoly

    def point_counts(self, terms: int) -> List[Fraction]:
        """n a_n для n = 1..terms, a_n - коэффициенты log Z"""
        num = log_coefficients(self.numerator, terms)
        den = log_coefficients(self.denominator, terms)
        return [a - b for a, b in zip(num, den)]

    def log_coefficients(self, terms: int) -> List[Fraction]:
        """a_n для n = 1..terms"""
        return [c / n for n, c in enumerate(self.point_counts(terms), start=1)]

    def series(self, terms: int) -> List[Fraction]:
        """Коэффициенты Z(T) до T^terms"""
        out = []
        den = self.denominator
        for k in range(terms + 1):
            s = self.numerator[k]
            for i in range(1, k + 1):
                s -= den[i] * out[k - i]
            out.append(s / den[0])
        return out


def _cross_check(zeta: ZetaFunction, W: WeilPolynomial, terms: int) -> None:
    expected = counts_from_weil(W, terms)
    for n, v in enumerate(zeta.point_counts(terms), start=1):
        if v != expected.counts[n]:
            raise ConsistencyError(f"n={n}: n a_n = {v}, число точек {expected.counts[n]}")


def zeta_assemble(W: WeilPolynomial, terms: Optional[int] = None) -> ZetaFunction:
    """Z(T) = 1 / ((1 - T) L(qT) (1 - q^2 T)); при terms сверяет n a_n с числами точек"""
    q = W.q
    den = ONE_MINUS_T * W.L.scale(q) * RatPoly((1, -q * q))
    zeta = ZetaFunction(q=q, numerator=ONE, denominator=den)
    if terms:
        _cross_check(zeta, W, terms)
    return zeta


def mukai_from_l_polynomial(W: WeilPolynomial) -> RatPoly:
    """L полного модуля Мукаи: (1 - T)^2 L, степень 24"""
    return ONE_MINUS_T ** 2 * W.L


def zeta_from_mukai(L_tilde: RatPoly, q: int) -> ZetaFunction:
    """Z(T) = (1 - qT)^2 / ((1 - T) L~(qT) (1 - q^2 T)) по L~ степени 24"""
    if L_tilde.degree != 24 or L_tilde[0] != 1:
        raise MalformedPolynomialError("ожидается L~ степени 24 с L~(0) = 1")
    one_minus_qt = RatPoly((1, -q))
    den = ONE_MINUS_T * L_tilde.scale(q) * RatPoly((1, -q * q))
    return ZetaFunction(q=q, numerator=one_minus_qt ** 2, denominator=den)


def zeta_from_middle_cohomology(L4: RatPoly, q: int) -> ZetaFunction:
    """Z(T) = (1 - qT) / ((1 - T) L_4(qT) (1 - q^2 T)) по L_4 = (1 - T) L_{4,pr} степени 23"""
    if L4.degree != 23 or L4[0] != 1:
        raise MalformedPolynomialError("ожидается L_4 степени 23 с L_4(0) = 1")
    den = ONE_MINUS_T * L4.scale(q) * RatPoly((1, -q * q))
    return ZetaFunction(q=q, numerator=RatPoly((1, -q)), denominator=den)


def format_zeta(zeta: ZetaFunction, terms: int) -> str:
    lines = [
        f"q={zeta.q}",
        f"numerator: {format_poly(zeta.numerator)}",
        f"denominator: {format_poly(zeta.denominator)}",
    ]
    for n, (a, c) in enumerate(zip(zeta.log_coefficients(terms), zeta.point_counts(terms)), start=1):
        lines.append(f"{n} a_n={a} n*a_n={c}")
    return "\n".join(lines)
