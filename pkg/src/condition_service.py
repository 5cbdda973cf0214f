"""
Наборы условий: K3-тип, тип K3-категории кубики, препятствия по числам точек
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import IntegralityError, UnsupportedFieldError
from .newton_polygon import (
    AUX_PRIME_COUNT,
    height_and_ordinarity,
    newton_above_hodge,
    perfect_power_and_irreducibility,
)
from .nck3_counts import (
    ack3_from_cubic,
    ack3_from_weil,
    cubic_from_ack3,
    hilbert_square_counts,
)
from .point_counter import CubicForm, PointCounter, PointCountTable
from .rational_poly import ONE_MINUS_T, RatPoly, is_square, multiplicity
from .verdicts import ConditionResult, FilterReport, Verdict, witness_text
from .weil_polynomial import (
    WeilPolynomial,
    counts_from_weil,
    cyclotomic_split,
    prime_of,
    roots_on_unit_circle,
)


logger = logging.getLogger(__name__)

K3_CONDITIONS = (
    "unit_circle", "projectivity", "integrality", "crystalline_split",
    "newton_above_hodge", "transcendental", "nonnegative", "growth", "artin_tate",
)
CUBIC_CONDITIONS = (
    "unit_circle", "integrality", "cubic_nonnegative", "cubic_growth",
    "hilbert_nonnegative", "hilbert_growth", "artin_tate",
)


# --- конечные диапазоны ---

def nonnegativity_range(q: int, bound: int = 22, weight: int = 1) -> List[int]:
    """n с q^{weight n} < bound (и всегда n = 1); дальше знак определён оценкой |p_n| <= bound"""
    out = [1]
    n = 2
    while q ** (weight * n) < bound:
        out.append(n)
        n += 1
    return out


def growth_pairs(q: int, bound: int = 22, weight: int = 1) -> List[Tuple[int, int]]:
    """Пары (n, dn), d >= 2, с q^{weight dn} - q^{weight n} < bound"""
    out = []
    n = 1
    while q ** (2 * weight * n) - q ** (weight * n) < bound:
        d = 2
        while q ** (weight * d * n) - q ** (weight * n) < bound:
            out.append((n, d * n))
            d += 1
        n += 1
    return out


def divisibility_pairs(n_max: int) -> List[Tuple[int, int]]:
    """Все (n, m), n | m, n < m <= n_max"""
    return [(n, m) for n in range(1, n_max + 1) for m in range(2 * n, n_max + 1, n)]


def _first_negative(values: Dict[int, Fraction], ns: Sequence[int], name: str, label: str) -> ConditionResult:
    for n in ns:
        if values[n] < 0:
            return ConditionResult(name, Verdict.FAIL, witness_text(n=n, **{label: values[n]}))
    return ConditionResult(name, Verdict.PASS)


def _first_decrease(values: Dict[int, Fraction], pairs: Sequence[Tuple[int, int]], name: str) -> ConditionResult:
    for n, m in pairs:
        if values[m] < values[n]:
            return ConditionResult(name, Verdict.FAIL,
                                   witness_text(n=n, m=m, at_n=values[n], at_m=values[m]))
    return ConditionResult(name, Verdict.PASS)


def artin_tate(L: RatPoly, q: int) -> ConditionResult:
    """L = (1 - T)^r L_1, L_1(1) != 0: q L_1(-1) должно быть квадратом (0 допускается)"""
    r, L1 = multiplicity(ONE_MINUS_T, L)
    value = q * L1(-1)
    if is_square(value):
        return ConditionResult("artin_tate", Verdict.PASS, witness_text(r=r, value=value))
    return ConditionResult("artin_tate", Verdict.FAIL, witness_text(r=r, value=value))


def integrality(W: WeilPolynomial) -> ConditionResult:
    """q L in Z[T]; при q = p это p L in Z[T]"""
    scaled = W.L * W.q
    for i, c in enumerate(scaled.coeffs):
        if c.denominator != 1:
            return ConditionResult("integrality", Verdict.FAIL, witness_text(i=i, coeff=W.L[i]))
    return ConditionResult("integrality", Verdict.PASS)


class ConditionService:
    """Проверка многочленов Вейля и кубик на необходимые условия"""

    def __init__(self, config=None, counter: Optional[PointCounter] = None):
        self.logger = logging.getLogger(__name__)
        self.config = config

        # Настройки
        self.growth_bound = 22
        self.hilbert_max_ext = 8
        self.aux_prime_count = AUX_PRIME_COUNT

        if config and hasattr(config, 'filters'):
            filters = config.filters
            self.growth_bound = filters.get('growth_bound', 22)
            self.hilbert_max_ext = filters.get('hilbert_max_ext', 8)
        if config and hasattr(config, 'weil'):
            self.aux_prime_count = config.weil.get('aux_prime_count', AUX_PRIME_COUNT)

        self.counter = counter or PointCounter(config)
        self.logger.debug(f"ConditionService: граница роста {self.growth_bound}, "
                          f"Гильберт до n={self.hilbert_max_ext}")

    def _unit_circle(self, W: WeilPolynomial) -> ConditionResult:
        if roots_on_unit_circle(W):
            return ConditionResult("unit_circle", Verdict.PASS)
        return ConditionResult("unit_circle", Verdict.FAIL, "roots_off_unit_circle")

    def check_k3_type(self, W: WeilPolynomial, input_id=1) -> FilterReport:
        """
        Необходимые условия K3-типа над F_q

        Порядок: единичная окружность, проективность, целочисленность,
        круговое разложение, ветка суперсингулярности или Ньютон/Ходж и
        неприводимость, неотрицательность, рост, Артин-Тейт. Провал проверки
        окружности оставляет в отчёте только её.
        """
        report = FilterReport(input_id)
        if report.add(self._unit_circle(W)).verdict is Verdict.FAIL:
            return report

        q = W.q
        if ONE_MINUS_T.divides(W.L):
            report.add(ConditionResult("projectivity", Verdict.PASS))
        else:
            report.add(ConditionResult("projectivity", Verdict.FAIL, "no_factor_1-T"))
        report.add(integrality(W))

        split = cyclotomic_split(W)
        report.add(ConditionResult("crystalline_split", Verdict.PASS,
                                   witness_text(rho=split.rho, rho_bar=split.rho_bar,
                                                deg_trc=split.L_trc.degree)))
        report.note("rho", split.rho)
        report.note("rho_bar", split.rho_bar)

        if split.supersingular:
            report.add(ConditionResult("newton_above_hodge", Verdict.PASS, "supersingular"))
            report.add(ConditionResult("transcendental", Verdict.PASS, "supersingular"))
            report.note("height", "inf")
        else:
            report.add(newton_above_hodge(split, q))
            power = perfect_power_and_irreducibility(split.L_trc, q, self.aux_prime_count)
            witness = witness_text(e=power.e)
            if power.witness:
                witness += "," + power.witness
            report.add(ConditionResult("transcendental", power.status, witness))
            height = height_and_ordinarity(split, q)
            report.note("height", height.format_height())
            report.note("ordinary", str(height.ordinary).lower())

        bound = self.growth_bound
        ns = nonnegativity_range(q, bound)
        pairs = growth_pairs(q, bound)
        n_max = max(ns + [m for _, m in pairs])
        counts = counts_from_weil(W, n_max).counts
        report.add(_first_negative(counts, ns, "nonnegative", "count"))
        report.add(_first_decrease(counts, pairs, "growth"))
        report.add(artin_tate(W.L, q))
        return report

    def check_cubic_category_type(self, W: WeilPolynomial, input_id=1) -> FilterReport:
        """
        Необходимые условия для L K3-категории кубики над F_p

        Числа точек A - из L, числа точек кубики X - из A, квадрат Гильберта -
        из A; проверяются знак и рост X и квадрата Гильберта и условие Артина-Тейта.
        """
        p, k = prime_of(W.q)
        if k != 1:
            raise UnsupportedFieldError(f"тип K3-категории кубики проверяется только при q = p, q = {W.q}")
        report = FilterReport(input_id)
        if report.add(self._unit_circle(W)).verdict is Verdict.FAIL:
            return report
        report.add(integrality(W))

        bound = self.growth_bound
        cubic_ns = nonnegativity_range(p, bound, weight=2)
        cubic_pairs = growth_pairs(p, bound, weight=2)
        hilb_max = self.hilbert_max_ext
        hilb_pairs = divisibility_pairs(hilb_max)
        n_max = max(cubic_ns + [m for _, m in cubic_pairs] + [2 * hilb_max])

        A = ack3_from_weil(W, n_max)
        X = cubic_from_ack3(A).counts
        report.add(_first_negative(X, cubic_ns, "cubic_nonnegative", "count"))
        report.add(_first_decrease(X, cubic_pairs, "cubic_growth"))

        H = hilbert_square_counts(A, hilb_max)
        report.add(_first_negative(H, range(1, hilb_max + 1), "hilbert_nonnegative", "count"))
        report.add(_first_decrease(H, hilb_pairs, "hilbert_growth"))
        report.add(artin_tate(W.L, W.q))
        report.note("hilbert_1", H[1])
        return report

    def geom_check(self, form: CubicForm, n_max: int, input_id="cubic") -> FilterReport:
        """
        Препятствия к геометричности по числам точек кубики

        Отчёт только о препятствиях: отрицательные числа точек K3-категории
        и нарушения роста среди вычисленных пар. Прохождение всех проверок
        геометричность не доказывает.
        """
        table = self.counter.count_table(form, n_max)
        return self.geom_check_table(table, input_id)

    def geom_check_table(self, table: PointCountTable, input_id="counts") -> FilterReport:
        """geom_check по готовой таблице |X(F_{p^n})|"""
        report = FilterReport(input_id)
        try:
            A = ack3_from_cubic(table)
        except IntegralityError as e:
            self.logger.error(f"Нарушена целочисленность: {e}")
            report.add(ConditionResult("integrality", Verdict.FAIL,
                                       witness_text(n=e.n, count=e.value)))
            return report
        report.add(ConditionResult("integrality", Verdict.PASS))

        negatives = A.negative_counts()
        if negatives:
            n, v = negatives[0]
            report.add(ConditionResult("nonnegative", Verdict.FAIL, witness_text(n=n, count=v)))
        else:
            report.add(ConditionResult("nonnegative", Verdict.PASS))

        violations = A.growth_violations()
        if violations:
            n, m = violations[0]
            report.add(ConditionResult("growth", Verdict.FAIL,
                                       witness_text(n=n, m=m, at_n=A[n], at_m=A[m])))
        else:
            report.add(ConditionResult("growth", Verdict.PASS))

        report.note("x_counts", "/".join(str(table.counts[n]) for n in sorted(table.counts)))
        report.note("a_counts", "/".join(str(A.counts[n]) for n in sorted(A.counts)))
        return report
