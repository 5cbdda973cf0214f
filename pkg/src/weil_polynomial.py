"""
Многочлены Вейля степени 22 и их точный анализ

L хранится в нормировке det(Id - phi T): L(0) = 1, обратные корни g_j
должны лежать на единичной окружности. Проверка окружности, восстановление
по числам точек, выделение кругового множителя и преобразование к форме
степени 21 - здесь; многоугольники Ньютона - в newton_polygon.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import primefactors

from .errors import (
    ConsistencyError,
    InfeasibleCountsError,
    MalformedPolynomialError,
    ProjectivityError,
    UnsupportedFieldError,
    WeilFormatError,
)
from .point_counter import PointCountTable
from .rational_poly import (
    ONE,
    ONE_MINUS_T,
    ONE_PLUS_T,
    RatPoly,
    cyclotomic,
    cyclotomic_indices,
    format_poly,
    log_coefficients,
    multiplicity,
    parse_poly,
    poly_from_power_sums,
    power_sums,
    real_roots_in_interval,
    squarefree_decomposition,
)


logger = logging.getLogger(__name__)

DEGREE = 22
POWER_SUM_BOUND = 22
RECONSTRUCTION_TERMS = 11


def prime_of(q: int) -> Tuple[int, int]:
    """(p, k) для q = p^k"""
    factors = primefactors(q) if q > 1 else []
    if len(factors) != 1:
        raise UnsupportedFieldError(f"q = {q} не степень простого")
    p = factors[0]
    k, rest = 0, q
    while rest % p == 0:
        rest //= p
        k += 1
    return p, k


@dataclass(frozen=True)
class WeilPolynomial:
    """L(T) степени ровно 22 с L(0) = 1 над полем из q элементов"""

    q: int
    L: RatPoly

    def __post_init__(self):
        if not isinstance(self.L, RatPoly):
            object.__setattr__(self, "L", RatPoly.from_coeffs(self.L))
        if self.L.degree != DEGREE:
            raise MalformedPolynomialError(f"степень {self.L.degree}, ожидается {DEGREE}")
        if self.L[0] != 1:
            raise MalformedPolynomialError(f"L(0) = {self.L[0]}, ожидается 1")
        prime_of(self.q)

    @property
    def p(self) -> int:
        return prime_of(self.q)[0]

    @property
    def k(self) -> int:
        return prime_of(self.q)[1]

    def __str__(self) -> str:
        return format_weil(self)


@dataclass(frozen=True)
class CyclotomicSplit:
    """L = L_alg * L_trc; L_alg - максимальный круговой множитель"""

    L_alg: RatPoly
    L_trc: RatPoly
    rho: int
    rho_bar: int
    factors: Tuple[Tuple[int, int], ...] = ()

    @property
    def supersingular(self) -> bool:
        return self.L_trc.degree == 0


@dataclass
class ReconstructionResult:
    """Кандидаты L, согласованные с числами точек"""

    candidates: List[WeilPolynomial] = field(default_factory=list)
    ambiguous: bool = False
    diagnostic: str = ""

    def __iter__(self) -> Iterator[WeilPolynomial]:
        return iter(self.candidates)

    def __len__(self) -> int:
        return len(self.candidates)

    def __getitem__(self, i: int) -> WeilPolynomial:
        return self.candidates[i]


def _as_poly(W) -> RatPoly:
    return W.L if isinstance(W, WeilPolynomial) else W


# --- самовозвратность и единичная окружность ---

def is_self_inversive(W, degree: int = DEGREE) -> Optional[int]:
    """
    Знак eps, если T^d L(1/T) = eps L(T), иначе None

    Args:
        W: WeilPolynomial или RatPoly
        degree: d в функциональном уравнении (22 для WeilPolynomial)
    """
    P = _as_poly(W)
    if isinstance(W, WeilPolynomial):
        degree = DEGREE
    rev = P.reversed(degree)
    if rev == P:
        return 1
    if rev == -P:
        return -1
    return None


def _chebyshev_part(R: RatPoly) -> RatPoly:
    """S(x) с R(T) = T^m S(T + 1/T) для палиндромного R степени 2m"""
    m = R.degree // 2
    x = RatPoly((0, 1))
    d_prev, d_cur = RatPoly.constant(2), x
    S = RatPoly.constant(R[m])
    for k in range(1, m + 1):
        if k > 1:
            d_prev, d_cur = d_cur, x * d_cur - d_prev
        S = S + d_cur * R[m + k]
    return S


def unit_circle_remainder(P: RatPoly) -> Tuple[int, int, RatPoly]:
    """Кратности (1 - T), (1 + T) и остаток после их удаления"""
    r_minus, rest = multiplicity(ONE_MINUS_T, P)
    r_plus, rest = multiplicity(ONE_PLUS_T, rest)
    return r_minus, r_plus, rest


def roots_on_unit_circle(W) -> bool:
    """Точная проверка: все комплексные корни L лежат на |z| = 1"""
    P = _as_poly(W)
    if P.is_zero():
        return False
    _, _, R = unit_circle_remainder(P)
    if R.degree % 2:
        return False
    if R.reversed() != R:
        return False
    m = R.degree // 2
    if m == 0:
        return True
    S = _chebyshev_part(R)
    inside = sum(i * real_roots_in_interval(s, -2, 2) for s, i in squarefree_decomposition(S))
    return inside == m


# --- числа точек ---

def _table_value(v: Fraction):
    return int(v) if v.denominator == 1 else v


def zeta_denominator(W: WeilPolynomial) -> RatPoly:
    """(1 - T) L(qT) (1 - q^2 T)"""
    q = W.q
    return ONE_MINUS_T * W.L.scale(q) * RatPoly((1, -q * q))


def counts_from_weil(W: WeilPolynomial, n_max: int) -> PointCountTable:
    """
    Числа точек K3-категории |A(F_{q^n})| = 1 + q^{2n} + q^n p_n

    Каждое значение сверяется с коэффициентом логарифма дзета-функции
    Z = 1 / ((1 - T) L(qT) (1 - q^2 T)). Нецелые значения остаются дробями
    и отмечаются в логе.
    """
    if n_max < 1:
        raise ValueError(f"n_max должно быть >= 1, получено {n_max}")
    q = W.q
    p = power_sums(W.L, n_max)
    log_coeffs = log_coefficients(zeta_denominator(W), n_max)
    table = PointCountTable(q=q)
    for n in range(1, n_max + 1):
        value = 1 + Fraction(q) ** (2 * n) + Fraction(q) ** n * p[n - 1]
        if value != -log_coeffs[n - 1]:
            raise ConsistencyError(
                f"n={n}: формула даёт {value}, логарифм дзета-функции {-log_coeffs[n - 1]}"
            )
        if value.denominator != 1:
            logger.warning(f"Нецелое число точек при n={n}: {value}")
        table.counts[n] = _table_value(value)
    return table


def non_integral_counts(table: PointCountTable) -> Dict[int, Fraction]:
    return {n: v for n, v in table.counts.items() if Fraction(v).denominator != 1}


def weil_from_counts(counts: PointCountTable, q: Optional[int] = None) -> ReconstructionResult:
    """
    Восстановление L по числам точек K3-категории для n = 1..11

    p_n находятся из чисел точек, c_1..c_11 - из тождеств Ньютона, остальные
    коэффициенты - из функционального уравнения c_{22-i} = eps c_i для обоих
    знаков. Остаются замыкания, прошедшие проверку окружности; число точек
    при n = 12, если оно есть, различает кандидатов.
    """
    q = counts.q if q is None else q
    counts.require(RECONSTRUCTION_TERMS)
    qf = Fraction(q)
    sums = []
    for n in range(1, RECONSTRUCTION_TERMS + 2):
        if n not in counts:
            break
        p_n = (Fraction(counts[n]) - 1 - qf ** (2 * n)) / qf ** n
        if abs(p_n) > POWER_SUM_BOUND:
            raise InfeasibleCountsError(f"|p_{n}| = {abs(p_n)} > {POWER_SUM_BOUND}")
        sums.append(p_n)

    half = poly_from_power_sums(sums[:RECONSTRUCTION_TERMS], RECONSTRUCTION_TERMS)
    c = [half[i] for i in range(RECONSTRUCTION_TERMS + 1)]
    result = ReconstructionResult()
    notes = []
    for eps in (1, -1):
        if eps == -1 and c[RECONSTRUCTION_TERMS] != 0:
            notes.append("eps=-1: c_11 != 0")
            continue
        full = c + [eps * c[DEGREE - i] for i in range(RECONSTRUCTION_TERMS + 1, DEGREE + 1)]
        W = WeilPolynomial(q, RatPoly.from_coeffs(full))
        if not roots_on_unit_circle(W):
            notes.append(f"eps={eps:+d}: корни вне единичной окружности")
            continue
        if len(sums) > RECONSTRUCTION_TERMS:
            p12 = power_sums(W.L, RECONSTRUCTION_TERMS + 1)[-1]
            if p12 != sums[RECONSTRUCTION_TERMS]:
                notes.append(f"eps={eps:+d}: не согласуется с n=12")
                continue
        result.candidates.append(W)

    result.ambiguous = len(result.candidates) > 1
    if not result.candidates:
        notes.append("ни одно замыкание не прошло проверку")
    elif result.ambiguous:
        notes.append("оба знака допустимы; нужна точка при n=12")
    result.diagnostic = "; ".join(notes)
    logger.debug(f"Восстановление: {len(result.candidates)} кандидатов ({result.diagnostic})")
    return result


# --- круговой множитель ---

def _int_exact_div(a: List[int], b: List[int]) -> Optional[List[int]]:
    """a / b в Z[T], если b делит a; старший коэффициент b равен +-1"""
    if len(b) > len(a):
        return None
    rem = list(a)
    lead = b[-1]
    db = len(b) - 1
    quot = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = rem[i] * lead
        if c:
            quot[i - db] = c
            for j, v in enumerate(b):
                rem[i - db + j] -= c * v
    if any(rem[:db]):
        return None
    return quot


def split_cyclotomic(P: RatPoly, max_phi: int = DEGREE) -> CyclotomicSplit:
    """Последовательное пробное деление на C_n с phi(n) <= max_phi"""
    scale = Fraction(P.leading) / RatPoly.from_coeffs(P.to_primitive_integer()).leading
    rest = P.to_primitive_integer()
    alg = ONE
    rho = 0
    found = []
    for n in cyclotomic_indices(max_phi):
        c_n = cyclotomic(n)
        if c_n.degree > len(rest) - 1:
            continue
        c_int = [int(v) for v in c_n.coeffs]
        count = 0
        while True:
            quotient = _int_exact_div(rest, c_int)
            if quotient is None:
                break
            rest = quotient
            count += 1
        if count:
            alg = alg * c_n ** count
            found.append((n, count))
            if n == 1:
                rho = count
    # C_n(0) = 1, поэтому L_trc(0) = L(0)
    trc = RatPoly.from_coeffs(rest) * scale
    return CyclotomicSplit(L_alg=alg, L_trc=trc, rho=rho, rho_bar=alg.degree, factors=tuple(found))


def cyclotomic_split(W: WeilPolynomial) -> CyclotomicSplit:
    """Разложение L = L_alg L_trc с rho (кратность 1 - T) и rho_bar = deg L_alg"""
    split = split_cyclotomic(W.L)
    if split.L_alg * split.L_trc != W.L:
        raise ConsistencyError("L_alg * L_trc != L")
    return split


# --- преобразование к степени 21 ---

def ks_convert(W: WeilPolynomial) -> RatPoly:
    """q L(T) / (1 - T): степень 21, свободный член q"""
    quotient, remainder = divmod(W.L, ONE_MINUS_T)
    if not remainder.is_zero():
        raise ProjectivityError("(1 - T) не делит L: проективность нарушена")
    return quotient * W.q


def ks_invert(K: RatPoly, q: int) -> WeilPolynomial:
    """Обратное к ks_convert: L = K (1 - T) / q"""
    if K.degree != DEGREE - 1:
        raise MalformedPolynomialError(f"степень {K.degree}, ожидается {DEGREE - 1}")
    if K[0] != q:
        raise MalformedPolynomialError(f"K(0) = {K[0]}, ожидается q = {q}")
    return WeilPolynomial(q, K * ONE_MINUS_T * Fraction(1, q))


# --- текстовый формат ---

def parse_weil_line(line: str, ks: bool = False, line_no: Optional[int] = None,
                    descending: bool = False) -> WeilPolynomial:
    """
    Разбор строки "q=2; c0,c1,...,c22" (или степени 21 при ks=True)

    При descending=True коэффициенты идут по убыванию степеней, как у det(F - t Id).
    """
    if ks and descending:
        raise WeilFormatError("форма степени 21 читается только по возрастанию степеней", line_no)
    head, sep, body = line.partition(";")
    head = head.strip().replace(" ", "")
    if not sep or not head.startswith("q="):
        raise WeilFormatError(f"ожидается 'q=<q>; c0,...': {line.strip()!r}", line_no)
    try:
        q = int(head[2:])
        P = parse_poly(body)
        if ks:
            return ks_invert(P, q)
        return from_reversed(P.coeffs, q) if descending else WeilPolynomial(q, P)
    except WeilFormatError:
        raise
    except (ValueError, ArithmeticError) as e:
        raise WeilFormatError(str(e), line_no)


def format_weil(W: WeilPolynomial) -> str:
    return f"q={W.q}; {format_poly(W.L)}"


def iter_weil_lines(text: str) -> Iterator[Tuple[int, str]]:
    """(номер строки, строка) для непустых строк без '#'"""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield line_no, line


def parse_weil_text(text: str, ks: bool = False) -> List[WeilPolynomial]:
    return [parse_weil_line(line, ks, line_no) for line_no, line in iter_weil_lines(text)]


def from_reversed(coeffs_descending: Sequence, q: int) -> WeilPolynomial:
    """Приём det(F - t Id) по убывающим степеням: разворот коэффициентов"""
    P = RatPoly.from_coeffs(coeffs_descending)
    if P.degree > DEGREE:
        raise MalformedPolynomialError(f"степень {P.degree} > {DEGREE}")
    return WeilPolynomial(q, P.reversed(DEGREE))
