"""
Многоугольники Ньютона и Ходжа, высота, ординарность, неприводимость L_trc
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import islice
from math import gcd
from typing import Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple, Union

from sympy import divisors, primerange
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_ddf_zassenhaus, gf_from_int_poly, gf_monic, gf_sqf_p

from .errors import MalformedPolynomialError
from .rational_poly import RatPoly, poly_gcd, squarefree_decomposition
from .verdicts import ConditionResult, Verdict, combine, witness_text
from .weil_polynomial import CyclotomicSplit, prime_of


logger = logging.getLogger(__name__)

INFINITE_HEIGHT = math.inf
AUX_PRIME_COUNT = 25


def valuation(x: Union[int, Fraction], p: int) -> int:
    """p-адическое нормирование рационального x != 0"""
    x = Fraction(x)
    if x == 0:
        raise ValueError("нормирование нуля бесконечно")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class NewtonPolygon:
    """Нижняя выпуклая оболочка; наклоны с кратностями по неубыванию"""

    vertices: Tuple[Tuple[int, Fraction], ...]
    slopes: Tuple[Fraction, ...]

    @property
    def length(self) -> int:
        return self.vertices[-1][0] - self.vertices[0][0]

    def value_at(self, x: int) -> Fraction:
        """Ордината ломаной в абсциссе x"""
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * Fraction(x - x0, x1 - x0)
        if len(self.vertices) == 1 and x == self.vertices[0][0]:
            return self.vertices[0][1]
        raise ValueError(f"абсцисса {x} вне многоугольника")

    def segments(self) -> List[Tuple[Fraction, int]]:
        """(наклон, длина) по отрезкам"""
        return [((y1 - y0) / (x1 - x0), x1 - x0)
                for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:])]

    def format(self) -> str:
        return " ".join(str(s) for s in self.slopes)


def _lower_hull(points: Sequence[Tuple[int, Fraction]]) -> List[Tuple[int, Fraction]]:
    hull: List[Tuple[int, Fraction]] = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # удаляем среднюю точку, если она не ниже хорды
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def polygon_from_points(points: Sequence[Tuple[int, Fraction]]) -> NewtonPolygon:
    hull = _lower_hull(sorted(points))
    slopes: List[Fraction] = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        slopes += [Fraction(y1 - y0) / (x1 - x0)] * (x1 - x0)
    return NewtonPolygon(vertices=tuple(hull), slopes=tuple(slopes))


def newton_polygon(P: RatPoly, p: int, scale: int = 1) -> NewtonPolygon:
    """
    Многоугольник Ньютона точек (i, v_p(c_i) / scale)

    Args:
        P: многочлен с P(0) = 1
        p: простое
        scale: k для q = p^k (нормирование в единицах v_q)
    """
    if P[0] != 1:
        raise MalformedPolynomialError(f"P(0) = {P[0]}, ожидается 1")
    points = [(i, Fraction(valuation(c, p), scale)) for i, c in enumerate(P.coeffs) if c != 0]
    return polygon_from_points(points)


def hodge_polygon(m: int) -> NewtonPolygon:
    """Наклоны -1 (один раз), 0 (m - 2 раза), +1 (один раз)"""
    if m < 2:
        raise MalformedPolynomialError(f"многоугольник Ходжа для m = {m} < 2")
    points = [(0, Fraction(0)), (1, Fraction(-1))]
    if m > 2:
        points.append((m - 1, Fraction(-1)))
    points.append((m, Fraction(0)))
    return polygon_from_points(points)


def polygon_above_hodge(polygon: NewtonPolygon, name: str = "newton_above_hodge") -> ConditionResult:
    """PASS если многоугольник не ниже ходжевского во всех целых абсциссах"""
    m = polygon.length
    hodge = hodge_polygon(m)
    for x in range(m + 1):
        nv, hv = polygon.value_at(x), hodge.value_at(x)
        if nv < hv:
            return ConditionResult(name, Verdict.FAIL, witness_text(x=x, newton=nv, hodge=hv))
    return ConditionResult(name, Verdict.PASS)


def _trc_polygon(split: CyclotomicSplit, q: int) -> NewtonPolygon:
    p, k = prime_of(q)
    return newton_polygon(split.L_trc, p, k)


def newton_above_hodge(split: CyclotomicSplit, q: int) -> ConditionResult:
    """Многоугольник Ньютона L_trc над многоугольником Ходжа размерности deg L_trc"""
    m = split.L_trc.degree
    if m == 0:
        return ConditionResult("newton_above_hodge", Verdict.PASS, "supersingular")
    if m < 2:
        raise MalformedPolynomialError(f"deg L_trc = {m}: нарушено парное строение корней")
    return polygon_above_hodge(_trc_polygon(split, q))


class HeightResult(NamedTuple):
    height: Optional[Union[int, float]]
    ordinary: bool

    def format_height(self) -> str:
        if self.height is None:
            return "UNKNOWN"
        return "inf" if self.height == INFINITE_HEIGHT else str(self.height)


def height_and_ordinarity(split: CyclotomicSplit, q: int) -> HeightResult:
    """
    Высота h = -1/s по наименьшему наклону s многоугольника L_trc

    L_trc = 1 или s = 0 дают бесконечную высоту; s, не равный -1/h при целом h,
    даёт height = None (многоугольник не K3-типа). Ординарность - s = -1.
    """
    if split.L_trc.degree == 0:
        return HeightResult(INFINITE_HEIGHT, False)
    s = min(_trc_polygon(split, q).slopes)
    if s == 0:
        return HeightResult(INFINITE_HEIGHT, False)
    if s < 0 and s.numerator == -1:
        return HeightResult(s.denominator, s == -1)
    logger.debug(f"Наименьший наклон {s} не вида -1/h")
    return HeightResult(None, False)


# --- степень и неприводимость ---

@dataclass
class IrreducibilityResult:
    """L_trc = Q^e и вердикты неприводимости Q над Q и Q_{<0} над Q_p"""

    Q: RatPoly
    e: int
    status: Verdict
    rational: Verdict = Verdict.UNKNOWN
    negative_part: Verdict = Verdict.PASS
    witness: Optional[str] = None

    def __iter__(self) -> Iterator:
        return iter((self.Q, self.e, self.status))


@lru_cache(maxsize=None)
def auxiliary_primes(p: Optional[int], count: int = AUX_PRIME_COUNT) -> Tuple[int, ...]:
    """Первые count простых, отличных от p"""
    return tuple(islice((ell for ell in primerange(2, 10 ** 4) if ell != p), count))


def _subset_degree_sums(degrees: Sequence[int], total: int) -> Set[int]:
    sums = {0}
    for d in degrees:
        sums |= {s + d for s in sums if s + d <= total}
    return sums


def _mod_ell_degrees(Z: List[int], ell: int) -> Optional[List[int]]:
    """Степени неприводимых множителей Z mod ell или None для плохого ell"""
    f = gf_from_int_poly(list(reversed(Z)), ell)
    if len(f) != len(Z):
        return None
    if not gf_sqf_p(f, ell, ZZ):
        return None
    _, monic = gf_monic(f, ell, ZZ)
    degrees: List[int] = []
    for factor, d in gf_ddf_zassenhaus(monic, ell, ZZ):
        degrees += [d] * ((len(factor) - 1) // d)
    return degrees


def certify_irreducible(Q: RatPoly, p: Optional[int] = None,
                        aux_count: int = AUX_PRIME_COUNT) -> Tuple[bool, Optional[int]]:
    """
    Достаточный тест неприводимости над Q по степеням множителей mod ell

    Возможные степени рациональных множителей - суммы подмножеств степеней
    неприводимых множителей по модулю каждого хорошего ell; пустое пересечение
    в 1..d-1 доказывает неприводимость.

    Returns:
        (доказано, последнее использованное ell)
    """
    d = Q.degree
    if d <= 1:
        return True, None
    Z = Q.to_primitive_integer()
    possible = set(range(1, d))
    for ell in auxiliary_primes(p, aux_count):
        if Z[-1] % ell == 0:
            continue
        degrees = _mod_ell_degrees(Z, ell)
        if degrees is None:
            continue
        possible &= _subset_degree_sums(degrees, d)
        if not possible:
            return True, ell
    return False, None


def _find_rational_factor(Q: RatPoly) -> Optional[str]:
    """Пробные делители: корни и палиндромные квадратичные множители"""
    Z = Q.to_primitive_integer()
    z0, zl = abs(Z[0]), abs(Z[-1])
    if z0 == 0:
        return "root=0"
    for b in divisors(zl):
        for a in divisors(z0):
            if gcd(a, b) != 1:
                continue
            for r in (Fraction(a, b), Fraction(-a, b)):
                if Q(r) == 0:
                    return witness_text(root=r)
    g = gcd(z0, zl)
    if g > 10 ** 4:
        return None
    for b in divisors(g):
        for b1 in range(-2 * b + 1, 2 * b):
            if gcd(b, abs(b1)) != 1 and b1 != 0:
                continue
            if b1 == 0 and b != 1:
                continue
            quad = RatPoly((1, Fraction(b1, b), 1))
            if quad.divides(Q) and quad.degree < Q.degree:
                return witness_text(factor=f"1+({Fraction(b1, b)})T+T^2")
    return None


def negative_slope_part(Q: RatPoly, q: int) -> Tuple[Verdict, Optional[str]]:
    """
    Неприводимость Q_{<0} над Q_p по наклонам многоугольника Ньютона

    Один отрицательный наклон -a/b длины b - PASS; несколько различных
    отрицательных наклонов - Q_{<0} раскладывается, FAIL; иначе UNKNOWN.
    """
    p, k = prime_of(q)
    negative = [(s, n) for s, n in newton_polygon(Q, p, k).segments() if s < 0]
    if not negative:
        return Verdict.PASS, None
    if len(negative) > 1:
        return Verdict.FAIL, witness_text(slopes="/".join(str(s) for s, _ in negative))
    s, length = negative[0]
    if length == s.denominator:
        return Verdict.PASS, None
    return Verdict.UNKNOWN, witness_text(slope=s, length=length)


def perfect_power_and_irreducibility(L_trc: RatPoly, q: Optional[int] = None,
                                     aux_count: int = AUX_PRIME_COUNT) -> IrreducibilityResult:
    """
    Максимальное e с L_trc = Q^e и трёхзначный вердикт неприводимости Q

    Args:
        L_trc: трансцендентная часть, L_trc(0) = 1
        q: размер поля; без него условие на Q_{<0} не проверяется
        aux_count: число вспомогательных простых

    Returns:
        IrreducibilityResult; распаковывается как (Q, e, status)
    """
    if L_trc.is_zero():
        raise MalformedPolynomialError("L_trc = 0")
    if L_trc.degree == 0:
        return IrreducibilityResult(L_trc, 1, Verdict.PASS, Verdict.PASS)

    parts = squarefree_decomposition(L_trc)
    e = 0
    for _, i in parts:
        e = gcd(e, i)
    Q = RatPoly.constant(1)
    for s, i in parts:
        Q = Q * s ** (i // e)
    Q = Q.normalized()
    if Q ** e != L_trc:
        Q, e = L_trc, 1

    p = prime_of(q)[0] if q else None
    witness = None
    repeated = poly_gcd(Q, Q.derivative())
    if repeated.degree > 0:
        rational = Verdict.FAIL
        witness = witness_text(repeated_factor_degree=repeated.degree)
    else:
        certified, ell = certify_irreducible(Q, p, aux_count)
        if certified:
            rational = Verdict.PASS
            if ell:
                witness = witness_text(ell=ell)
        else:
            factor = _find_rational_factor(Q)
            rational = Verdict.FAIL if factor else Verdict.UNKNOWN
            witness = factor

    negative = Verdict.PASS
    if q:
        negative, neg_witness = negative_slope_part(Q, q)
        if neg_witness and negative is not Verdict.PASS:
            witness = f"{witness},{neg_witness}" if witness else neg_witness

    status = combine([rational, negative])
    return IrreducibilityResult(Q, e, status, rational, negative, witness)
