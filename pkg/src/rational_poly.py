"""
Точная арифметика: многочлены от одной переменной над Q

Коэффициенты хранятся по возрастанию степени как fractions.Fraction,
без хвостовых нулей; нулевой многочлен - пустой кортеж. Плавающей точки
здесь нет.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, List, Sequence, Tuple, Union

from sympy import divisors, totient
from sympy.ntheory.primetest import is_square as _is_square_int

from .errors import MalformedPolynomialError


logger = logging.getLogger(__name__)

Number = Union[int, Fraction]

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def _strip(coeffs: Iterable[Number]) -> Tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class RatPoly:
    """Плотный многочлен над Q, коэффициенты по возрастанию степени"""

    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(self.coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Number]) -> "RatPoly":
        return cls(tuple(coeffs))

    @classmethod
    def constant(cls, c: Number) -> "RatPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, degree: int, c: Number = 1) -> "RatPoly":
        return cls((0,) * degree + (c,))

    # --- базовые свойства ---

    @property
    def degree(self) -> int:
        """Степень; у нулевого многочлена -1"""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        """Коэффициент при T^i (0 за пределами степени)"""
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __repr__(self) -> str:
        return f"RatPoly({format_poly(self)})"

    # --- арифметика ---

    def __add__(self, other: Union["RatPoly", Number]) -> "RatPoly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RatPoly(tuple(self[i] + other[i] for i in range(n)))

    __radd__ = __add__

    def __neg__(self) -> "RatPoly":
        return RatPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Union["RatPoly", Number]) -> "RatPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other: Number) -> "RatPoly":
        return _as_poly(other) - self

    def __mul__(self, other: Union["RatPoly", Number]) -> "RatPoly":
        if not isinstance(other, RatPoly):
            c = Fraction(other)
            return RatPoly(tuple(c * a for a in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return RatPoly()
        res = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                res[i + j] += a * b
        return RatPoly(tuple(res))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "RatPoly":
        if e < 0:
            raise ValueError("отрицательная степень многочлена")
        result = RatPoly.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other: "RatPoly") -> Tuple["RatPoly", "RatPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("деление на нулевой многочлен")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            if c == 0:
                continue
            quot[i - dq] = c
            for j, b in enumerate(other.coeffs):
                rem[i - dq + j] -= c * b
        return RatPoly(tuple(quot)), RatPoly(tuple(rem[:dq] if dq > 0 else ()))

    def __floordiv__(self, other: "RatPoly") -> "RatPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "RatPoly") -> "RatPoly":
        return divmod(self, other)[1]

    def divides(self, other: "RatPoly") -> bool:
        """True если self делит other без остатка"""
        return (other % self).is_zero()

    def exact_div(self, other: "RatPoly") -> "RatPoly":
        """Деление без остатка; остаток - ошибка вызывающего кода"""
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError(f"{format_poly(other)} не делит {format_poly(self)}")
        return q

    def __call__(self, x: Number) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "RatPoly":
        return RatPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def monic(self) -> "RatPoly":
        if self.is_zero():
            return self
        return self * (1 / self.leading)

    def normalized(self) -> "RatPoly":
        """Масштаб к свободному члену 1 (если он ненулевой)"""
        c0 = self[0]
        if c0 == 0:
            return self
        return self * (1 / c0)

    def reversed(self, degree: int = None) -> "RatPoly":
        """T^d * P(1/T) для d = degree (по умолчанию степень P)"""
        d = self.degree if degree is None else degree
        padded = [self[i] for i in range(d + 1)]
        return RatPoly(tuple(reversed(padded)))

    def scale(self, c: Number) -> "RatPoly":
        """P(c*T)"""
        c = Fraction(c)
        acc = Fraction(1)
        out = []
        for a in self.coeffs:
            out.append(a * acc)
            acc *= c
        return RatPoly(tuple(out))

    def to_primitive_integer(self) -> List[int]:
        """Целые коэффициенты с НОД 1, знак старшего сохраняется"""
        if self.is_zero():
            return []
        den = 1
        for c in self.coeffs:
            den = lcm(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        return [v // g for v in ints]

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)


def _as_poly(x: Union[RatPoly, Number]) -> RatPoly:
    return x if isinstance(x, RatPoly) else RatPoly.constant(x)


ONE = RatPoly.constant(1)
ONE_MINUS_T = RatPoly((1, -1))
ONE_PLUS_T = RatPoly((1, 1))


def poly_gcd(a: RatPoly, b: RatPoly) -> RatPoly:
    """Приведённый НОД по алгоритму Евклида"""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def multiplicity(factor: RatPoly, poly: RatPoly) -> Tuple[int, RatPoly]:
    """Кратность factor в poly и частное после её извлечения"""
    count = 0
    while not poly.is_zero() and factor.divides(poly):
        poly = poly.exact_div(factor)
        count += 1
    return count, poly


# --- степенные суммы ---

def power_sums(P: RatPoly, k_max: int) -> List[Fraction]:
    """
    Степенные суммы обратных корней по тождествам Ньютона

    Args:
        P: многочлен с P(0) = 1, P = prod(1 - g_j T)
        k_max: сколько сумм вернуть

    Returns:
        [p_1, ..., p_{k_max}], p_n = sum g_j^n
    """
    if P[0] != 1:
        raise MalformedPolynomialError(f"P(0) = {P[0]}, ожидается 1")
    p: List[Fraction] = []
    for n in range(1, k_max + 1):
        s = -n * P[n]
        for i in range(1, n):
            s -= P[i] * p[n - i - 1]
        p.append(s)
    return p


def poly_from_power_sums(p: Sequence[Number], deg: int) -> RatPoly:
    """Обратные тождества Ньютона: многочлен степени deg с P(0) = 1"""
    if len(p) < deg:
        raise ValueError(f"нужно {deg} степенных сумм, получено {len(p)}")
    c = [Fraction(1)]
    for n in range(1, deg + 1):
        s = Fraction(p[n - 1])
        for i in range(1, n):
            s += c[i] * Fraction(p[n - i - 1])
        c.append(-s / n)
    return RatPoly(tuple(c))


def log_coefficients(P: RatPoly, n_max: int) -> List[Fraction]:
    """
    [n * [T^n] log P for n = 1..n_max] через ряд S = P'/P

    Независимо от power_sums: S_k = P'_k - sum_{i=1..k} P_i S_{k-i},
    а n-й коэффициент логарифма равен S_{n-1} / n.
    """
    if P[0] != 1:
        raise MalformedPolynomialError(f"P(0) = {P[0]}, ожидается 1")
    dP = P.derivative()
    S: List[Fraction] = []
    for k in range(n_max):
        s = dP[k]
        for i in range(1, k + 1):
            s -= P[i] * S[k - i]
        S.append(s)
    return S


# --- круговые многочлены ---

@lru_cache(maxsize=None)
def _standard_cyclotomic(n: int) -> RatPoly:
    poly = RatPoly.monomial(n) - 1
    for d in divisors(n):
        if d < n:
            poly = poly.exact_div(_standard_cyclotomic(d))
    return poly


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> RatPoly:
    """C_n(T) = prod(1 - zeta T); C_1 = 1 - T, для n >= 2 стандартный Phi_n"""
    if n < 1:
        raise ValueError(f"n должно быть >= 1, получено {n}")
    return _standard_cyclotomic(n).normalized()


@lru_cache(maxsize=None)
def cyclotomic_indices(max_phi: int = 22) -> Tuple[int, ...]:
    """Все n с phi(n) <= max_phi; phi(n) >= sqrt(n/2) ограничивает перебор"""
    bound = 2 * max_phi * max_phi + 1
    return tuple(n for n in range(1, bound + 1) if int(totient(n)) <= max_phi)


# --- последовательности Штурма ---

def squarefree_part(P: RatPoly) -> RatPoly:
    if P.degree <= 0:
        return P
    return P.exact_div(poly_gcd(P, P.derivative()))


def squarefree_decomposition(P: RatPoly) -> List[Tuple[RatPoly, int]]:
    """
    Разложение Юна: P = c * prod s_i^i, s_i свободны от квадратов и попарно взаимно просты

    Returns:
        Список (s_i, i) для непостоянных s_i, s_i приведённые
    """
    if P.is_zero():
        raise MalformedPolynomialError("разложение нулевого многочлена")
    f = P.monic()
    if f.degree <= 0:
        return []
    df = f.derivative()
    a = poly_gcd(f, df)
    b = f.exact_div(a)
    c = df.exact_div(a)
    d = c - b.derivative()
    result = []
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        if a.degree > 0:
            result.append((a, i))
        i += 1
    return result


def sturm_sequence(P: RatPoly) -> List[RatPoly]:
    seq = [P, P.derivative()]
    while not seq[-1].is_zero():
        rem = seq[-2] % seq[-1]
        if rem.is_zero():
            break
        seq.append(-rem)
    return [s for s in seq if not s.is_zero()]


def _sign_changes(values: Iterable[Fraction]) -> int:
    nonzero = [v for v in values if v != 0]
    return sum(1 for a, b in zip(nonzero, nonzero[1:]) if (a > 0) != (b > 0))


def real_roots_in_interval(P: RatPoly, a: Number, b: Number) -> int:
    """Число различных вещественных корней P в (a, b]"""
    if P.is_zero():
        raise MalformedPolynomialError("корни нулевого многочлена не определены")
    a, b = Fraction(a), Fraction(b)
    if not a < b:
        raise ValueError(f"пустой интервал ({a}, {b}]")
    sf = squarefree_part(P)
    if sf.degree <= 0:
        return 0
    seq = sturm_sequence(sf)
    return _sign_changes(s(a) for s in seq) - _sign_changes(s(b) for s in seq)


# --- квадраты ---

def is_square(r: Number) -> bool:
    """r - квадрат рационального числа (0 считается квадратом)"""
    r = Fraction(r)
    if r < 0:
        return False
    if r == 0:
        return True
    return bool(_is_square_int(r.numerator) and _is_square_int(r.denominator))


# --- текстовый формат ---

def parse_rational(text: str) -> Fraction:
    """Разбор "a" или "a/b" """
    token = text.strip()
    if not _RATIONAL_RE.match(token):
        raise ValueError(f"не рациональное число: {text!r}")
    value = Fraction(token)
    return value


def format_rational(r: Number) -> str:
    return str(Fraction(r))


def parse_poly(text: str) -> RatPoly:
    """Коэффициенты через запятую по возрастанию степени"""
    parts = [t for t in text.split(",")]
    if not text.strip():
        return RatPoly()
    return RatPoly(tuple(parse_rational(t) for t in parts))


def format_poly(P: RatPoly) -> str:
    if P.is_zero():
        return "0"
    return ",".join(format_rational(c) for c in P.coeffs)
