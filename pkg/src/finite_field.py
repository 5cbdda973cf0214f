"""
Арифметика в GF(p^k) на таблицах логарифмов/экспонент

Элемент поля - целое 0 <= x < q; цифры x в системе счисления по основанию p
задают коэффициенты многочлена от alpha (корня модуля) по возрастанию
степени. Все операции принимают как скаляры, так и массивы numpy.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sympy import divisors, isprime, primefactors, primitive_root
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

from .errors import UnsupportedFieldError
from .memory_manager import register_cache


logger = logging.getLogger(__name__)

MAX_EXTENSION = 16
TABLE_LIMIT = 2 ** 16


def _digits(x: int, p: int, k: int) -> List[int]:
    out = []
    for _ in range(k):
        out.append(x % p)
        x //= p
    return out


def _from_digits(d: Sequence[int], p: int) -> int:
    x = 0
    for c in reversed(d):
        x = x * p + c
    return x


def _slow_mul(a: int, b: int, p: int, modulus: Tuple[int, ...]) -> int:
    """Умножение многочленов по модулю (только для построения таблиц)"""
    k = len(modulus) - 1
    da, db = _digits(a, p, k), _digits(b, p, k)
    prod = [0] * (2 * k - 1)
    for i, x in enumerate(da):
        if x:
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
    # модуль приведённый: T^k = -sum m_j T^j
    for i in range(len(prod) - 1, k - 1, -1):
        c = prod[i]
        if c:
            prod[i] = 0
            for j in range(k):
                prod[i - k + j] = (prod[i - k + j] - c * modulus[j]) % p
    return _from_digits(prod[:k], p)


def _slow_pow(a: int, e: int, p: int, modulus: Tuple[int, ...]) -> int:
    result, base = 1, a
    while e:
        if e & 1:
            result = _slow_mul(result, base, p, modulus)
        base = _slow_mul(base, base, p, modulus)
        e >>= 1
    return result


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Неприводимость над GF(p); modulus по возрастанию степени"""
    return bool(gf_irreducible_p([int(c) % p for c in reversed(modulus)], p, ZZ))


# Лексикографически наименьший приведённый неприводимый многочлен степени k >= 2
# для всех q = p^k <= 2^16. Коэффициенты по возрастанию степени; порядок
# сравнения - от коэффициента при T^{k-1} к свободному члену.
DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),
    (3, 2): (1, 0, 1),
    (5, 2): (2, 0, 1),
    (7, 2): (1, 0, 1),
    (11, 2): (1, 0, 1),
    (13, 2): (2, 0, 1),
    (17, 2): (3, 0, 1),
    (19, 2): (1, 0, 1),
    (23, 2): (1, 0, 1),
    (29, 2): (2, 0, 1),
    (31, 2): (1, 0, 1),
    (37, 2): (2, 0, 1),
    (41, 2): (3, 0, 1),
    (43, 2): (1, 0, 1),
    (47, 2): (1, 0, 1),
    (53, 2): (2, 0, 1),
    (59, 2): (1, 0, 1),
    (61, 2): (2, 0, 1),
    (67, 2): (1, 0, 1),
    (71, 2): (1, 0, 1),
    (73, 2): (5, 0, 1),
    (79, 2): (1, 0, 1),
    (83, 2): (1, 0, 1),
    (89, 2): (3, 0, 1),
    (97, 2): (5, 0, 1),
    (101, 2): (2, 0, 1),
    (103, 2): (1, 0, 1),
    (107, 2): (1, 0, 1),
    (109, 2): (2, 0, 1),
    (113, 2): (3, 0, 1),
    (127, 2): (1, 0, 1),
    (131, 2): (1, 0, 1),
    (137, 2): (3, 0, 1),
    (139, 2): (1, 0, 1),
    (149, 2): (2, 0, 1),
    (151, 2): (1, 0, 1),
    (157, 2): (2, 0, 1),
    (163, 2): (1, 0, 1),
    (167, 2): (1, 0, 1),
    (173, 2): (2, 0, 1),
    (179, 2): (1, 0, 1),
    (181, 2): (2, 0, 1),
    (191, 2): (1, 0, 1),
    (193, 2): (5, 0, 1),
    (197, 2): (2, 0, 1),
    (199, 2): (1, 0, 1),
    (211, 2): (1, 0, 1),
    (223, 2): (1, 0, 1),
    (227, 2): (1, 0, 1),
    (229, 2): (2, 0, 1),
    (233, 2): (3, 0, 1),
    (239, 2): (1, 0, 1),
    (241, 2): (7, 0, 1),
    (251, 2): (1, 0, 1),
    (2, 3): (1, 1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 3): (1, 1, 0, 1),
    (7, 3): (2, 0, 0, 1),
    (11, 3): (4, 1, 0, 1),
    (13, 3): (2, 0, 0, 1),
    (17, 3): (3, 1, 0, 1),
    (19, 3): (2, 0, 0, 1),
    (23, 3): (3, 1, 0, 1),
    (29, 3): (4, 1, 0, 1),
    (31, 3): (3, 0, 0, 1),
    (37, 3): (2, 0, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (5, 4): (2, 0, 0, 0, 1),
    (7, 4): (1, 1, 0, 0, 1),
    (11, 4): (2, 1, 0, 0, 1),
    (13, 4): (2, 0, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (5, 5): (1, 4, 0, 0, 0, 1),
    (7, 5): (3, 1, 0, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (3, 6): (2, 1, 0, 0, 0, 0, 1),
    (5, 6): (2, 1, 0, 0, 0, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (3, 7): (2, 0, 1, 0, 0, 0, 0, 1),
    (2, 8): (1, 1, 0, 1, 1, 0, 0, 0, 1),
    (3, 8): (2, 0, 1, 0, 0, 0, 0, 0, 1),
    (2, 9): (1, 1, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 9): (1, 0, 1, 2, 0, 0, 0, 0, 0, 1),
    (2, 10): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1),
    (3, 10): (1, 0, 2, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 11): (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 12): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 13): (1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 14): (1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 15): (1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 16): (1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
}


def default_modulus(p: int, k: int) -> Tuple[int, ...]:
    """Модуль по умолчанию для GF(p^k): T при k = 1, иначе из DEFAULT_MODULI"""
    if k == 1:
        return (0, 1)
    try:
        return DEFAULT_MODULI[(p, k)]
    except KeyError:
        raise UnsupportedFieldError(f"нет модуля по умолчанию для GF({p}^{k})")


def _primitive_element(p: int, modulus: Tuple[int, ...]) -> int:
    q = p ** (len(modulus) - 1)
    if q == 2:
        return 1
    factors = primefactors(q - 1)
    for g in range(2, q):
        if all(_slow_pow(g, (q - 1) // r, p, modulus) != 1 for r in factors):
            return g
    raise UnsupportedFieldError(f"модуль {modulus} не задаёт поле")


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """
    Поле GF(p^k) с фиксированным модулем и таблицами

    Таблица exp расширена до длины 4(q-1)+1: индексы от 2(q-1) и выше
    содержат 0, а log[0] = 2(q-1), так что exp[log a + log b] даёт
    произведение и для нулевых сомножителей.
    """

    p: int
    k: int
    modulus: Tuple[int, ...]
    generator: int
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def order(self) -> int:
        """Порядок мультипликативной группы"""
        return self.q - 1

    @property
    def key(self) -> Tuple[int, int, Tuple[int, ...]]:
        return (self.p, self.k, self.modulus)

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldSpec) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    # --- операции ---

    def add(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        place = 1
        for _ in range(self.k):
            out += ((a // place + b // place) % self.p) * place
            place *= self.p
        return out if out.shape else int(out)

    def neg(self, a):
        if self.p == 2:
            return a
        a = np.asarray(a, dtype=np.int64)
        out = np.zeros(a.shape, dtype=np.int64)
        place = 1
        for _ in range(self.k):
            out += ((-(a // place)) % self.p) * place
            place *= self.p
        return out if out.shape else int(out)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        res = self.exp[self.log[a] + self.log[b]]
        return res if np.ndim(res) else int(res)

    def scalar(self, c: int):
        """Образ целого c (по модулю p) в поле"""
        return int(c) % self.p

    def power(self, a, e: int):
        """a^e с соглашением 0^0 = 1"""
        if e == 0:
            return np.ones_like(a) if np.ndim(a) else 1
        la = self.log[a]
        res = np.where(la == 2 * self.order, 0, self.exp[(la * e) % self.order])
        return res if np.ndim(res) else int(res)

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("обратный к нулю")
        res = self.exp[(-self.log[a]) % self.order]
        return res if np.ndim(res) else int(res)

    def mul_table(self) -> np.ndarray:
        x = self.elements()
        return self.mul(x[:, None], x[None, :])

    def element_order(self, a: int) -> int:
        """Мультипликативный порядок ненулевого a"""
        if a == 0:
            raise ZeroDivisionError("порядок нуля не определён")
        la = int(self.log[a])
        return self.order // int(np.gcd(la, self.order))


@lru_cache(maxsize=None)
def _build_field(p: int, k: int, modulus: Tuple[int, ...]) -> FieldSpec:
    q = p ** k
    g = _primitive_element(p, modulus)
    exp = np.zeros(4 * (q - 1) + 1, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    x = 1
    for i in range(q - 1):
        exp[i] = x
        exp[i + q - 1] = x
        log[x] = i
        x = _slow_mul(x, g, p, modulus)
    if x != 1:
        raise UnsupportedFieldError(f"элемент {g} не порождает GF({q})*")
    log[0] = 2 * (q - 1)
    exp.setflags(write=False)
    log.setflags(write=False)
    logger.debug(f"Поле GF({p}^{k}) построено: модуль {modulus}, образующая {g}")
    return FieldSpec(p=p, k=k, modulus=modulus, generator=g, exp=exp, log=log)


def make_field(p: int, k: int, modulus: Optional[Sequence[int]] = None,
               table_limit: int = TABLE_LIMIT) -> FieldSpec:
    """
    Создаёт поле GF(p^k)

    Args:
        p: простое число
        k: степень расширения, 1 <= k <= 16
        modulus: неприводимый приведённый модуль по возрастанию степени;
            по умолчанию - лексикографически наименьший
        table_limit: наибольшее q, для которого строятся таблицы

    Returns:
        FieldSpec (кэшируется по (p, k, modulus))
    """
    if not isprime(p):
        raise UnsupportedFieldError(f"p = {p} не простое")
    if not 1 <= k <= MAX_EXTENSION:
        raise UnsupportedFieldError(f"k = {k} вне диапазона 1..{MAX_EXTENSION}")
    if p ** k > table_limit:
        raise UnsupportedFieldError(f"q = {p}^{k} больше предела таблиц {table_limit}")
    if modulus is None:
        modulus = default_modulus(p, k)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise UnsupportedFieldError(f"модуль {modulus} не приведённый степени {k}")
        if not is_irreducible(modulus, p):
            raise UnsupportedFieldError(f"модуль {modulus} приводим над GF({p})")
    return _build_field(p, k, tuple(modulus))


def _evaluate(spec: FieldSpec, coeffs: Sequence[int], x):
    """Значение многочлена с коэффициентами из GF(p) в точках x"""
    acc = np.zeros_like(x)
    for c in reversed(coeffs):
        acc = spec.add(spec.mul(acc, x), c)
    return acc


def _minimal_polynomial(spec: FieldSpec, x: int) -> Tuple[Tuple[int, ...], List[int]]:
    """Минимальный многочлен x над GF(p) и орбита Фробениуса x"""
    orbit = [x]
    y = spec.power(x, spec.p)
    while y != x:
        orbit.append(y)
        y = spec.power(y, spec.p)
    poly = [1]
    for r in orbit:
        minus_r = spec.neg(r)
        new = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] = spec.add(new[i + 1], c)
            new[i] = spec.add(new[i], spec.mul(minus_r, c))
        poly = new
    poly = tuple(int(c) for c in poly)
    if any(c >= spec.p for c in poly):
        raise UnsupportedFieldError(f"минимальный многочлен {x} не над GF({spec.p})")
    return poly, orbit


@lru_cache(maxsize=None)
def compatible_polynomial(p: int, k: int) -> Tuple[int, ...]:
    """
    Примитивный многочлен степени k, согласованный с делителями k

    Для корня r и каждого d | k, d < k, элемент r^((p^k - 1)/(p^d - 1)) является
    корнем compatible_polynomial(p, d). Среди подходящих многочленов берётся
    наименьший в том же порядке, что и DEFAULT_MODULI; при k = 1 это T - g
    для наименьшего первообразного корня g по модулю p.
    """
    if k == 1:
        return ((-primitive_root(p)) % p, 1)
    spec = make_field(p, k)
    x = spec.elements()[1:]
    mask = np.gcd(spec.log[x], spec.order) == 1
    for d in divisors(k)[:-1]:
        sub = compatible_polynomial(p, d)
        mask &= _evaluate(spec, sub, spec.power(x, spec.order // (p ** d - 1))) == 0

    best: Optional[Tuple[int, ...]] = None
    seen = set()
    for g in x[mask]:
        g = int(g)
        if g in seen:
            continue
        poly, orbit = _minimal_polynomial(spec, g)
        seen.update(orbit)
        if best is None or poly[::-1] < best[::-1]:
            best = poly
    if best is None:
        raise UnsupportedFieldError(f"нет согласованного многочлена для GF({p}^{k})")
    logger.debug(f"Согласованный многочлен для GF({p}^{k}): {best}")
    return best


@lru_cache(maxsize=None)
def tower_generator(spec: FieldSpec) -> int:
    """Корень compatible_polynomial(p, k) с наименьшим индексом в spec"""
    values = _evaluate(spec, compatible_polynomial(spec.p, spec.k), spec.elements())
    roots = np.flatnonzero(values == 0)
    if len(roots) == 0:
        raise UnsupportedFieldError(f"согласованный многочлен не имеет корней в GF({spec.q})")
    return int(roots[0])


def embed(spec_small: FieldSpec, spec_big: FieldSpec, x: int) -> int:
    """
    Образ x при фиксированном вложении GF(p^a) -> GF(p^b)

    Образующая башни gamma_a малого поля переходит в gamma_b^((p^b - 1)/(p^a - 1)),
    поэтому вложения согласованы: GF(p^a) -> GF(p^c) совпадает с композицией
    через любое промежуточное GF(p^b). Подполе GF(p) переходит в себя.
    """
    if spec_small.p != spec_big.p or spec_big.k % spec_small.k != 0:
        raise UnsupportedFieldError(
            f"GF({spec_small.p}^{spec_small.k}) не вкладывается в GF({spec_big.p}^{spec_big.k})"
        )
    if not 0 <= x < spec_small.q:
        raise ValueError(f"элемент {x} вне GF({spec_small.q})")
    if x == 0 or spec_small.k == 1:
        return int(x)
    order = spec_small.order
    gamma = tower_generator(spec_small)
    j = int(spec_small.log[x]) * pow(int(spec_small.log[gamma]), -1, order) % order
    return int(spec_big.power(tower_generator(spec_big), j * (spec_big.order // order)))


register_cache(_build_field.cache_clear)
register_cache(compatible_polynomial.cache_clear)
register_cache(tower_generator.cache_clear)


def format_field_table(spec: FieldSpec) -> str:
    """Модуль и полная таблица умножения (отладка)"""
    width = len(str(spec.q - 1))
    lines = [
        f"p={spec.p} k={spec.k} q={spec.q}",
        "modulus: " + ",".join(str(c) for c in spec.modulus),
        f"generator: {spec.generator}",
    ]
    table = spec.mul_table()
    header = " " * width + " |" + " ".join(f"{j:>{width}}" for j in range(spec.q))
    lines.append(header)
    lines.append("-" * len(header))
    for i in range(spec.q):
        lines.append(f"{i:>{width}} |" + " ".join(f"{int(v):>{width}}" for v in table[i]))
    return "\n".join(lines)
