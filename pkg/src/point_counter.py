"""
Подсчёт точек кубических четырёхмерных гиперповерхностей полным перебором

Аффинный конус перебирается так: внешние координаты (x1, x2) раздаются
воркерам, по (x3, x4, x5) считается сетка из q^3 значений numpy, а число
решений по x6 берётся из таблицы корней кубических многочленов R[a, b, c, d].
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix, isprime

from .errors import (
    ConsistencyError,
    CubicParseError,
    InsufficientDataError,
    ResourceLimitError,
)
from .finite_field import FieldSpec, embed, make_field
from .memory_manager import free_memory, log_process_memory, register_cache


logger = logging.getLogger(__name__)

NUM_VARS = 6
SCAN_CHUNK_ENTRIES = 1 << 18
Exponents = Tuple[int, int, int, int, int, int]
Term = Tuple[int, Exponents]


@dataclass(frozen=True)
class CubicForm:
    """Однородная кубическая форма от 6 переменных над GF(p)"""

    terms: Tuple[Term, ...]
    base_p: int = 2

    @classmethod
    def create(cls, terms: Iterable[Tuple[int, Sequence[int]]], p: int = 2) -> "CubicForm":
        """Приводит коэффициенты по модулю p, склеивает одинаковые мономы"""
        merged: Dict[Exponents, int] = {}
        for coeff, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != NUM_VARS or any(e < 0 for e in exps):
                raise CubicParseError(f"неверный вектор показателей {exps}")
            if sum(exps) != 3:
                raise CubicParseError(f"степень монома {sum(exps)} != 3: {exps}")
            merged[exps] = (merged.get(exps, 0) + int(coeff)) % p
        reduced = sorted(((c, e) for e, c in merged.items() if c), key=lambda t: t[1], reverse=True)
        if not reduced:
            raise CubicParseError("форма пуста после приведения по модулю p")
        return cls(terms=tuple(reduced), base_p=p)

    def partial(self, i: int) -> List[Term]:
        """Частная производная по x_{i+1}: список членов степени 2"""
        out = []
        for c, e in self.terms:
            d = (c * e[i]) % self.base_p
            if d:
                out.append((d, e[:i] + (e[i] - 1,) + e[i + 1:]))
        return out

    def substitute(self, matrix: Sequence[Sequence[int]]) -> "CubicForm":
        """Линейная замена x = M y над GF(p); M обратима"""
        p = self.base_p
        if Matrix(matrix).det() % p == 0:
            raise ValueError("матрица замены вырождена над GF(p)")
        linear = [{_unit(j): int(matrix[i][j]) % p for j in range(NUM_VARS) if matrix[i][j] % p}
                  for i in range(NUM_VARS)]
        result: Dict[Exponents, int] = {}
        for c, e in self.terms:
            poly: Dict[Exponents, int] = {(0,) * NUM_VARS: c}
            for i, power in enumerate(e):
                for _ in range(power):
                    poly = _poly_mul(poly, linear[i], p)
            for mono, v in poly.items():
                result[mono] = (result.get(mono, 0) + v) % p
        return CubicForm.create(((c, e) for e, c in result.items() if c), p)


def _unit(j: int) -> Exponents:
    return tuple(1 if i == j else 0 for i in range(NUM_VARS))


def _poly_mul(a: Dict[Exponents, int], b: Dict[Exponents, int], p: int) -> Dict[Exponents, int]:
    out: Dict[Exponents, int] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = (out.get(e, 0) + ca * cb) % p
    return {e: c for e, c in out.items() if c}


@dataclass
class PointCountTable:
    """Точные числа точек N_n над F_{q^n}"""

    q: int
    counts: Dict[int, int] = field(default_factory=dict)

    def __getitem__(self, n: int) -> int:
        if n not in self.counts:
            raise InsufficientDataError(f"нет числа точек для n = {n}")
        return self.counts[n]

    def __contains__(self, n: int) -> bool:
        return n in self.counts

    @property
    def max_n(self) -> int:
        return max(self.counts) if self.counts else 0

    def require(self, n_max: int) -> None:
        missing = [n for n in range(1, n_max + 1) if n not in self.counts]
        if missing:
            raise InsufficientDataError(f"нет чисел точек для n = {missing}")


# --- файловые форматы ---

def parse_cubic(text: str) -> CubicForm:
    """
    Разбор кубической формы

    Формат: по одному члену в строке "coeff e1 e2 e3 e4 e5 e6", строки с '#'
    пропускаются, необязательный заголовок "p=2".
    """
    p = 2
    terms = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.replace(" ", "").startswith("p="):
            try:
                p = int(line.replace(" ", "")[2:])
            except ValueError:
                raise CubicParseError(f"неверный заголовок {line!r}", line_no)
            if not isprime(p):
                raise CubicParseError(f"p = {p} не простое", line_no)
            continue
        parts = line.split()
        if len(parts) != NUM_VARS + 1:
            raise CubicParseError(f"ожидается 7 чисел, получено {len(parts)}", line_no)
        try:
            coeff, *exps = (int(x) for x in parts)
        except ValueError:
            raise CubicParseError(f"не целые числа в {line!r}", line_no)
        if any(e < 0 for e in exps):
            raise CubicParseError("отрицательный показатель", line_no)
        if sum(exps) != 3:
            raise CubicParseError(f"степень монома {sum(exps)} != 3", line_no)
        terms.append((coeff, tuple(exps)))
    return CubicForm.create(terms, p)


def load_cubic(path) -> CubicForm:
    text = Path(path).read_text(encoding="utf-8")
    logger.debug(f"Кубика загружена из {path}")
    return parse_cubic(text)


def format_count_table(table: PointCountTable) -> str:
    """Формат records: "q=<q>", затем строки "n count" """
    lines = [f"q={table.q}"]
    lines += [f"{n} {table.counts[n]}" for n in sorted(table.counts)]
    return "\n".join(lines)


def parse_count_table(text: str) -> PointCountTable:
    q = None
    counts: Dict[int, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("q="):
            q = int(line[2:])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CubicParseError(f"ожидается 'n count': {line!r}", line_no)
        counts[int(parts[0])] = int(parts[1])
    if q is None:
        raise CubicParseError("нет заголовка q=")
    return PointCountTable(q=q, counts=counts)


# --- ядро подсчёта ---

@lru_cache(maxsize=4)
def root_count_table(spec: FieldSpec) -> np.ndarray:
    """R[((a q + b) q + c) q + d] = #{x : a x^3 + b x^2 + c x + d = 0}"""
    q = spec.q
    dtype = np.uint8 if q <= 255 else np.uint16
    table = np.zeros(q ** 4, dtype=dtype)
    a, b, c = np.indices((q, q, q), dtype=np.int64).reshape(3, -1)
    rows = ((a * q + b) * q + c) * q
    for x in range(q):
        v = spec.add(spec.add(spec.mul(a, spec.power(x, 3)), spec.mul(b, spec.power(x, 2))),
                     spec.mul(c, x))
        table[rows + spec.neg(v)] += 1
    table.setflags(write=False)
    logger.debug(f"Таблица корней для GF({q}) построена: {table.nbytes} байт")
    return table


register_cache(root_count_table.cache_clear)


def evaluate_terms(terms: Sequence[Term], spec: FieldSpec, coords: Sequence[np.ndarray],
                   small: Optional[FieldSpec] = None):
    """Значение суммы мономов в точках coords (6 массивов одной формы)"""
    small = small or make_field(spec.p, 1)
    acc = np.zeros_like(coords[0])
    for c, e in terms:
        val = np.full_like(coords[0], embed(small, spec, c))
        for x, k in zip(coords, e):
            if k:
                val = spec.mul(val, spec.power(x, k))
        acc = spec.add(acc, val)
    return acc


class _CubicKernel:
    """Состояние подсчёта для одной формы над одним полем"""

    def __init__(self, form: CubicForm, spec: FieldSpec, use_root_table: bool):
        self.spec = spec
        q = spec.q
        x3, x4, x5 = np.indices((q, q, q), dtype=np.int64).reshape(3, -1)
        small = make_field(form.base_p, 1)

        groups: Dict[Tuple[int, int, int, int], List[Tuple[int, int, int]]] = {}
        for coeff, e in form.terms:
            groups.setdefault(e[2:], []).append((embed(small, spec, coeff), e[0], e[1]))
        self.groups = sorted(groups.items())

        self.monomial_logs: Dict[Tuple[int, int, int], np.ndarray] = {}
        for inner, _ in self.groups:
            key = inner[:3]
            if key not in self.monomial_logs:
                m = spec.mul(spec.mul(spec.power(x3, key[0]), spec.power(x4, key[1])),
                             spec.power(x5, key[2]))
                self.monomial_logs[key] = spec.log[m]
        self.grid_size = q ** 3
        self.root_table = root_count_table(spec) if use_root_table else None

    def count_pair(self, x1: int, x2: int) -> int:
        """Число нулей с фиксированными x1, x2 по всем (x3, ..., x6)"""
        spec = self.spec
        q = spec.q
        coeffs = [np.zeros(self.grid_size, dtype=np.int64) for _ in range(4)]
        for inner, outer_terms in self.groups:
            s = 0
            for c, e1, e2 in outer_terms:
                s = spec.add(s, spec.mul(c, spec.mul(spec.power(x1, e1), spec.power(x2, e2))))
            if s == 0:
                continue
            term = spec.exp[spec.log[s] + self.monomial_logs[inner[:3]]]
            coeffs[inner[3]] = spec.add(coeffs[inner[3]], term)

        a0, a1, a2, a3 = coeffs
        if self.root_table is not None:
            idx = ((a3 * q + a2) * q + a1) * q + a0
            return int(self.root_table[idx].sum(dtype=np.int64))

        total = 0
        for x6 in range(q):
            val = spec.add(spec.add(spec.mul(a3, spec.power(x6, 3)), spec.mul(a2, spec.power(x6, 2))),
                           spec.add(spec.mul(a1, x6), a0))
            total += int(np.count_nonzero(val == 0))
        return total

    def count_pairs(self, pairs: Sequence[Tuple[int, int]]) -> int:
        return sum(self.count_pair(x1, x2) for x1, x2 in pairs)


_WORKER_KERNEL: Optional[_CubicKernel] = None


def _init_worker(form: CubicForm, p: int, n: int, modulus, use_root_table: bool) -> None:
    global _WORKER_KERNEL
    _WORKER_KERNEL = _CubicKernel(form, make_field(p, n, modulus), use_root_table)


def _count_chunk(pairs: Sequence[Tuple[int, int]]) -> int:
    return _WORKER_KERNEL.count_pairs(pairs)


def _scan_chunks(q: int, lead: int, max_entries: int):
    """
    Точки с x_1 = ... = x_lead = 0, x_{lead+1} = 1 порциями не больше max_entries

    Свободные координаты после ведущей делятся на внешние (перебор в цикле) и
    внутренние (сетка numpy размера q^inner <= max_entries).
    """
    free = NUM_VARS - lead - 1
    inner = free
    while inner > 0 and q ** inner > max_entries:
        inner -= 1
    grid = np.indices((q,) * inner, dtype=np.int64).reshape(inner, -1) if inner \
        else np.zeros((0, 1), dtype=np.int64)
    size = grid.shape[1]
    fixed = [np.zeros(size, dtype=np.int64) for _ in range(lead)]
    fixed.append(np.ones(size, dtype=np.int64))
    for outer in product(range(q), repeat=free - inner):
        yield fixed + [np.full(size, v, dtype=np.int64) for v in outer] + list(grid)


def _split_into_chunks(items: List, parts: int) -> List[List]:
    size = max(1, -(-len(items) // parts))
    return [items[i:i + size] for i in range(0, len(items), size)]


@dataclass(frozen=True)
class SingularPoint:
    """Особая точка над F_{p^ext}, координаты нормированы: первая ненулевая = 1"""

    ext: int
    coords: Tuple[int, ...]


class PointCounter:
    """Сервис подсчёта точек кубических форм"""

    def __init__(self, config=None):
        self.logger = logging.getLogger(__name__)
        self.config = config

        # Настройки
        self.workers = 1
        self.max_field_size = 64
        self.allow_large = False
        self.root_table_limit = 64
        self.log_memory = False
        self.release_caches = False
        self.scan_chunk_entries = SCAN_CHUNK_ENTRIES

        if config and hasattr(config, 'counting'):
            counting = config.counting
            self.workers = counting.get('workers', 1)
            self.max_field_size = counting.get('max_field_size', 64)
            self.allow_large = counting.get('allow_large', False)
            self.root_table_limit = counting.get('root_table_limit', 64)
            self.scan_chunk_entries = counting.get('scan_chunk_entries', SCAN_CHUNK_ENTRIES)
        if config and hasattr(config, 'performance'):
            self.log_memory = config.performance.get('log_memory_usage', False)
            self.release_caches = config.performance.get('release_caches_after_run', False)

        env_workers = os.environ.get("NCK3_WORKERS")
        if env_workers:
            self.workers = int(env_workers)

        self.logger.info(f"PointCounter инициализирован: workers={self.workers}, "
                         f"предел q^n={self.max_field_size}")

    def _field_for(self, form: CubicForm, n: int, modulus=None,
                   allow_large: Optional[bool] = None) -> FieldSpec:
        allow = self.allow_large if allow_large is None else allow_large
        size = form.base_p ** n
        if not allow and size > self.max_field_size:
            raise ResourceLimitError(
                f"q^n = {form.base_p}^{n} = {size} больше предела {self.max_field_size}; "
                f"используйте --allow-large"
            )
        return make_field(form.base_p, n, modulus)

    def _kernel(self, form: CubicForm, spec: FieldSpec) -> _CubicKernel:
        return _CubicKernel(form, spec, spec.q <= self.root_table_limit)

    def count_affine(self, form: CubicForm, n: int, workers: Optional[int] = None,
                     modulus=None, allow_large: Optional[bool] = None) -> int:
        """
        Число нулей формы в аффинном 6-мерном пространстве над F_{p^n}, включая начало

        Args:
            form: кубическая форма
            n: степень расширения
            workers: число процессов (по умолчанию из конфигурации)
            modulus: модуль поля F_{p^n}, по умолчанию стандартный
            allow_large: снять ограничение на q^n

        Returns:
            Целое число нулей
        """
        spec = self._field_for(form, n, modulus, allow_large)
        workers = self.workers if workers is None else workers
        q = spec.q
        pairs = list(product(range(q), repeat=2))
        use_table = q <= self.root_table_limit
        self.logger.debug(f"Подсчёт над GF({q}): {len(pairs)} внешних пар, воркеров {workers}")

        if workers <= 1:
            total = self._kernel(form, spec).count_pairs(pairs)
        else:
            chunks = _split_into_chunks(pairs, workers * 4)
            with ProcessPoolExecutor(
                max_workers=workers,
                initializer=_init_worker,
                initargs=(form, form.base_p, n, spec.modulus, use_table),
            ) as executor:
                total = sum(executor.map(_count_chunk, chunks))
        return total

    def count_prefix(self, form: CubicForm, n: int, prefix: Sequence[int],
                     modulus=None, allow_large: Optional[bool] = None) -> int:
        """Число нулей с фиксированными первыми координатами (len(prefix) <= 2)"""
        if len(prefix) > 2:
            raise ValueError("префикс длиннее двух координат")
        spec = self._field_for(form, n, modulus, allow_large)
        rest = 2 - len(prefix)
        pairs = [tuple(prefix) + tail for tail in product(range(spec.q), repeat=rest)]
        return self._kernel(form, spec).count_pairs(pairs)

    def count_projective(self, form: CubicForm, n: int, workers: Optional[int] = None,
                         modulus=None, allow_large: Optional[bool] = None) -> int:
        """Число точек в P^5(F_{p^n}) с проверкой сравнения Акса"""
        affine = self.count_affine(form, n, workers, modulus, allow_large)
        qn = form.base_p ** n
        num = affine - 1
        if num % (qn - 1) != 0:
            raise ConsistencyError(f"(N - 1) = {num} не делится на q^n - 1 = {qn - 1}")
        projective = num // (qn - 1)
        if projective % qn != 1 % qn:
            raise ConsistencyError(f"|X(F_{qn})| = {projective} не сравнимо с 1 по модулю {qn}")
        return projective

    def count_table(self, form: CubicForm, n_max: int, workers: Optional[int] = None,
                    allow_large: Optional[bool] = None) -> PointCountTable:
        """Таблица |X(F_{p^n})| для n = 1..n_max"""
        if n_max < 1:
            raise ValueError(f"n_max должно быть >= 1, получено {n_max}")
        table = PointCountTable(q=form.base_p)
        for n in range(1, n_max + 1):
            table.counts[n] = self.count_projective(form, n, workers, allow_large=allow_large)
            self.logger.info(f"n={n}: |X| = {table.counts[n]}")
        if self.log_memory:
            log_process_memory("count_table")
        if self.release_caches:
            free_memory("count_table")
        return table

    def singular_scan(self, form: CubicForm, n_max: int,
                      allow_large: Optional[bool] = None) -> List[SingularPoint]:
        """
        Проективные точки над F_{p^n}, n <= n_max, где обращаются в ноль форма и все
        частные производные. Пустой список - необходимое, но не достаточное условие гладкости.

        Сетка перебирается порциями по scan_chunk_entries точек.
        """
        partials = [form.partial(i) for i in range(NUM_VARS)]
        found: List[SingularPoint] = []
        for n in range(1, n_max + 1):
            spec = self._field_for(form, n, allow_large=allow_large)
            for lead in range(NUM_VARS):
                for coords in _scan_chunks(spec.q, lead, self.scan_chunk_entries):
                    mask = evaluate_terms(form.terms, spec, coords) == 0
                    for terms in partials:
                        if terms:
                            mask &= evaluate_terms(terms, spec, coords) == 0
                    for j in np.flatnonzero(mask):
                        found.append(SingularPoint(n, tuple(int(c[j]) for c in coords)))
        self.logger.info(f"Поиск особых точек: найдено {len(found)} (n <= {n_max})")
        return found


# --- функции уровня модуля ---

def count_affine(form: CubicForm, n: int, workers: int = 1, allow_large: bool = False) -> int:
    return PointCounter().count_affine(form, n, workers, allow_large=allow_large)


def count_projective(form: CubicForm, n: int, workers: int = 1, allow_large: bool = False) -> int:
    return PointCounter().count_projective(form, n, workers, allow_large=allow_large)


def count_table(form: CubicForm, n_max: int, workers: int = 1,
                allow_large: bool = False) -> PointCountTable:
    return PointCounter().count_table(form, n_max, workers, allow_large=allow_large)


def singular_scan(form: CubicForm, n_max: int) -> List[SingularPoint]:
    return PointCounter().singular_scan(form, n_max)
