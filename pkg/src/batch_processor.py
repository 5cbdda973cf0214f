"""
Пакетная фильтрация многочленов Вейля и статистика рангов Пикара

Вход разбивается на чанки строк; чанки обрабатываются в пуле процессов,
результаты собираются в порядке входа.
"""

import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .condition_service import ConditionService
from .config import Config
from .errors import NcK3Error
from .verdicts import FilterReport, Verdict
from .weil_polynomial import cyclotomic_split, iter_weil_lines, parse_weil_line


logger = logging.getLogger(__name__)

SUITES = ("k3", "cubic")

Line = Tuple[int, str]
Outcome = Tuple[int, Optional[FilterReport], Optional[str]]


@dataclass
class BatchResult:
    """Отчёты в порядке входа, пропущенные строки и итоги"""

    reports: List[FilterReport] = field(default_factory=list)
    skipped: List[Tuple[int, str]] = field(default_factory=list)

    @property
    def tallies(self) -> Counter:
        counts = Counter({v.value: 0 for v in Verdict})
        counts.update(r.overall.value for r in self.reports)
        return counts

    def condition_tallies(self) -> Dict[str, Counter]:
        out: Dict[str, Counter] = {}
        for report in self.reports:
            for name, result in report.conditions.items():
                out.setdefault(name, Counter({v.value: 0 for v in Verdict}))[result.verdict.value] += 1
        return out

    def format_summary(self) -> str:
        t = self.tallies
        lines = [f"# total={len(self.reports)} PASS={t['PASS']} FAIL={t['FAIL']} "
                 f"UNKNOWN={t['UNKNOWN']} skipped={len(self.skipped)}"]
        for name, c in self.condition_tallies().items():
            lines.append(f"# cond:{name} PASS={c['PASS']} FAIL={c['FAIL']} UNKNOWN={c['UNKNOWN']}")
        for line_no, message in self.skipped:
            lines.append(f"# skipped line {line_no}: {message}")
        return "\n".join(lines)

    def format_stream(self, fmt: str = "records") -> str:
        if fmt == "table":
            body = [r.format_table() for r in self.reports]
        else:
            body = [r.format_record() for r in self.reports]
        return "\n".join(body + [self.format_summary()]) + "\n"


@dataclass
class PicardStats:
    """Гистограммы rho и rho_bar по входам, прошедшим проверку целочисленности"""

    rho: Counter = field(default_factory=Counter)
    rho_bar: Counter = field(default_factory=Counter)
    purely_transcendental: int = 0
    considered: int = 0
    rejected: int = 0
    skipped: List[Tuple[int, str]] = field(default_factory=list)

    def format(self) -> str:
        lines = [f"# inputs={self.considered} rejected_integrality={self.rejected} "
                 f"skipped={len(self.skipped)}", "rho count"]
        lines += [f"{k} {v}" for k, v in sorted(self.rho.items())]
        lines.append("rho_bar count")
        lines += [f"{k} {v}" for k, v in sorted(self.rho_bar.items())]
        lines.append(f"purely_transcendental {self.purely_transcendental}")
        return "\n".join(lines) + "\n"


# --- воркеры ---

_WORKER_SERVICE: Optional[ConditionService] = None


def _init_worker(config_data: Optional[dict]) -> None:
    global _WORKER_SERVICE
    config = Config.from_dict(config_data) if config_data is not None else None
    _WORKER_SERVICE = ConditionService(config)


def _check_line(service: ConditionService, line_no: int, line: str, suite: str, ks: bool) -> Outcome:
    try:
        W = parse_weil_line(line, ks, line_no)
        if suite == "k3":
            return line_no, service.check_k3_type(W, input_id=line_no), None
        return line_no, service.check_cubic_category_type(W, input_id=line_no), None
    except NcK3Error as e:
        return line_no, None, str(e)


def _check_chunk(args: Tuple[List[Line], str, bool]) -> List[Outcome]:
    lines, suite, ks = args
    return [_check_line(_WORKER_SERVICE, n, line, suite, ks) for n, line in lines]


def _read_input(source: Union[str, Path]) -> str:
    """Путь к файлу или сам текст (если это не существующий путь)"""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and source and Path(source).is_file()):
        return Path(source).read_text(encoding="utf-8")
    return str(source)


class BatchProcessor:
    """Фильтрация файлов многочленов Вейля"""

    def __init__(self, config=None, service: Optional[ConditionService] = None):
        self.logger = logging.getLogger(__name__)
        self.config = config

        # Параметры пакетной обработки из конфигурации
        self.workers = 1
        self.chunk_size = 64
        if config and hasattr(config, 'batch'):
            self.workers = config.batch.get('workers', 1)
            self.chunk_size = config.batch.get('chunk_size', 64)
        env_workers = os.environ.get("NCK3_WORKERS")
        if env_workers:
            self.workers = int(env_workers)

        self.service = service or ConditionService(config)
        self.logger.info(f"BatchProcessor инициализирован: workers={self.workers}, "
                         f"чанк {self.chunk_size} строк")

    def _split_into_chunks(self, lines: List[Line]) -> List[List[Line]]:
        size = max(1, self.chunk_size)
        return [lines[i:i + size] for i in range(0, len(lines), size)]

    def _run(self, lines: List[Line], suite: str, ks: bool, workers: int) -> Iterable[Outcome]:
        if workers <= 1 or len(lines) <= self.chunk_size:
            return [_check_line(self.service, n, line, suite, ks) for n, line in lines]
        chunks = self._split_into_chunks(lines)
        self.logger.info(f"📦 {len(lines)} строк разбито на {len(chunks)} чанков")
        config_data = self.config.to_dict() if isinstance(self.config, Config) else None
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(config_data,)) as executor:
            results = executor.map(_check_chunk, [(c, suite, ks) for c in chunks])
            return [outcome for chunk in results for outcome in chunk]

    def batch_filter(self, source: Union[str, Path], suite: str = "k3", ks: bool = False,
                     workers: Optional[int] = None) -> BatchResult:
        """
        Проверка каждой строки входа набором условий suite

        Args:
            source: путь к файлу или текст в формате "q=<q>; c0,...,c22"
            suite: "k3" или "cubic"
            ks: коэффициенты в формате степени 21 (q L(T) / (1 - T))
            workers: число процессов (по умолчанию из конфигурации)

        Returns:
            BatchResult; идентификатор отчёта - номер строки входа
        """
        if suite not in SUITES:
            raise ValueError(f"неизвестный набор условий {suite!r}, ожидается один из {SUITES}")
        lines = list(iter_weil_lines(_read_input(source)))
        workers = self.workers if workers is None else workers

        result = BatchResult()
        for line_no, report, error in self._run(lines, suite, ks, workers):
            if error is not None:
                self.logger.warning(f"Строка {line_no} пропущена: {error}")
                result.skipped.append((line_no, error))
            else:
                self.logger.debug(f"Строка {line_no}: {report.overall}")
                result.reports.append(report)
        t = result.tallies
        self.logger.info(f"Фильтр {suite}: PASS={t['PASS']} FAIL={t['FAIL']} "
                         f"UNKNOWN={t['UNKNOWN']}, пропущено {len(result.skipped)}")
        return result

    def picard_stats(self, source: Union[str, Path], ks: bool = False) -> PicardStats:
        """Распределение rho, rho_bar и число чисто трансцендентных входов"""
        stats = PicardStats()
        for line_no, line in iter_weil_lines(_read_input(source)):
            try:
                W = parse_weil_line(line, ks, line_no)
            except NcK3Error as e:
                self.logger.warning(f"Строка {line_no} пропущена: {e}")
                stats.skipped.append((line_no, str(e)))
                continue
            if not (W.L * W.q).is_integral():
                stats.rejected += 1
                continue
            split = cyclotomic_split(W)
            stats.considered += 1
            stats.rho[split.rho] += 1
            stats.rho_bar[split.rho_bar] += 1
            if split.rho_bar == 0:
                stats.purely_transcendental += 1
        self.logger.info(f"Статистика Пикара: {stats.considered} входов, "
                         f"чисто трансцендентных {stats.purely_transcendental}")
        return stats


def batch_filter(source: Union[str, Path], suite: str = "k3", ks: bool = False,
                 config=None) -> BatchResult:
    return BatchProcessor(config).batch_filter(source, suite, ks)


def picard_stats(source: Union[str, Path], ks: bool = False, config=None) -> PicardStats:
    return BatchProcessor(config).picard_stats(source, ks)
