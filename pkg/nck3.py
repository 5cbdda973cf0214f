"""
nck3 - дзета-функции кубических четырёхмерий и их K3-категорий над конечными полями
"""

import os
import sys
import logging
import argparse
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

# Добавляем src в PATH (разрешено в начале модуля)
src_path = os.path.join(os.path.dirname(__file__), 'src')
if src_path not in sys.path:
    sys.path.insert(0, src_path)

from src.config import Config  # noqa: E402
from src.errors import NcK3Error  # noqa: E402
from src.finite_field import format_field_table, make_field  # noqa: E402
from src.point_counter import (  # noqa: E402
    PointCounter,
    PointCountTable,
    format_count_table,
    load_cubic,
    parse_count_table,
)
from src.nck3_counts import (  # noqa: E402
    ack3_from_cubic,
    check_fano_hilbert,
    cubic_counts_from_weil,
    format_zeta,
    grothendieck_identity_check,
    hilbert_square_counts,
    ack3_rational,
    mukai_from_l_polynomial,
    zeta_assemble,
    zeta_from_mukai,
)
from src.newton_polygon import height_and_ordinarity, newton_polygon  # noqa: E402
from src.condition_service import ConditionService  # noqa: E402
from src.batch_processor import BatchProcessor  # noqa: E402
from src.memory_manager import free_memory  # noqa: E402
from src.rational_poly import format_poly  # noqa: E402
from src.verdicts import ConditionResult, FilterReport, Verdict  # noqa: E402
from src.weil_polynomial import (  # noqa: E402
    WeilPolynomial,
    counts_from_weil,
    cyclotomic_split,
    format_weil,
    is_self_inversive,
    iter_weil_lines,
    ks_convert,
    parse_weil_line,
    roots_on_unit_circle,
    weil_from_counts,
)


DEFAULT_CONFIG = Path(__file__).parent / "config.yaml"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def setup_logging(level: str = "INFO"):
    """Настройка логирования: всё в stderr, stdout только для результатов"""
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stderr)
        ]
    )


# --- разбор аргументов ---

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML-конфигурация (по умолчанию config.yaml рядом со скриптом)")
    common.add_argument("--workers", type=int, help="число процессов (иначе NCK3_WORKERS или конфигурация)")
    common.add_argument("--allow-large", action="store_true", help="снять предел q^n для подсчёта")
    common.add_argument("--strict", action="store_true", help="код выхода 1 при вердикте FAIL")
    common.add_argument("--format", choices=("table", "records"), default="table")
    common.add_argument("--log-level", help="уровень логирования (DEBUG, INFO, ...)")
    return common


def _add_cubic_source(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--cubic", help="файл кубической формы")
    group.add_argument("--counts", help="таблица |X(F_{q^n})|: 'q=<q>', затем 'n count'")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="nck3",
        description="Числа точек и дзета-функции кубических четырёхмерий и их K3-категорий",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("field-table", parents=[common], help="модуль и таблица умножения GF(p^k)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--modulus", help="коэффициенты модуля c0,...,ck (по умолчанию стандартный)")

    p = sub.add_parser("count", parents=[common], help="|X(F_{p^n})| перебором")
    p.add_argument("--cubic", required=True)
    p.add_argument("--ext", type=int, required=True)
    p.add_argument("--affine", action="store_true", help="число нулей в A^6 вместо P^5")

    p = sub.add_parser("count-table", parents=[common], help="|X(F_{p^n})| для n = 1..max-ext")
    p.add_argument("--cubic", required=True)
    p.add_argument("--max-ext", type=int, required=True)

    p = sub.add_parser("ack3", parents=[common], help="|A(F_{p^n})| K3-категории кубики")
    _add_cubic_source(p)
    p.add_argument("--max-ext", type=int, required=True)

    p = sub.add_parser("geom-check", parents=[common], help="препятствия к геометричности")
    _add_cubic_source(p)
    p.add_argument("--max-ext", type=int, required=True)

    hilb = sub.add_parser("hilb", help="квадрат Гильберта K3-категории")
    hilb_sub = hilb.add_subparsers(dest="action", metavar="ACTION")
    hilb_sub.required = True
    p = hilb_sub.add_parser("check", parents=[common], help="Фано = Гильберт и тождество в кольце Гротендика")
    _add_cubic_source(p)
    p.add_argument("--max-ext", type=int, required=True)

    p = sub.add_parser("zeta", parents=[common], help="дзета-функция по многочлену Вейля")
    p.add_argument("--input", required=True)
    p.add_argument("--terms", type=int, default=6)
    p.add_argument("--ks", action="store_true", help="вход в форме степени 21")
    p.add_argument("--mukai", action="store_true", help="через L полного модуля Мукаи (степень 24)")
    p.add_argument("--descending", action="store_true", help="коэффициенты по убыванию степеней, det(F - t Id)")

    weil = sub.add_parser("weil", help="инструменты для многочленов Вейля")
    weil_sub = weil.add_subparsers(dest="action", metavar="ACTION")
    weil_sub.required = True
    p = weil_sub.add_parser("reconstruct", parents=[common], help="L по |A(F_{q^n})|, n = 1..11")
    p.add_argument("--counts", required=True)
    for name, text in (("expand", "числа точек по L"), ("check", "окружность и функциональное уравнение"),
                       ("split", "круговой множитель"), ("newton", "многоугольник Ньютона и высота"),
                       ("convert-ks", "преобразование к форме степени 21 и обратно")):
        p = weil_sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--input", required=True)
        p.add_argument("--ks", action="store_true", help="вход в форме степени 21")
        p.add_argument("--descending", action="store_true", help="коэффициенты по убыванию степеней, det(F - t Id)")
        if name == "expand":
            p.add_argument("--max-ext", type=int, default=4)

    p = sub.add_parser("filter", parents=[common], help="пакетная проверка условий")
    p.add_argument("--suite", choices=("k3", "cubic"), default="k3")
    p.add_argument("--input", required=True)
    p.add_argument("--report", help="записать поток отчётов в файл")
    p.add_argument("--ks", action="store_true", help="вход в форме степени 21")

    stats = sub.add_parser("stats", help="статистика по файлу многочленов")
    stats_sub = stats.add_subparsers(dest="action", metavar="ACTION")
    stats_sub.required = True
    p = stats_sub.add_parser("picard", parents=[common], help="распределение rho и rho_bar")
    p.add_argument("--input", required=True)
    p.add_argument("--ks", action="store_true", help="вход в форме степени 21")
    return parser


# --- сервисы ---

class Services:
    """Сервисы с общей конфигурацией и флагами командной строки"""

    def __init__(self, args: argparse.Namespace):
        path = args.config or (DEFAULT_CONFIG if DEFAULT_CONFIG.exists() else None)
        self.config = Config(path) if path else Config.from_dict({})
        if args.allow_large:
            self.config.set_section_value("counting", "allow_large", True)
        self.counter = PointCounter(self.config)
        self.conditions = ConditionService(self.config, counter=self.counter)
        self.batch = BatchProcessor(self.config, service=self.conditions)
        if args.workers is not None:
            self.counter.workers = args.workers
            self.batch.workers = args.workers


def _cubic_table(services: Services, args, n_max: int) -> PointCountTable:
    if args.cubic:
        return services.counter.count_table(load_cubic(args.cubic), n_max)
    table = parse_count_table(Path(args.counts).read_text(encoding="utf-8"))
    table.require(n_max)
    return PointCountTable(q=table.q, counts={n: table.counts[n] for n in range(1, n_max + 1)})


def _read_weil(path: str, ks: bool, descending: bool = False) -> List[Tuple[int, WeilPolynomial]]:
    """Строки файла многочленов; неверные строки в лог и пропускаются"""
    logger = logging.getLogger(__name__)
    out = []
    for line_no, line in iter_weil_lines(Path(path).read_text(encoding="utf-8")):
        try:
            out.append((line_no, parse_weil_line(line, ks, line_no, descending)))
        except NcK3Error as e:
            logger.warning(f"Строка {line_no} пропущена: {e}")
    return out


def _column_table(header: Tuple[str, ...], rows: Sequence[Tuple]) -> str:
    cells = [tuple(str(c) for c in header)] + [tuple(str(c) for c in row) for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() for row in cells)


def _emit_report(report: FilterReport, fmt: str) -> None:
    print(report.format_record() if fmt == "records" else report.format_table())


def _verdict_exit(verdicts: Sequence[Verdict], strict: bool) -> int:
    return EXIT_FAIL if strict and Verdict.FAIL in verdicts else EXIT_OK


# --- команды ---

def cmd_field_table(services: Services, args) -> int:
    modulus = [int(c) for c in args.modulus.split(",")] if args.modulus else None
    limit = services.config.fields.get("table_limit", 2 ** 16)
    print(format_field_table(make_field(args.p, args.k, modulus, table_limit=limit)))
    return EXIT_OK


def cmd_count(services: Services, args) -> int:
    form = load_cubic(args.cubic)
    if args.affine:
        print(services.counter.count_affine(form, args.ext))
    else:
        print(services.counter.count_projective(form, args.ext))
    return EXIT_OK


def cmd_count_table(services: Services, args) -> int:
    table = services.counter.count_table(load_cubic(args.cubic), args.max_ext)
    if args.format == "records":
        print(format_count_table(table))
    else:
        print(_column_table(("n", "|X|"), sorted(table.counts.items())))
    return EXIT_OK


def cmd_ack3(services: Services, args) -> int:
    A = ack3_from_cubic(_cubic_table(services, args, args.max_ext))
    if args.format == "records":
        print(format_count_table(PointCountTable(q=A.q, counts=dict(A.counts))))
    else:
        print(_column_table(("n", "|A|"), sorted(A.counts.items())))
    return EXIT_OK


def cmd_geom_check(services: Services, args) -> int:
    if args.cubic:
        report = services.conditions.geom_check(load_cubic(args.cubic), args.max_ext, input_id=args.cubic)
    else:
        report = services.conditions.geom_check_table(_cubic_table(services, args, args.max_ext),
                                                      input_id=args.counts)
    _emit_report(report, args.format)
    return _verdict_exit([report.overall], args.strict)


def cmd_hilb_check(services: Services, args) -> int:
    n_max = args.max_ext
    table = _cubic_table(services, args, 2 * n_max)
    report = FilterReport(input_id=args.cubic or args.counts)
    report.add(check_fano_hilbert(table, n_max))
    report.add(grothendieck_identity_check(table, n_max))
    hilbert = hilbert_square_counts(ack3_rational(table), n_max)
    for n in range(1, n_max + 1):
        report.note(f"hilbert_{n}", hilbert[n])
    _emit_report(report, args.format)
    return _verdict_exit([report.overall], args.strict)


def cmd_zeta(services: Services, args) -> int:
    blocks = []
    for line_no, W in _read_weil(args.input, args.ks, args.descending):
        if args.mukai:
            zeta = zeta_from_mukai(mukai_from_l_polynomial(W), W.q)
        else:
            zeta = zeta_assemble(W, args.terms)
        blocks.append(f"# line {line_no}\n" + format_zeta(zeta, args.terms))
    print("\n".join(blocks))
    return EXIT_OK


def cmd_weil_reconstruct(services: Services, args) -> int:
    counts = parse_count_table(Path(args.counts).read_text(encoding="utf-8"))
    result = weil_from_counts(counts)
    for W in result:
        print(format_weil(W))
    status = "ambiguous" if result.ambiguous else ("none" if not len(result) else "unique")
    print(f"# candidates={len(result)} {status}" + (f": {result.diagnostic}" if result.diagnostic else ""))
    return EXIT_FAIL if args.strict and not len(result) else EXIT_OK


def cmd_weil_expand(services: Services, args) -> int:
    blocks = []
    for line_no, W in _read_weil(args.input, args.ks, args.descending):
        A = counts_from_weil(W, args.max_ext)
        rows = [(n, A.counts[n]) for n in range(1, args.max_ext + 1)]
        if W.k == 1:
            X = cubic_counts_from_weil(W, args.max_ext)
            rows = [(n, a, X.counts[n]) for n, a in rows]
            header = ("n", "|A|", "|X|")
        else:
            header = ("n", "|A|")
        blocks.append(f"# line {line_no} q={W.q}\n" + _column_table(header, rows))
    print("\n".join(blocks))
    return EXIT_OK


def cmd_weil_check(services: Services, args) -> int:
    verdicts = []
    for line_no, W in _read_weil(args.input, args.ks, args.descending):
        report = FilterReport(line_no)
        unit = roots_on_unit_circle(W)
        report.add(ConditionResult("unit_circle", Verdict.PASS if unit else Verdict.FAIL))
        eps = is_self_inversive(W)
        report.add(ConditionResult("functional_equation", Verdict.FAIL if eps is None else Verdict.PASS,
                                   None if eps is None else f"eps={eps:+d}"))
        verdicts.append(report.overall)
        _emit_report(report, args.format)
    return _verdict_exit(verdicts, args.strict)


def cmd_weil_split(services: Services, args) -> int:
    for line_no, W in _read_weil(args.input, args.ks, args.descending):
        split = cyclotomic_split(W)
        factors = ",".join(f"C{n}^{e}" for n, e in split.factors) or "-"
        print(f"id={line_no} rho={split.rho} rho_bar={split.rho_bar} factors={factors} "
              f"L_trc={format_poly(split.L_trc)}")
    return EXIT_OK


def cmd_weil_newton(services: Services, args) -> int:
    for line_no, W in _read_weil(args.input, args.ks, args.descending):
        split = cyclotomic_split(W)
        slopes = newton_polygon(split.L_trc, W.p, W.k).format() if split.L_trc.degree else ""
        height = height_and_ordinarity(split, W.q)
        print(f"id={line_no} slopes={slopes.replace(' ', ',') or '-'} "
              f"height={height.format_height()} ordinary={str(height.ordinary).lower()}")
    return EXIT_OK


def cmd_weil_convert_ks(services: Services, args) -> int:
    for _, W in _read_weil(args.input, args.ks, args.descending):
        # --ks: вход уже степени 21, печатаем L; иначе печатаем q L / (1 - T)
        print(format_weil(W) if args.ks else f"q={W.q}; {format_poly(ks_convert(W))}")
    return EXIT_OK


def cmd_filter(services: Services, args) -> int:
    result = services.batch.batch_filter(Path(args.input), args.suite, args.ks)
    stream = result.format_stream(args.format)
    if args.report:
        Path(args.report).write_text(stream, encoding="utf-8")
        print(result.format_summary())
    else:
        print(stream, end="")
    return _verdict_exit([r.overall for r in result.reports], args.strict)


def cmd_stats_picard(services: Services, args) -> int:
    print(services.batch.picard_stats(Path(args.input), args.ks).format(), end="")
    return EXIT_OK


COMMANDS = {
    ("field-table", None): cmd_field_table,
    ("count", None): cmd_count,
    ("count-table", None): cmd_count_table,
    ("ack3", None): cmd_ack3,
    ("geom-check", None): cmd_geom_check,
    ("hilb", "check"): cmd_hilb_check,
    ("zeta", None): cmd_zeta,
    ("weil", "reconstruct"): cmd_weil_reconstruct,
    ("weil", "expand"): cmd_weil_expand,
    ("weil", "check"): cmd_weil_check,
    ("weil", "split"): cmd_weil_split,
    ("weil", "newton"): cmd_weil_newton,
    ("weil", "convert-ks"): cmd_weil_convert_ks,
    ("filter", None): cmd_filter,
    ("stats", "picard"): cmd_stats_picard,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Главная функция: код выхода 0, 1 (FAIL при --strict) или 2 (ошибка)"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    setup_logging(args.log_level or "WARNING")
    logger = logging.getLogger(__name__)

    try:
        services = Services(args)
        if args.log_level is None:
            logging.getLogger().setLevel(services.config.debug.get("log_level", "WARNING"))
        handler = COMMANDS[(args.command, getattr(args, "action", None))]
        return handler(services, args)
    except NcK3Error as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE
    except (OSError, ValueError) as e:
        logger.error(f"Ошибка входных данных: {e}")
        return EXIT_USAGE
    finally:
        free_memory("nck3")


if __name__ == "__main__":
    sys.exit(main())
