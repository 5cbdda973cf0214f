"""
Иерархия исключений nck3

Математические функции бросают исключения; границы сервисов (пакетная
обработка, CLI) ловят NcK3Error, пишут в лог и превращают в вердикт или код
выхода 2.
"""

from typing import Optional


class NcK3Error(Exception):
    """Базовое исключение библиотеки"""


class MalformedPolynomialError(NcK3Error, ValueError):
    """P(0) != 1, неверная степень или нулевой многочлен"""


class UnsupportedFieldError(NcK3Error, ValueError):
    """p не простое, k вне диапазона, несовместимые степени вложения"""


class _LineError(NcK3Error, ValueError):
    """Ошибка разбора с номером строки"""

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"строка {line_no}: {message}"
        super().__init__(message)


class CubicParseError(_LineError):
    """Ошибка разбора файла кубической формы"""


class WeilFormatError(_LineError):
    """Ошибка разбора строки многочлена Вейля"""


class ResourceLimitError(NcK3Error):
    """Расширение поля больше допустимого для полного перебора"""


class ConsistencyError(NcK3Error, ArithmeticError):
    """Нарушена внутренняя арифметическая проверка (признак ошибки в коде)"""


class IntegralityError(NcK3Error, ArithmeticError):
    """Число точек K3-категории не целое: таблица не от кубики"""

    def __init__(self, message: str, n: Optional[int] = None, value=None):
        super().__init__(message)
        self.n = n
        self.value = value


class InfeasibleCountsError(NcK3Error, ValueError):
    """|p_n| > 22: числа точек не согласуются с корнями на единичной окружности"""


class InsufficientDataError(NcK3Error, KeyError):
    """Не хватает чисел точек (например, X_{2n})"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ProjectivityError(NcK3Error, ValueError):
    """(1 - T) не делит L"""
